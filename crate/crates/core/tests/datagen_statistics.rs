//! Statistical and reproducibility properties of the synthetic data
//! generator: the noise must be exactly seed-reproducible, scale linearly
//! with eta entry by entry, and pass distribution-level checks (mean,
//! variance, Kolmogorov-Smirnov) against N(0, eta^2).

use advectfit_core::analytic::analytic_solution_matrix;
use advectfit_core::datagen::{generate, read_csv, write_csv};
use advectfit_core::{make_grid, InitialCondition, ParameterVector};
use statrs::distribution::{ContinuousCDF, Normal};

const THETA0: ParameterVector = ParameterVector {
    alpha: 0.3,
    beta: 0.5,
};

#[test]
fn same_seed_reproduces_bitwise() {
    let grid = make_grid(6, 31).unwrap();
    let a = generate(&THETA0, &grid, 0.1, 99, InitialCondition::Discontinuous);
    let b = generate(&THETA0, &grid, 0.1, 99, InitialCondition::Discontinuous);
    assert_eq!(a.y, b.y);
    let c = generate(&THETA0, &grid, 0.1, 100, InitialCondition::Discontinuous);
    assert_ne!(a.y, c.y);
}

#[test]
fn noise_scales_linearly_with_eta() {
    // Entry (i, j) draws the same unit normal regardless of eta, so the
    // residual fields are exact scalar multiples.
    let grid = make_grid(6, 21).unwrap();
    let ic = InitialCondition::Continuous;
    let u0 = analytic_solution_matrix(&THETA0, &grid, ic);
    let y1 = generate(&THETA0, &grid, 0.1, 4242, ic);
    let y2 = generate(&THETA0, &grid, 0.3, 4242, ic);
    for ((a, b), u) in y1.y.iter().zip(y2.y.iter()).zip(u0.iter()) {
        let (r1, r2) = (a - u, b - u);
        assert!((r2 - 3.0 * r1).abs() <= 1e-12 * (1.0 + r1.abs()));
    }
}

#[test]
fn zero_eta_is_exactly_the_analytic_solution() {
    let grid = make_grid(6, 11).unwrap();
    let ic = InitialCondition::Discontinuous;
    let ds = generate(&THETA0, &grid, 0.0, 1, ic);
    let u0 = analytic_solution_matrix(&THETA0, &grid, ic);
    assert_eq!(ds.y, u0);
}

#[test]
fn sample_moments_match_the_noise_law() {
    let grid = make_grid(6, 101).unwrap();
    let ic = InitialCondition::Continuous;
    let u0 = analytic_solution_matrix(&THETA0, &grid, ic);
    let eta = 0.5;
    let mn = (grid.m() * grid.n()) as f64;
    for seed in 1..=8u64 {
        let ds = generate(&THETA0, &grid, eta, seed, ic);
        let resid: Vec<f64> = ds.y.iter().zip(u0.iter()).map(|(y, u)| y - u).collect();
        let mean = resid.iter().sum::<f64>() / mn;
        let var = resid.iter().map(|r| r * r).sum::<f64>() / mn;
        assert!(
            mean.abs() <= 4.0 * eta / mn.sqrt(),
            "seed {seed}: sample mean {mean} too far from zero"
        );
        assert!(
            (0.75..=1.25).contains(&(var / (eta * eta))),
            "seed {seed}: sample variance {var} inconsistent with eta^2"
        );
    }
}

#[test]
fn residuals_pass_kolmogorov_smirnov() {
    let grid = make_grid(6, 101).unwrap();
    let ic = InitialCondition::Continuous;
    let u0 = analytic_solution_matrix(&THETA0, &grid, ic);
    let eta = 0.5;
    let ds = generate(&THETA0, &grid, eta, 31337, ic);
    let mut z: Vec<f64> = ds
        .y
        .iter()
        .zip(u0.iter())
        .map(|(y, u)| (y - u) / eta)
        .collect();
    z.sort_by(f64::total_cmp);

    let normal = Normal::new(0.0, 1.0).unwrap();
    let n = z.len() as f64;
    let mut d = 0.0_f64;
    for (i, &v) in z.iter().enumerate() {
        let cdf = normal.cdf(v);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((cdf - lo).abs()).max((hi - cdf).abs());
    }
    // 1% asymptotic critical value of the KS statistic.
    assert!(
        d * n.sqrt() <= 1.63,
        "KS statistic {d} rejects normality at the 1% level"
    );
}

#[test]
fn csv_round_trip_preserves_data_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.csv");
    let grid = make_grid(6, 11).unwrap();
    let ds = generate(&THETA0, &grid, 0.1, 7, InitialCondition::Discontinuous);
    write_csv(&ds, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.grid.times, ds.grid.times);
    assert_eq!(back.grid.positions, ds.grid.positions);
    assert_eq!(back.y, ds.y);
    let p = back.provenance().unwrap();
    assert_eq!(p.seed, 7);
    assert_eq!(p.eta, 0.1);
    assert_eq!(p.theta0, THETA0);
}
