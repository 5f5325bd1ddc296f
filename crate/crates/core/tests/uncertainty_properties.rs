//! Sampling-level checks of the residual correlation machinery: the per-slice
//! lag-1 estimator must recover known AR(1) coefficients, report near-zero for
//! independent noise, and the whitening transform must actually remove the
//! fitted correlation. Student-t quantiles are checked against an external
//! implementation, and the confidence report against its scaling laws.

use advectfit_core::datagen::generate;
use advectfit_core::uncertainty::{estimate_gammas, locate_fronts, AutocorrModel, FrontLocation};
use advectfit_core::{
    confidence_report, fit_ols, make_grid, t_quantile, InitialCondition, OptimizerSettings,
    ParameterVector, SchemeKind,
};
use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Rows of stationary AR(1) noise with coefficient `gamma_minus` left of the
/// split and `gamma_plus` from the split on, independent across rows.
fn ar1_matrix(
    rows: usize,
    cols: usize,
    split: usize,
    gamma_minus: f64,
    gamma_plus: f64,
    seed: u64,
) -> Array2<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut r = Array2::zeros((rows, cols));
    for i in 0..rows {
        for (start, end, gamma) in [(0usize, split, gamma_minus), (split, cols, gamma_plus)] {
            let mut prev = 0.0;
            for j in start..end {
                let z: f64 = rng.gen_range(-1.0_f64..1.0);
                // Uniform innovations keep the lag-1 law exact and cheap.
                let v = if j == start {
                    z / (1.0 - gamma * gamma).sqrt()
                } else {
                    gamma * prev + z
                };
                r[[i, j]] = v;
                prev = v;
            }
        }
    }
    r
}

fn fronts_at(rows: usize, split: usize) -> Vec<FrontLocation> {
    (0..rows)
        .map(|_| FrontLocation {
            index: split,
            beyond_domain: false,
        })
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn per_slice_estimator_recovers_known_gammas() {
    // One long slice: the lag-1 ratio over 10^4 points pins each gamma to
    // two digits.
    let (cols, split) = (20_001, 10_000);
    let r = ar1_matrix(1, cols, split, 0.7, 0.25, 11);
    let (gm, gp) = estimate_gammas(&r, &fronts_at(1, split));
    assert!((gm[0] - 0.7).abs() <= 0.02, "gamma_minus estimate {}", gm[0]);
    assert!((gp[0] - 0.25).abs() <= 0.02, "gamma_plus estimate {}", gp[0]);

    // Short slices scatter, and the ratio estimator carries an O(1/n)
    // downward bias, so the ensemble mean sits a few percent low but must
    // stay near the truth.
    let (rows, cols, split) = (200, 101, 40);
    let r = ar1_matrix(rows, cols, split, 0.6, 0.25, 11);
    let (gm, gp) = estimate_gammas(&r, &fronts_at(rows, split));
    assert_eq!(gm.len(), rows);
    assert!((mean(&gm) - 0.6).abs() <= 0.10, "mean gamma_minus {}", mean(&gm));
    assert!((mean(&gp) - 0.25).abs() <= 0.10, "mean gamma_plus {}", mean(&gp));
}

#[test]
fn independent_noise_estimates_near_zero() {
    for seed in [3, 5, 8, 13, 21] {
        let r = ar1_matrix(100, 51, 25, 0.0, 0.0, seed);
        let (gm, gp) = estimate_gammas(&r, &fronts_at(100, 25));
        for (name, side) in [("minus", &gm), ("plus", &gp)] {
            // Each row's estimate scatters with std ~ 1/sqrt(pairs) ~ 0.2,
            // so the 100-row mean has std ~ 0.02; 0.06 is a 3 sigma band.
            let m = mean(side);
            assert!(m.abs() <= 0.06, "seed {seed}: {name} ensemble mean {m}");
            // Individual slices scatter with std ~ 1/sqrt(pairs); excursions
            // past 0.35 stay rare.
            let wild = side.iter().filter(|g| g.abs() >= 0.35).count();
            assert!(
                wild * 5 <= side.len(),
                "seed {seed}: {wild} {name} estimates beyond 0.35"
            );
        }
    }
}

#[test]
fn whitening_removes_the_fitted_correlation() {
    let (rows, cols, split) = (200, 101, 40);
    let r = ar1_matrix(rows, cols, split, 0.6, 0.25, 17);
    let fronts = fronts_at(rows, split);
    let (gm, gp) = estimate_gammas(&r, &fronts);
    let model = AutocorrModel {
        fronts,
        gamma_minus: gm,
        gamma_plus: gp,
        n: cols,
    };
    let w = model.whiten_matrix(&r);

    let pooled = |field: &Array2<f64>| {
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..rows {
            for j in 1..cols {
                if j != split {
                    num += field[[i, j]] * field[[i, j - 1]];
                }
                den += field[[i, j]] * field[[i, j]];
            }
        }
        num / den
    };
    let raw = pooled(&r).abs();
    let whitened = pooled(&w).abs();
    assert!(raw > 0.3, "the raw field must be visibly correlated, got {raw}");
    assert!(
        whitened <= 0.03,
        "whitened lag-1 correlation should vanish, got {whitened}"
    );
}

#[test]
fn front_locations_follow_the_estimated_parameters() {
    let times = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0];
    let theta = ParameterVector::new(0.3, 0.5);
    let fronts = locate_fronts(&times, &theta, 11);
    // The discontinuity starts at x = 0.2 and reaches x = 0.5 at t = 10.
    assert_eq!(fronts[0].index, 2);
    assert_eq!(fronts[5].index, 5);
    assert!(fronts.iter().all(|f| !f.beyond_domain));
    let indices: Vec<usize> = fronts.iter().map(|f| f.index).collect();
    let mut sorted = indices.clone();
    sorted.sort_unstable();
    assert_eq!(indices, sorted, "the front only moves right");
}

#[test]
fn t_quantiles_match_external_implementation() {
    for dof in [1usize, 2, 5, 10, 30, 64, 120] {
        let dist = StudentsT::new(0.0, 1.0, dof as f64).unwrap();
        for p in [0.6, 0.9, 0.95, 0.975, 0.995] {
            let ours = t_quantile(p, dof).unwrap();
            let reference = dist.inverse_cdf(p);
            assert!(
                (ours - reference).abs() <= 1e-7 * reference.abs(),
                "dof {dof}, p {p}: {ours} vs {reference}"
            );
        }
    }
}

#[test]
fn confidence_widths_scale_linearly_with_residuals() {
    let grid = make_grid(6, 21).unwrap();
    let ic = InitialCondition::Continuous;
    let theta0 = ParameterVector::new(0.3, 0.4);
    let scheme = SchemeKind::Upwind;
    let h = 0.025;
    let ds = generate(&theta0, &grid, 0.05, 2024, ic);
    let fit = fit_ols(&ds, scheme, h, ic, &OptimizerSettings::default()).unwrap();
    let model = AutocorrModel::identity(grid.m(), grid.n());

    let report = confidence_report(&ds, &fit.theta_hat, &model, scheme, h, ic, 0.95).unwrap();
    assert!(!report.singular);
    for k in 0..2 {
        let [lo, hi] = report.intervals[k];
        let center = 0.5 * (lo + hi);
        let expected = if k == 0 {
            fit.theta_hat.alpha
        } else {
            fit.theta_hat.beta
        };
        assert!((center - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
        assert!((hi - lo - 2.0 * report.half_widths[k]).abs() <= 1e-12);
    }

    // Doubling the residual field (y -> 2y - u at the same theta_hat)
    // quadruples eta_hat^2 and doubles every half-width.
    let u = advectfit_core::estimation::numerical_model(&fit.theta_hat, scheme, h, ic, &grid)
        .unwrap();
    let mut doubled = ds.clone();
    doubled.y = &ds.y * 2.0 - &u;
    let wide = confidence_report(&doubled, &fit.theta_hat, &model, scheme, h, ic, 0.95).unwrap();
    assert!(
        (wide.eta_hat_sq - 4.0 * report.eta_hat_sq).abs() <= 1e-9 * report.eta_hat_sq,
        "eta_hat^2 should quadruple: {} vs {}",
        wide.eta_hat_sq,
        report.eta_hat_sq
    );
    for k in 0..2 {
        assert!(
            (wide.half_widths[k] - 2.0 * report.half_widths[k]).abs()
                <= 1e-9 * report.half_widths[k],
            "half-width {k} should double"
        );
    }

    // A tighter level gives a narrower interval.
    let tight = confidence_report(&ds, &fit.theta_hat, &model, scheme, h, ic, 0.5).unwrap();
    assert!(tight.half_widths[0] < report.half_widths[0]);
    assert!(tight.half_widths[1] < report.half_widths[1]);
}
