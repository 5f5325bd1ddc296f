//! Hand-differentiated sensitivities of the exact solution as an oracle for
//! the finite-difference sensitivity stencil.
//!
//! With e = 1 - 1/beta, the backward foot of the characteristic through
//! (t, x) is sigma = A^(1/e) with A = -alpha e t + x^e, and the solution is
//! u = (sigma/x)^(1/beta) phi(sigma). Chain-rule partials:
//!
//!   dsigma/dalpha = -t sigma^(1-e)
//!   dsigma/dbeta  = sigma [ (1/e) (dA/dbeta)/A - ln(A) / (e beta)^2 ],
//!                   dA/dbeta = (-alpha t + x^e ln x) / beta^2
//!   du/dalpha = (sigma/x)^(1/beta) [phi'(sigma) + phi(sigma)/(beta sigma)] dsigma/dalpha
//!   du/dbeta  = (sigma/x)^(1/beta) { [phi'(sigma) + phi(sigma)/(beta sigma)] dsigma/dbeta
//!               - phi(sigma) ln(sigma/x) / beta^2 }
//!
//! The smooth bump keeps every term finite, so agreement is limited only by
//! the central-difference truncation of the code under test.

use advectfit_core::analytic::IC_REFERENCE_POINT;
use advectfit_core::uncertainty::analytic_sensitivities;
use advectfit_core::{make_grid, InitialCondition, ParameterVector};

const BUMP_WIDTH_SQ: f64 = 0.005;

fn bump(s: f64) -> f64 {
    let z = s - IC_REFERENCE_POINT;
    (-(z * z) / BUMP_WIDTH_SQ).exp()
}

fn bump_prime(s: f64) -> f64 {
    let z = s - IC_REFERENCE_POINT;
    -2.0 * z / BUMP_WIDTH_SQ * bump(s)
}

/// (du/dalpha, du/dbeta) at (t, x) for the smooth initial condition.
fn symbolic_partials(t: f64, x: f64, theta: &ParameterVector) -> (f64, f64) {
    if t == 0.0 || x <= 0.0 {
        return (0.0, 0.0);
    }
    let (alpha, beta) = (theta.alpha, theta.beta);
    let e = 1.0 - 1.0 / beta;
    let a = -alpha * e * t + x.powf(e);
    if !(a > 0.0) {
        return (0.0, 0.0);
    }
    let sigma = a.powf(1.0 / e);
    if !(sigma > 0.0) {
        return (0.0, 0.0);
    }

    let dsig_dalpha = -t * sigma.powf(1.0 - e);
    let da_dbeta = (-alpha * t + x.powf(e) * x.ln()) / (beta * beta);
    let dsig_dbeta = sigma * (da_dbeta / (e * a) - a.ln() / (e * e * beta * beta));

    let amp = (sigma / x).powf(1.0 / beta);
    let common = bump_prime(sigma) + bump(sigma) / (beta * sigma);
    let du_dalpha = amp * common * dsig_dalpha;
    let du_dbeta =
        amp * (common * dsig_dbeta - bump(sigma) * (sigma / x).ln() / (beta * beta));
    (du_dalpha, du_dbeta)
}

#[test]
fn finite_differences_match_symbolic_partials() {
    let grid = make_grid(6, 21).unwrap();
    for theta in [
        ParameterVector::new(0.3, 0.4),
        ParameterVector::new(0.7, 1.6),
        ParameterVector::new(1.2, 0.7),
        ParameterVector::new(0.45, 1.15),
    ] {
        let sens = analytic_sensitivities(&theta, &grid, InitialCondition::Continuous).unwrap();
        assert!(!sens.one_sided[0] && !sens.one_sided[1]);

        let n = grid.positions.len();
        let mut largest = [0.0_f64; 2];
        for (row, &t) in grid.times.iter().enumerate() {
            for (col, &x) in grid.positions.iter().enumerate() {
                let (da, db) = symbolic_partials(t, x, &theta);
                let exact = [da, db];
                for k in 0..2 {
                    let fd = sens.columns[[row * n + col, k]];
                    let diff = (fd - exact[k]).abs();
                    largest[k] = largest[k].max(exact[k].abs());
                    assert!(
                        diff <= 5e-6 * (1.0 + exact[k].abs()),
                        "theta = ({}, {}), t = {t}, x = {x}, k = {k}: fd {fd} vs symbolic {}",
                        theta.alpha,
                        theta.beta,
                        exact[k]
                    );
                }
            }
        }
        // The stencil should actually be probing a varying field, not zeros.
        assert!(largest[0] > 1e-3 && largest[1] > 1e-3);
    }
}

#[test]
fn sensitivities_vanish_at_time_zero() {
    let grid = make_grid(4, 11).unwrap();
    let theta = ParameterVector::new(0.8, 0.9);
    let sens = analytic_sensitivities(&theta, &grid, InitialCondition::Continuous).unwrap();
    let n = grid.positions.len();
    for col in 0..n {
        for k in 0..2 {
            assert_eq!(sens.columns[[col, k]], 0.0, "t = 0 row must be theta-free");
        }
    }
}
