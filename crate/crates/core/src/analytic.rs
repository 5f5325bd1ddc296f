//! Closed-form ground truth for the variable-speed transport model.
//!
//! The model is the scalar conservation law
//!
//! ```text
//! u_t + (g(x) u)_x = 0,   g(x) = alpha * x^(1/beta),   (t, x) in [0,10] x [0,1]
//! ```
//!
//! with inflow boundary x = 0 (g(0) = 0, so no mass enters). Characteristics
//! are available in closed form, which yields an exact solution operator for
//! any profile transported from the left part of the domain. Two initial
//! profiles are supported: a step of height 5 with its edge at x = 0.2 and a
//! narrow Gaussian bump centred at x = 0.2.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::datagen::DataGrid;
use crate::error::{CoreError, Result};

/// Edge of the step profile and centre of the Gaussian profile.
pub const IC_REFERENCE_POINT: f64 = 0.2;

/// Height of the discontinuous step profile.
pub const STEP_HEIGHT: f64 = 5.0;

/// Squared width of the Gaussian profile.
pub const BUMP_WIDTH_SQ: f64 = 0.005;

/// Width of the dedicated beta = 1 branch of the characteristic map.
const BETA_ONE_EPS: f64 = 1e-6;

/// Below this, g is treated as identically zero on [0, 1) (the exponent
/// 1/beta overflows and the transport field degenerates to "frozen").
const BETA_FLOOR: f64 = 1e-9;

/// Transport parameters theta = (alpha, beta).
///
/// `alpha` scales the advection speed and `beta` is the root exponent in
/// g(x) = alpha * x^(1/beta). The model assumes both positive; optimization
/// searches the closed admissible box [0, 10]^2 and every operation stays
/// finite on it, including the degenerate edges alpha = 0 and beta = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    pub alpha: f64,
    pub beta: f64,
}

impl ParameterVector {
    pub const ADMISSIBLE_MIN: f64 = 0.0;
    pub const ADMISSIBLE_MAX: f64 = 10.0;

    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// Both components inside the admissible optimization box [0, 10]^2.
    pub fn is_admissible(&self) -> bool {
        let ok = |v: f64| (Self::ADMISSIBLE_MIN..=Self::ADMISSIBLE_MAX).contains(&v);
        ok(self.alpha) && ok(self.beta)
    }

    /// Componentwise clamp onto the admissible box.
    pub fn clamped(&self) -> Self {
        Self {
            alpha: self.alpha.clamp(Self::ADMISSIBLE_MIN, Self::ADMISSIBLE_MAX),
            beta: self.beta.clamp(Self::ADMISSIBLE_MIN, Self::ADMISSIBLE_MAX),
        }
    }

    /// Euclidean distance to another parameter vector.
    pub fn distance(&self, other: &ParameterVector) -> f64 {
        let da = self.alpha - other.alpha;
        let db = self.beta - other.beta;
        da.hypot(db)
    }
}

/// Initial profile selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// Step of height 5 on x <= 0.2, zero beyond.
    Discontinuous,
    /// Gaussian bump exp(-(x - 0.2)^2 / 0.005), peak value 1 at x = 0.2.
    Continuous,
}

impl InitialCondition {
    /// Short label used in file names and CLI flags ("d" / "c").
    pub fn label(&self) -> &'static str {
        match self {
            InitialCondition::Discontinuous => "d",
            InitialCondition::Continuous => "c",
        }
    }
}

impl std::fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A point of the space-time domain T x X = [0,10] x [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub t: f64,
    pub x: f64,
}

impl SpaceTimePoint {
    pub fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }

    pub fn is_in_domain(&self) -> bool {
        (0.0..=10.0).contains(&self.t) && (0.0..=1.0).contains(&self.x)
    }
}

/// Advection speed g(x; theta) = alpha * x^(1/beta).
///
/// Monotone nondecreasing on [0, 1] with g(0) = 0. Errors on x < 0; values
/// above 1 are permitted (cell-edge probes just outside the domain clamp on
/// the caller side).
pub fn advection_speed(x: f64, theta: &ParameterVector) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(CoreError::Domain(format!(
            "advection speed needs x >= 0, got {x}"
        )));
    }
    if theta.beta < BETA_FLOOR {
        // Degenerate corner of the admissible box: x^(1/beta) underflows to 0
        // for x < 1 and equals 1 at x = 1.
        return Ok(if x >= 1.0 { theta.alpha } else { 0.0 });
    }
    Ok(theta.alpha * x.powf(1.0 / theta.beta))
}

/// Position at time `t` of the characteristic curve that passes through `x`
/// at time zero.
///
/// Closed form: sigma(t, x) = [alpha (1 - 1/beta) t + x^(1 - 1/beta)]^(beta/(beta-1)),
/// with the exact limit sigma = x * exp(alpha t) on a dedicated branch for
/// |beta - 1| < 1e-6. Satisfies d/dt sigma = g(sigma), sigma(0, x) = x.
///
/// Returns `None` when the curve is out of the domain: for beta > 1 a
/// backward trace can reach the inflow point x = 0 before time |t| elapses
/// (negative bracket base), meaning the sought characteristic had not yet
/// been born from the boundary.
pub fn characteristic(t: f64, x: f64, theta: &ParameterVector) -> Option<f64> {
    if x < 0.0 || x.is_nan() {
        return None;
    }
    let (a, b) = (theta.alpha, theta.beta);
    if b < BETA_FLOOR {
        // Frozen field (see `advection_speed`); curves do not move.
        return Some(x);
    }
    if (b - 1.0).abs() < BETA_ONE_EPS {
        return Some(x * (a * t).exp());
    }
    let e = 1.0 - 1.0 / b;
    let base = a * e * t + x.powf(e);
    if !(base >= 0.0) {
        return None;
    }
    let sigma = base.powf(b / (b - 1.0));
    if sigma.is_nan() {
        None
    } else {
        Some(sigma)
    }
}

/// Initial profile evaluation.
pub fn evaluate_ic(x: f64, ic: InitialCondition) -> f64 {
    match ic {
        InitialCondition::Discontinuous => {
            if x <= IC_REFERENCE_POINT {
                STEP_HEIGHT
            } else {
                0.0
            }
        }
        InitialCondition::Continuous => {
            let z = x - IC_REFERENCE_POINT;
            (-(z * z) / BUMP_WIDTH_SQ).exp()
        }
    }
}

/// Exact solution u(t, x; theta) of the transport equation.
///
/// Along characteristics, u(t, x) = g(sigma) / g(x) * phi(sigma) where sigma
/// is the backward foot `characteristic(-t, x)`; the speed ratio reduces to
/// (sigma / x)^(1/beta), which stays finite for alpha = 0 as well. Points
/// whose backward trace exits through the inflow boundary carry the value 0,
/// and u(t, 0) = 0 for t > 0 by the inflow convention (nothing is advected
/// into x = 0 under g(0) = 0).
pub fn analytic_solution(t: f64, x: f64, theta: &ParameterVector, ic: InitialCondition) -> f64 {
    if t == 0.0 {
        return evaluate_ic(x, ic);
    }
    if x <= 0.0 {
        return if t > 0.0 { 0.0 } else { evaluate_ic(x, ic) };
    }
    if theta.beta < BETA_FLOOR {
        // Frozen transport field on [0, 1); the profile does not move.
        return if x >= 1.0 { 0.0 } else { evaluate_ic(x, ic) };
    }
    match characteristic(-t, x, theta) {
        None => 0.0,
        Some(sigma) => {
            if sigma <= 0.0 {
                return 0.0;
            }
            let ratio = (sigma / x).powf(1.0 / theta.beta);
            ratio * evaluate_ic(sigma, ic)
        }
    }
}

/// Exact solution sampled on a data grid as an M x N matrix.
pub fn analytic_solution_matrix(
    theta: &ParameterVector,
    grid: &DataGrid,
    ic: InitialCondition,
) -> Array2<f64> {
    let mut u = Array2::zeros((grid.m(), grid.n()));
    for (i, &t) in grid.times.iter().enumerate() {
        for (j, &x) in grid.positions.iter().enumerate() {
            u[[i, j]] = analytic_solution(t, x, theta, ic);
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::make_grid;

    const THETA_D: ParameterVector = ParameterVector { alpha: 0.3, beta: 0.5 };

    #[test]
    fn speed_examples() {
        assert_eq!(advection_speed(1.0, &THETA_D).unwrap(), 0.3);
        assert_eq!(advection_speed(0.0, &THETA_D).unwrap(), 0.0);
        let v = advection_speed(0.25, &THETA_D).unwrap();
        assert!((v - 0.01875).abs() < 1e-15, "0.3 * 0.25^2 = 0.01875, got {v}");
        assert!(advection_speed(-0.1, &THETA_D).is_err());
    }

    #[test]
    fn speed_monotone_in_x() {
        let theta = ParameterVector::new(0.7, 1.7);
        let mut prev = 0.0;
        for k in 0..=100 {
            let v = advection_speed(k as f64 / 100.0, &theta).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn characteristic_examples() {
        assert_eq!(characteristic(0.0, 0.5, &THETA_D).unwrap(), 0.5);
        // beta = 1/2 closed form x / (1 - alpha t x)
        let s = characteristic(1.0, 0.5, &THETA_D).unwrap();
        let expect = 0.5 / (1.0 - 0.3 * 1.0 * 0.5);
        assert!((s - expect).abs() < 1e-12, "{s} vs {expect}");
        // beta = 1 limit branch
        let s1 = characteristic(1.0, 0.5, &ParameterVector::new(0.3, 1.0)).unwrap();
        assert!((s1 - 0.5 * 0.3f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn characteristic_out_of_domain_backward() {
        // beta > 1: backward trace falls through the inflow boundary.
        let theta = ParameterVector::new(1.0, 2.0);
        assert!(characteristic(-10.0, 0.01, &theta).is_none());
    }

    #[test]
    fn ic_examples() {
        assert_eq!(evaluate_ic(0.2, InitialCondition::Discontinuous), 5.0);
        assert_eq!(evaluate_ic(0.2001, InitialCondition::Discontinuous), 0.0);
        assert_eq!(evaluate_ic(0.2, InitialCondition::Continuous), 1.0);
        let v = evaluate_ic(0.3, InitialCondition::Continuous);
        assert!((v - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn solution_restriction_at_t0() {
        for ic in [InitialCondition::Discontinuous, InitialCondition::Continuous] {
            for k in 0..=50 {
                let x = k as f64 / 50.0;
                assert_eq!(analytic_solution(0.0, x, &THETA_D, ic), evaluate_ic(x, ic));
            }
        }
    }

    #[test]
    fn solution_zero_below_front_birth() {
        // beta > 1: region swept by characteristics born from x = 0 is zero.
        let theta = ParameterVector::new(1.0, 2.0);
        let birth = characteristic(3.0, 0.0, &theta).unwrap();
        assert!(birth > 0.0);
        let u = analytic_solution(3.0, birth * 0.5, &theta, InitialCondition::Discontinuous);
        assert_eq!(u, 0.0);
    }

    #[test]
    fn solution_inflow_pin() {
        assert_eq!(
            analytic_solution(0.5, 0.0, &THETA_D, InitialCondition::Discontinuous),
            0.0
        );
    }

    #[test]
    fn mass_flux_identity_along_characteristics() {
        // g(sigma) * phi(sigma) = g(x) * u(t, x) wherever u is defined by
        // transport; checked away from x = 0.
        let thetas = [
            ParameterVector::new(0.3, 0.5),
            ParameterVector::new(0.7, 1.4),
            ParameterVector::new(1.2, 0.8),
        ];
        for theta in &thetas {
            for &t in &[0.5, 2.0, 7.5] {
                for k in 1..=20 {
                    let x = 0.05 * k as f64;
                    let Some(sigma) = characteristic(-t, x, theta) else {
                        continue;
                    };
                    if sigma <= 1e-12 {
                        continue;
                    }
                    let u = analytic_solution(t, x, theta, InitialCondition::Continuous);
                    let lhs = advection_speed(sigma, theta).unwrap()
                        * evaluate_ic(sigma, InitialCondition::Continuous);
                    let rhs = advection_speed(x, theta).unwrap() * u;
                    assert!(
                        (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                        "t={t} x={x}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn matrix_matches_pointwise_calls() {
        let grid = make_grid(6, 11).unwrap();
        let u = analytic_solution_matrix(&THETA_D, &grid, InitialCondition::Discontinuous);
        assert_eq!(u.dim(), (6, 11));
        for (i, &t) in grid.times.iter().enumerate() {
            for (j, &x) in grid.positions.iter().enumerate() {
                assert_eq!(
                    u[[i, j]],
                    analytic_solution(t, x, &THETA_D, InitialCondition::Discontinuous)
                );
                assert!(u[[i, j]] >= 0.0);
            }
        }
    }

    #[test]
    fn degenerate_box_corners_stay_finite() {
        let grid = make_grid(6, 11).unwrap();
        for theta in [
            ParameterVector::new(0.0, 0.5),
            ParameterVector::new(0.3, 0.0),
            ParameterVector::new(0.0, 0.0),
            ParameterVector::new(10.0, 10.0),
        ] {
            for ic in [InitialCondition::Discontinuous, InitialCondition::Continuous] {
                let u = analytic_solution_matrix(&theta, &grid, ic);
                assert!(u.iter().all(|v| v.is_finite()), "theta {theta:?} ic {ic:?}");
            }
        }
    }
}
