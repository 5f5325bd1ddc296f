//! Marching schemes for the transport equation, data-grid sampling, and
//! order-of-convergence regression.
//!
//! All four schemes share one conservative update on the node-centred grid
//! x_j = j h (j = 0..n, n = 1/h):
//!
//! ```text
//! u_j^{m+1} = u_j^m - (dt/h) (F_{j+1/2} - F_{j-1/2})
//! ```
//!
//! with nodal fluxes f_j = g(x_j) u_j and edge Courant numbers
//! nu_e = (dt/h) g(x_e). The edge flux F_{j+1/2} is
//!
//! * upwind:        f_j
//! * Lax-Wendroff:  f_j + (1 - nu_e)/2 * (f_{j+1} - f_j)
//! * Beam-Warming:  f_j + (1 - nu_e)/2 * (f_j - f_{j-1})
//! * flux-limited:  f_j + (1 - nu_e)/2 * vanleer(f_j - f_{j-1}, f_{j+1} - f_j)
//!
//! where vanleer(s, d) = 2 s d / (s + d) when s d > 0, else 0. Working with
//! flux differences (rather than field differences) keeps the second-order
//! members genuinely second order under a variable speed: the correction
//! term reproduces the (dt^2/2) (g (g u)_x)_x term of the Taylor expansion.
//!
//! The transport speed vanishes at the inflow boundary, so f_0 = 0 always;
//! the ghost flux below the boundary is 0 and the boundary node itself is
//! pinned to 0 once marching starts. Outflow uses a linear-extrapolation
//! ghost node, with edge speeds probed just outside the domain clamped to
//! g(1).

use serde::{Deserialize, Serialize};

use ndarray::Array2;

use crate::analytic::{advection_speed, evaluate_ic, InitialCondition, ParameterVector};
use crate::datagen::DataGrid;
use crate::error::{CoreError, Result};

/// The seven-level step ladder h_i = 1 / (10 * 2^(i-1)).
pub const H_LADDER: [f64; 7] = [
    1.0 / 10.0,
    1.0 / 20.0,
    1.0 / 40.0,
    1.0 / 80.0,
    1.0 / 160.0,
    1.0 / 320.0,
    1.0 / 640.0,
];

/// Courant number targeted by [`SolverConfig::standard`].
pub const DEFAULT_COURANT: f64 = 0.8;

/// Cap on the time step, active when the advection speed is tiny.
pub const MAX_TIME_STEP: f64 = 0.1;

/// Relative tolerance used when matching stored slice times.
const TIME_MATCH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Upwind,
    LaxWendroff,
    BeamWarming,
    /// Upwind flux with the Van Leer high-resolution correction.
    UpwindFluxLimited,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Upwind,
        SchemeKind::LaxWendroff,
        SchemeKind::BeamWarming,
        SchemeKind::UpwindFluxLimited,
    ];

    /// Short label used in file names and CLI flags.
    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Upwind => "upwind",
            SchemeKind::LaxWendroff => "lw",
            SchemeKind::BeamWarming => "bw",
            SchemeKind::UpwindFluxLimited => "upwind-fl",
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "upwind" => Ok(SchemeKind::Upwind),
            "lw" | "lax-wendroff" => Ok(SchemeKind::LaxWendroff),
            "bw" | "beam-warming" => Ok(SchemeKind::BeamWarming),
            "upwind-fl" | "flux-limited" => Ok(SchemeKind::UpwindFluxLimited),
            other => Err(format!(
                "unknown scheme {other:?} (expected upwind, lw, bw, or upwind-fl)"
            )),
        }
    }
}

/// Solver resolution and scheme selection. `lambda` is the Courant ratio:
/// the nominal time step is k = lambda * h, additionally capped at
/// [`MAX_TIME_STEP`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub h: f64,
    pub lambda: f64,
    pub scheme: SchemeKind,
}

impl SolverConfig {
    /// Courant-targeted configuration: lambda = courant / g(1; theta), so the
    /// march runs at the requested Courant number for every theta. Degenerate
    /// alpha = 0 yields an unbounded lambda; the [`MAX_TIME_STEP`] cap keeps
    /// the step finite.
    pub fn with_courant(
        h: f64,
        scheme: SchemeKind,
        theta: &ParameterVector,
        courant: f64,
    ) -> Self {
        let gmax = advection_speed(1.0, theta).unwrap_or(0.0);
        let lambda = if gmax > 0.0 {
            courant / gmax
        } else {
            f64::INFINITY
        };
        Self { h, lambda, scheme }
    }

    /// [`Self::with_courant`] at the default Courant number 0.8.
    pub fn standard(h: f64, scheme: SchemeKind, theta: &ParameterVector) -> Self {
        Self::with_courant(h, scheme, theta, DEFAULT_COURANT)
    }
}

/// A marched space-time field: node coordinates, stored slices at the
/// requested output times, and provenance.
#[derive(Debug, Clone)]
pub struct SolutionGrid {
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    pub slices: Vec<Vec<f64>>,
    pub theta: ParameterVector,
    pub scheme: SchemeKind,
    pub h: f64,
    pub steps_taken: usize,
    /// Time integral of the flux through the first edge (x = h/2), the inflow
    /// boundary of the marched mass. Identically zero for every scheme except
    /// Lax-Wendroff, whose centred correction peeks downwind.
    pub inflow_flux_integral: f64,
    /// Time integral of the flux through the last edge (above node n).
    pub outflow_flux_integral: f64,
}

impl SolutionGrid {
    /// Stored slice at time `t`, matched within a relative tolerance.
    pub fn slice_at(&self, t: f64) -> Option<&[f64]> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= TIME_MATCH_EPS * (1.0 + t.abs()))
            .map(|i| self.slices[i].as_slice())
    }

    /// Discrete mass h * sum of interior and outflow nodes (j = 1..n).
    pub fn mass(&self, slice_index: usize) -> f64 {
        self.h * self.slices[slice_index][1..].iter().sum::<f64>()
    }
}

/// Solver output interpolated onto a data grid as an M x N matrix.
#[derive(Debug, Clone)]
pub struct SampledSolution {
    pub u: Array2<f64>,
}

/// March the selected scheme from phi on the solver grid and record the field
/// at each requested output time.
///
/// Output times must be sorted and lie in [0, 10]. When a uniform step would
/// overshoot a requested time, one truncated step lands exactly on it. The
/// Courant number is validated before stepping; a non-finite field during the
/// march reports the scheme and step index.
pub fn solve(
    theta: &ParameterVector,
    config: &SolverConfig,
    ic: InitialCondition,
    output_times: &[f64],
) -> Result<SolutionGrid> {
    solve_with_profile(theta, config, |x| evaluate_ic(x, ic), output_times)
}

/// [`solve`] over an arbitrary initial profile.
pub fn solve_with_profile(
    theta: &ParameterVector,
    config: &SolverConfig,
    profile: impl Fn(f64) -> f64,
    output_times: &[f64],
) -> Result<SolutionGrid> {
    if !(config.h > 0.0) || !config.h.is_finite() {
        return Err(CoreError::Config(format!(
            "spatial step must be positive and finite, got {}",
            config.h
        )));
    }
    if output_times.is_empty() {
        return Err(CoreError::Config("no output times requested".into()));
    }
    for w in output_times.windows(2) {
        if w[1] < w[0] {
            return Err(CoreError::Config("output times must be sorted".into()));
        }
    }
    let t_first = output_times[0];
    let t_last = *output_times.last().unwrap();
    if t_first < 0.0 || t_last > 10.0 + 1e-9 {
        return Err(CoreError::Config(format!(
            "output times must lie in [0, 10], got range [{t_first}, {t_last}]"
        )));
    }

    // Node count; h must (up to rounding) partition the unit interval.
    let n = (1.0 / config.h).round() as usize;
    if n < 2 {
        return Err(CoreError::Config(format!(
            "spatial step {} leaves fewer than 3 nodes on [0, 1]",
            config.h
        )));
    }
    if (n as f64 * config.h - 1.0).abs() > 1e-6 {
        return Err(CoreError::Config(format!(
            "spatial step {} does not partition the unit interval",
            config.h
        )));
    }
    let h = 1.0 / n as f64;

    // Nominal step and CFL validation on the effective step.
    let k = (config.lambda * h).min(MAX_TIME_STEP);
    if !(k > 0.0) {
        return Err(CoreError::Config(format!(
            "time step k = min(lambda h, {MAX_TIME_STEP}) must be positive, got {k}"
        )));
    }
    let gmax = advection_speed(1.0, theta)?;
    let courant = k / h * gmax;
    if courant > 1.0 + 1e-12 {
        return Err(CoreError::CflViolation { courant });
    }

    // Precompute node positions and speeds; edges clamp to the domain.
    let x: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
    let g_node: Vec<f64> = x
        .iter()
        .map(|&xj| advection_speed(xj, theta))
        .collect::<Result<_>>()?;
    let g_edge: Vec<f64> = (0..=n)
        .map(|j| advection_speed(((j as f64 + 0.5) * h).min(1.0), theta))
        .collect::<Result<_>>()?;

    let mut u: Vec<f64> = x.iter().map(|&xj| profile(xj)).collect();
    // Nodal fluxes with one ghost on each side: f[0] is the ghost below the
    // inflow boundary, f[1 + j] pairs with node j, f[n + 2] is the outflow
    // extrapolation ghost.
    let mut f = vec![0.0_f64; n + 3];
    let mut flux = vec![0.0_f64; n + 1];

    let mut slices: Vec<Vec<f64>> = Vec::with_capacity(output_times.len());
    let mut times: Vec<f64> = Vec::with_capacity(output_times.len());
    let mut steps_taken = 0usize;
    let mut inflow_int = 0.0;
    let mut outflow_int = 0.0;
    let mut t = 0.0_f64;

    for &target in output_times {
        while t < target - 1e-12 {
            let remaining = target - t;
            let (dt, lands) = if remaining <= k * (1.0 + 1e-9) {
                (remaining, true)
            } else {
                (k, false)
            };

            // Nodal fluxes and ghosts.
            for j in 0..=n {
                f[j + 1] = g_node[j] * u[j];
            }
            f[0] = 0.0;
            f[n + 2] = g_node[n] * (2.0 * u[n] - u[n - 1]);

            let r = dt / h;
            for j in 0..=n {
                let nu = r * g_edge[j];
                let fj = f[j + 1];
                flux[j] = match config.scheme {
                    SchemeKind::Upwind => fj,
                    SchemeKind::LaxWendroff => fj + 0.5 * (1.0 - nu) * (f[j + 2] - fj),
                    SchemeKind::BeamWarming => fj + 0.5 * (1.0 - nu) * (fj - f[j]),
                    SchemeKind::UpwindFluxLimited => {
                        let s = fj - f[j];
                        let d = f[j + 2] - fj;
                        let sd = s * d;
                        let delta = if sd > 0.0 { 2.0 * sd / (s + d) } else { 0.0 };
                        fj + 0.5 * (1.0 - nu) * delta
                    }
                };
            }

            let mut sum = 0.0;
            for j in 1..=n {
                u[j] -= r * (flux[j] - flux[j - 1]);
                sum += u[j];
            }
            // Inflow node: g(0) = 0 admits no mass; pin the boundary value.
            u[0] = 0.0;

            inflow_int += dt * flux[0];
            outflow_int += dt * flux[n];
            steps_taken += 1;

            if !sum.is_finite() {
                return Err(CoreError::Divergence {
                    scheme: config.scheme,
                    step: steps_taken,
                });
            }

            t = if lands { target } else { t + dt };
        }
        times.push(target);
        slices.push(u.clone());
    }

    Ok(SolutionGrid {
        x,
        times,
        slices,
        theta: *theta,
        scheme: config.scheme,
        h,
        steps_taken,
        inflow_flux_integral: inflow_int,
        outflow_flux_integral: outflow_int,
    })
}

/// Shape-preserving piecewise-cubic interpolant on a uniform grid
/// (Fritsch-Carlson slopes). Exact at the nodes and for linear data; third
/// order accurate on smooth data.
struct Pchip<'a> {
    h: f64,
    values: &'a [f64],
    slopes: Vec<f64>,
}

impl<'a> Pchip<'a> {
    fn new(h: f64, values: &'a [f64]) -> Self {
        let n = values.len();
        debug_assert!(n >= 3);
        let mut secants = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            secants.push((values[j + 1] - values[j]) / h);
        }
        let mut slopes = vec![0.0; n];
        for j in 1..n - 1 {
            let (s0, s1) = (secants[j - 1], secants[j]);
            slopes[j] = if s0 * s1 > 0.0 {
                2.0 * s0 * s1 / (s0 + s1)
            } else {
                0.0
            };
        }
        slopes[0] = Self::endpoint(secants[0], secants[1]);
        slopes[n - 1] = Self::endpoint(secants[n - 2], secants[n - 3]);
        Self { h, values, slopes }
    }

    /// Three-point one-sided slope with the usual monotonicity clamps:
    /// `near` is the secant of the boundary interval, `far` the next one in.
    fn endpoint(near: f64, far: f64) -> f64 {
        let d = (3.0 * near - far) / 2.0;
        if d * near <= 0.0 {
            0.0
        } else if near * far < 0.0 && d.abs() > 3.0 * near.abs() {
            3.0 * near
        } else {
            d
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let idx = ((x / self.h).floor() as isize).clamp(0, n as isize - 2) as usize;
        let xi = (x - idx as f64 * self.h) / self.h;
        let (y0, y1) = (self.values[idx], self.values[idx + 1]);
        let (d0, d1) = (self.slopes[idx] * self.h, self.slopes[idx + 1] * self.h);
        let xi2 = xi * xi;
        let xi3 = xi2 * xi;
        y0 * (2.0 * xi3 - 3.0 * xi2 + 1.0)
            + d0 * (xi3 - 2.0 * xi2 + xi)
            + y1 * (3.0 * xi2 - 2.0 * xi3)
            + d1 * (xi3 - xi2)
    }
}

/// Interpolate each stored slice onto the data grid's positions with the
/// shape-preserving cubic. Every data time must have a stored slice.
pub fn sample_to_data_grid(solution: &SolutionGrid, grid: &DataGrid) -> Result<SampledSolution> {
    let mut u = Array2::zeros((grid.m(), grid.n()));
    for (i, &t) in grid.times.iter().enumerate() {
        let slice = solution
            .slice_at(t)
            .ok_or(CoreError::MissingSlice { t })?;
        let interp = Pchip::new(solution.h, slice);
        for (j, &x) in grid.positions.iter().enumerate() {
            u[[i, j]] = interp.eval(x);
        }
    }
    Ok(SampledSolution { u })
}

/// Entrywise 1-norm distance between the sampled solution and a reference
/// matrix (the vectorized-matrix 1-norm).
pub fn l1_error(sampled: &SampledSolution, reference: &Array2<f64>) -> Result<f64> {
    let (r1, c1) = sampled.u.dim();
    let (r2, c2) = reference.dim();
    if (r1, c1) != (r2, c2) {
        return Err(CoreError::ShapeMismatch {
            expected_rows: r2,
            expected_cols: c2,
            rows: r1,
            cols: c1,
        });
    }
    Ok(sampled
        .u
        .iter()
        .zip(reference.iter())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Log-log regression diagnostics for an order estimate.
#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    /// Fitted slope of ln(value) against ln(h): the convergence order.
    pub p: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Ordinary least-squares slope of ln(values) against ln(hs) over the chosen
/// subset (all points when `subset` is `None`). Needs at least 3 usable
/// points and strictly positive values.
pub fn estimate_order(hs: &[f64], values: &[f64], subset: Option<&[usize]>) -> Result<OrderFit> {
    if hs.len() != values.len() {
        return Err(CoreError::Estimation(format!(
            "step and value vectors differ in length: {} vs {}",
            hs.len(),
            values.len()
        )));
    }
    let all: Vec<usize> = (0..hs.len()).collect();
    let idx = subset.unwrap_or(&all);
    if idx.len() < 3 {
        return Err(CoreError::Estimation(format!(
            "order estimation needs at least 3 points, got {}",
            idx.len()
        )));
    }
    let mut pts = Vec::with_capacity(idx.len());
    for &i in idx {
        if i >= hs.len() {
            return Err(CoreError::Estimation(format!(
                "subset index {i} out of range for {} points",
                hs.len()
            )));
        }
        if !(hs[i] > 0.0) || !(values[i] > 0.0) {
            return Err(CoreError::Estimation(format!(
                "order estimation needs positive steps and values, got (h, v) = ({}, {})",
                hs[i], values[i]
            )));
        }
        pts.push((hs[i].ln(), values[i].ln()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(CoreError::Estimation(
            "degenerate step ladder (all h equal)".into(),
        ));
    }
    let p = (n * sxy - sx * sy) / denom;
    let intercept = (sy - p * sx) / n;
    let mean_y = sy / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (lx, ly) in &pts {
        let pred = intercept + p * lx;
        ss_res += (ly - pred) * (ly - pred);
        ss_tot += (ly - mean_y) * (ly - mean_y);
    }
    let r_squared = if ss_tot <= 1e-300 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(OrderFit {
        p,
        intercept,
        r_squared,
        n_points: pts.len(),
    })
}
