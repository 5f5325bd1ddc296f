//! Least-squares inverse problem: cost evaluation, bounded derivative-free
//! minimization over the admissible box, exact cost decomposition, and
//! convergence-order studies for the cost and the estimator.

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{analytic_solution_matrix, InitialCondition, ParameterVector};
use crate::datagen::{DataGrid, Dataset};
use crate::error::{CoreError, Result};
use crate::schemes::{
    estimate_order, sample_to_data_grid, solve, OrderFit, SchemeKind, SolverConfig, H_LADDER,
};

/// Exact algebraic split of the numerical cost at (theta, h):
///
/// with a = noise, b = u0(theta0) - u0(theta), c = u0(theta) - u(h, theta),
///
/// ```text
/// a_noise  = mean(a^2)       d_cross = 2 mean(a b)
/// b_model  = mean(b^2)       e_cross = 2 mean(a c)
/// c_numer  = mean(c^2)       f_cross = 2 mean(c b)
/// ```
///
/// and their sum equals the cost J(h, theta) identically.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CostBreakdown {
    pub a_noise: f64,
    pub b_model: f64,
    pub c_numer: f64,
    pub d_cross: f64,
    pub e_cross: f64,
    pub f_cross: f64,
    /// Independently evaluated total cost J(h, theta).
    pub j: f64,
}

impl CostBreakdown {
    pub fn sum(&self) -> f64 {
        self.a_noise + self.b_model + self.c_numer + self.d_cross + self.e_cross + self.f_cross
    }

    /// |A + B + C + D + E + F - J|, zero up to rounding.
    pub fn identity_gap(&self) -> f64 {
        (self.sum() - self.j).abs()
    }
}

/// Settings for the bounded simplex search.
#[derive(Debug, Clone)]
pub struct OptimizerSettings {
    /// Converged when the simplex coordinate spread falls below this.
    pub param_tol: f64,
    /// Converged when the simplex cost spread falls below this.
    pub cost_tol: f64,
    /// Evaluation budget per start.
    pub max_evals: usize,
    /// Half-width of the start box centred at (1, 1); its corners plus the
    /// centre form the five deterministic starts.
    pub start_half_width: f64,
    /// Edge length of the initial simplex.
    pub simplex_step: f64,
    /// Extra start points appended to the deterministic five.
    pub extra_starts: Vec<ParameterVector>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            param_tol: 1e-8,
            cost_tol: 1e-12,
            max_evals: 2000,
            start_half_width: 0.9,
            simplex_step: 0.25,
            extra_starts: Vec::new(),
        }
    }
}

impl OptimizerSettings {
    /// The deterministic multistart list: four corners of the start box plus
    /// its centre, then any extra starts.
    pub fn starts(&self) -> Vec<ParameterVector> {
        let c = 1.0;
        let w = self.start_half_width;
        let mut list = vec![
            ParameterVector::new(c - w, c - w),
            ParameterVector::new(c - w, c + w),
            ParameterVector::new(c + w, c - w),
            ParameterVector::new(c + w, c + w),
            ParameterVector::new(c, c),
        ];
        list.extend(self.extra_starts.iter().copied());
        list.iter().map(|p| p.clamped()).collect()
    }
}

/// Estimate with optimizer diagnostics and solve provenance.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub theta_hat: ParameterVector,
    pub cost: f64,
    pub scheme: SchemeKind,
    pub h: f64,
    /// Total objective evaluations across all starts.
    pub evaluations: usize,
    /// Number of optimizer starts.
    pub starts: usize,
    /// Tolerance attained by the winning start.
    pub converged: bool,
}

/// Mean squared misfit (1/(MN)) sum (y_ij - u_ij)^2.
pub fn ols_cost(y: &Array2<f64>, u: &Array2<f64>) -> Result<f64> {
    let (r1, c1) = y.dim();
    let (r2, c2) = u.dim();
    if (r1, c1) != (r2, c2) {
        return Err(CoreError::ShapeMismatch {
            expected_rows: r1,
            expected_cols: c1,
            rows: r2,
            cols: c2,
        });
    }
    let mn = (r1 * c1) as f64;
    Ok(y.iter()
        .zip(u.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / mn)
}

/// Solver output on the dataset grid: march to the data times and sample the
/// slices onto the data positions.
pub fn numerical_model(
    theta: &ParameterVector,
    scheme: SchemeKind,
    h: f64,
    ic: InitialCondition,
    grid: &DataGrid,
) -> Result<Array2<f64>> {
    let cfg = SolverConfig::standard(h, scheme, theta);
    let sol = solve(theta, &cfg, ic, &grid.times)?;
    Ok(sample_to_data_grid(&sol, grid)?.u)
}

/// One bounded Nelder-Mead descent. Candidate points are clamped onto the
/// admissible box; ordering ties break lexicographically so the trajectory is
/// deterministic. Returns (argmin, min, evaluations, converged).
fn nelder_mead(
    objective: &mut dyn FnMut(&ParameterVector) -> f64,
    start: ParameterVector,
    opts: &OptimizerSettings,
) -> (ParameterVector, f64, usize, bool) {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let clamp = |p: [f64; 2]| ParameterVector::new(p[0], p[1]).clamped();
    let mut evals = 0usize;
    let mut eval = |p: &ParameterVector, evals: &mut usize| {
        *evals += 1;
        let v = objective(p);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: the start plus one offset per coordinate, stepping
    // inward when the outward step leaves the box.
    let mut simplex: Vec<(ParameterVector, f64)> = Vec::with_capacity(3);
    let s0 = start.clamped();
    simplex.push((s0, eval(&s0, &mut evals)));
    for dim in 0..2 {
        let mut p = [s0.alpha, s0.beta];
        let step = if p[dim] + opts.simplex_step <= ParameterVector::ADMISSIBLE_MAX {
            opts.simplex_step
        } else {
            -opts.simplex_step
        };
        p[dim] += step;
        let q = clamp(p);
        simplex.push((q, eval(&q, &mut evals)));
    }

    let order = |s: &mut Vec<(ParameterVector, f64)>| {
        s.sort_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .unwrap()
                .then(a.0.alpha.partial_cmp(&b.0.alpha).unwrap())
                .then(a.0.beta.partial_cmp(&b.0.beta).unwrap())
        });
    };

    let mut converged = false;
    while evals < opts.max_evals {
        order(&mut simplex);
        let spread_a = simplex
            .iter()
            .map(|(p, _)| p.alpha)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let spread_b = simplex
            .iter()
            .map(|(p, _)| p.beta)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let param_spread = (spread_a.1 - spread_a.0).max(spread_b.1 - spread_b.0);
        let cost_spread = simplex[2].1 - simplex[0].1;
        if param_spread < opts.param_tol || cost_spread.abs() < opts.cost_tol {
            converged = true;
            break;
        }

        let best = simplex[0];
        let second = simplex[1];
        let worst = simplex[2];
        let centroid = [
            0.5 * (best.0.alpha + second.0.alpha),
            0.5 * (best.0.beta + second.0.beta),
        ];
        let through = |coef: f64| {
            clamp([
                centroid[0] + coef * (centroid[0] - worst.0.alpha),
                centroid[1] + coef * (centroid[1] - worst.0.beta),
            ])
        };

        let xr = through(REFLECT);
        let fr = eval(&xr, &mut evals);
        if fr < best.1 {
            let xe = through(EXPAND);
            let fe = eval(&xe, &mut evals);
            simplex[2] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second.1 {
            simplex[2] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = through(CONTRACT);
            (xc, eval(&xc, &mut evals))
        } else {
            let xc = through(-CONTRACT);
            (xc, eval(&xc, &mut evals))
        };
        if fc < worst.1.min(fr) {
            simplex[2] = (xc, fc);
            continue;
        }
        // Shrink toward the best vertex.
        for i in 1..3 {
            let p = clamp([
                best.0.alpha + SHRINK * (simplex[i].0.alpha - best.0.alpha),
                best.0.beta + SHRINK * (simplex[i].0.beta - best.0.beta),
            ]);
            let fp = eval(&p, &mut evals);
            simplex[i] = (p, fp);
        }
    }
    order(&mut simplex);
    (simplex[0].0, simplex[0].1, evals, converged)
}

/// Minimize an objective over the admissible box with the deterministic
/// multistart policy; best of all starts wins (ties break lexicographically
/// in theta).
pub fn minimize(
    objective: impl Fn(&ParameterVector) -> f64 + Sync,
    opts: &OptimizerSettings,
) -> (ParameterVector, f64, usize, usize, bool) {
    minimize_with_starts(objective, &opts.starts(), opts)
}

/// Same descent with an explicit start list.
pub fn minimize_with_starts(
    objective: impl Fn(&ParameterVector) -> f64 + Sync,
    starts: &[ParameterVector],
    opts: &OptimizerSettings,
) -> (ParameterVector, f64, usize, usize, bool) {
    let mut total_evals = 0usize;
    let mut best: Option<(ParameterVector, f64, bool)> = None;
    for start in starts {
        let mut obj = |p: &ParameterVector| objective(p);
        let (theta, cost, evals, converged) = nelder_mead(&mut obj, *start, opts);
        total_evals += evals;
        let better = match &best {
            None => true,
            Some((bt, bc, _)) => {
                cost < *bc
                    || (cost == *bc
                        && (theta.alpha, theta.beta) < (bt.alpha, bt.beta))
            }
        };
        if better {
            best = Some((theta, cost, converged));
        }
    }
    let (theta, cost, converged) = best.expect("at least one start");
    (theta, cost, total_evals, starts.len(), converged)
}

/// Ordinary least-squares fit of (alpha, beta) by minimizing the numerical
/// cost over the admissible box. Solver failures at probed parameters count
/// as infinite cost (rejected points), not fatal errors.
pub fn fit_ols(
    dataset: &Dataset,
    scheme: SchemeKind,
    h: f64,
    ic: InitialCondition,
    opts: &OptimizerSettings,
) -> Result<FitResult> {
    if !(h > 0.0) {
        return Err(CoreError::Config(format!(
            "spatial step must be positive, got {h}"
        )));
    }
    let objective = |theta: &ParameterVector| match numerical_model(theta, scheme, h, ic, &dataset.grid)
    {
        Ok(u) => ols_cost(&dataset.y, &u).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    };
    let (theta_hat, cost, evaluations, starts, converged) = minimize(objective, opts);
    Ok(FitResult {
        theta_hat,
        cost,
        scheme,
        h,
        evaluations,
        starts,
        converged,
    })
}

/// Exact six-term split of the cost at (theta, h) against the generation
/// truth theta0. Requires synthetic provenance: the realized noise is
/// Y - U0(theta0).
pub fn decompose_cost(
    dataset: &Dataset,
    theta: &ParameterVector,
    theta0: &ParameterVector,
    scheme: SchemeKind,
    h: f64,
    ic: InitialCondition,
) -> Result<CostBreakdown> {
    dataset.provenance()?;
    let u0_true = analytic_solution_matrix(theta0, &dataset.grid, ic);
    let u0_theta = analytic_solution_matrix(theta, &dataset.grid, ic);
    let u = numerical_model(theta, scheme, h, ic, &dataset.grid)?;
    let mn = (dataset.grid.m() * dataset.grid.n()) as f64;

    let mut sums = [0.0_f64; 6];
    for (((&y, &t0), &tt), &un) in dataset
        .y
        .iter()
        .zip(u0_true.iter())
        .zip(u0_theta.iter())
        .zip(u.iter())
    {
        let a = y - t0;
        let b = t0 - tt;
        let c = tt - un;
        sums[0] += a * a;
        sums[1] += b * b;
        sums[2] += c * c;
        sums[3] += 2.0 * a * b;
        sums[4] += 2.0 * a * c;
        sums[5] += 2.0 * c * b;
    }
    let j = ols_cost(&dataset.y, &u)?;
    Ok(CostBreakdown {
        a_noise: sums[0] / mn,
        b_model: sums[1] / mn,
        c_numer: sums[2] / mn,
        d_cross: sums[3] / mn,
        e_cross: sums[4] / mn,
        f_cross: sums[5] / mn,
        j,
    })
}

/// Cost and estimator behaviour across the seven-level step ladder.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub hs: Vec<f64>,
    /// Minimized cost J(h, theta_hat(h)) per ladder level.
    pub costs: Vec<f64>,
    /// Estimator error ||theta_hat(h) - theta0||_2 per ladder level.
    pub theta_errors: Vec<f64>,
    pub fits: Vec<FitResult>,
    /// Cost order from the plateau-excluded subset.
    pub p_j: f64,
    pub p_j_r_squared: f64,
    /// Ladder indices used for the cost-order fit (coarsest-first prefix).
    pub p_j_subset: Vec<usize>,
    /// Set when the whole ladder already sits on the noise plateau; p_j is
    /// reported as 0 in that case.
    pub plateau: bool,
    /// Estimator order over the full ladder (NaN when the errors degenerate).
    pub p_theta: f64,
    pub p_theta_r_squared: f64,
}

/// The whole curve counts as plateau when even the coarsest cost sits
/// within this multiple of eta^2.
const PLATEAU_ENTRY_FACTOR: f64 = 1.4;
/// Prefix fits whose R^2 falls within this margin of the best prefix count
/// as ties; ties resolve toward keeping more ladder points.
const PLATEAU_R2_TIE: f64 = 0.015;

/// Plateau-exclusion policy for the cost order. Once J(h) converges onto
/// the noise floor eta^2 the finest ladder points carry no order
/// information, so the fit uses the coarsest-first prefix (size >= 3) whose
/// log-log regression maximizes R^2, breaking near-ties toward more points.
/// When even J(h_1) <= 1.4 eta^2 the curve is flat from the start; the
/// order is then reported as zero with full-ladder fit diagnostics.
fn plateau_subset(hs: &[f64], costs: &[f64], eta_sq: f64) -> Result<(Vec<usize>, OrderFit, bool)> {
    debug_assert!(hs.windows(2).all(|w| w[1] < w[0]), "ladder must refine");
    if costs.iter().any(|&c| !(c > 0.0)) {
        return Err(CoreError::Estimation(
            "cost order needs strictly positive costs".into(),
        ));
    }
    if costs[0] <= PLATEAU_ENTRY_FACTOR * eta_sq {
        let all: Vec<usize> = (0..hs.len()).collect();
        let fit = estimate_order(hs, costs, None)?;
        return Ok((all, fit, true));
    }
    let prefixes: Vec<(Vec<usize>, OrderFit)> = (3..=hs.len())
        .map(|m| {
            let idx: Vec<usize> = (0..m).collect();
            let fit = estimate_order(hs, costs, Some(&idx))?;
            Ok((idx, fit))
        })
        .collect::<Result<_>>()?;
    let best_r2 = prefixes
        .iter()
        .map(|(_, f)| f.r_squared)
        .fold(f64::NEG_INFINITY, f64::max);
    let (idx, fit) = prefixes
        .into_iter()
        .rev()
        .find(|(_, f)| f.r_squared >= best_r2 - PLATEAU_R2_TIE)
        .expect("at least one prefix");
    Ok((idx, fit, false))
}

/// Fit the dataset at every level of the standard ladder [`H_LADDER`] and
/// regress the cost order p_J (plateau-excluded prefix) and the estimator
/// order p_theta (full ladder).
pub fn cost_order_study(
    dataset: &Dataset,
    scheme: SchemeKind,
    ic: InitialCondition,
    opts: &OptimizerSettings,
) -> Result<ConvergenceStudy> {
    cost_order_study_on(dataset, scheme, ic, opts, &H_LADDER)
}

/// [`cost_order_study`] on a caller-supplied ladder, which must strictly
/// refine and carry at least the 3 levels an order regression needs.
///
/// Every ladder level gets the same full multistart fit, so the recorded
/// J(h) is the attained minimum at that h even when the coarse-grid cost
/// landscape moves its global basin far from the generating truth. Ladder
/// fits run in parallel; each fit is deterministic.
pub fn cost_order_study_on(
    dataset: &Dataset,
    scheme: SchemeKind,
    ic: InitialCondition,
    opts: &OptimizerSettings,
    ladder: &[f64],
) -> Result<ConvergenceStudy> {
    if ladder.len() < 3 {
        return Err(CoreError::Config(format!(
            "order regression needs at least 3 ladder levels, got {}",
            ladder.len()
        )));
    }
    if !ladder.iter().all(|h| h.is_finite() && *h > 0.0)
        || !ladder.windows(2).all(|w| w[1] < w[0])
    {
        return Err(CoreError::Config(
            "step ladder must be positive and strictly decreasing".into(),
        ));
    }
    let prov = dataset.provenance()?;
    let theta0 = prov.theta0;
    let eta_sq = prov.eta * prov.eta;
    let hs: Vec<f64> = ladder.to_vec();
    let fits: Vec<FitResult> = hs
        .par_iter()
        .map(|&h| fit_ols(dataset, scheme, h, ic, opts))
        .collect::<Result<_>>()?;
    let costs: Vec<f64> = fits.iter().map(|f| f.cost).collect();
    let theta_errors: Vec<f64> = fits
        .iter()
        .map(|f| f.theta_hat.distance(&theta0))
        .collect();

    let (p_j_subset, j_fit, plateau) = plateau_subset(&hs, &costs, eta_sq)?;
    let (p_j, p_j_r_squared) = if plateau {
        (0.0, j_fit.r_squared)
    } else {
        (j_fit.p, j_fit.r_squared)
    };

    let usable: Vec<usize> = (0..hs.len())
        .filter(|&i| theta_errors[i] > 1e-14)
        .collect();
    let (p_theta, p_theta_r_squared) = if usable.len() >= 3 {
        let fit = estimate_order(&hs, &theta_errors, Some(&usable))?;
        (fit.p, fit.r_squared)
    } else {
        (f64::NAN, f64::NAN)
    };

    Ok(ConvergenceStudy {
        hs,
        costs,
        theta_errors,
        fits,
        p_j,
        p_j_r_squared,
        p_j_subset,
        plateau,
        p_theta,
        p_theta_r_squared,
    })
}
