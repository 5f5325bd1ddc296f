//! Discretization-aware parameter estimation for a one-dimensional
//! conservative advection model.
//!
//! The forward problem is u_t + (g(x; theta) u)_x = 0 on (0, 10] x [0, 1]
//! with g(x; theta) = alpha x^(1/beta), solved exactly along characteristics
//! ([`analytic`]) and approximately by four conservative finite-volume
//! schemes on a step ladder ([`schemes`]). Synthetic observations
//! ([`datagen`]) feed a least-squares inverse problem ([`estimation`]) whose
//! cost, estimator error, and confidence statements inherit structure from
//! the discretization error; [`uncertainty`] quantifies that inheritance and
//! corrects the confidence machinery for residual autocorrelation.
//!
//! The intended workflow mirrors the numerical experiments the crate was
//! built around:
//!
//! 1. generate data at a truth theta0 with noise level eta,
//! 2. fit theta on each grid of the ladder and regress cost and estimator
//!    convergence orders against the analytic-solution error orders,
//! 3. decompose the fitted cost into noise, model, and numerics terms,
//! 4. report Student-t intervals and a confidence ellipse, with and without
//!    the AR(1) whitening correction.

pub mod analytic;
pub mod datagen;
pub mod error;
pub mod estimation;
pub mod schemes;
pub mod uncertainty;

pub use analytic::{InitialCondition, ParameterVector, SpaceTimePoint};
pub use datagen::{make_grid, DataGrid, Dataset, Provenance};
pub use error::{CoreError, Result};
pub use estimation::{
    cost_order_study, cost_order_study_on, decompose_cost, fit_ols, ols_cost, ConvergenceStudy,
    CostBreakdown, FitResult, OptimizerSettings,
};
pub use schemes::{
    estimate_order, l1_error, sample_to_data_grid, solve, OrderFit, SampledSolution, SchemeKind,
    SolutionGrid, SolverConfig, H_LADDER,
};
pub use uncertainty::{
    confidence_report, fit_autocorrelative, t_quantile, AutocorrFit, AutocorrModel,
    ConfidenceReport, EllipseSpec, FrontLocation,
};
