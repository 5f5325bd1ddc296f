//! Subcommand implementations plus the small helpers they share.
//!
//! Every command follows the same shape: validate, compute sweep cells on
//! the ambient worker pool, write outputs in a fixed cell order, close with
//! a manifest. Numbers are printed with Rust's shortest round-trip float
//! formatting, so equal values always serialize to equal bytes and a rerun
//! of the same resolved config reproduces every CSV exactly.

pub mod confidence;
pub mod convergence;
pub mod decompose;
pub mod fit;
pub mod generate;

use std::fs;
use std::path::Path;

use advectfit_core::analytic::analytic_solution_matrix;
use advectfit_core::schemes::DEFAULT_COURANT;
use advectfit_core::{
    l1_error, make_grid, sample_to_data_grid, solve, Dataset, InitialCondition, SchemeKind,
    SolverConfig,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;

/// Stable text for a float: shortest round-trip form ("0.1", "1", "NaN").
pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Text for an optional truth flag; empty when the dataset had no provenance
/// to check against.
pub fn flag(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

pub fn dataset_file_name(ic: InitialCondition, n: usize, eta: f64, seed: u64) -> String {
    format!("{}_N{}_eta{}_seed{}.csv", ic.label(), n, num(eta), seed)
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    Ok(advectfit_core::datagen::read_csv(path)?)
}

/// Write `content` under `out`/`relative` and record it in the manifest.
pub fn emit(mb: &mut ManifestBuilder, out: &Path, relative: &str, content: &[u8]) -> Result<()> {
    let path = out.join(relative);
    fs::write(&path, content)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    mb.record_file(relative);
    Ok(())
}

/// The estimation routines march at the standard Courant number internally;
/// a config asking for anything else would report statistics for a march
/// that never ran, so refuse it up front.
pub fn require_standard_courant(cfg: &ExperimentConfig) -> Result<()> {
    if (cfg.courant - DEFAULT_COURANT).abs() > 1e-12 {
        return Err(CliError::Config(format!(
            "the estimation pipeline is pinned to the standard Courant number {DEFAULT_COURANT}; \
             got courant = {} (only `generate` accepts other values)",
            cfg.courant
        )));
    }
    Ok(())
}

/// l1 distances between the marched solution at theta0 and the analytic
/// matrix on the M x N data grid, one entry per ladder level.
pub fn solution_errors(
    cfg: &ExperimentConfig,
    scheme: SchemeKind,
    n: usize,
) -> Result<Vec<f64>> {
    let grid = make_grid(cfg.m, n)?;
    let truth = analytic_solution_matrix(&cfg.theta0, &grid, cfg.ic);
    cfg.h_ladder
        .iter()
        .map(|&h| {
            let sc = SolverConfig::with_courant(h, scheme, &cfg.theta0, cfg.courant);
            let sol = solve(&cfg.theta0, &sc, cfg.ic, &grid.times)?;
            let sampled = sample_to_data_grid(&sol, &grid)?;
            Ok(l1_error(&sampled, &truth)?)
        })
        .collect()
}

/// ln of a positive value, NaN otherwise: keeps degenerate log-log rows
/// parseable instead of emitting "-inf".
pub fn safe_ln(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NAN
    }
}
