//! `convergence`: solution, cost, and estimator convergence orders per
//! (scheme, N, eta) sweep cell.
//!
//! Each cell generates its dataset inline (same positional seeds as
//! `generate`), fits theta at every ladder level, and regresses three
//! orders: p from the solution error E(h) at theta0, p_J from the minimized
//! cost with its noise plateau excluded, and p_theta from the estimator
//! error. The summary CSV carries one row per cell; a `.dat` file per cell
//! holds the raw log-log curves for plotting. A failed cell keeps its row,
//! marked with the failure, and the sweep continues.

use std::collections::HashMap;
use std::path::Path;

use advectfit_core::datagen::generate;
use advectfit_core::schemes::OrderFit;
use advectfit_core::{
    cost_order_study_on, estimate_order, make_grid, ConvergenceStudy, Dataset, SchemeKind,
};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;

use super::{emit, ensure_dir, num, require_standard_courant, safe_ln, solution_errors};

const PLOT_STUB: &str = r#"#!/usr/bin/env python3
"""Plot stub for the convergence sweep.

Each dat/*.dat file holds one (scheme, N, eta) cell with columns
ln_h, ln_J, ln_theta_err, ln_E. Adjust selection and styling as needed.
"""
import glob

import numpy as np
import matplotlib.pyplot as plt

for path in sorted(glob.glob("dat/*.dat")):
    d = np.loadtxt(path, ndmin=2)
    plt.plot(d[:, 0], d[:, 1], marker="o", label=path.split("/")[-1][:-4])
plt.xlabel("ln h")
plt.ylabel("ln J")
plt.legend(fontsize=6)
plt.tight_layout()
plt.savefig("convergence.png", dpi=150)
"#;

type CellOutcome<T> = std::result::Result<T, String>;

pub fn run(cfg: &ExperimentConfig, out: &Path, only: Option<SchemeKind>) -> Result<()> {
    require_standard_courant(cfg)?;
    if cfg.h_ladder.len() < 3 {
        return Err(CliError::Config(format!(
            "order regression needs at least 3 ladder levels, got {}",
            cfg.h_ladder.len()
        )));
    }
    let schemes: Vec<SchemeKind> = match only {
        Some(s) => vec![s],
        None => cfg.schemes.clone(),
    };

    let mut mb = ManifestBuilder::new("convergence", out);
    ensure_dir(&out.join("dat"))?;

    // Datasets are shared across schemes; build them once in sweep order.
    let data_cells = cfg.data_cells();
    let datasets: Vec<Dataset> = data_cells
        .par_iter()
        .map(|cell| {
            let grid = make_grid(cfg.m, cell.n)?;
            Ok(generate(&cfg.theta0, &grid, cell.eta, cell.seed, cfg.ic))
        })
        .collect::<Result<_>>()?;
    for cell in &data_cells {
        mb.record_seed(cell.n, cell.eta, cell.seed);
    }

    // The solution error E(h) at theta0 depends on (scheme, N) only.
    let combos: Vec<(SchemeKind, usize)> = schemes
        .iter()
        .flat_map(|&s| cfg.ns.iter().map(move |&n| (s, n)))
        .collect();
    let solutions: HashMap<(SchemeKind, usize), CellOutcome<(Vec<f64>, OrderFit)>> = combos
        .par_iter()
        .map(|&(scheme, n)| {
            let outcome = (|| -> Result<(Vec<f64>, OrderFit)> {
                let errs = solution_errors(cfg, scheme, n)?;
                let fit = estimate_order(&cfg.h_ladder, &errs, None).map_err(CliError::from)?;
                Ok((errs, fit))
            })()
            .map_err(|e| e.to_string());
            ((scheme, n), outcome)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let cells: Vec<(SchemeKind, usize)> = schemes
        .iter()
        .flat_map(|&s| (0..data_cells.len()).map(move |i| (s, i)))
        .collect();
    let opts = cfg.optimizer.settings();
    let studies: Vec<CellOutcome<ConvergenceStudy>> = cells
        .par_iter()
        .map(|&(scheme, i)| {
            cost_order_study_on(&datasets[i], scheme, cfg.ic, &opts, &cfg.h_ladder)
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scheme",
        "n",
        "eta",
        "p",
        "p_r_squared",
        "p_j",
        "p_j_r_squared",
        "p_j_levels",
        "plateau",
        "p_theta",
        "p_theta_r_squared",
        "status",
    ])?;
    let mut failures = 0usize;
    let mut lines = Vec::with_capacity(cells.len());
    for (k, &(scheme, i)) in cells.iter().enumerate() {
        let cell = &data_cells[i];
        let head = [scheme.label().to_string(), cell.n.to_string(), num(cell.eta)];
        match (&solutions[&(scheme, cell.n)], &studies[k]) {
            (Ok((_, pfit)), Ok(s)) => {
                w.write_record(head.iter().cloned().chain([
                    num(pfit.p),
                    num(pfit.r_squared),
                    num(s.p_j),
                    num(s.p_j_r_squared),
                    s.p_j_subset.len().to_string(),
                    s.plateau.to_string(),
                    num(s.p_theta),
                    num(s.p_theta_r_squared),
                    "ok".to_string(),
                ]))?;
                let note = if s.plateau { " (plateau)" } else { "" };
                lines.push(format!(
                    "{} N={} eta={}: p={:.4} p_J={:.4}{note} p_theta={:.4}",
                    scheme.label(),
                    cell.n,
                    num(cell.eta),
                    pfit.p,
                    s.p_j,
                    s.p_theta
                ));
            }
            (sol, study) => {
                let msg = match (sol, study) {
                    (Err(e), _) => e.clone(),
                    (_, Err(e)) => e.clone(),
                    _ => unreachable!("one side failed"),
                };
                w.write_record(head.iter().cloned().chain(
                    std::iter::repeat(String::new())
                        .take(8)
                        .chain([format!("failed: {msg}")]),
                ))?;
                lines.push(format!(
                    "{} N={} eta={}: failed: {msg}",
                    scheme.label(),
                    cell.n,
                    num(cell.eta)
                ));
                failures += 1;
            }
        }
    }
    let table = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    emit(&mut mb, out, "convergence.csv", &table)?;

    for (k, &(scheme, i)) in cells.iter().enumerate() {
        let cell = &data_cells[i];
        if let (Ok((errs, _)), Ok(s)) = (&solutions[&(scheme, cell.n)], &studies[k]) {
            let mut text = String::from("# ln_h ln_J ln_theta_err ln_E\n");
            for (lvl, &h) in cfg.h_ladder.iter().enumerate() {
                text.push_str(&format!(
                    "{} {} {} {}\n",
                    num(h.ln()),
                    num(safe_ln(s.costs[lvl])),
                    num(safe_ln(s.theta_errors[lvl])),
                    num(safe_ln(errs[lvl])),
                ));
            }
            let rel = format!("dat/{}_N{}_eta{}.dat", scheme.label(), cell.n, num(cell.eta));
            emit(&mut mb, out, &rel, text.as_bytes())?;
        }
    }
    emit(&mut mb, out, "plot_convergence.py", PLOT_STUB.as_bytes())?;

    for line in &lines {
        println!("{line}");
    }
    println!(
        "{} cells ({} failed); table: {}",
        cells.len(),
        failures,
        out.join("convergence.csv").display()
    );
    let manifest = mb.finish(cfg)?;
    println!("manifest: {}", manifest.display());
    Ok(())
}
