//! `decompose`: split the fitted cost into its six algebraic components per
//! ladder level.
//!
//! Writing the misfit as (noise) + (model distance) + (discretization error)
//! and expanding the square splits J into A (noise power), B (model term),
//! C (numerics term), and the cross terms D, E, F; the identity
//! A + B + C + D + E + F = J holds exactly up to rounding and the CSV carries
//! the realized gap per row. Each level refits theta first, so the columns
//! explain the minimized cost curve J(h, theta_hat(h)). Requires synthetic
//! provenance: the split is relative to the generating truth.

use std::path::Path;

use advectfit_core::{decompose_cost, fit_ols, CostBreakdown, FitResult, SchemeKind};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;

use super::{emit, num, read_dataset, require_standard_courant};

const PLOT_STUB: &str = r#"#!/usr/bin/env python3
"""Plot stub: cost components versus h on log axes."""
import sys

import numpy as np
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "DECOMPOSE_CSV"
d = np.genfromtxt(path, delimiter=",", names=True)
for name in ("a_noise", "b_model", "c_numer", "d_cross", "e_cross", "f_cross", "j"):
    plt.loglog(np.atleast_1d(d["h"]), np.abs(np.atleast_1d(d[name])), marker="o", label=name)
plt.xlabel("h")
plt.ylabel("|component|")
plt.legend(fontsize=7)
plt.tight_layout()
plt.savefig("decompose.png", dpi=150)
"#;

pub fn run(cfg: &ExperimentConfig, out: &Path, data: &Path, scheme: SchemeKind) -> Result<()> {
    require_standard_courant(cfg)?;
    let mut mb = ManifestBuilder::new("decompose", out);
    mb.record_input(data)?;
    let dataset = read_dataset(data)?;
    // The split is relative to the generating truth; refuse field data.
    let theta0 = dataset.provenance()?.theta0;
    let opts = cfg.optimizer.settings();

    let rows: Vec<std::result::Result<(FitResult, CostBreakdown), String>> = cfg
        .h_ladder
        .par_iter()
        .map(|&h| {
            let run = || -> Result<(FitResult, CostBreakdown)> {
                let fit = fit_ols(&dataset, scheme, h, cfg.ic, &opts)?;
                let breakdown =
                    decompose_cost(&dataset, &fit.theta_hat, &theta0, scheme, h, cfg.ic)?;
                Ok((fit, breakdown))
            };
            run().map_err(|e| e.to_string())
        })
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "h",
        "alpha_hat",
        "beta_hat",
        "a_noise",
        "b_model",
        "c_numer",
        "d_cross",
        "e_cross",
        "f_cross",
        "j",
        "identity_gap",
        "status",
    ])?;
    let mut failures = 0usize;
    let mut worst_gap = 0.0_f64;
    for (&h, row) in cfg.h_ladder.iter().zip(&rows) {
        match row {
            Ok((fit, b)) => {
                worst_gap = worst_gap.max(b.identity_gap());
                w.write_record([
                    num(h),
                    num(fit.theta_hat.alpha),
                    num(fit.theta_hat.beta),
                    num(b.a_noise),
                    num(b.b_model),
                    num(b.c_numer),
                    num(b.d_cross),
                    num(b.e_cross),
                    num(b.f_cross),
                    num(b.j),
                    num(b.identity_gap()),
                    "ok".to_string(),
                ])?;
            }
            Err(msg) => {
                w.write_record(
                    [num(h)].into_iter().chain(
                        std::iter::repeat(String::new())
                            .take(10)
                            .chain([format!("failed: {msg}")]),
                    ),
                )?;
                failures += 1;
            }
        }
    }
    let table = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    let rel = format!("decompose_{}.csv", scheme.label());
    emit(&mut mb, out, &rel, &table)?;
    let stub = PLOT_STUB.replace("DECOMPOSE_CSV", &rel);
    emit(&mut mb, out, "plot_decompose.py", stub.as_bytes())?;

    println!(
        "{} ladder levels ({} failed); worst identity gap {}; table: {}",
        cfg.h_ladder.len(),
        failures,
        num(worst_gap),
        out.join(&rel).display()
    );
    let manifest = mb.finish(cfg)?;
    println!("manifest: {}", manifest.display());
    Ok(())
}
