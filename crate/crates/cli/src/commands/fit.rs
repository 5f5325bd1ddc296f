//! `fit`: estimate theta from one dataset with one scheme at one step width.
//!
//! Plain mode runs the multistart least-squares fit; `--auto` runs the
//! two-stage autocorrelative fit (plain fit, per-slice AR(1) estimates split
//! at the moving front, whitened refit with the correlation frozen). The JSON
//! document carries the full fit diagnostics; the residual CSV holds
//! u(h, theta_hat) - y on the data grid, and `--auto` adds the whitened
//! residuals under the fitted correlation model. Non-convergence within the
//! evaluation budget is reported in the JSON, not as a process failure.

use std::path::Path;

use advectfit_core::uncertainty::residuals;
use advectfit_core::{fit_autocorrelative, fit_ols, Dataset, InitialCondition, SchemeKind};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;

use super::{emit, num, read_dataset, require_standard_courant};

#[derive(Serialize)]
struct FitDocument {
    command: &'static str,
    dataset: String,
    ic: InitialCondition,
    scheme: SchemeKind,
    h: f64,
    auto: bool,
    result: serde_json::Value,
}

pub fn run(
    cfg: &ExperimentConfig,
    out: &Path,
    data: &Path,
    scheme: SchemeKind,
    h: f64,
    auto: bool,
) -> Result<()> {
    require_standard_courant(cfg)?;
    if !h.is_finite() || !(h > 0.0) {
        return Err(CliError::Config(format!("step width must be positive, got h = {h}")));
    }
    let mut mb = ManifestBuilder::new("fit", out);
    mb.record_input(data)?;
    let dataset = read_dataset(data)?;
    let opts = cfg.optimizer.settings();

    let tag = format!("{}_h{}", scheme.label(), num(h));
    let (theta_hat, model, result, converged) = if auto {
        let fit = fit_autocorrelative(&dataset, scheme, h, cfg.ic, &opts)?;
        let converged = fit.converged && fit.ols.converged;
        (
            fit.theta_hat,
            Some(fit.model.clone()),
            serde_json::to_value(&fit)?,
            converged,
        )
    } else {
        let fit = fit_ols(&dataset, scheme, h, cfg.ic, &opts)?;
        let converged = fit.converged;
        (fit.theta_hat, None, serde_json::to_value(&fit)?, converged)
    };

    let r = residuals(&dataset, &theta_hat, scheme, h, cfg.ic)?;
    emit(
        &mut mb,
        out,
        &format!("residuals_{tag}.csv"),
        &matrix_csv(&dataset, &r)?,
    )?;
    if let Some(model) = &model {
        let w = model.whiten_matrix(&r);
        emit(
            &mut mb,
            out,
            &format!("residuals_{tag}_whitened.csv"),
            &matrix_csv(&dataset, &w)?,
        )?;
    }

    let document = FitDocument {
        command: "fit",
        dataset: data.display().to_string(),
        ic: cfg.ic,
        scheme,
        h,
        auto,
        result,
    };
    let mut text = serde_json::to_string_pretty(&document)?;
    text.push('\n');
    emit(&mut mb, out, &format!("fit_{tag}.json"), text.as_bytes())?;
    emit(&mut mb, out, "plot_fit.py", plot_stub(&tag, auto).as_bytes())?;

    println!(
        "theta_hat = ({}, {})  converged = {converged}",
        num(theta_hat.alpha),
        num(theta_hat.beta)
    );
    if !converged {
        println!("note: the optimizer exhausted its budget; see the JSON diagnostics");
    }
    let manifest = mb.finish(cfg)?;
    println!("manifest: {}", manifest.display());
    Ok(())
}

/// Field on the data grid as a `t,x,value` CSV in row-major grid order.
fn matrix_csv(dataset: &Dataset, field: &ndarray::Array2<f64>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "x", "residual"])?;
    for (i, &t) in dataset.grid.times.iter().enumerate() {
        for (j, &x) in dataset.grid.positions.iter().enumerate() {
            w.write_record([num(t), num(x), num(field[[i, j]])])?;
        }
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn plot_stub(tag: &str, auto: bool) -> String {
    let whitened = if auto {
        format!(
            "plot(\"residuals_{tag}_whitened.csv\", axes[1], \"whitened\")\n"
        )
    } else {
        String::new()
    };
    format!(
        r#"#!/usr/bin/env python3
"""Plot stub for fit residuals: one marker track per time slice."""
import numpy as np
import matplotlib.pyplot as plt


def plot(path, ax, title):
    d = np.loadtxt(path, delimiter=",", skiprows=1)
    for t in np.unique(d[:, 0]):
        rows = d[d[:, 0] == t]
        ax.plot(rows[:, 1], rows[:, 2], marker=".", label=f"t={{t:g}}")
    ax.set_title(title)
    ax.set_xlabel("x")


fig, axes = plt.subplots(1, 2, figsize=(9, 4), sharey=False)
plot("residuals_{tag}.csv", axes[0], "raw")
{whitened}axes[0].legend(fontsize=6)
plt.tight_layout()
plt.savefig("fit_{tag}.png", dpi=150)
"#
    )
}
