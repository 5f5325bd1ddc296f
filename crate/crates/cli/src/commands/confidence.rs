//! `confidence`: Student-t intervals and the confidence ellipse across the
//! step ladder for one dataset and scheme.
//!
//! Each ladder level refits theta (plain, or two-stage with `--auto`) and
//! builds the interval summary at the configured level. When the dataset
//! carries synthetic provenance the CSV also grades each region against the
//! generating truth: per-parameter interval hits, their conjunction
//! (`covers_box`), and ellipse membership. Singular-information cells stay in
//! the table, flagged, with infinite widths and no ellipse. The companion
//! ellipse CSV samples each boundary, keyed by ladder index for coloring.

use std::path::Path;

use advectfit_core::{
    confidence_report, fit_autocorrelative, fit_ols, AutocorrModel, ConfidenceReport, SchemeKind,
};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;

use super::{emit, flag, num, read_dataset, require_standard_courant};

/// Boundary samples per ellipse.
const BOUNDARY_POINTS: usize = 128;

pub fn run(
    cfg: &ExperimentConfig,
    out: &Path,
    data: &Path,
    scheme: SchemeKind,
    auto: bool,
) -> Result<()> {
    require_standard_courant(cfg)?;
    let mut mb = ManifestBuilder::new("confidence", out);
    mb.record_input(data)?;
    let dataset = read_dataset(data)?;
    let (m, n) = (dataset.grid.m(), dataset.grid.n());
    let opts = cfg.optimizer.settings();

    let reports: Vec<std::result::Result<ConfidenceReport, String>> = cfg
        .h_ladder
        .par_iter()
        .map(|&h| {
            let run = || -> Result<ConfidenceReport> {
                let (theta_hat, model) = if auto {
                    let fit = fit_autocorrelative(&dataset, scheme, h, cfg.ic, &opts)?;
                    (fit.theta_hat, fit.model)
                } else {
                    let fit = fit_ols(&dataset, scheme, h, cfg.ic, &opts)?;
                    (fit.theta_hat, AutocorrModel::identity(m, n))
                };
                Ok(confidence_report(
                    &dataset,
                    &theta_hat,
                    &model,
                    scheme,
                    h,
                    cfg.ic,
                    cfg.confidence_level,
                )?)
            };
            run().map_err(|e| e.to_string())
        })
        .collect();

    let suffix = if auto { "_auto" } else { "" };
    let table_rel = format!("confidence_{}{suffix}.csv", scheme.label());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "h_index",
        "h",
        "alpha_hat",
        "beta_hat",
        "eta_hat_sq",
        "t_value",
        "alpha_lo",
        "alpha_hi",
        "beta_lo",
        "beta_hi",
        "covers_alpha",
        "covers_beta",
        "covers_box",
        "covers_ellipse",
        "singular",
        "one_sided_alpha",
        "one_sided_beta",
        "status",
    ])?;
    let mut boundary = csv::Writer::from_writer(Vec::new());
    boundary.write_record(["h_index", "h", "alpha", "beta"])?;

    let mut failures = 0usize;
    let mut lines = Vec::with_capacity(reports.len());
    for (idx, (&h, report)) in cfg.h_ladder.iter().zip(&reports).enumerate() {
        let head = [idx.to_string(), num(h)];
        match report {
            Ok(rep) => {
                let covers = rep.intervals_contain;
                let covers_box = covers.map(|c| c[0] && c[1]);
                w.write_record(head.iter().cloned().chain([
                    num(rep.theta_hat.alpha),
                    num(rep.theta_hat.beta),
                    num(rep.eta_hat_sq),
                    num(rep.t_value),
                    num(rep.intervals[0][0]),
                    num(rep.intervals[0][1]),
                    num(rep.intervals[1][0]),
                    num(rep.intervals[1][1]),
                    flag(covers.map(|c| c[0])),
                    flag(covers.map(|c| c[1])),
                    flag(covers_box),
                    flag(rep.encloses_truth),
                    rep.singular.to_string(),
                    rep.one_sided[0].to_string(),
                    rep.one_sided[1].to_string(),
                    "ok".to_string(),
                ]))?;
                if let Some(ellipse) = &rep.ellipse {
                    for (alpha, beta) in ellipse.boundary_points(BOUNDARY_POINTS) {
                        boundary.write_record([
                            idx.to_string(),
                            num(h),
                            num(alpha),
                            num(beta),
                        ])?;
                    }
                }
                let grade = match covers_box {
                    Some(true) => " covers theta0",
                    Some(false) => " misses theta0",
                    None => "",
                };
                lines.push(format!(
                    "h={}: alpha in [{}, {}], beta in [{}, {}]{}{}",
                    num(h),
                    num(rep.intervals[0][0]),
                    num(rep.intervals[0][1]),
                    num(rep.intervals[1][0]),
                    num(rep.intervals[1][1]),
                    if rep.singular { " (singular)" } else { "" },
                    grade,
                ));
            }
            Err(msg) => {
                w.write_record(head.iter().cloned().chain(
                    std::iter::repeat(String::new())
                        .take(15)
                        .chain([format!("failed: {msg}")]),
                ))?;
                lines.push(format!("h={}: failed: {msg}", num(h)));
                failures += 1;
            }
        }
    }
    let table = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    emit(&mut mb, out, &table_rel, &table)?;
    let boundary_rel = format!("ellipse_{}{suffix}.csv", scheme.label());
    let boundary = boundary.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    emit(&mut mb, out, &boundary_rel, &boundary)?;
    emit(
        &mut mb,
        out,
        "plot_confidence.py",
        plot_stub(&table_rel, &boundary_rel).as_bytes(),
    )?;

    for line in &lines {
        println!("{line}");
    }
    println!(
        "{} ladder levels ({} failed); table: {}",
        cfg.h_ladder.len(),
        failures,
        out.join(&table_rel).display()
    );
    let manifest = mb.finish(cfg)?;
    println!("manifest: {}", manifest.display());
    Ok(())
}

fn plot_stub(table: &str, boundary: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Plot stub: confidence ellipses colored by ladder index."""
import numpy as np
import matplotlib.pyplot as plt

b = np.loadtxt("{boundary}", delimiter=",", skiprows=1, ndmin=2)
if b.size:
    for idx in np.unique(b[:, 0]):
        pts = b[b[:, 0] == idx]
        plt.plot(pts[:, 2], pts[:, 3], label=f"h index {{idx:g}}")
t = np.genfromtxt("{table}", delimiter=",", names=True)
plt.plot(np.atleast_1d(t["alpha_hat"]), np.atleast_1d(t["beta_hat"]), "k+")
plt.xlabel("alpha")
plt.ylabel("beta")
plt.legend(fontsize=6)
plt.tight_layout()
plt.savefig("confidence.png", dpi=150)
"#
    )
}
