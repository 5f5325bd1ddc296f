//! `generate`: synthesize the (N, eta) observation sweep.
//!
//! Each cell draws Y = U0(theta0) + eta Z on its own M x N grid with a seed
//! derived positionally from the base seed, writes a `t,x,y` CSV plus a JSON
//! provenance sidecar, and lands in the manifest's seed table. The other
//! subcommands derive identical seeds from the same config, so datasets
//! written here match what `convergence` generates inline.

use std::path::Path;

use advectfit_core::datagen::{generate, sidecar_path, write_csv};
use advectfit_core::{make_grid, Dataset};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::manifest::ManifestBuilder;

use super::{dataset_file_name, ensure_dir};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let mut mb = ManifestBuilder::new("generate", out);
    ensure_dir(&out.join("datasets"))?;

    let cells = cfg.data_cells();
    let datasets: Vec<Dataset> = cells
        .par_iter()
        .map(|cell| {
            let grid = make_grid(cfg.m, cell.n)?;
            Ok(generate(&cfg.theta0, &grid, cell.eta, cell.seed, cfg.ic))
        })
        .collect::<Result<_>>()?;

    for (cell, dataset) in cells.iter().zip(&datasets) {
        let rel = format!(
            "datasets/{}",
            dataset_file_name(cfg.ic, cell.n, cell.eta, cell.seed)
        );
        write_csv(dataset, &out.join(&rel))?;
        mb.record_seed(cell.n, cell.eta, cell.seed);
        mb.record_file(rel.clone());
        mb.record_file(sidecar_path(Path::new(&rel)).display().to_string());
    }

    println!(
        "wrote {} datasets under {}",
        cells.len(),
        out.join("datasets").display()
    );
    let manifest = mb.finish(cfg)?;
    println!("manifest: {}", manifest.display());
    Ok(())
}
