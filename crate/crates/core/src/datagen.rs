//! Data grids and seeded synthetic observations.
//!
//! Observations follow y_ij = u(t_i, x_j; theta0) + eps_ij with eps i.i.d.
//! N(0, eta^2). Noise is drawn from a counter-based keyed generator (one
//! ChaCha stream per matrix entry), so a dataset is bit-identical for a given
//! seed regardless of fill order or parallelism.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analytic::{analytic_solution_matrix, InitialCondition, ParameterVector};
use crate::error::{CoreError, Result};

/// Uniform observation grid over T x X = [0,10] x [0,1], endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct DataGrid {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

impl DataGrid {
    /// Number of observation times.
    pub fn m(&self) -> usize {
        self.times.len()
    }

    /// Number of spatial observation points.
    pub fn n(&self) -> usize {
        self.positions.len()
    }
}

/// Inclusive-endpoint uniform grid: t_i = 10 i / (M - 1), x_j = j / (N - 1).
pub fn make_grid(m: usize, n: usize) -> Result<DataGrid> {
    if m < 2 || n < 2 {
        return Err(CoreError::Config(format!(
            "data grid needs at least 2 points per axis, got M = {m}, N = {n}"
        )));
    }
    let times = (0..m).map(|i| 10.0 * i as f64 / (m - 1) as f64).collect();
    let positions = (0..n).map(|j| j as f64 / (n - 1) as f64).collect();
    Ok(DataGrid { times, positions })
}

/// Generation record of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub theta0: ParameterVector,
    pub eta: f64,
    pub seed: u64,
    pub ic: InitialCondition,
    pub m: usize,
    pub n: usize,
}

/// Observation matrix Y on a data grid, with provenance when synthetic.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub grid: DataGrid,
    pub y: Array2<f64>,
    pub provenance: Option<Provenance>,
}

impl Dataset {
    /// Provenance, or the contract error for operations that require it.
    pub fn provenance(&self) -> Result<&Provenance> {
        self.provenance.as_ref().ok_or(CoreError::MissingProvenance)
    }
}

/// Synthesize observations Y = U0(theta0) + eta * Z with Z standard normal.
///
/// `eta = 0` returns the exact solution matrix. Entry (i, j) draws from ChaCha
/// stream i * N + j of the seeded generator, so identical seeds give
/// bit-identical matrices in any fill order.
pub fn generate(
    theta0: &ParameterVector,
    grid: &DataGrid,
    eta: f64,
    seed: u64,
    ic: InitialCondition,
) -> Dataset {
    assert!(eta >= 0.0, "noise standard deviation must be nonnegative");
    let mut y = analytic_solution_matrix(theta0, grid, ic);
    if eta > 0.0 {
        let n = grid.n();
        let base = ChaCha12Rng::seed_from_u64(seed);
        for ((i, j), v) in y.indexed_iter_mut() {
            let mut rng = base.clone();
            rng.set_stream((i * n + j) as u64);
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += eta * z;
        }
    }
    Dataset {
        grid: grid.clone(),
        y,
        provenance: Some(Provenance {
            theta0: *theta0,
            eta,
            seed,
            ic,
            m: grid.m(),
            n: grid.n(),
        }),
    }
}

/// The studied (N, eta) sweep for each initial profile.
pub fn sweep_configs(ic: InitialCondition) -> Vec<(usize, f64)> {
    let (ns, etas): (&[usize], &[f64]) = match ic {
        InitialCondition::Discontinuous => (
            &[11, 30, 51],
            &[0.0, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0],
        ),
        InitialCondition::Continuous => (
            &[11, 31, 51],
            &[0.0, 1e-4, 5e-4, 1e-3, 1e-2, 5e-2, 1e-1, 2e-1],
        ),
    };
    let mut out = Vec::with_capacity(ns.len() * etas.len());
    for &n in ns {
        for &eta in etas {
            out.push((n, eta));
        }
    }
    out
}

/// Sidecar path for a dataset CSV: `data.csv` -> `data.provenance.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("provenance.json")
}

/// Write the dataset as CSV (`t,x,y`, one observation per record, full
/// round-trip float precision) plus a JSON provenance sidecar when synthetic.
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "x", "y"])?;
    for (i, &t) in dataset.grid.times.iter().enumerate() {
        for (j, &x) in dataset.grid.positions.iter().enumerate() {
            w.write_record(&[t.to_string(), x.to_string(), dataset.y[[i, j]].to_string()])?;
        }
    }
    w.flush()?;
    if let Some(p) = &dataset.provenance {
        std::fs::write(sidecar_path(path), serde_json::to_string_pretty(p)?)?;
    }
    Ok(())
}

/// Read a dataset CSV written by [`write_csv`] (or any `t,x,y` table covering
/// a full rectangular grid). Loads the provenance sidecar when present.
pub fn read_csv(path: &Path) -> Result<Dataset> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut records: Vec<(f64, f64, f64)> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(CoreError::Config(format!(
                "dataset CSV needs 3 columns t,x,y; got {} in {}",
                rec.len(),
                path.display()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CoreError::Config(format!("bad {what} value {s:?} in {}", path.display())))
        };
        records.push((
            parse(&rec[0], "t")?,
            parse(&rec[1], "x")?,
            parse(&rec[2], "y")?,
        ));
    }
    if records.is_empty() {
        return Err(CoreError::Config(format!(
            "dataset CSV {} holds no observations",
            path.display()
        )));
    }
    // Rebuild the grid from the exact float values seen (round-trip text).
    let mut t_index: BTreeMap<u64, usize> = BTreeMap::new();
    let mut x_index: BTreeMap<u64, usize> = BTreeMap::new();
    for &(t, x, _) in &records {
        t_index.entry(t.to_bits()).or_insert(0);
        x_index.entry(x.to_bits()).or_insert(0);
    }
    let mut times: Vec<f64> = t_index.keys().map(|&b| f64::from_bits(b)).collect();
    let mut positions: Vec<f64> = x_index.keys().map(|&b| f64::from_bits(b)).collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    positions.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (i, &t) in times.iter().enumerate() {
        t_index.insert(t.to_bits(), i);
    }
    for (j, &x) in positions.iter().enumerate() {
        x_index.insert(x.to_bits(), j);
    }
    let (m, n) = (times.len(), positions.len());
    if records.len() != m * n {
        return Err(CoreError::Config(format!(
            "dataset CSV {} is not a full grid: {} observations over {} times x {} positions",
            path.display(),
            records.len(),
            m,
            n
        )));
    }
    let mut y = Array2::from_elem((m, n), f64::NAN);
    for (t, x, v) in records {
        y[[t_index[&t.to_bits()], x_index[&x.to_bits()]]] = v;
    }
    if y.iter().any(|v| v.is_nan()) {
        return Err(CoreError::Config(format!(
            "dataset CSV {} has duplicate or missing grid cells",
            path.display()
        )));
    }
    let sidecar = sidecar_path(path);
    let provenance = if sidecar.exists() {
        Some(serde_json::from_str(&std::fs::read_to_string(sidecar)?)?)
    } else {
        None
    };
    Ok(Dataset {
        grid: DataGrid { times, positions },
        y,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA0: ParameterVector = ParameterVector { alpha: 0.3, beta: 0.5 };

    #[test]
    fn grid_examples() {
        let g = make_grid(6, 11).unwrap();
        let expect_t = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0];
        for (a, b) in g.times.iter().zip(expect_t) {
            assert!((a - b).abs() < 1e-15);
        }
        for (j, &x) in g.positions.iter().enumerate() {
            assert!((x - 0.1 * j as f64).abs() < 1e-15);
        }
        assert_eq!((g.m(), g.n()), (6, 11));

        let corners = make_grid(2, 2).unwrap();
        assert_eq!(corners.times, vec![0.0, 10.0]);
        assert_eq!(corners.positions, vec![0.0, 1.0]);

        assert!(make_grid(1, 5).is_err());
        assert!(make_grid(5, 1).is_err());
    }

    #[test]
    fn zero_noise_is_exact() {
        let g = make_grid(6, 11).unwrap();
        let ds = generate(&THETA0, &g, 0.0, 42, InitialCondition::Discontinuous);
        let u0 = analytic_solution_matrix(&THETA0, &g, InitialCondition::Discontinuous);
        assert_eq!(ds.y, u0);
        assert_eq!(ds.provenance.unwrap().eta, 0.0);
    }

    #[test]
    fn same_seed_bit_identical() {
        let g = make_grid(6, 30).unwrap();
        let a = generate(&THETA0, &g, 0.3, 9, InitialCondition::Discontinuous);
        let b = generate(&THETA0, &g, 0.3, 9, InitialCondition::Discontinuous);
        assert_eq!(a.y, b.y);
        let c = generate(&THETA0, &g, 0.3, 10, InitialCondition::Discontinuous);
        assert_ne!(a.y, c.y);
    }

    #[test]
    fn sweep_contents() {
        let d = sweep_configs(InitialCondition::Discontinuous);
        assert_eq!(d.len(), 21);
        assert!(d.contains(&(30, 0.2)));
        assert!(d.iter().any(|&(_, eta)| eta == 0.0));
        let c = sweep_configs(InitialCondition::Continuous);
        assert_eq!(c.len(), 24);
        assert!(c.contains(&(31, 1e-4)));
        assert!(c.iter().any(|&(_, eta)| eta == 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let g = make_grid(4, 7).unwrap();
        let ds = generate(&THETA0, &g, 0.15, 77, InitialCondition::Continuous);
        write_csv(&ds, &path).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.y, ds.y);
        assert_eq!(back.grid, ds.grid);
        assert_eq!(back.provenance, ds.provenance);
    }
}
