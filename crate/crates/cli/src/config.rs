//! Experiment configuration: JSON in, fully-defaulted sweep out.
//!
//! A config file may pin any subset of fields; everything else falls back to
//! the standard study for the chosen initial profile. With no file at all the
//! driver reproduces the discontinuous-profile sweep: truth theta0 =
//! (0.3, 0.5), M = 6 observation times, N in {11, 30, 51}, eta in
//! {0, 0.1, 0.15, 0.2, 0.3, 0.5, 1}, all four schemes, the seven-level step
//! ladder h = 1/10 .. 1/640. Selecting the continuous profile swaps in
//! theta0 = (0.3, 0.4), N in {11, 31, 51}, and eta in
//! {0, 1e-4, 5e-4, 1e-3, 1e-2, 5e-2, 1e-1, 2e-1}.
//!
//! `--config` also accepts a run manifest; its embedded resolved config is
//! used verbatim, which is how a finished run is reproduced byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use advectfit_core::schemes::DEFAULT_COURANT;
use advectfit_core::{
    InitialCondition, OptimizerSettings, ParameterVector, SchemeKind, H_LADDER,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

/// Simplex-search knobs exposed to the config file. Mirrors the library
/// defaults; the deterministic multistart list itself is not configurable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub param_tol: f64,
    pub cost_tol: f64,
    pub max_evals: usize,
    pub start_half_width: f64,
    pub simplex_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let s = OptimizerSettings::default();
        Self {
            param_tol: s.param_tol,
            cost_tol: s.cost_tol,
            max_evals: s.max_evals,
            start_half_width: s.start_half_width,
            simplex_step: s.simplex_step,
        }
    }
}

impl OptimizerConfig {
    pub fn settings(&self) -> OptimizerSettings {
        OptimizerSettings {
            param_tol: self.param_tol,
            cost_tol: self.cost_tol,
            max_evals: self.max_evals,
            start_half_width: self.start_half_width,
            simplex_step: self.simplex_step,
            extra_starts: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.param_tol > 0.0) || !(self.cost_tol >= 0.0) {
            return Err(CliError::Config(
                "optimizer tolerances must be positive (cost_tol may be 0)".into(),
            ));
        }
        if self.max_evals == 0 {
            return Err(CliError::Config("optimizer needs max_evals >= 1".into()));
        }
        if !(self.start_half_width > 0.0) || !(self.simplex_step > 0.0) {
            return Err(CliError::Config(
                "optimizer start_half_width and simplex_step must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A fully-resolved experiment: every knob pinned, ready to hash and to embed
/// in a run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ic: InitialCondition,
    pub theta0: ParameterVector,
    /// Observation times per dataset (rows of Y), uniform on [0, 10].
    pub m: usize,
    /// Spatial observation counts, one sweep axis.
    pub ns: Vec<usize>,
    /// Noise standard deviations, the other sweep axis.
    pub etas: Vec<f64>,
    /// Base seed; the (N, eta) cell at position (i, j) of the sweep draws
    /// seed + i * |etas| + j.
    pub seed: u64,
    pub schemes: Vec<SchemeKind>,
    /// Strictly refining step ladder.
    pub h_ladder: Vec<f64>,
    /// Courant number of the march. The estimation pipeline is pinned to the
    /// standard 0.8; subcommands that fit refuse other values rather than
    /// report orders for a march they did not run.
    pub courant: f64,
    pub optimizer: OptimizerConfig,
    pub confidence_level: f64,
}

/// One dataset of the sweep with its derived generator seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataCell {
    pub n: usize,
    pub eta: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Sweep cells in deterministic order: ns major, etas minor. The
    /// derivation is positional, so the same config always yields the same
    /// per-cell seeds no matter which subcommand generates the data.
    pub fn data_cells(&self) -> Vec<DataCell> {
        let mut cells = Vec::with_capacity(self.ns.len() * self.etas.len());
        for (i, &n) in self.ns.iter().enumerate() {
            for (j, &eta) in self.etas.iter().enumerate() {
                let offset = (i * self.etas.len() + j) as u64;
                cells.push(DataCell {
                    n,
                    eta,
                    seed: self.seed.wrapping_add(offset),
                });
            }
        }
        cells
    }

    /// SHA-256 of the compact JSON serialization, in lowercase hex. Field
    /// order is the struct order, so equal configs hash equally.
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.m < 2 {
            return bad(format!("need at least 2 observation times, got m = {}", self.m));
        }
        if self.ns.is_empty() || self.etas.is_empty() || self.schemes.is_empty() {
            return bad("ns, etas, and schemes must all be nonempty".into());
        }
        if let Some(n) = self.ns.iter().find(|&&n| n < 2) {
            return bad(format!("need at least 2 observation points, got N = {n}"));
        }
        if let Some(eta) = self.etas.iter().find(|e| !e.is_finite() || **e < 0.0) {
            return bad(format!("noise level must be finite and nonnegative, got {eta}"));
        }
        for (name, dup) in [
            ("ns", has_duplicates(self.ns.iter().map(|&n| n as u64))),
            ("etas", has_duplicates(self.etas.iter().map(|e| e.to_bits()))),
            (
                "schemes",
                has_duplicates(self.schemes.iter().map(|s| *s as u64)),
            ),
        ] {
            if dup {
                return bad(format!("{name} contains duplicate entries; output files would collide"));
            }
        }
        if self.h_ladder.is_empty()
            || !self.h_ladder.iter().all(|h| h.is_finite() && *h > 0.0)
            || !self.h_ladder.windows(2).all(|w| w[1] < w[0])
        {
            return bad("h_ladder must be nonempty, positive, and strictly decreasing".into());
        }
        for (name, v) in [("alpha", self.theta0.alpha), ("beta", self.theta0.beta)] {
            if !(ParameterVector::ADMISSIBLE_MIN..=ParameterVector::ADMISSIBLE_MAX).contains(&v) {
                return bad(format!(
                    "theta0.{name} = {v} lies outside the admissible box [{}, {}]",
                    ParameterVector::ADMISSIBLE_MIN,
                    ParameterVector::ADMISSIBLE_MAX
                ));
            }
        }
        if !self.courant.is_finite() || !(0.0 < self.courant && self.courant <= 1.0) {
            return bad(format!(
                "courant number must lie in (0, 1] for a stable march, got {}",
                self.courant
            ));
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return bad(format!(
                "confidence_level must lie in (0, 1), got {}",
                self.confidence_level
            ));
        }
        self.optimizer.validate()
    }
}

fn has_duplicates(values: impl Iterator<Item = u64>) -> bool {
    let mut seen = Vec::new();
    for v in values {
        if seen.contains(&v) {
            return true;
        }
        seen.push(v);
    }
    false
}

/// What a config file may contain: any subset of the experiment fields, plus
/// an output directory that the --out flag and ADVECTFIT_OUT env var can
/// override.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub ic: Option<String>,
    pub theta0: Option<ParameterVector>,
    pub m: Option<usize>,
    pub ns: Option<Vec<usize>>,
    pub etas: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub schemes: Option<Vec<String>>,
    pub h_ladder: Option<Vec<f64>>,
    pub courant: Option<f64>,
    pub optimizer: Option<OptimizerConfig>,
    pub confidence_level: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

/// Command-line overrides applied on top of whatever the config source says.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub ic: Option<InitialCondition>,
    pub seed: Option<u64>,
}

fn default_theta0(ic: InitialCondition) -> ParameterVector {
    match ic {
        InitialCondition::Discontinuous => ParameterVector::new(0.3, 0.5),
        InitialCondition::Continuous => ParameterVector::new(0.3, 0.4),
    }
}

fn default_ns(ic: InitialCondition) -> Vec<usize> {
    match ic {
        InitialCondition::Discontinuous => vec![11, 30, 51],
        InitialCondition::Continuous => vec![11, 31, 51],
    }
}

fn default_etas(ic: InitialCondition) -> Vec<f64> {
    match ic {
        InitialCondition::Discontinuous => vec![0.0, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0],
        InitialCondition::Continuous => {
            vec![0.0, 1e-4, 5e-4, 1e-3, 1e-2, 5e-2, 1e-1, 2e-1]
        }
    }
}

pub fn parse_ic(token: &str) -> Result<InitialCondition> {
    match token {
        "d" | "discontinuous" => Ok(InitialCondition::Discontinuous),
        "c" | "continuous" => Ok(InitialCondition::Continuous),
        other => Err(CliError::Config(format!(
            "unknown initial profile {other:?}; use \"d\" (step) or \"c\" (bump)"
        ))),
    }
}

pub fn parse_scheme(token: &str) -> Result<SchemeKind> {
    match token {
        "upwind" => Ok(SchemeKind::Upwind),
        "lw" | "lax-wendroff" => Ok(SchemeKind::LaxWendroff),
        "bw" | "beam-warming" => Ok(SchemeKind::BeamWarming),
        "upwind-fl" | "upwind-flux-limited" => Ok(SchemeKind::UpwindFluxLimited),
        other => Err(CliError::Config(format!(
            "unknown scheme {other:?}; use upwind, lw, bw, or upwind-fl"
        ))),
    }
}

impl ConfigFile {
    pub fn resolve(&self, ov: &Overrides) -> Result<ExperimentConfig> {
        let ic = match ov.ic {
            Some(ic) => ic,
            None => match &self.ic {
                Some(token) => parse_ic(token)?,
                None => InitialCondition::Discontinuous,
            },
        };
        let schemes = match &self.schemes {
            Some(tokens) => tokens.iter().map(|t| parse_scheme(t)).collect::<Result<_>>()?,
            None => SchemeKind::ALL.to_vec(),
        };
        let cfg = ExperimentConfig {
            ic,
            theta0: self.theta0.unwrap_or_else(|| default_theta0(ic)),
            m: self.m.unwrap_or(6),
            ns: self.ns.clone().unwrap_or_else(|| default_ns(ic)),
            etas: self.etas.clone().unwrap_or_else(|| default_etas(ic)),
            seed: ov.seed.or(self.seed).unwrap_or(1),
            schemes,
            h_ladder: self.h_ladder.clone().unwrap_or_else(|| H_LADDER.to_vec()),
            courant: self.courant.unwrap_or(DEFAULT_COURANT),
            optimizer: self.optimizer.clone().unwrap_or_default(),
            confidence_level: self.confidence_level.unwrap_or(0.95),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A parsed --config source: either a partial config file awaiting defaults,
/// or the resolved config embedded in a run manifest.
#[derive(Debug, Clone)]
pub enum ConfigSource {
    Fresh(ConfigFile),
    Rerun(ExperimentConfig),
}

impl ConfigSource {
    /// Resolve to a validated experiment. Overrides replace the matching
    /// fields verbatim; on a fresh config the ic override also switches the
    /// per-profile defaults, on a manifest rerun every other field is already
    /// pinned and stays as recorded.
    pub fn resolve(self, ov: &Overrides) -> Result<(ExperimentConfig, Option<PathBuf>)> {
        match self {
            ConfigSource::Fresh(file) => {
                let out = file.out_dir.clone();
                Ok((file.resolve(ov)?, out))
            }
            ConfigSource::Rerun(mut cfg) => {
                if let Some(ic) = ov.ic {
                    cfg.ic = ic;
                }
                if let Some(seed) = ov.seed {
                    cfg.seed = seed;
                }
                cfg.validate()?;
                Ok((cfg, None))
            }
        }
    }
}

/// Parse a --config document. Manifests are detected first (their required
/// fields are unknown to [`ConfigFile`], and vice versa, so the two cannot be
/// confused); anything else must be a config file.
pub fn parse_config_str(text: &str, origin: &str) -> Result<ConfigSource> {
    if let Ok(manifest) = serde_json::from_str::<RunManifest>(text) {
        return Ok(ConfigSource::Rerun(manifest.config));
    }
    match serde_json::from_str::<ConfigFile>(text) {
        Ok(file) => Ok(ConfigSource::Fresh(file)),
        Err(e) => Err(CliError::Config(format!("invalid config {origin}: {e}"))),
    }
}

/// Load the --config path, or the all-defaults config when none was given.
pub fn load(path: Option<&Path>) -> Result<ConfigSource> {
    match path {
        None => Ok(ConfigSource::Fresh(ConfigFile::default())),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
            parse_config_str(&text, &p.display().to_string())
        }
    }
}
