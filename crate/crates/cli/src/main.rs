//! Experiment driver for the advection estimation study.
//!
//! Subcommands mirror the study workflows: `generate` synthesizes noisy
//! observation sweeps, `convergence` regresses solution, cost, and estimator
//! orders per (scheme, N, eta) cell, `fit` runs a single estimation (plain or
//! autocorrelation-corrected), `confidence` builds interval and ellipse
//! summaries across the step ladder, and `decompose` splits the fitted cost
//! into its six algebraic components. Every run closes with a manifest
//! recording the resolved config, its hash, the per-cell seeds, and a hashed
//! inventory of every emitted file; re-running a manifest reproduces each CSV
//! byte for byte.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use advectfit_core::{InitialCondition, SchemeKind};
use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod error;
mod manifest;

use config::Overrides;
use error::{CliError, Result};

/// Env var consulted for the output directory when --out is absent.
const OUT_ENV: &str = "ADVECTFIT_OUT";

#[derive(Parser)]
#[command(
    name = "advectfit",
    version,
    about = "Deterministic experiment driver for advection-equation parameter estimation"
)]
struct Cli {
    /// JSON experiment config (any subset of fields); a run manifest also
    /// works and reproduces its run.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory. Precedence: this flag, then $ADVECTFIT_OUT, then
    /// the config's out_dir, then ./advectfit-out.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for sweep cells; 0 or omitted means all cores.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Base seed override for dataset generation.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Initial profile override: d (step) or c (Gaussian bump).
    #[arg(long, global = true, value_enum, value_name = "PROFILE")]
    ic: Option<IcArg>,

    /// Scheme selector: restricts the convergence sweep, required by
    /// fit/confidence/decompose.
    #[arg(long, global = true, value_enum, value_name = "SCHEME")]
    scheme: Option<SchemeArg>,

    /// Use the two-stage autocorrelative fit where it applies
    /// (fit, confidence).
    #[arg(long, global = true)]
    auto: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the (N, eta) dataset sweep with provenance sidecars.
    Generate,
    /// Solution, cost, and estimator convergence orders per sweep cell.
    Convergence,
    /// Fit one dataset at one step width; writes JSON diagnostics and
    /// residual CSVs.
    Fit {
        /// Dataset CSV (t,x,y) to fit.
        data: PathBuf,
        /// Step width of the scheme grid.
        #[arg(long, value_name = "FLOAT")]
        h: f64,
    },
    /// Confidence intervals and ellipses across the step ladder.
    Confidence {
        /// Dataset CSV (t,x,y) to analyze.
        data: PathBuf,
    },
    /// Cost decomposition A..F across the step ladder (synthetic data only).
    Decompose {
        /// Dataset CSV (t,x,y) with a provenance sidecar.
        data: PathBuf,
    },
}

/// Initial profile tokens.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum IcArg {
    /// Step of height 5 on x <= 0.2.
    D,
    /// Gaussian bump centred at x = 0.2.
    C,
}

impl IcArg {
    fn kind(self) -> InitialCondition {
        match self {
            IcArg::D => InitialCondition::Discontinuous,
            IcArg::C => InitialCondition::Continuous,
        }
    }
}

/// Scheme tokens; clap renders the variants as upwind, lw, bw, upwind-fl.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Upwind,
    Lw,
    Bw,
    UpwindFl,
}

impl SchemeArg {
    fn kind(self) -> SchemeKind {
        match self {
            SchemeArg::Upwind => SchemeKind::Upwind,
            SchemeArg::Lw => SchemeKind::LaxWendroff,
            SchemeArg::Bw => SchemeKind::BeamWarming,
            SchemeArg::UpwindFl => SchemeKind::UpwindFluxLimited,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let source = config::load(cli.config.as_deref())?;
    let overrides = Overrides {
        ic: cli.ic.map(IcArg::kind),
        seed: cli.seed,
    };
    let (cfg, config_out) = source.resolve(&overrides)?;
    let out = resolve_out_dir(cli.out, std::env::var_os(OUT_ENV).map(PathBuf::from), config_out);
    commands::ensure_dir(&out)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?;
    let scheme = cli.scheme.map(SchemeArg::kind);
    pool.install(|| match cli.command {
        Command::Generate => commands::generate::run(&cfg, &out),
        Command::Convergence => commands::convergence::run(&cfg, &out, scheme),
        Command::Fit { data, h } => {
            commands::fit::run(&cfg, &out, &data, require_scheme(scheme)?, h, cli.auto)
        }
        Command::Confidence { data } => {
            commands::confidence::run(&cfg, &out, &data, require_scheme(scheme)?, cli.auto)
        }
        Command::Decompose { data } => {
            commands::decompose::run(&cfg, &out, &data, require_scheme(scheme)?)
        }
    })
}

fn require_scheme(scheme: Option<SchemeKind>) -> Result<SchemeKind> {
    scheme.ok_or_else(|| {
        CliError::Config("this subcommand needs --scheme {upwind|lw|bw|upwind-fl}".into())
    })
}

fn resolve_out_dir(
    flag: Option<PathBuf>,
    env: Option<PathBuf>,
    config: Option<PathBuf>,
) -> PathBuf {
    flag.or(env)
        .or(config)
        .unwrap_or_else(|| PathBuf::from("advectfit-out"))
}
