//! `cubecycle`: spectra, spatio-spectral limiting and sampling reports for
//! cube/cycle cluster graphs, written as CSV or JSON with config sidecars.
//!
//! Exit status is 0 on success, 2 for invalid input and 3 when an
//! eigensolver fails to converge.

mod commands;
mod config;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::RunConfig;
use output::Output;

#[derive(Debug, Parser)]
#[command(
    name = "cubecycle",
    version,
    about = "Spectral toolkit for cube/cycle cluster graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Unit cluster constants
    Average,
    /// The first vertex of each cluster
    Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig7,
    Fig8,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Laplacian eigenvalues
    Spectrum,
    /// Eigenvalues of PQ on PW_Ω with a block mask
    Pq {
        /// Explicit mask, comma-separated vertices (overrides --block)
        #[arg(long, value_delimiter = ',')]
        mask: Option<Vec<usize>>,
    },
    /// Block-0 PQ structure, shift rank and the per-block concentration check
    Conjecture {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Frame bounds of the cyclic shifts of the PQ eigenvectors above 1/2
    Frame,
    /// Cluster Plancherel-Polya bound
    Pesenson {
        #[arg(long, value_enum, default_value = "average")]
        sampling: Sampling,
        /// Fixed epsilon; otherwise the maximizer of the lower constant
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// JSON list of clusters for --family custom
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// Component decomposition and norm identities on the Cartesian product
    Cartesian {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// PQ and spectral accumulation on a finite abelian group
    Abelian {
        /// Cycle factors, e.g. 4x5
        #[arg(long)]
        group: String,
        /// JSON file {"S": [...], "Sigma": [...]}; elements are indices or residue tuples
        #[arg(long)]
        subsets: PathBuf,
    },
    /// Paley-Wiener dimension tables
    Dims,
    /// Plot-ready data for one figure
    Figure {
        #[arg(value_enum)]
        id: Figure,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] cubecycle::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use cubecycle::Error as E;
        match self {
            CliError::Validation(_) => 2,
            CliError::Core(E::NoConvergence { .. }) => 3,
            CliError::Core(E::Io(_)) => 1,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Serialize)]
struct Echo<'a> {
    #[serde(flatten)]
    command: &'a Command,
    #[serde(flatten)]
    config: &'a RunConfig,
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let cfg = &cli.config;
    if !matches!(cli.command, Command::Abelian { .. }) {
        cfg.validate()?;
    }
    let echo = serde_json::to_value(Echo {
        command: &cli.command,
        config: cfg,
    })
    .map_err(cubecycle::Error::from)?;
    let mut out = Output::new(&cfg.out, cfg.format, echo)?;
    match &cli.command {
        Command::Spectrum => commands::spectrum(cfg, &mut out)?,
        Command::Pq { mask } => commands::pq(cfg, mask.as_deref(), &mut out)?,
        Command::Conjecture { trials } => commands::conjecture(cfg, *trials, &mut out)?,
        Command::Frame => commands::frame(cfg, &mut out)?,
        Command::Pesenson {
            sampling,
            epsilon,
            trials,
            partition,
        } => commands::pesenson(cfg, *sampling, *epsilon, *trials, partition.as_deref(), &mut out)?,
        Command::Cartesian { trials } => commands::cartesian(cfg, *trials, &mut out)?,
        Command::Abelian { group, subsets } => commands::abelian(cfg, group, subsets, &mut out)?,
        Command::Dims => commands::dims(cfg, &mut out)?,
        Command::Figure { id } => figures::emit(cfg, *id, &mut out)?,
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            for p in out.written() {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
