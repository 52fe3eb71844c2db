use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Substitution,
    Cartesian,
    Abelian,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Args, Serialize)]
pub struct RunConfig {
    /// Graph family
    #[arg(long, value_enum, default_value = "substitution", global = true)]
    pub family: Family,
    /// Cube dimension N
    #[arg(long, default_value_t = 7, global = true)]
    pub n: u32,
    /// Cycle length m
    #[arg(long, default_value_t = 21, global = true)]
    pub m: usize,
    /// Bandlimit level K (Ω = 2K unless --omega is given)
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Bandlimit Ω
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Block (cluster) index used as the spatial mask
    #[arg(long, default_value_t = 0, global = true)]
    pub block: usize,
    /// Eigenvalue classification tolerance
    #[arg(long, default_value_t = 1e-8, global = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Output directory
    #[arg(long, default_value = "out", global = true)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Edge list for --family custom (one `a b` pair per line)
    #[arg(long, global = true)]
    pub edges: Option<PathBuf>,
    /// Vertex count for --family custom
    #[arg(long, global = true)]
    pub order: Option<usize>,
}

pub const DEFAULT_K: u32 = 3;

impl RunConfig {
    /// K from --k, else from an even integer --omega, else the default.
    pub fn level(&self) -> Result<u32, CliError> {
        match (self.k, self.omega) {
            (Some(k), _) => Ok(k),
            (None, Some(w)) if w >= 0.0 && (w / 2.0).fract() == 0.0 => Ok((w / 2.0) as u32),
            (None, Some(w)) => Err(CliError::Validation(format!(
                "omega {w} is not 2K for an integer K; pass --k"
            ))),
            (None, None) => Ok(DEFAULT_K),
        }
    }

    pub fn bandlimit(&self) -> Result<f64, CliError> {
        let w = match self.omega {
            Some(w) => w,
            None => 2.0 * self.level()? as f64,
        };
        if !(w >= 0.0) || !w.is_finite() {
            return Err(CliError::Validation(format!("omega must be finite and >= 0, got {w}")));
        }
        Ok(w)
    }

    /// Parameter checks for the structured families, run before any work.
    pub fn validate(&self) -> Result<(), CliError> {
        match self.family {
            Family::Substitution | Family::Cartesian => {
                if self.n == 0 || self.n > 16 {
                    return Err(CliError::Validation(format!("--n must be in 1..=16, got {}", self.n)));
                }
                if self.m < 3 {
                    return Err(CliError::Validation(format!("--m must be at least 3, got {}", self.m)));
                }
                if self.block >= self.m {
                    return Err(CliError::Validation(format!(
                        "--block {} out of range for m = {}",
                        self.block, self.m
                    )));
                }
            }
            Family::Custom => {
                if self.edges.is_none() || self.order.is_none() {
                    return Err(CliError::Validation("--family custom needs --edges and --order".into()));
                }
            }
            Family::Abelian => {}
        }
        if !(self.tol > 0.0 && self.tol < 0.5) {
            return Err(CliError::Validation(format!(
                "--tol must be in (0, 1/2), got {}",
                self.tol
            )));
        }
        if let Some(w) = self.omega {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(CliError::Validation(format!(
                    "--omega must be finite and >= 0, got {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn require(&self, allowed: &[Family], command: &str) -> Result<(), CliError> {
        if allowed.contains(&self.family) {
            Ok(())
        } else {
            Err(CliError::Validation(format!(
                "`{command}` does not support --family {:?}",
                self.family
            )))
        }
    }

    /// 0 < K < N, needed by the cluster-structure reports.
    pub fn interior_level(&self) -> Result<u32, CliError> {
        let k = self.level()?;
        if k == 0 || k >= self.n {
            return Err(CliError::Validation(format!("need 0 < K < N, got K={k}, N={}", self.n)));
        }
        Ok(k)
    }
}
