//! Configuration, orchestration and file output for the `ahscatter` binary.

pub mod config;
pub mod engines;
pub mod output;
pub mod verify;

use std::path::{Path, PathBuf};

use ahscatter::gz::GzError;
use ahscatter::normalform::NormalFormError;
use ahscatter::polescan::PolescanError;
use ahscatter::radial::RadialError;
use thiserror::Error;

pub use config::{Engine, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("{failed} verification criteria failed")]
    VerifyFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::VerifyFailed { .. } => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<RadialError> for CliError {
    fn from(e: RadialError) -> Self {
        match e {
            RadialError::DomainError(_)
            | RadialError::LatticeGuard { .. }
            | RadialError::IndicialCollision { .. }
            | RadialError::InvalidProfile(_)
            | RadialError::InvalidOption(_) => CliError::Config(e.to_string()),
            RadialError::IntegratorFailure { .. } | RadialError::IllConditioned { .. } | RadialError::AtResonance { .. } => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<PolescanError> for CliError {
    fn from(e: PolescanError) -> Self {
        match e {
            PolescanError::Radial(r) => r.into(),
            PolescanError::InvalidRegion(_) | PolescanError::Hypothesis(_) => CliError::Config(e.to_string()),
            PolescanError::ZeroOnContour { .. } | PolescanError::Unresolved { .. } | PolescanError::PolesInside { .. } => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<GzError> for CliError {
    fn from(e: GzError) -> Self {
        match e {
            GzError::DegreeBound { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<NormalFormError> for CliError {
    fn from(e: NormalFormError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Validates `cfg` for `engine`, runs it and writes its artifacts under `out`.
/// Returns the written paths in a fixed order.
pub fn run(engine: Engine, cfg: &RunConfig, out: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate(engine)?;
    std::fs::create_dir_all(out)?;
    match engine {
        Engine::Gz => engines::run_gz(cfg, out),
        Engine::Normalform => engines::run_normalform(cfg, out),
        Engine::Modes => engines::run_modes(cfg, out),
        Engine::Resonances => engines::run_resonances(cfg, out, svg),
        Engine::Accumulate => engines::run_accumulate(cfg, out, svg),
        Engine::Verify => verify::run_verify(cfg, out, svg),
    }
}
