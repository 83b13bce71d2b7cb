//! Experiment harness for the long-term-constraints learners: builds seeded
//! problem instances, runs a learner across a horizon/seed grid, accounts
//! regret and violations against the offline oracle, and writes summary and
//! trace CSVs with fitted growth exponents on stdout.

use std::fmt;

pub mod config;
pub mod csv;
pub mod experiment;

pub use config::{Algorithm, ExperimentConfig, LossFamily};
pub use experiment::{build_instance, run_experiment, run_learner, ExperimentOutput, RunError};

/// Harness errors, split by exit code: configuration problems exit 1,
/// runtime/numerical problems exit 2.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(msg) => write!(f, "config error: {msg}"),
            Self::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<oco_ltc::Error> for CliError {
    fn from(err: oco_ltc::Error) -> Self {
        Self::Runtime(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::Runtime(err.to_string())
    }
}
