//! Experiment configuration and validation.

use std::path::PathBuf;

use crate::CliError;

/// Which learner to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    /// Primal-dual learner with controlled violations.
    #[value(name = "alg1")]
    Alg1,
    /// Primal-dual learner on the tightened max-constraint (no violations).
    #[value(name = "alg1-zero")]
    Alg1Zero,
    /// Extragradient learner for linear constraints.
    #[value(name = "prox")]
    Prox,
    /// Extragradient learner with per-constraint tightening (no violations).
    #[value(name = "prox-zero")]
    ProxZero,
    /// Two-point bandit learner.
    #[value(name = "bandit")]
    Bandit,
    /// Projected-descent baseline: every iterate projected onto K.
    #[value(name = "ogd-proj")]
    OgdProjected,
    /// Fixed-penalty descent, linear penalty term.
    #[value(name = "penalty-linear")]
    PenaltyLinear,
    /// Fixed-penalty descent, squared penalty term.
    #[value(name = "penalty-squared")]
    PenaltySquared,
}

impl Algorithm {
    /// The name used in CSV rows and file names.
    pub fn name(self) -> &'static str {
        match self {
            Self::Alg1 => "alg1",
            Self::Alg1Zero => "alg1-zero",
            Self::Prox => "prox",
            Self::ProxZero => "prox-zero",
            Self::Bandit => "bandit",
            Self::OgdProjected => "ogd-proj",
            Self::PenaltyLinear => "penalty-linear",
            Self::PenaltySquared => "penalty-squared",
        }
    }
}

/// Which loss/instance family to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LossFamily {
    /// Random linear losses on a random polyhedral constraint set.
    Linear,
    /// Random quadratic losses on a random polyhedral constraint set.
    Quadratic,
    /// The fixed penalty-failure instance (single constraint, infeasible
    /// start); `m`, `R` and `r` from the config are ignored.
    PenaltyFailure,
}

/// A full experiment: one algorithm over a horizon/seed grid.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub dim: usize,
    pub num_constraints: usize,
    /// Strictly increasing horizon grid.
    pub horizons: Vec<u64>,
    pub seeds: Vec<u64>,
    pub loss_family: LossFamily,
    pub radius: f64,
    pub inner_radius: f64,
    /// Gradient bound for generated losses (`L_f`, and the curvature bound of
    /// the quadratic family).
    pub grad_bound: f64,
    pub out_dir: PathBuf,
    /// Also write one per-round trace CSV per grid point.
    pub trace: bool,
    /// Penalty weight for the penalty baselines.
    pub penalty_delta: f64,
    /// Measure wall-clock `runtime_ms` per grid point. Off by default so that
    /// re-runs with identical config and seeds produce byte-identical CSVs;
    /// when off the column is written as 0.
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.dim == 0 {
            return Err(CliError::Config("dimension must be at least 1".into()));
        }
        if self.num_constraints == 0 {
            return Err(CliError::Config("need at least one constraint".into()));
        }
        if self.horizons.is_empty() {
            return Err(CliError::Config("horizon grid is empty".into()));
        }
        if self.horizons[0] == 0 {
            return Err(CliError::Config("horizons must be at least 1".into()));
        }
        if self.horizons.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(
                "horizon grid must be strictly increasing".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Config("seed list is empty".into()));
        }
        if !(self.radius > 0.0 && self.inner_radius > 0.0 && self.inner_radius <= self.radius) {
            return Err(CliError::Config(format!(
                "ball radii must satisfy 0 < r <= R, got r = {}, R = {}",
                self.inner_radius, self.radius
            )));
        }
        if self.grad_bound <= 0.0 {
            return Err(CliError::Config("gradient bound must be positive".into()));
        }
        if self.penalty_delta <= 0.0 {
            return Err(CliError::Config("penalty delta must be positive".into()));
        }
        Ok(())
    }
}
