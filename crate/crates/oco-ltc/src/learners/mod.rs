//! The constrained online learners and the two baselines, each as a pure step
//! function over explicit state, plus the parameter schedules their analyses
//! mandate.
//!
//! Step functions are deterministic maps `(state, inputs) -> state`;
//! independent runs may execute concurrently, while a single run is
//! sequential by nature. Every emitted decision satisfies its state's ball
//! invariant exactly (post-projection).

mod bandit;
mod baselines;
mod primal_dual;
mod prox;

pub use bandit::{bandit_schedule, bandit_step, two_point_gradient_sample};
pub use baselines::{
    ogd_step_size, penalty_ogd_step, penalty_step_size, projected_ogd_step, PenaltyMode,
};
pub use primal_dual::{
    alg1_schedule, alg1_step, alg1_zero_violation_schedule, alg1_zero_violation_step,
    lagrangian_grad_lambda, lagrangian_grad_x, lagrangian_value, max_constraint,
};
pub use prox::{prox_schedule, prox_step, saddle_grad_lambda, saddle_grad_x, ProxVariant};

use alloc::vec::Vec;

use crate::math::Multipliers;

/// Hyperparameters derived from a learner's analysis.
///
/// Each schedule constructor fills the fields its learner uses and leaves the
/// rest at zero. Invariants: `eta > 0`; `delta > 0` where used; for the bandit
/// learner `zeta <= xi * inner_radius`, so perturbed query points stay inside
/// the enclosing ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    /// Step size.
    pub eta: f64,
    /// Dual regularizer weight.
    pub delta: f64,
    /// Constraint tightening (zero-violation variants only).
    pub gamma: f64,
    /// Exploration radius (bandit only).
    pub zeta: f64,
    /// Ball shrinkage in `[0, 1)` (bandit only).
    pub xi: f64,
    /// Schedule constant `a`.
    pub a: f64,
    /// Schedule constant `b`.
    pub b: f64,
}

/// Primal decision and dual multipliers for the gradient learners.
///
/// Invariants: `|x| <= R` and every multiplier nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualState {
    pub x: Vec<f64>,
    pub lambdas: Multipliers,
}

impl PrimalDualState {
    /// The prescribed start: `x_1 = 0`, `lambda_1 = 0`.
    pub fn origin(dim: usize, num_constraints: usize) -> Self {
        Self {
            x: alloc::vec![0.0; dim],
            lambdas: Multipliers::zeros(num_constraints),
        }
    }
}

/// Extragradient state: auxiliary pair `(z, mu)` plus the last emitted
/// decision pair `(x, lambdas)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxState {
    /// Auxiliary primal point (`|z| <= R`).
    pub z: Vec<f64>,
    /// Auxiliary dual multipliers.
    pub mu: Multipliers,
    /// Emitted decision (`|x| <= R`).
    pub x: Vec<f64>,
    /// Emitted dual multipliers.
    pub lambdas: Multipliers,
}

impl ProxState {
    /// The prescribed start: `z_1 = 0`, `mu_1 = 0`.
    pub fn origin(dim: usize, num_constraints: usize) -> Self {
        Self {
            z: alloc::vec![0.0; dim],
            mu: Multipliers::zeros(num_constraints),
            x: alloc::vec![0.0; dim],
            lambdas: Multipliers::zeros(num_constraints),
        }
    }
}

/// Bandit learner state: a decision inside the shrunk ball `(1 - xi) R` and a
/// scalar multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditState {
    pub x: Vec<f64>,
    pub lambda: f64,
}

impl BanditState {
    /// The prescribed start: `x_1 = 0`, `lambda_1 = 0`.
    pub fn origin(dim: usize) -> Self {
        Self {
            x: alloc::vec![0.0; dim],
            lambda: 0.0,
        }
    }
}
