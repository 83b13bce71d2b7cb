//! Online convex optimization with long-term constraints.
//!
//! Classical projected online gradient descent keeps every iterate inside the
//! feasible region `K = {x : g_i(x) <= 0}` by projecting onto `K` each round,
//! which is expensive for general constraint sets. The learners in this crate
//! relax per-round feasibility to the long-term requirement
//! `sum_t g_i(x_t) <= 0` and replace the projection onto `K` by a cheap
//! projection onto an enclosing ball, trading a controlled amount of
//! constraint violation for efficiency.
//!
//! Four constrained learners are provided, alongside two baselines:
//!
//! - [`learners::alg1_step`]: simultaneous primal descent / dual ascent on a
//!   regularized Lagrangian; `O(sqrt(T))` regret with `O(T^(3/4))` cumulative
//!   violation.
//! - [`learners::alg1_zero_violation_step`]: the same scheme on the tightened
//!   max-constraint `g(x) + gamma <= 0`, which satisfies the long-term
//!   constraint exactly at the price of `O(T^(3/4))` regret.
//! - [`learners::prox_step`]: an extragradient (mirror-prox) saddle-point
//!   update for linear constraints; `O(T^(2/3))` regret and violation.
//! - [`learners::bandit_step`]: a two-point bandit variant that only queries
//!   constraint values at two perturbed points per round; matches the first
//!   learner's rates in expectation.
//! - [`learners::projected_ogd_step`] and [`learners::penalty_ogd_step`]:
//!   the projected and fixed-penalty baselines.
//!
//! The [`oracle`] module holds the desk-scale reference machinery (Dykstra
//! projection, offline best-fixed-decision solver, finite differences,
//! Monte-Carlo smoothing) and [`metrics`] the regret/violation accounting and
//! empirical growth-rate fitting.
//!
//! The crate is `no_std` (with `alloc`); all randomized operations take a
//! caller-provided generator. [`ChaCha8Rng`] is re-exported as the recommended
//! generator: it is seedable, cross-platform reproducible, and supports
//! independent streams for splitting.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod fx;

pub mod learners;
pub mod math;
pub mod metrics;
pub mod oracle;
pub mod problems;

pub use error::{Error, Result};
pub use rand_chacha::ChaCha8Rng;
