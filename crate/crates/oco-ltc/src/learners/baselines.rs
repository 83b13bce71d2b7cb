//! Baseline learners: projected online gradient descent (the scheme the
//! constrained learners avoid paying for) and the fixed-penalty variant that
//! folds constraint violations into the loss with a constant weight.

use alloc::vec::Vec;

use crate::fx;
use crate::math::{self, BallDomain};
use crate::problems::ConstraintFn;
use crate::{Error, Result};

/// How the penalty term treats a positive constraint value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyMode {
    /// Penalty `delta * sum_i [g_i(x)]_+`; subgradient `delta * grad g_i`
    /// wherever `g_i(x) > 0`.
    Linear,
    /// Penalty `(delta / 2) * sum_i [g_i(x)]_+^2`; gradient
    /// `delta * [g_i(x)]_+ * grad g_i`, continuous across the boundary.
    Squared,
}

/// The classical step size `R / (G sqrt(T))` for projected descent.
pub fn ogd_step_size(radius: f64, grad_bound: f64, horizon: u64) -> f64 {
    radius / (grad_bound * fx::sqrt(horizon as f64))
}

/// One projected-descent round: `x' = proj_K(x - eta * grad f_t(x))`, with
/// the projection onto `K` supplied by the caller (Dykstra at desk scale).
pub fn projected_ogd_step<P>(x: &[f64], loss_grad: &[f64], project: P, eta: f64) -> Result<Vec<f64>>
where
    P: FnOnce(&[f64]) -> Result<Vec<f64>>,
{
    if !math::all_finite(loss_grad) {
        return Err(Error::NonFinite {
            what: "loss gradient",
        });
    }
    project(&math::add_scaled(x, -eta, loss_grad))
}

/// Step size minimizing the penalty analysis bound:
/// `R / (G sqrt(2 (1 + m delta^2 D^2) T))`.
pub fn penalty_step_size(
    radius: f64,
    grad_bound: f64,
    constraint_bound: f64,
    num_constraints: usize,
    delta: f64,
    horizon: u64,
) -> f64 {
    let amplification =
        1.0 + num_constraints as f64 * delta * delta * constraint_bound * constraint_bound;
    radius / (grad_bound * fx::sqrt(2.0 * amplification * horizon as f64))
}

/// One penalized-descent round on the enclosing ball.
pub fn penalty_ogd_step(
    x: &[f64],
    loss_grad: &[f64],
    constraints: &[ConstraintFn],
    domain: &BallDomain,
    delta: f64,
    eta: f64,
    mode: PenaltyMode,
) -> Result<Vec<f64>> {
    debug_assert!(delta > 0.0);
    if !math::all_finite(loss_grad) {
        return Err(Error::NonFinite {
            what: "loss gradient",
        });
    }
    let mut grad = loss_grad.to_vec();
    for c in constraints {
        let v = c.value(x);
        if v > 0.0 {
            let weight = match mode {
                PenaltyMode::Linear => delta,
                PenaltyMode::Squared => delta * v,
            };
            for (g, cg) in grad.iter_mut().zip(c.gradient(x)) {
                *g += weight * cg;
            }
        }
    }
    domain.project(&math::add_scaled(x, -eta, &grad))
}
