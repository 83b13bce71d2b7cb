//! Extragradient (mirror-prox) updates for linear constraints.
//!
//! The saddle part of the Lagrangian,
//!
//! ```text
//! F(x, lambda) = sum_i { lambda_i g_i(x) - (delta eta / 2) lambda_i^2 },
//! ```
//!
//! has a Lipschitz gradient when every `g_i` is linear with a unit normal,
//! which is what the extragradient scheme exploits: each round first
//! extrapolates `(x_t, lambda_t)` from the auxiliary pair `(z_t, mu_t)` using
//! the gradients of `F`, then moves the auxiliary pair using the full
//! per-round gradients taken at the extrapolated pair.

use alloc::vec::Vec;

use crate::fx;
use crate::math::{self, BallDomain};
use crate::problems::{linear_normals, ConstraintFn};
use crate::{Error, Result};

use super::{ProxState, ScheduleParams};

/// Which guarantee the schedule targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxVariant {
    /// `eta = T^(-1/3)`, `delta = T^(-2/3)`: sublinear regret and violation.
    Violating,
    /// `eta = delta = T^(-1/3)` with per-constraint tightening
    /// `gamma = 2 sqrt(F) T^(-1/3)`: long-term constraints hold exactly.
    ZeroViolation,
}

/// Extragradient schedule. Requires `T >= 164 (m+1)^3`; the smoothness
/// condition `eta (m + delta^2 eta^2) <= 1/4` is re-checked numerically.
pub fn prox_schedule(
    horizon: u64,
    num_constraints: usize,
    variant: ProxVariant,
    loss_range: f64,
) -> Result<ScheduleParams> {
    if num_constraints == 0 {
        return Err(Error::EmptyConstraints);
    }
    let threshold = 164 * (num_constraints as u64 + 1).pow(3);
    if horizon < threshold {
        return Err(Error::HorizonTooSmall {
            horizon,
            min_admissible: threshold,
        });
    }
    let t = horizon as f64;
    let inv_cbrt = 1.0 / fx::cbrt(t);
    let (eta, delta, gamma, b) = match variant {
        ProxVariant::Violating => (inv_cbrt, inv_cbrt * inv_cbrt, 0.0, 0.0),
        ProxVariant::ZeroViolation => {
            assert!(loss_range > 0.0, "loss range bound F must be positive");
            let b = 2.0 * fx::sqrt(loss_range);
            (inv_cbrt, inv_cbrt, b * inv_cbrt, b)
        }
    };
    let smooth = eta * (num_constraints as f64 + delta * delta * eta * eta);
    assert!(
        smooth <= 0.25,
        "smoothness condition violated: {smooth} > 1/4"
    );
    Ok(ScheduleParams {
        eta,
        delta,
        gamma,
        zeta: 0.0,
        xi: 0.0,
        a: 0.0,
        b,
    })
}

/// `grad_x F(., lambda) = sum_i lambda_i a_i` (linear constraints only).
pub fn saddle_grad_x(constraints: &[ConstraintFn], lambdas: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(constraints.len(), lambdas.len());
    let normals = linear_normals(constraints)?;
    let mut out = alloc::vec![0.0; normals[0].len()];
    for (a, &l) in normals.iter().zip(lambdas) {
        if l != 0.0 {
            for (o, v) in out.iter_mut().zip(*a) {
                *o += l * v;
            }
        }
    }
    Ok(out)
}

/// `grad_{lambda_i} F = g_i(point) + gamma - delta eta lambda_i`; the
/// tightening `gamma` is zero outside the zero-violation variant.
pub fn saddle_grad_lambda(
    constraints: &[ConstraintFn],
    point: &[f64],
    lambdas: &[f64],
    params: &ScheduleParams,
) -> Vec<f64> {
    debug_assert_eq!(constraints.len(), lambdas.len());
    constraints
        .iter()
        .zip(lambdas)
        .map(|(c, &l)| c.value(point) + params.gamma - params.delta * params.eta * l)
        .collect()
}

/// One extragradient round. The emitted decision is the returned state's `x`;
/// the loss gradient is evaluated at that extrapolated point, so it is passed
/// as a function.
pub fn prox_step(
    state: &ProxState,
    loss_grad_at: impl FnOnce(&[f64]) -> Vec<f64>,
    constraints: &[ConstraintFn],
    domain: &BallDomain,
    params: &ScheduleParams,
) -> Result<ProxState> {
    debug_assert_eq!(constraints.len(), state.mu.len());
    // Extrapolate with the saddle gradients at (z_t, mu_t).
    let fx_grad = saddle_grad_x(constraints, state.mu.values())?;
    let x = domain.project(&math::add_scaled(&state.z, -params.eta, &fx_grad))?;
    let flam = saddle_grad_lambda(constraints, &state.z, state.mu.values(), params);
    let lambdas = math::clamp_nonneg(&math::add_scaled(state.mu.values(), params.eta, &flam));

    // Move the auxiliary pair with the full gradients at (x_t, lambda_t).
    let loss_grad = loss_grad_at(&x);
    if !math::all_finite(&loss_grad) {
        return Err(Error::NonFinite {
            what: "loss gradient",
        });
    }
    let coupling = saddle_grad_x(constraints, lambdas.values())?;
    let lx = math::add_scaled(&loss_grad, 1.0, &coupling);
    let z = domain.project(&math::add_scaled(&state.z, -params.eta, &lx))?;
    let llam = saddle_grad_lambda(constraints, &x, lambdas.values(), params);
    let mu = math::clamp_nonneg(&math::add_scaled(state.mu.values(), params.eta, &llam));

    Ok(ProxState { z, mu, x, lambdas })
}
