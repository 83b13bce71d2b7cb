//! Two-point bandit learner: the primal-dual scheme driven by constraint
//! *values* only.
//!
//! Each round draws a uniform unit direction `u_t`, queries the aggregated
//! constraint `g = max_i g_i` at the two symmetric points `x_t +- zeta u_t`,
//! and builds
//!
//! ```text
//! g~_x = grad f_t(x_t) + lambda_t (d / 2 zeta) (g(x_t + zeta u_t) - g(x_t - zeta u_t)) u_t
//! g~_lam = (g(x_t + zeta u_t) + g(x_t - zeta u_t)) / 2 - eta delta lambda_t
//! ```
//!
//! The two-point difference keeps the estimator norm bounded by `G d`
//! independently of `zeta`. Decisions live in the shrunk ball `(1 - xi) R` so
//! both query points stay inside the enclosing ball.

use alloc::vec::Vec;

use rand::Rng;

use crate::fx;
use crate::math::{self, BallDomain};
use crate::{Error, Result};

use super::{BanditState, ScheduleParams};

/// Bandit schedule: `eta = R / sqrt(2 (D^2 + G^2) T)`, `delta = 4 d^2 G^2`,
/// `zeta = min(1/T, r/2)`, `xi = zeta / r`.
///
/// Fails with the smallest admissible horizon when `delta` cannot dominate
/// `2 (d^2 G^2 + eta^2 delta^2)`.
pub fn bandit_schedule(
    horizon: u64,
    dim: usize,
    grad_bound: f64,
    constraint_bound: f64,
    radius: f64,
    inner_radius: f64,
) -> Result<ScheduleParams> {
    assert!(horizon >= 1 && dim >= 1 && grad_bound > 0.0);
    assert!(radius > 0.0 && inner_radius > 0.0 && inner_radius <= radius);
    let t = horizon as f64;
    let d2g2 = (dim as f64 * grad_bound) * (dim as f64 * grad_bound);
    let pace = 2.0 * (constraint_bound * constraint_bound + grad_bound * grad_bound);
    let delta = 4.0 * d2g2;
    let dominated = |t: f64| {
        let eta = radius / fx::sqrt(pace * t);
        delta >= 2.0 * (d2g2 + eta * eta * delta * delta)
    };
    let eta = radius / fx::sqrt(pace * t);
    if !dominated(t) {
        // Dominance needs eta <= 1 / (4 d G), i.e. T >= 8 d^2 G^2 R^2 / (D^2 + G^2);
        // walk past any rounding at the boundary so the reported T is admissible.
        let mut min_t = fx::ceil(16.0 * d2g2 * radius * radius / pace).max(1.0) as u64;
        while !dominated(min_t as f64) {
            min_t += 1;
        }
        return Err(Error::HorizonTooSmall {
            horizon,
            min_admissible: min_t,
        });
    }
    let zeta = (1.0 / t).min(inner_radius / 2.0);
    let xi = zeta / inner_radius;
    if xi >= 1.0 {
        return Err(Error::HorizonTooSmall {
            horizon,
            min_admissible: horizon + 1,
        });
    }
    Ok(ScheduleParams {
        eta,
        delta,
        gamma: 0.0,
        zeta,
        xi,
        a: 0.0,
        b: 0.0,
    })
}

/// A single two-point estimate `(d / 2 zeta)(g(x + zeta u) - g(x - zeta u)) u`
/// of the smoothed-constraint gradient at `x` along the unit direction `u`.
pub fn two_point_gradient_sample(
    g: impl Fn(&[f64]) -> f64,
    x: &[f64],
    zeta: f64,
    u: &[f64],
) -> Vec<f64> {
    debug_assert!(zeta > 0.0);
    debug_assert_eq!(x.len(), u.len());
    let plus = g(&math::add_scaled(x, zeta, u));
    let minus = g(&math::add_scaled(x, -zeta, u));
    math::scale(u, x.len() as f64 * (plus - minus) / (2.0 * zeta))
}

/// One bandit round; evaluates `g` exactly twice.
pub fn bandit_step<R: Rng + ?Sized>(
    state: &BanditState,
    loss_grad: &[f64],
    g: impl Fn(&[f64]) -> f64,
    domain: &BallDomain,
    params: &ScheduleParams,
    rng: &mut R,
) -> Result<BanditState> {
    if !math::all_finite(loss_grad) {
        return Err(Error::NonFinite {
            what: "loss gradient",
        });
    }
    let dim = state.x.len();
    let u = math::sample_unit_sphere(rng, dim);
    let plus_point = math::add_scaled(&state.x, params.zeta, &u);
    let minus_point = math::add_scaled(&state.x, -params.zeta, &u);
    for p in [&plus_point, &minus_point] {
        let n = math::norm(p);
        if n > domain.radius() * (1.0 + 1e-12) {
            return Err(Error::QueryOutsideBall {
                norm: n,
                radius: domain.radius(),
            });
        }
    }
    let g_plus = g(&plus_point);
    let g_minus = g(&minus_point);

    let estimate = dim as f64 * (g_plus - g_minus) / (2.0 * params.zeta);
    let grad_x = math::add_scaled(loss_grad, state.lambda * estimate, &u);
    let shrunk_radius = (1.0 - params.xi) * domain.radius();
    let x = math::project_ball(
        &math::add_scaled(&state.x, -params.eta, &grad_x),
        shrunk_radius,
    )?;

    let grad_lambda = 0.5 * (g_plus + g_minus) - params.eta * params.delta * state.lambda;
    let lambda = (state.lambda + params.eta * grad_lambda).max(0.0);
    Ok(BanditState { x, lambda })
}
