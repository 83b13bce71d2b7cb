//! Simultaneous primal descent / dual ascent on the regularized Lagrangian
//!
//! ```text
//! L_t(x, lambda) = f_t(x) + sum_i { lambda_i g_i(x) - (delta eta / 2) lambda_i^2 }
//! ```
//!
//! The quadratic dual regularizer keeps the multipliers from growing
//! unboundedly, which is what lets the scheme work with an unbounded dual
//! domain. The zero-violation variant runs the same update on the single
//! tightened max-constraint `g(x) + gamma` with a scalar multiplier.

use alloc::vec::Vec;

use crate::fx;
use crate::math::{self, BallDomain};
use crate::problems::{ConstraintFn, LossFn};
use crate::{Error, Result};

use super::{PrimalDualState, ScheduleParams};

/// Schedule for the violation-tolerant learner:
/// `a = R sqrt((m+1) G^2 + 2 m D^2)`, `eta = R^2 / (a sqrt(T))`,
/// `delta = 2 (m+1) G^2`.
///
/// Fails with the smallest admissible horizon when `T` is too small for
/// either largeness condition (`2 sqrt(2) eta (m+1) <= 1`, or `delta`
/// dominating `(m+1) G^2 + 2 m delta^2 eta^2`).
pub fn alg1_schedule(
    horizon: u64,
    num_constraints: usize,
    grad_bound: f64,
    constraint_bound: f64,
    radius: f64,
) -> Result<ScheduleParams> {
    if num_constraints == 0 {
        return Err(Error::EmptyConstraints);
    }
    assert!(horizon >= 1 && grad_bound > 0.0 && radius > 0.0);
    let m = num_constraints as f64;
    let g2 = grad_bound * grad_bound;
    let r2 = radius * radius;
    let a = radius * fx::sqrt((m + 1.0) * g2 + 2.0 * m * constraint_bound * constraint_bound);
    let delta = 2.0 * (m + 1.0) * g2;
    let admissible = |t: f64| {
        let eta = r2 / (a * fx::sqrt(t));
        2.0 * fx::sqrt(2.0) * eta * (m + 1.0) <= 1.0
            && delta >= (m + 1.0) * g2 + 2.0 * m * delta * delta * eta * eta
    };
    let eta = r2 / (a * fx::sqrt(horizon as f64));
    if !admissible(horizon as f64) {
        // Invert both conditions at eta = R^2 / (a sqrt(T)); walk past any
        // rounding at the boundary so the reported T is admissible.
        let s1 = 2.0 * fx::sqrt(2.0) * (m + 1.0) * r2 / a;
        let s2 = r2 * grad_bound * fx::sqrt(8.0 * m * (m + 1.0)) / a;
        let mut min_t = fx::ceil(s1.max(s2) * s1.max(s2)).max(1.0) as u64;
        while !admissible(min_t as f64) {
            min_t += 1;
        }
        return Err(Error::HorizonTooSmall {
            horizon,
            min_admissible: min_t,
        });
    }
    Ok(ScheduleParams {
        eta,
        delta,
        gamma: 0.0,
        zeta: 0.0,
        xi: 0.0,
        a,
        b: 0.0,
    })
}

/// `L_t(x, lambda)` itself; used by the per-step inequality checks.
pub fn lagrangian_value(
    loss: &LossFn,
    constraints: &[ConstraintFn],
    x: &[f64],
    lambdas: &[f64],
    params: &ScheduleParams,
) -> f64 {
    debug_assert_eq!(constraints.len(), lambdas.len());
    let coupling: f64 = constraints
        .iter()
        .zip(lambdas)
        .map(|(c, &l)| l * c.value(x))
        .sum();
    loss.value(x) + coupling - 0.5 * params.delta * params.eta * math::norm_sq(lambdas)
}

/// `grad_x L_t = grad f_t(x) + sum_i lambda_i grad g_i(x)`.
pub fn lagrangian_grad_x(
    loss_grad: &[f64],
    constraints: &[ConstraintFn],
    x: &[f64],
    lambdas: &[f64],
) -> Vec<f64> {
    debug_assert_eq!(constraints.len(), lambdas.len());
    let mut out = loss_grad.to_vec();
    for (c, &l) in constraints.iter().zip(lambdas) {
        if l != 0.0 {
            for (o, v) in out.iter_mut().zip(c.gradient(x)) {
                *o += l * v;
            }
        }
    }
    out
}

/// `grad_{lambda_i} L_t = g_i(x) - eta delta lambda_i`.
pub fn lagrangian_grad_lambda(
    constraints: &[ConstraintFn],
    x: &[f64],
    lambdas: &[f64],
    params: &ScheduleParams,
) -> Vec<f64> {
    debug_assert_eq!(constraints.len(), lambdas.len());
    constraints
        .iter()
        .zip(lambdas)
        .map(|(c, &l)| c.value(x) - params.eta * params.delta * l)
        .collect()
}

/// One primal-dual round: ball-projected descent in `x`, clamped ascent in
/// `lambda`, both from gradients taken at the current pair.
pub fn alg1_step(
    state: &PrimalDualState,
    loss_grad: &[f64],
    constraints: &[ConstraintFn],
    domain: &BallDomain,
    params: &ScheduleParams,
) -> Result<PrimalDualState> {
    debug_assert_eq!(constraints.len(), state.lambdas.len());
    if !math::all_finite(loss_grad) {
        return Err(Error::NonFinite {
            what: "loss gradient",
        });
    }
    let grad_x = lagrangian_grad_x(loss_grad, constraints, &state.x, state.lambdas.values());
    if !math::all_finite(&grad_x) {
        return Err(Error::NonFinite {
            what: "primal gradient",
        });
    }
    let x = domain.project(&math::add_scaled(&state.x, -params.eta, &grad_x))?;
    let grad_lambda = lagrangian_grad_lambda(constraints, &state.x, state.lambdas.values(), params);
    let lambdas = math::clamp_nonneg(&math::add_scaled(
        state.lambdas.values(),
        params.eta,
        &grad_lambda,
    ));
    Ok(PrimalDualState { x, lambdas })
}

/// `g(x) = max_i g_i(x)` and a subgradient of it: the gradient of the
/// achieving constraint, ties broken by the smallest index.
pub fn max_constraint(x: &[f64], constraints: &[ConstraintFn]) -> (f64, Vec<f64>) {
    assert!(!constraints.is_empty(), "max over an empty constraint set");
    let mut best = 0usize;
    let mut value = constraints[0].value(x);
    for (i, c) in constraints.iter().enumerate().skip(1) {
        let v = c.value(x);
        // Strict comparison keeps the smallest achieving index on ties.
        if v > value {
            value = v;
            best = i;
        }
    }
    (value, constraints[best].gradient(x))
}

/// Schedule for the zero-violation variant: `delta = 4 G^2`,
/// `eta = R^2 / (a sqrt(T))`, `gamma = b T^(-1/4)`, where
/// `a = 2 R / sqrt(2 G^2 + 3 (D^2 + b^2))` and
/// `b = 2 sqrt(F (delta R^2 / a + a / R^2))` are resolved jointly by
/// alternating the two formulas from `b = 0` until successive `b` values
/// agree to `1e-12` (at most 100 rounds); both defining equations are then
/// re-checked to `1e-10`.
///
/// Admissibility requires both `F T >= a sqrt(T)` and the dual-regularizer
/// dominance `delta >= 2 G^2 + 3 delta^2 eta^2` the analysis rests on; the
/// violation guarantee demonstrably fails at horizons where the latter
/// breaks, so both gate the schedule.
pub fn alg1_zero_violation_schedule(
    horizon: u64,
    grad_bound: f64,
    constraint_bound: f64,
    radius: f64,
    loss_range: f64,
) -> Result<ScheduleParams> {
    assert!(horizon >= 1 && grad_bound > 0.0 && radius > 0.0);
    assert!(loss_range > 0.0, "loss range bound F must be positive");
    let g2 = grad_bound * grad_bound;
    let d2 = constraint_bound * constraint_bound;
    let r2 = radius * radius;
    let delta = 4.0 * g2;

    let resolve_a = |b: f64| 2.0 * radius / fx::sqrt(2.0 * g2 + 3.0 * (d2 + b * b));
    let resolve_b = |a: f64| 2.0 * fx::sqrt(loss_range * (delta * r2 / a + a / r2));

    let mut b = 0.0;
    let mut settled = false;
    for _ in 0..100 {
        let next = resolve_b(resolve_a(b));
        if fx::abs(next - b) < 1e-12 {
            b = next;
            settled = true;
            break;
        }
        b = next;
    }
    if !settled {
        return Err(Error::FixedPointDiverged { iterations: 100 });
    }
    let a = resolve_a(b);
    if fx::abs(a - resolve_a(b)) > 1e-10 || fx::abs(b - resolve_b(a)) > 1e-10 {
        return Err(Error::FixedPointDiverged { iterations: 100 });
    }

    let admissible = |t: f64| {
        let eta = r2 / (a * fx::sqrt(t));
        loss_range * t >= a * fx::sqrt(t) && delta >= 2.0 * g2 + 3.0 * delta * delta * eta * eta
    };
    let t = horizon as f64;
    if !admissible(t) {
        let s1 = a / loss_range;
        // Dominance at delta = 4 G^2 needs eta <= 1 / (sqrt(24) G).
        let s2 = fx::sqrt(24.0) * grad_bound * r2 / a;
        let mut min_t = fx::ceil((s1 * s1).max(s2 * s2)).max(1.0) as u64;
        while !admissible(min_t as f64) {
            min_t += 1;
        }
        return Err(Error::HorizonTooSmall {
            horizon,
            min_admissible: min_t,
        });
    }
    let eta = r2 / (a * fx::sqrt(t));
    let gamma = b * fx::powf(t, -0.25);
    Ok(ScheduleParams {
        eta,
        delta,
        gamma,
        zeta: 0.0,
        xi: 0.0,
        a,
        b,
    })
}

/// One round of the zero-violation variant: the primal-dual update applied to
/// the single tightened constraint `g(x) + gamma` with `g = max_i g_i`.
pub fn alg1_zero_violation_step(
    state: &PrimalDualState,
    loss_grad: &[f64],
    constraints: &[ConstraintFn],
    domain: &BallDomain,
    params: &ScheduleParams,
) -> Result<PrimalDualState> {
    debug_assert_eq!(
        state.lambdas.len(),
        1,
        "this variant keeps a scalar multiplier"
    );
    if !math::all_finite(loss_grad) {
        return Err(Error::NonFinite {
            what: "loss gradient",
        });
    }
    let lambda = state.lambdas.values()[0];
    let (g_value, g_subgrad) = max_constraint(&state.x, constraints);
    let grad_x = math::add_scaled(loss_grad, lambda, &g_subgrad);
    if !math::all_finite(&grad_x) {
        return Err(Error::NonFinite {
            what: "primal gradient",
        });
    }
    let x = domain.project(&math::add_scaled(&state.x, -params.eta, &grad_x))?;
    let dual_grad = g_value + params.gamma - params.eta * params.delta * lambda;
    let lambdas = math::clamp_nonneg(&[lambda + params.eta * dual_grad]);
    Ok(PrimalDualState { x, lambdas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::PrimalDualState;
    use crate::problems::LossFn;

    fn ball(r: f64) -> BallDomain {
        BallDomain::new(r, 0.1 * r).unwrap()
    }

    fn single_constraint_1d(b: f64) -> Vec<ConstraintFn> {
        vec![ConstraintFn::linear(vec![1.0], b).unwrap()]
    }

    #[test]
    fn schedule_matches_analysis_constants() {
        let p = alg1_schedule(10_000, 1, 1.0, 1.0, 1.0).unwrap();
        assert!((p.a - 2.0).abs() < 1e-15);
        assert!((p.eta - 0.005).abs() < 1e-15);
        assert!((p.delta - 4.0).abs() < 1e-15);
        // delta margin: 4 - (2 + 2 * 16 * 0.005^2) = 1.9992.
        let margin = p.delta - (2.0 + 2.0 * p.delta * p.delta * p.eta * p.eta);
        assert!((margin - 1.9992).abs() < 1e-12, "margin {margin}");
    }

    #[test]
    fn schedule_rejects_degenerate_and_small() {
        assert_eq!(
            alg1_schedule(100, 0, 1.0, 1.0, 1.0),
            Err(Error::EmptyConstraints)
        );
        match alg1_schedule(1, 1, 10.0, 10.0, 10.0) {
            Err(Error::HorizonTooSmall { min_admissible, .. }) => {
                assert!(alg1_schedule(min_admissible, 1, 10.0, 10.0, 10.0).is_ok());
                assert!(alg1_schedule(min_admissible - 1, 1, 10.0, 10.0, 10.0).is_err());
            }
            other => panic!("expected HorizonTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn step_matches_hand_evaluation() {
        // d = 1, grad f = 1, g(x) = x - 0.5, eta = 0.1, delta = 1, R = 1.
        let params = ScheduleParams {
            eta: 0.1,
            delta: 1.0,
            gamma: 0.0,
            zeta: 0.0,
            xi: 0.0,
            a: 0.0,
            b: 0.0,
        };
        let state = PrimalDualState::origin(1, 1);
        let next = alg1_step(
            &state,
            &[1.0],
            &single_constraint_1d(0.5),
            &ball(1.0),
            &params,
        )
        .unwrap();
        assert!((next.x[0] + 0.1).abs() < 1e-15);
        assert_eq!(next.lambdas.values(), &[0.0], "max(0, 0.1 * (-0.5)) = 0");
    }

    #[test]
    fn duals_stay_zero_while_feasible() {
        let params = ScheduleParams {
            eta: 0.05,
            delta: 2.0,
            gamma: 0.0,
            zeta: 0.0,
            xi: 0.0,
            a: 0.0,
            b: 0.0,
        };
        let constraints = single_constraint_1d(0.9);
        let mut state = PrimalDualState::origin(1, 1);
        for _ in 0..10 {
            state = alg1_step(&state, &[1.0], &constraints, &ball(1.0), &params).unwrap();
            assert_eq!(state.lambdas.values(), &[0.0]);
        }
    }

    #[test]
    fn zero_eta_is_identity() {
        let params = ScheduleParams {
            eta: 0.0,
            delta: 1.0,
            gamma: 0.0,
            zeta: 0.0,
            xi: 0.0,
            a: 0.0,
            b: 0.0,
        };
        let state = PrimalDualState {
            x: vec![0.3],
            lambdas: math::clamp_nonneg(&[0.7]),
        };
        let next = alg1_step(
            &state,
            &[1.0],
            &single_constraint_1d(0.5),
            &ball(1.0),
            &params,
        )
        .unwrap();
        assert_eq!(next, state);
    }

    #[test]
    fn step_rejects_non_finite_gradient() {
        let params = ScheduleParams {
            eta: 0.1,
            delta: 1.0,
            gamma: 0.0,
            zeta: 0.0,
            xi: 0.0,
            a: 0.0,
            b: 0.0,
        };
        let state = PrimalDualState::origin(1, 1);
        assert!(alg1_step(
            &state,
            &[f64::NAN],
            &single_constraint_1d(0.5),
            &ball(1.0),
            &params
        )
        .is_err());
    }

    #[test]
    fn max_constraint_selection_and_ties() {
        let constraints = vec![
            ConstraintFn::linear(vec![1.0, 0.0], 0.5).unwrap(),
            ConstraintFn::linear(vec![0.0, 1.0], 0.2).unwrap(),
        ];
        let (v, sub) = max_constraint(&[0.0, 0.5], &constraints);
        assert!((v - 0.3).abs() < 1e-15);
        assert_eq!(sub, vec![0.0, 1.0]);
        // Tie at the origin offsets: smallest index wins.
        let tied = vec![
            ConstraintFn::linear(vec![1.0, 0.0], 0.5).unwrap(),
            ConstraintFn::linear(vec![0.0, 1.0], 0.5).unwrap(),
        ];
        let (_, sub) = max_constraint(&[0.0, 0.0], &tied);
        assert_eq!(sub, vec![1.0, 0.0]);
        // Singleton reduces to the constraint itself.
        let single = single_constraint_1d(0.5);
        let (v, sub) = max_constraint(&[0.2], &single);
        assert!((v + 0.3).abs() < 1e-15);
        assert_eq!(sub, vec![1.0]);
    }

    #[test]
    fn zero_violation_schedule_consistency() {
        let p = alg1_zero_violation_schedule(100_000, 1.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!(p.delta, 4.0, "delta = 4 G^2");
        let t = 100_000f64;
        assert!(
            (p.gamma * t.powf(0.25) - p.b).abs() < 1e-10,
            "gamma T^(1/4) = b"
        );
        // Both defining equations hold at the resolved pair.
        let a_eq = 2.0 / (2.0 + 3.0 * (1.0 + p.b * p.b)).sqrt();
        let b_eq = 2.0 * (2.0 * (4.0 / p.a + p.a)).sqrt();
        assert!((p.a - a_eq).abs() < 1e-10);
        assert!((p.b - b_eq).abs() < 1e-10);
        // The dominance condition holds at the admitted horizon.
        assert!(p.delta >= 2.0 + 3.0 * p.delta * p.delta * p.eta * p.eta);
    }

    #[test]
    fn zero_violation_schedule_gates_small_horizons() {
        match alg1_zero_violation_schedule(10_000, 1.0, 1.0, 1.0, 2.0) {
            Err(Error::HorizonTooSmall { min_admissible, .. }) => {
                assert!(alg1_zero_violation_schedule(min_admissible, 1.0, 1.0, 1.0, 2.0).is_ok());
                assert!(
                    alg1_zero_violation_schedule(min_admissible - 1, 1.0, 1.0, 1.0, 2.0).is_err()
                );
            }
            other => panic!("expected HorizonTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn zero_violation_step_hand_evaluation() {
        // d = 1, g(x) = x - 0.5, gamma = 0.1, x = 0, lambda = 1, eta = 0.1, delta = 1.
        let params = ScheduleParams {
            eta: 0.1,
            delta: 1.0,
            gamma: 0.1,
            zeta: 0.0,
            xi: 0.0,
            a: 0.0,
            b: 0.0,
        };
        let state = PrimalDualState {
            x: vec![0.0],
            lambdas: math::clamp_nonneg(&[1.0]),
        };
        let next = alg1_zero_violation_step(
            &state,
            &[0.0],
            &single_constraint_1d(0.5),
            &ball(1.0),
            &params,
        )
        .unwrap();
        assert!((next.lambdas.values()[0] - 0.95).abs() < 1e-15);
    }

    #[test]
    fn zero_violation_dual_decays_at_exact_margin() {
        // Feasible with margin g(x) = -gamma: only the regularizer moves the
        // dual, by -eta * (eta delta lambda).
        let params = ScheduleParams {
            eta: 0.1,
            delta: 2.0,
            gamma: 0.3,
            zeta: 0.0,
            xi: 0.0,
            a: 0.0,
            b: 0.0,
        };
        let constraints = single_constraint_1d(0.5);
        let x = 0.5 - params.gamma;
        let state = PrimalDualState {
            x: vec![x],
            lambdas: math::clamp_nonneg(&[1.5]),
        };
        let next =
            alg1_zero_violation_step(&state, &[0.0], &constraints, &ball(1.0), &params).unwrap();
        let expected = 1.5 - params.eta * (params.eta * params.delta * 1.5);
        assert!((next.lambdas.values()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_violation_with_zero_gamma_reduces_to_alg1() {
        let params = ScheduleParams {
            eta: 0.07,
            delta: 1.5,
            gamma: 0.0,
            zeta: 0.0,
            xi: 0.0,
            a: 0.0,
            b: 0.0,
        };
        let constraints = single_constraint_1d(0.2);
        let domain = ball(1.0);
        let mut a = PrimalDualState::origin(1, 1);
        let mut b = PrimalDualState::origin(1, 1);
        for step in 0..50 {
            let grad = [if step % 2 == 0 { 1.0 } else { -0.4 }];
            a = alg1_step(&a, &grad, &constraints, &domain, &params).unwrap();
            b = alg1_zero_violation_step(&b, &grad, &constraints, &domain, &params).unwrap();
            assert_eq!(a, b, "single constraint, gamma = 0: identical trajectories");
        }
    }

    #[test]
    fn lagrangian_value_uses_regularizer() {
        let params = ScheduleParams {
            eta: 0.1,
            delta: 2.0,
            gamma: 0.0,
            zeta: 0.0,
            xi: 0.0,
            a: 0.0,
            b: 0.0,
        };
        let loss = LossFn::linear(vec![1.0]);
        let constraints = single_constraint_1d(0.5);
        let v = lagrangian_value(&loss, &constraints, &[0.3], &[2.0], &params);
        // 0.3 + 2 * (0.3 - 0.5) - 0.5 * 0.2 * 4 = 0.3 - 0.4 - 0.4
        assert!((v + 0.5).abs() < 1e-15);
    }
}
