//! Desk-scale reference computations: the offline best-fixed-decision solver
//! behind regret accounting, Dykstra's projection onto ball-and-halfspace
//! intersections, central finite differences for gradient checks, and
//! Monte-Carlo oracles for the smoothed-constraint estimators.
//!
//! Everything is a pure function of its inputs (and a caller-seeded generator
//! where sampling is involved), so results replay exactly.

use alloc::vec::Vec;

use rand::Rng;

use crate::fx;
use crate::math::{self, BallDomain};
use crate::problems::{linear_normals, ConstraintFn, LossFn};
use crate::{Error, Result};

/// Iteration/tolerance budget for the iterative oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub max_iters: usize,
    pub tol: f64,
    /// Initial step of the decaying schedule `step / sqrt(k)`; `None` derives
    /// `R / G` from the problem at hand.
    pub initial_step: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            tol: 1e-9,
            initial_step: None,
        }
    }
}

impl OracleConfig {
    /// Tighter default for projections, which feed the solver's own tolerance.
    pub fn projection_default() -> Self {
        Self {
            max_iters: 10_000,
            tol: 1e-12,
            initial_step: None,
        }
    }
}

/// Exact Euclidean projection onto `K = (R ball) ∩ {a_i . x <= b_i}` by
/// Dykstra's algorithm with correction terms (plain cyclic projection would
/// find a feasible point, not the nearest one).
///
/// Converged when every constraint holds within `tol` and the geometric tail
/// of the remaining motion — estimated from the contraction of successive
/// cycle displacements — is at most `tol`; fails carrying the residual at the
/// iteration cap.
pub fn dykstra_project(
    x: &[f64],
    constraints: &[ConstraintFn],
    ball: &BallDomain,
    cfg: &OracleConfig,
) -> Result<Vec<f64>> {
    let halfspaces: Vec<(&[f64], f64)> = {
        let normals = linear_normals(constraints)?;
        normals
            .into_iter()
            .zip(constraints)
            .map(|(a, c)| (a, c.linear_form().expect("checked linear").offset))
            .collect()
    };
    let dim = x.len();
    let mut point = x.to_vec();
    let mut corrections = alloc::vec![alloc::vec![0.0; dim]; halfspaces.len() + 1];
    let mut residual = f64::INFINITY;
    let mut prev_moved = f64::NAN;
    for _ in 0..cfg.max_iters {
        let cycle_start = point.clone();
        for (set, correction) in corrections.iter_mut().enumerate() {
            let shifted = math::add_scaled(&point, 1.0, correction);
            let projected = if set == 0 {
                ball.project(&shifted)?
            } else {
                let (normal, offset) = halfspaces[set - 1];
                math::project_halfspace(&shifted, normal, offset)?
            };
            *correction = math::sub(&shifted, &projected);
            point = projected;
        }
        let moved = math::norm(&math::sub(&point, &cycle_start));
        let worst_violation = halfspaces
            .iter()
            .map(|(a, b)| math::dot(&point, a) - b)
            .fold(math::norm(&point) - ball.radius(), f64::max);
        // For a linearly converging cycle the remaining distance is about
        // moved * rate / (1 - rate); without a contraction estimate yet, only
        // a fully stalled cycle counts as converged.
        let remaining = if moved == 0.0 {
            0.0
        } else if prev_moved.is_finite() && moved < prev_moved {
            let rate = moved / prev_moved;
            moved * rate / (1.0 - rate)
        } else {
            f64::INFINITY
        };
        residual = moved.max(worst_violation);
        if worst_violation <= cfg.tol && remaining <= cfg.tol {
            return Ok(point);
        }
        prev_moved = moved;
    }
    Err(Error::DidNotConverge {
        what: "Dykstra projection",
        residual,
    })
}

/// The loss sequence collapsed to one closed-form objective, so the offline
/// solver stays `O(d)` per evaluation regardless of the horizon.
///
/// `sum_t f_t(x) = lin . x + (quad / 2) |x|^2 + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummedLoss {
    lin: Vec<f64>,
    quad: f64,
    constant: f64,
    count: usize,
    round_lipschitz: f64,
}

impl SummedLoss {
    pub fn new(losses: &[LossFn]) -> Self {
        assert!(!losses.is_empty(), "need at least one loss");
        let dim = losses[0].dim();
        let mut lin = alloc::vec![0.0; dim];
        let mut quad = 0.0;
        let mut constant = 0.0;
        let mut round_lipschitz = 0.0f64;
        for loss in losses {
            round_lipschitz = round_lipschitz.max(loss.lipschitz());
            match loss {
                LossFn::Linear { weights } => {
                    for (l, w) in lin.iter_mut().zip(weights) {
                        *l += w;
                    }
                }
                LossFn::Quadratic {
                    curvature, center, ..
                } => {
                    quad += curvature;
                    for (l, p) in lin.iter_mut().zip(center) {
                        *l -= curvature * p;
                    }
                    constant += 0.5 * curvature * math::norm_sq(center);
                }
            }
        }
        Self {
            lin,
            quad,
            constant,
            count: losses.len(),
            round_lipschitz,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        math::dot(&self.lin, x) + 0.5 * self.quad * math::norm_sq(x) + self.constant
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        math::add_scaled(&self.lin, self.quad, x)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Largest per-round Lipschitz constant.
    pub fn round_lipschitz(&self) -> f64 {
        self.round_lipschitz
    }

    /// Lipschitz bound of the *average* loss on the `radius` ball:
    /// `(|lin| + quad * radius) / count`. Adversarial rounds cancel, so this
    /// is typically far below the per-round constant and is the right step
    /// scale for descending the average.
    pub fn mean_lipschitz(&self, radius: f64) -> f64 {
        (math::norm(&self.lin) + self.quad * radius) / self.count as f64
    }
}

/// The regret comparator `min_{x in K} sum_t f_t(x)`: projected gradient
/// descent on the per-round average loss (same minimizer, horizon-free
/// magnitudes), projections by Dykstra, steps `step0 / sqrt(k)` with `step0`
/// matched to the average loss's own Lipschitz bound. Starts from the
/// projection of the origin.
///
/// Returns the minimizer and the *total* loss over the sequence. Converged
/// when the projected-gradient displacement per unit step falls below `tol`.
/// Convexity makes the optimal value unique, so restarts
/// ([`best_fixed_decision_from`]) agree on it within solver tolerance.
pub fn best_fixed_decision(
    ball: &BallDomain,
    constraints: &[ConstraintFn],
    losses: &[LossFn],
    cfg: &OracleConfig,
) -> Result<(Vec<f64>, f64)> {
    let dim = losses.first().expect("need at least one loss").dim();
    best_fixed_decision_from(&alloc::vec![0.0; dim], ball, constraints, losses, cfg)
}

/// [`best_fixed_decision`] from an explicit starting point (projected onto
/// the feasible region first).
pub fn best_fixed_decision_from(
    start: &[f64],
    ball: &BallDomain,
    constraints: &[ConstraintFn],
    losses: &[LossFn],
    cfg: &OracleConfig,
) -> Result<(Vec<f64>, f64)> {
    let total = SummedLoss::new(losses);
    let count = total.len() as f64;
    // Projections must resolve finer than the solver's own tolerance.
    let proj_cfg = OracleConfig {
        max_iters: cfg.max_iters.max(1000),
        tol: (cfg.tol * 1e-3).min(1e-12),
        initial_step: None,
    };
    let mut x = dykstra_project(start, constraints, ball, &proj_cfg)?;
    let mean_lipschitz = total.mean_lipschitz(ball.radius());
    if mean_lipschitz == 0.0 {
        // Constant objective: any feasible point is optimal.
        let value = total.value(&x);
        return Ok((x, value));
    }
    let step0 = cfg.initial_step.unwrap_or(ball.radius() / mean_lipschitz);
    let mut residual = f64::INFINITY;
    for k in 1..=cfg.max_iters {
        let step = step0 / fx::sqrt(k as f64);
        let mean_grad = math::scale(&total.gradient(&x), 1.0 / count);
        let next = dykstra_project(
            &math::add_scaled(&x, -step, &mean_grad),
            constraints,
            ball,
            &proj_cfg,
        )?;
        // Projected-gradient mapping norm at the current step size.
        residual = math::norm(&math::sub(&x, &next)) / step;
        x = next;
        if residual <= cfg.tol {
            return Ok((x.clone(), total.value(&x)));
        }
    }
    Err(Error::DidNotConverge {
        what: "offline solver",
        residual,
    })
}

/// Central finite differences `(f(x + h e_i) - f(x - h e_i)) / 2h` per
/// coordinate; the independent oracle for every analytic gradient.
pub fn finite_diff_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    debug_assert!(h > 0.0);
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let plus = f(&probe);
        probe[i] = x[i] - h;
        let minus = f(&probe);
        probe[i] = x[i];
        grad.push((plus - minus) / (2.0 * h));
    }
    grad
}

/// Monte-Carlo estimate of the ball-smoothed value
/// `E_{v in unit ball}[ g(x + zeta v) ]`, with its standard error.
/// `zeta = 0` degenerates to the exact value.
pub fn smoothed_value_mc<R: Rng + ?Sized>(
    g: impl Fn(&[f64]) -> f64,
    x: &[f64],
    zeta: f64,
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    if zeta == 0.0 {
        return (g(x), 0.0);
    }
    assert!(samples >= 2);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=samples {
        let v = math::sample_in_ball(rng, x.len());
        let value = g(&math::add_scaled(x, zeta, &v));
        let delta = value - mean;
        mean += delta / k as f64;
        m2 += delta * (value - mean);
    }
    let variance = m2 / (samples as f64 - 1.0);
    (mean, fx::sqrt(variance / samples as f64))
}

/// Monte-Carlo mean of the two-point estimator
/// `(d / 2 zeta)(g(x + zeta u) - g(x - zeta u)) u` over uniform sphere
/// directions; converges to the smoothed-constraint gradient (exactly the
/// normal `a` for linear `g`).
pub fn smoothed_gradient_mc<R: Rng + ?Sized>(
    g: impl Fn(&[f64]) -> f64,
    x: &[f64],
    zeta: f64,
    samples: usize,
    rng: &mut R,
) -> Vec<f64> {
    assert!(zeta > 0.0 && samples >= 1);
    let mut acc = alloc::vec![0.0; x.len()];
    for _ in 0..samples {
        let u = math::sample_unit_sphere(rng, x.len());
        let sample = crate::learners::two_point_gradient_sample(&g, x, zeta, &u);
        for (a, s) in acc.iter_mut().zip(&sample) {
            *a += s;
        }
    }
    math::scale(&acc, 1.0 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_ball() -> BallDomain {
        BallDomain::new(1.0, 0.2).unwrap()
    }

    fn halfspace(normal: Vec<f64>, offset: f64) -> ConstraintFn {
        ConstraintFn::linear(normal, offset).unwrap()
    }

    #[test]
    fn dykstra_fixes_feasible_points() {
        let constraints = vec![halfspace(vec![1.0, 0.0], 0.5)];
        let cfg = OracleConfig::projection_default();
        let x = vec![0.2, -0.3];
        let out = dykstra_project(&x, &constraints, &unit_ball(), &cfg).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn dykstra_on_ball_alone_matches_project_ball() {
        let cfg = OracleConfig::projection_default();
        let x = vec![2.0, 2.0, -1.0];
        let out = dykstra_project(&x, &[], &unit_ball(), &cfg).unwrap();
        assert_eq!(out, math::project_ball(&x, 1.0).unwrap());
    }

    #[test]
    fn dykstra_wedge_case_matches_analytic_projection() {
        // K = unit ball ∩ {x_1 <= 0}; nearest point to (1, 1) is (0, 1).
        let constraints = vec![halfspace(vec![1.0, 0.0], 0.0)];
        let cfg = OracleConfig::projection_default();
        let out = dykstra_project(&[1.0, 1.0], &constraints, &unit_ball(), &cfg).unwrap();
        assert!((out[0] - 0.0).abs() < 1e-9, "{out:?}");
        assert!((out[1] - 1.0).abs() < 1e-9, "{out:?}");
    }

    #[test]
    fn dykstra_reports_nonlinear_constraints() {
        let c = ConstraintFn::nonlinear(
            Box::new(|x: &[f64]| math::norm_sq(x) - 1.0),
            Box::new(|x: &[f64]| math::scale(x, 2.0)),
            2.0,
        );
        let cfg = OracleConfig::projection_default();
        assert_eq!(
            dykstra_project(&[1.0], &[c], &unit_ball(), &cfg).unwrap_err(),
            Error::NonlinearConstraint
        );
    }

    #[test]
    fn summed_loss_matches_per_round_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut losses = crate::problems::make_linear_losses(&mut rng, 3, 40, 1.0);
        losses.extend(crate::problems::make_quadratic_losses(
            &mut rng, 3, 40, 1.0, 0.5, 1.0,
        ));
        let total = SummedLoss::new(&losses);
        for _ in 0..20 {
            let x = math::sample_in_ball(&mut rng, 3);
            let brute: f64 = losses.iter().map(|f| f.value(&x)).sum();
            assert!((total.value(&x) - brute).abs() < 1e-10 * (1.0 + brute.abs()));
            let mut grad = vec![0.0; 3];
            for f in &losses {
                for (g, v) in grad.iter_mut().zip(f.gradient(&x)) {
                    *g += v;
                }
            }
            for (a, b) in total.gradient(&x).iter().zip(&grad) {
                assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn best_fixed_linear_over_ball() {
        // All f_t(x) = x_1 on the unit ball: the minimizer is (-1, 0, ...).
        let losses = vec![LossFn::linear(vec![1.0, 0.0]); 7];
        let cfg = OracleConfig::default();
        let (x, total) = best_fixed_decision(&unit_ball(), &[], &losses, &cfg).unwrap();
        assert!((x[0] + 1.0).abs() < 1e-6, "{x:?}");
        assert!(x[1].abs() < 1e-6);
        assert!((total + 7.0).abs() < 1e-5);
    }

    #[test]
    fn best_fixed_quadratic_interior_minimum() {
        let losses = vec![LossFn::quadratic(1.0, vec![0.0, 0.0], 1.0); 5];
        let constraints = vec![halfspace(vec![0.0, 1.0], 0.5)];
        let cfg = OracleConfig::default();
        let (x, total) = best_fixed_decision(&unit_ball(), &constraints, &losses, &cfg).unwrap();
        assert!(
            math::norm(&x) < 1e-6,
            "unconstrained minimum 0 is feasible: {x:?}"
        );
        assert!(total.abs() < 1e-10);
    }

    #[test]
    fn best_fixed_halfspace_active() {
        // f(x) = x_1 on unit ball ∩ {-x_1 <= 0.5}: minimizer x_1 = -0.5.
        let losses = vec![LossFn::linear(vec![1.0, 0.0]); 9];
        let constraints = vec![halfspace(vec![-1.0, 0.0], 0.5)];
        let cfg = OracleConfig::default();
        let (x, total) = best_fixed_decision(&unit_ball(), &constraints, &losses, &cfg).unwrap();
        assert!((x[0] + 0.5).abs() < 1e-7, "{x:?}");
        assert!((total + 0.5 * 9.0).abs() < 1e-6);
    }

    #[test]
    fn best_fixed_restarts_agree_and_dominate_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let radius = 1.0;
        let horizon = 200;
        let instance = crate::problems::make_polyhedral_problem(&mut rng, 3, 2, radius, 0.2)
            .unwrap()
            .with_losses(crate::problems::make_linear_losses(
                &mut rng, 3, horizon, 1.0,
            ));
        let cfg = OracleConfig::default();
        let ball = instance.domain();
        let (_, reference) =
            best_fixed_decision(ball, instance.constraints(), instance.losses(), &cfg).unwrap();
        let total = SummedLoss::new(instance.losses());
        // Restarts from random feasible points land on the same value.
        for _ in 0..5 {
            let start = math::scale(&math::sample_in_ball(&mut rng, 3), ball.inner_radius());
            let (_, restarted) = best_fixed_decision_from(
                &start,
                ball,
                instance.constraints(),
                instance.losses(),
                &cfg,
            )
            .unwrap();
            assert!(
                (restarted - reference).abs() <= 1e-6 * horizon as f64,
                "restart value {restarted} vs {reference}"
            );
        }
        // No sampled feasible point does better: inner-ball draws plus
        // projected perturbations of the ball.
        let proj_cfg = OracleConfig::projection_default();
        for k in 0..1000 {
            let candidate = if k % 2 == 0 {
                math::scale(&math::sample_in_ball(&mut rng, 3), ball.inner_radius())
            } else {
                let raw = math::scale(&math::sample_in_ball(&mut rng, 3), 1.5 * radius);
                dykstra_project(&raw, instance.constraints(), ball, &proj_cfg).unwrap()
            };
            assert!(
                total.value(&candidate) >= reference - 1e-6 * horizon as f64,
                "feasible point beats the solver: {} < {reference}",
                total.value(&candidate)
            );
        }
    }

    #[test]
    fn finite_diff_examples() {
        let grad = finite_diff_gradient(|x| 0.5 * math::norm_sq(x), &[1.0, 2.0], 1e-5);
        assert!((grad[0] - 1.0).abs() < 1e-8);
        assert!((grad[1] - 2.0).abs() < 1e-8);
        let grad = finite_diff_gradient(|x| math::dot(x, &[0.3, -0.7]), &[0.1, 0.4], 1e-6);
        assert!((grad[0] - 0.3).abs() < 1e-9);
        assert!((grad[1] + 0.7).abs() < 1e-9);
    }

    #[test]
    fn smoothed_value_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = [0.6, 0.8];
        let g = |x: &[f64]| math::dot(x, &a) - 0.4;
        // Linearity kills the smoothing bias.
        let (mean, se) = smoothed_value_mc(g, &[0.1, 0.2], 0.05, 20_000, &mut rng);
        let exact = g(&[0.1, 0.2]);
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "mean {mean} exact {exact} se {se}"
        );
        // Degenerate smoothing.
        let (mean, se) = smoothed_value_mc(g, &[0.1, 0.2], 0.0, 10, &mut rng);
        assert_eq!((mean, se), (exact, 0.0));
        // Convex g: |smoothed - exact| <= G zeta.
        let convex = |x: &[f64]| math::norm_sq(x);
        let zeta = 0.05;
        let lipschitz = 2.0 * (math::norm(&[0.3, 0.1]) + zeta);
        let (mean, _) = smoothed_value_mc(convex, &[0.3, 0.1], zeta, 20_000, &mut rng);
        assert!((mean - convex(&[0.3, 0.1])).abs() <= lipschitz * zeta);
    }

    #[test]
    fn smoothed_gradient_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = [0.5, -0.5, 1.0 / 2.0f64.sqrt()];
        let g = |x: &[f64]| math::dot(x, &a) - 0.2;
        let mean = smoothed_gradient_mc(g, &[0.0, 0.1, 0.0], 1e-3, 100_000, &mut rng);
        for (m, t) in mean.iter().zip(&a) {
            assert!((m - t).abs() < 0.02, "coordinate {m} vs {t}");
        }
        // Constant g: the two-point difference cancels exactly.
        let zero = smoothed_gradient_mc(|_| 3.5, &[0.0, 0.0], 1e-3, 100, &mut rng);
        assert_eq!(zero, vec![0.0, 0.0]);
    }

    #[test]
    fn estimator_samples_bounded_by_gd() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = [0.28, -0.96];
        let g = |x: &[f64]| math::dot(x, &a) + 0.1;
        let lipschitz = math::norm(&a);
        for _ in 0..2000 {
            let u = math::sample_unit_sphere(&mut rng, 2);
            let s = crate::learners::two_point_gradient_sample(g, &[0.2, 0.1], 1e-4, &u);
            assert!(math::norm(&s) <= lipschitz * 2.0 * (1.0 + 1e-9));
        }
    }
}
