//! Problem instances: loss-function sequences, constraint sets, domain
//! geometry, and the analytically known constants the learners' schedules
//! require.
//!
//! An instance bundles an enclosing ball `R * B` with inner radius `r`, a set
//! of constraint functions `g_i` defining `K = {x : g_i(x) <= 0}`, a loss
//! sequence `f_1..f_T`, and the constants
//!
//! - `G`: the largest Lipschitz constant over all losses and constraints,
//! - `D`: the largest constraint value over the enclosing ball,
//! - `F = 2 * L_f * R`: an upper bound on the per-round loss range over `K`,
//! - `sigma`: the smallest norm of a convex combination of constraint
//!   gradients at the tightened boundary (derived automatically for linear
//!   constraints, supplied explicitly otherwise).
//!
//! Instances are immutable after construction and may be shared across
//! concurrent runs.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::Rng;

use crate::math::{self, BallDomain};
use crate::{Error, Result};

/// Iterations of projected gradient descent used to derive sigma.
const SIGMA_PGD_ITERS: usize = 500;

/// A convex per-round loss with analytic gradient and Lipschitz constant.
#[derive(Debug, Clone, PartialEq)]
pub enum LossFn {
    /// `f(x) = w . x` with `L_f = |w|`.
    Linear { weights: Vec<f64> },
    /// `f(x) = (c / 2) * |x - p|^2` with `L_f = c * (R + |p|)` taken on the
    /// enclosing ball of radius `R`.
    Quadratic {
        curvature: f64,
        center: Vec<f64>,
        lipschitz: f64,
    },
}

impl LossFn {
    pub fn linear(weights: Vec<f64>) -> Self {
        Self::Linear { weights }
    }

    /// Quadratic loss centered at `center`; the Lipschitz constant is
    /// evaluated analytically on the ball of radius `ball_radius`.
    pub fn quadratic(curvature: f64, center: Vec<f64>, ball_radius: f64) -> Self {
        let lipschitz = curvature * (ball_radius + math::norm(&center));
        Self::Quadratic {
            curvature,
            center,
            lipschitz,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::Linear { weights } => math::dot(weights, x),
            Self::Quadratic {
                curvature, center, ..
            } => 0.5 * curvature * math::norm_sq(&math::sub(x, center)),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Linear { weights } => weights.clone(),
            Self::Quadratic {
                curvature, center, ..
            } => math::scale(&math::sub(x, center), *curvature),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::Linear { weights } => math::norm(weights),
            Self::Quadratic { lipschitz, .. } => *lipschitz,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Linear { weights } => weights.len(),
            Self::Quadratic { center, .. } => center.len(),
        }
    }
}

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// The pair `(a, b)` of a linear constraint `g(x) = a . x - b` with `|a| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A constraint function `g_i` with analytic gradient; linear constraints
/// additionally expose their `(a, b)` form for the operations that need it.
pub struct ConstraintFn {
    value: ValueFn,
    gradient: GradientFn,
    lipschitz: f64,
    linear_form: Option<LinearForm>,
}

impl core::fmt::Debug for ConstraintFn {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ConstraintFn")
            .field("lipschitz", &self.lipschitz)
            .field("linear_form", &self.linear_form)
            .finish_non_exhaustive()
    }
}

impl ConstraintFn {
    /// A linear constraint `g(x) = normal . x - offset`; the normal must have
    /// unit norm (within `1e-12`).
    pub fn linear(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = math::norm(&normal);
        if crate::fx::abs(n - 1.0) > 1e-12 {
            return Err(Error::NotUnitNormal { norm: n });
        }
        let value_normal = normal.clone();
        let grad_normal = normal.clone();
        Ok(Self {
            value: Box::new(move |x| math::dot(&value_normal, x) - offset),
            gradient: Box::new(move |_| grad_normal.clone()),
            lipschitz: 1.0,
            linear_form: Some(LinearForm { normal, offset }),
        })
    }

    /// A general constraint from explicit value/gradient closures.
    pub fn nonlinear(value: ValueFn, gradient: GradientFn, lipschitz: f64) -> Self {
        Self {
            value,
            gradient,
            lipschitz,
            linear_form: None,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn linear_form(&self) -> Option<&LinearForm> {
        self.linear_form.as_ref()
    }
}

/// Collects the unit normals of a linear constraint set, failing on the first
/// nonlinear member.
pub(crate) fn linear_normals(constraints: &[ConstraintFn]) -> Result<Vec<&[f64]>> {
    constraints
        .iter()
        .map(|c| {
            c.linear_form()
                .map(|lf| lf.normal.as_slice())
                .ok_or(Error::NonlinearConstraint)
        })
        .collect()
}

/// An immutable problem instance.
#[derive(Debug)]
pub struct ProblemInstance {
    domain: BallDomain,
    constraints: Vec<ConstraintFn>,
    losses: Vec<LossFn>,
    dim: usize,
    grad_bound: f64,
    constraint_bound: f64,
    loss_range: f64,
    sigma: f64,
}

impl ProblemInstance {
    /// Builds an instance from linear constraints; `D` and `sigma` are derived
    /// analytically (`D = max_i (R - b_i)` for unit normals).
    pub fn from_linear_constraints(
        domain: BallDomain,
        constraints: Vec<ConstraintFn>,
    ) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::EmptyConstraints);
        }
        let dim = {
            let normals = linear_normals(&constraints)?;
            normals[0].len()
        };
        let constraint_bound = constraints
            .iter()
            .map(|c| domain.radius() - c.linear_form().expect("checked linear").offset)
            .fold(f64::NEG_INFINITY, f64::max);
        let sigma = compute_sigma_linear(&constraints)?;
        Ok(Self::assemble(
            domain,
            constraints,
            dim,
            constraint_bound,
            sigma,
        ))
    }

    /// Builds an instance from arbitrary constraints with explicitly supplied
    /// `D` and `sigma` (required whenever a constraint is nonlinear).
    pub fn from_constraints_with(
        domain: BallDomain,
        constraints: Vec<ConstraintFn>,
        dim: usize,
        constraint_bound: f64,
        sigma: f64,
    ) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::EmptyConstraints);
        }
        Ok(Self::assemble(
            domain,
            constraints,
            dim,
            constraint_bound,
            sigma,
        ))
    }

    fn assemble(
        domain: BallDomain,
        constraints: Vec<ConstraintFn>,
        dim: usize,
        constraint_bound: f64,
        sigma: f64,
    ) -> Self {
        let grad_bound = constraints
            .iter()
            .map(ConstraintFn::lipschitz)
            .fold(0.0, f64::max);
        Self {
            domain,
            constraints,
            losses: Vec::new(),
            dim,
            grad_bound,
            constraint_bound,
            loss_range: 0.0,
            sigma,
        }
    }

    /// Attaches the loss sequence, updating `G` and `F`.
    pub fn with_losses(mut self, losses: Vec<LossFn>) -> Self {
        let loss_lipschitz = losses.iter().map(LossFn::lipschitz).fold(0.0, f64::max);
        self.grad_bound = self
            .constraints
            .iter()
            .map(ConstraintFn::lipschitz)
            .fold(loss_lipschitz, f64::max);
        self.loss_range = 2.0 * loss_lipschitz * self.domain.radius();
        self.losses = losses;
        self
    }

    pub fn domain(&self) -> &BallDomain {
        &self.domain
    }

    pub fn constraints(&self) -> &[ConstraintFn] {
        &self.constraints
    }

    pub fn losses(&self) -> &[LossFn] {
        &self.losses
    }

    pub fn horizon(&self) -> usize {
        self.losses.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `G`, the largest Lipschitz constant over losses and constraints.
    pub fn grad_bound(&self) -> f64 {
        self.grad_bound
    }

    /// `D`, the largest constraint value over the enclosing ball.
    pub fn constraint_bound(&self) -> f64 {
        self.constraint_bound
    }

    /// `F`, the per-round loss range bound `2 * L_f * R`.
    pub fn loss_range(&self) -> f64 {
        self.loss_range
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Checks `r * B ⊆ K` by evaluating every constraint at sampled points of
    /// the inner ball (and at the origin). Deliberately infeasible instances
    /// such as [`penalty_failure_instance`] fail this check.
    pub fn verify_inner_ball<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> Result<()> {
        let r = self.domain.inner_radius();
        let origin = alloc::vec![0.0; self.dim];
        let mut worst = f64::NEG_INFINITY;
        for k in 0..=samples {
            let x = if k == 0 {
                origin.clone()
            } else {
                math::scale(&math::sample_in_ball(rng, self.dim), r)
            };
            for c in &self.constraints {
                worst = worst.max(c.value(&x));
            }
        }
        if worst > 1e-9 {
            return Err(Error::InfeasibleGeometry {
                inner_radius: r,
                max_offset: worst,
            });
        }
        Ok(())
    }
}

/// Adversary generator: `horizon` linear losses `f_t(x) = w_t . x` with
/// `|w_t| = grad_bound`. Deterministic given the generator state.
pub fn make_linear_losses<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    horizon: usize,
    grad_bound: f64,
) -> Vec<LossFn> {
    assert!(dim >= 1 && horizon >= 1 && grad_bound > 0.0);
    (0..horizon)
        .map(|_| LossFn::linear(math::scale(&math::sample_unit_sphere(rng, dim), grad_bound)))
        .collect()
}

/// Adversary generator: quadratic losses `f_t(x) = (c_t / 2) |x - p_t|^2`
/// with `c_t` uniform in `(0, curvature_bound]` and `|p_t| <= center_spread`.
/// Lipschitz constants are taken analytically on the `ball_radius` ball.
pub fn make_quadratic_losses<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    horizon: usize,
    curvature_bound: f64,
    center_spread: f64,
    ball_radius: f64,
) -> Vec<LossFn> {
    assert!(dim >= 1 && horizon >= 1 && curvature_bound > 0.0);
    (0..horizon)
        .map(|_| {
            let curvature = curvature_bound * (1.0 - rng.random::<f64>());
            let center = math::scale(&math::sample_in_ball(rng, dim), center_spread);
            LossFn::quadratic(curvature, center, ball_radius)
        })
        .collect()
}

/// Generates a polyhedral constraint set: `m` halfspaces `a_i . x <= b_i` with
/// unit normals and offsets drawn from `[max(r, 0.2 R), 0.8 R]`, so the inner
/// ball stays feasible while every constraint remains violable inside the
/// enclosing ball.
pub fn make_polyhedral_problem<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    num_constraints: usize,
    radius: f64,
    inner_radius: f64,
) -> Result<ProblemInstance> {
    if num_constraints == 0 {
        return Err(Error::EmptyConstraints);
    }
    let domain = BallDomain::new(radius, inner_radius)?;
    let lo = inner_radius.max(0.2 * radius);
    let hi = 0.8 * radius;
    if lo > hi {
        return Err(Error::InfeasibleGeometry {
            inner_radius,
            max_offset: hi,
        });
    }
    let constraints = (0..num_constraints)
        .map(|_| {
            let normal = math::sample_unit_sphere(rng, dim);
            let offset = lo + (hi - lo) * rng.random::<f64>();
            ConstraintFn::linear(normal, offset)
        })
        .collect::<Result<Vec<_>>>()?;
    ProblemInstance::from_linear_constraints(domain, constraints)
}

/// `sigma` for a linear constraint set: the minimum of `|sum_i alpha_i a_i|`
/// over the probability simplex, by projected gradient descent on the squared
/// norm (500 iterations, step `1/m`, sorting-based simplex projection).
pub fn compute_sigma_linear(constraints: &[ConstraintFn]) -> Result<f64> {
    let normals = linear_normals(constraints)?;
    let m = normals.len();
    if m == 0 {
        return Err(Error::EmptyConstraints);
    }
    let dim = normals[0].len();
    let mut alpha = alloc::vec![1.0 / m as f64; m];
    let step = 1.0 / m as f64;
    for _ in 0..SIGMA_PGD_ITERS {
        let mut combo = alloc::vec![0.0; dim];
        for (a, &w) in normals.iter().zip(&alpha) {
            for (c, v) in combo.iter_mut().zip(*a) {
                *c += w * v;
            }
        }
        // Gradient of |A^T alpha|^2 is 2 A (A^T alpha).
        let moved: Vec<f64> = alpha
            .iter()
            .zip(&normals)
            .map(|(&w, a)| w - step * 2.0 * math::dot(&combo, a))
            .collect();
        alpha = math::project_simplex(&moved);
    }
    let mut combo = alloc::vec![0.0; dim];
    for (a, &w) in normals.iter().zip(&alpha) {
        for (c, v) in combo.iter_mut().zip(*a) {
            *c += w * v;
        }
    }
    Ok(math::norm(&combo))
}

/// The penalty-method failure instance: `f_t(x) = w . x` every round and a
/// single constraint `g(x) = 1 - w . x` with `|w| = 1`, so the initial point
/// `x_1 = 0` is infeasible (`g(0) = 1`). The feasible region deliberately
/// excludes the origin, so `verify_inner_ball` fails on it.
pub fn penalty_failure_instance(dim: usize, horizon: usize) -> ProblemInstance {
    assert!(dim >= 1 && horizon >= 1);
    let mut w = alloc::vec![0.0; dim];
    w[0] = 1.0;
    // g(x) = 1 - w . x = (-w) . x - (-1), a unit-normal linear form.
    let constraint = ConstraintFn::linear(math::scale(&w, -1.0), -1.0).expect("unit normal");
    let domain = BallDomain::new(2.0, 1.0).expect("valid ball");
    let losses = (0..horizon).map(|_| LossFn::linear(w.clone())).collect();
    ProblemInstance::from_linear_constraints(domain, alloc::vec![constraint])
        .expect("linear constraint set")
        .with_losses(losses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_loss_examples() {
        let f = LossFn::linear(vec![1.0, 0.0]);
        assert_eq!(f.value(&[3.0, 4.0]), 3.0);
        assert_eq!(f.gradient(&[3.0, 4.0]), f.gradient(&[-1.0, 2.0]));
        assert_eq!(f.lipschitz(), 1.0);
    }

    #[test]
    fn quadratic_loss_examples() {
        let f = LossFn::quadratic(1.0, vec![0.0, 0.0], 1.0);
        assert_eq!(f.gradient(&[1.0, 1.0]), vec![1.0, 1.0]);
        assert_eq!(f.value(&[0.0, 0.0]), 0.0);
        let g = LossFn::quadratic(2.0, vec![1.0, 0.0], 1.0);
        assert_eq!(g.lipschitz(), 4.0);
        assert_eq!(g.value(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn linear_losses_respect_grad_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let losses = make_linear_losses(&mut rng, 4, 50, 0.7);
        let max_lip = losses.iter().map(LossFn::lipschitz).fold(0.0, f64::max);
        assert!(max_lip <= 0.7 + 1e-12);
        assert!(max_lip > 0.7 - 1e-9, "unit directions scale to the bound");
    }

    #[test]
    fn generators_are_deterministic() {
        let build = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = make_polyhedral_problem(&mut rng, 3, 2, 1.0, 0.1).unwrap();
            let losses = make_linear_losses(&mut rng, 3, 10, 1.0);
            (inst, losses)
        };
        let (ia, la) = build(5);
        let (ib, lb) = build(5);
        assert_eq!(la, lb);
        for (ca, cb) in ia.constraints().iter().zip(ib.constraints()) {
            assert_eq!(ca.linear_form().unwrap(), cb.linear_form().unwrap());
        }
        assert_eq!(ia.sigma(), ib.sigma());
    }

    #[test]
    fn polyhedral_geometry_examples() {
        // m = 1, a = (1, 0), b = 0.5, R = 1: D = R - b = 0.5.
        let domain = BallDomain::new(1.0, 0.1).unwrap();
        let c = ConstraintFn::linear(vec![1.0, 0.0], 0.5).unwrap();
        let inst = ProblemInstance::from_linear_constraints(domain, vec![c]).unwrap();
        assert_eq!(inst.constraint_bound(), 0.5);
        assert_eq!(inst.sigma(), 1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let inst = make_polyhedral_problem(&mut rng, 4, 3, 1.0, 0.15).unwrap();
        let origin = vec![0.0; 4];
        for c in inst.constraints() {
            let b = c.linear_form().unwrap().offset;
            assert!(c.value(&origin) == -b && -b <= -0.15);
        }
        assert!(
            inst.constraint_bound() > 0.0,
            "every constraint violable in the ball"
        );
        inst.verify_inner_ball(&mut rng, 200).unwrap();
    }

    #[test]
    fn polyhedral_rejects_oversized_inner_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let err = make_polyhedral_problem(&mut rng, 3, 2, 1.0, 0.9).unwrap_err();
        assert!(matches!(err, Error::InfeasibleGeometry { .. }));
    }

    #[test]
    fn sigma_examples() {
        let single = vec![ConstraintFn::linear(vec![1.0, 0.0], 0.3).unwrap()];
        assert!((compute_sigma_linear(&single).unwrap() - 1.0).abs() < 1e-12);

        let opposite = vec![
            ConstraintFn::linear(vec![1.0, 0.0], 0.3).unwrap(),
            ConstraintFn::linear(vec![-1.0, 0.0], 0.3).unwrap(),
        ];
        assert!(compute_sigma_linear(&opposite).unwrap() < 1e-9);

        let orthogonal = vec![
            ConstraintFn::linear(vec![1.0, 0.0], 0.3).unwrap(),
            ConstraintFn::linear(vec![0.0, 1.0], 0.3).unwrap(),
        ];
        let sigma = compute_sigma_linear(&orthogonal).unwrap();
        assert!((sigma - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
    }

    #[test]
    fn sigma_rejects_nonlinear() {
        let c = ConstraintFn::nonlinear(
            Box::new(|x: &[f64]| math::norm_sq(x) - 1.0),
            Box::new(|x: &[f64]| math::scale(x, 2.0)),
            2.0,
        );
        assert_eq!(
            compute_sigma_linear(&[c]).unwrap_err(),
            Error::NonlinearConstraint
        );
    }

    #[test]
    fn penalty_failure_instance_examples() {
        let inst = penalty_failure_instance(3, 5);
        let g = &inst.constraints()[0];
        assert_eq!(g.value(&[0.0, 0.0, 0.0]), 1.0, "infeasible start");
        assert_eq!(g.value(&[1.0, 0.0, 0.0]), 0.0, "boundary point w");
        for f in inst.losses() {
            assert_eq!(f.gradient(&[0.4, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        }
        assert_eq!(inst.sigma(), 1.0);
        assert_eq!(inst.grad_bound(), 1.0);
        assert_eq!(inst.constraint_bound(), 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(inst.verify_inner_ball(&mut rng, 10).is_err());
    }

    #[test]
    fn unit_normal_enforced() {
        assert!(matches!(
            ConstraintFn::linear(vec![1.0, 1.0], 0.0),
            Err(Error::NotUnitNormal { .. })
        ));
    }

    #[test]
    fn instance_constants_from_losses() {
        let domain = BallDomain::new(1.0, 0.2).unwrap();
        let c = ConstraintFn::linear(vec![0.0, 1.0], 0.4).unwrap();
        let inst = ProblemInstance::from_linear_constraints(domain, vec![c])
            .unwrap()
            .with_losses(vec![
                LossFn::linear(vec![0.6, 0.0]),
                LossFn::linear(vec![0.0, 0.5]),
            ]);
        assert_eq!(inst.grad_bound(), 1.0, "constraint Lipschitz dominates");
        assert_eq!(inst.loss_range(), 2.0 * 0.6 * 1.0);
        assert_eq!(inst.horizon(), 2);
    }

    #[test]
    fn quadratic_losses_are_convex_and_lipschitz_on_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let radius = 1.0;
        let losses = make_quadratic_losses(&mut rng, 3, 20, 1.0, 0.5, radius);
        for f in &losses {
            for _ in 0..50 {
                let x = math::scale(&math::sample_in_ball(&mut rng, 3), radius);
                let y = math::scale(&math::sample_in_ball(&mut rng, 3), radius);
                let mid = math::scale(&math::add_scaled(&x, 1.0, &y), 0.5);
                let convexity = 0.5 * (f.value(&x) + f.value(&y)) - f.value(&mid);
                assert!(
                    convexity >= -1e-12,
                    "midpoint inequality violated: {convexity}"
                );
                let gap = crate::fx::abs(f.value(&x) - f.value(&y));
                let dist = math::norm(&math::sub(&x, &y));
                assert!(gap <= f.lipschitz() * dist * (1.0 + 1e-9) + 1e-12);
            }
        }
    }
}
