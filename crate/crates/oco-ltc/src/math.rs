//! Dense vector arithmetic, Euclidean projections, random direction sampling,
//! and the Bregman distance used by the prox analysis.
//!
//! Everything here is a pure function on value data; there is no shared
//! mutable state and all operations are safe to call concurrently.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::fx;
use crate::{Error, Result};

/// Draws with norm below this are rejected when sampling directions, and
/// halfspace normals below it are treated as zero.
const TINY_NORM: f64 = 1e-12;

/// Inner product of two equal-length slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared Euclidean norm.
#[inline]
pub fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

/// Euclidean norm.
#[inline]
pub fn norm(x: &[f64]) -> f64 {
    fx::sqrt(norm_sq(x))
}

/// `x * c`, component-wise.
#[inline]
pub fn scale(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|v| v * c).collect()
}

/// `x + c * y`, component-wise.
#[inline]
pub fn add_scaled(x: &[f64], c: f64, y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a + c * b).collect()
}

/// `a - b`, component-wise.
#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// True when every entry is finite.
#[inline]
pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// The enclosing ball `R * B` together with the inner radius `r` of the
/// largest origin-centered ball contained in the feasible region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallDomain {
    radius: f64,
    inner_radius: f64,
}

impl BallDomain {
    /// Requires `0 < inner_radius <= radius`, both finite.
    pub fn new(radius: f64, inner_radius: f64) -> Result<Self> {
        if !(radius.is_finite() && inner_radius.is_finite())
            || inner_radius <= 0.0
            || inner_radius > radius
        {
            return Err(Error::InvalidBall {
                radius,
                inner_radius,
            });
        }
        Ok(Self {
            radius,
            inner_radius,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Projection onto the enclosing ball.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        project_ball(x, self.radius)
    }
}

/// Nonnegative Lagrangian multipliers; every entry is `>= 0` by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers(Vec<f64>);

impl Multipliers {
    pub fn zeros(m: usize) -> Self {
        Self(alloc::vec![0.0; m])
    }

    /// Validates nonnegativity and finiteness.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if !all_finite(&values) {
            return Err(Error::NonFinite {
                what: "multiplier entries",
            });
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::NonFinite {
                what: "negative multiplier entry",
            });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

/// Euclidean projection onto the origin-centered ball of the given radius:
/// identity inside, radial scaling outside.
///
/// The returned point satisfies `norm_sq(out) <= radius^2` exactly, so a
/// repeated projection returns it bit-for-bit unchanged.
pub fn project_ball(x: &[f64], radius: f64) -> Result<Vec<f64>> {
    debug_assert!(radius > 0.0);
    if !all_finite(x) {
        return Err(Error::NonFinite {
            what: "project_ball input",
        });
    }
    let r2 = radius * radius;
    let nsq = norm_sq(x);
    if nsq <= r2 {
        return Ok(x.to_vec());
    }
    let mut out = scale(x, radius / fx::sqrt(nsq));
    // Rounding can leave the rescaled point an ulp outside; pull it in until
    // the same membership test a second call would run accepts it.
    for _ in 0..64 {
        let sq = norm_sq(&out);
        if sq <= r2 {
            break;
        }
        let mut factor = radius / fx::sqrt(sq);
        if factor >= 1.0 {
            factor = 1.0 - f64::EPSILON;
        }
        for v in out.iter_mut() {
            *v *= factor;
        }
    }
    Ok(out)
}

/// Component-wise `max(0, .)`, the projection onto the nonnegative orthant.
pub fn clamp_nonneg(values: &[f64]) -> Multipliers {
    Multipliers(values.iter().map(|&v| v.max(0.0)).collect())
}

/// Euclidean projection onto the halfspace `{x : normal . x <= offset}`:
/// `x - ((normal . x - offset) / |normal|^2) * normal` when infeasible.
///
/// The output satisfies `normal . out <= offset` exactly, making repeated
/// projection a bit-for-bit no-op.
pub fn project_halfspace(x: &[f64], normal: &[f64], offset: f64) -> Result<Vec<f64>> {
    if normal.len() != x.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: normal.len(),
        });
    }
    if !all_finite(x) || !all_finite(normal) || !offset.is_finite() {
        return Err(Error::NonFinite {
            what: "project_halfspace input",
        });
    }
    let nsq = norm_sq(normal);
    if nsq < TINY_NORM * TINY_NORM {
        return Err(Error::ZeroNormal);
    }
    let slack = dot(x, normal) - offset;
    if slack <= 0.0 {
        return Ok(x.to_vec());
    }
    let mut out = add_scaled(x, -slack / nsq, normal);
    // As above: chase out the rounding residue so feasibility holds exactly.
    let mut boost = 1.0;
    for _ in 0..64 {
        let res = dot(&out, normal) - offset;
        if res <= 0.0 {
            break;
        }
        let c = -boost * res / nsq;
        for (o, a) in out.iter_mut().zip(normal) {
            *o += c * a;
        }
        boost *= 2.0;
    }
    Ok(out)
}

/// Euclidean projection onto the probability simplex, by the sorting scheme:
/// sort descending, locate the pivot, then threshold.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let m = v.len();
    debug_assert!(m >= 1);
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Uniform draw from the unit sphere via a normalized standard Gaussian;
/// draws with norm below `1e-12` are rejected and redrawn.
pub fn sample_unit_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    assert!(dim >= 1, "sphere sampling needs dim >= 1");
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n >= TINY_NORM {
            if dim == 1 {
                // The only 1-D unit vectors; dividing by sqrt(v^2) would round.
                return alloc::vec![if v[0] > 0.0 { 1.0 } else { -1.0 }];
            }
            return scale(&v, 1.0 / n);
        }
    }
}

/// Uniform draw from the closed unit ball: a sphere direction scaled by
/// `u^(1/d)`.
pub fn sample_in_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let direction = sample_unit_sphere(rng, dim);
    let u: f64 = rng.random();
    scale(&direction, fx::powf(u, 1.0 / dim as f64))
}

/// Bregman distance generated by `phi = |.|^2 / 2`, i.e. `|x - y|^2 / 2`.
pub fn bregman_euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(0.5 * norm_sq(&sub(x, y)))
}
