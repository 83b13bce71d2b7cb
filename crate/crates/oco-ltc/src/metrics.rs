//! Regret and long-term-violation accounting, plus the log-log slope fit used
//! to verify empirical growth rates against the analyses' exponents.
//!
//! Summation follows round order throughout, so summaries replay
//! bit-for-bit from identical traces.

use alloc::vec::Vec;

use crate::fx;
use crate::{Error, Result};

/// Default floor for [`fit_loglog_slope`]: regret can be tiny or negative and
/// logs need positivity. Flooring biases near-zero metrics' slopes towards
/// zero, which is conservative for upper-bound rate checks.
pub const SLOPE_FLOOR: f64 = 1.0;

/// One round of a run: the decision, its loss, the per-constraint values, and
/// the dual norm.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Round index, strictly increasing from 1 to `T`.
    pub round: u64,
    pub decision: Vec<f64>,
    pub loss: f64,
    pub constraint_values: Vec<f64>,
    pub multiplier_norm: f64,
}

/// The three violation totals of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Violations {
    /// `sum_t g_i(x_t)` per constraint; negative when feasible rounds offset
    /// infeasible ones.
    pub raw: Vec<f64>,
    /// `sum_t [g_i(x_t)]_+` per constraint; feasible rounds cannot offset.
    pub clipped: Vec<f64>,
    /// `sum_t max_i g_i(x_t)`, the aggregated max-constraint total.
    pub aggregate: f64,
}

/// Per-run summary: regret against the offline comparator plus the violation
/// totals.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub regret: f64,
    pub raw_violation: Vec<f64>,
    pub clipped_violation: Vec<f64>,
    /// Aggregated max-constraint violation total.
    pub max_violation: f64,
}

impl RunSummary {
    pub fn from_records(records: &[RunRecord], comparator_total_loss: f64) -> Self {
        let v = violations(records);
        Self {
            regret: regret(records, comparator_total_loss),
            raw_violation: v.raw,
            clipped_violation: v.clipped,
            max_violation: v.aggregate,
        }
    }
}

/// `sum_t loss_t - comparator_total_loss`. May be negative: iterates are free
/// to leave the feasible region the comparator is restricted to.
pub fn regret(records: &[RunRecord], comparator_total_loss: f64) -> f64 {
    records.iter().map(|r| r.loss).sum::<f64>() - comparator_total_loss
}

/// Raw, clipped, and aggregated violation sums in round order.
pub fn violations(records: &[RunRecord]) -> Violations {
    let m = records.first().map_or(0, |r| r.constraint_values.len());
    let mut raw = alloc::vec![0.0; m];
    let mut clipped = alloc::vec![0.0; m];
    let mut aggregate = 0.0;
    for record in records {
        debug_assert_eq!(record.constraint_values.len(), m);
        let mut worst = f64::NEG_INFINITY;
        for (i, &g) in record.constraint_values.iter().enumerate() {
            raw[i] += g;
            clipped[i] += g.max(0.0);
            worst = worst.max(g);
        }
        if m > 0 {
            aggregate += worst;
        }
    }
    Violations {
        raw,
        clipped,
        aggregate,
    }
}

/// Least-squares slope of `log(max(value, floor))` against `log T`; the
/// empirical growth exponent of a metric over a horizon grid.
///
/// Needs at least 3 points with strictly increasing `T`.
pub fn fit_loglog_slope(points: &[(u64, f64)], floor: f64) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::NonIncreasingHorizons);
    }
    debug_assert!(floor > 0.0);
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(t, v)| (fx::ln(t as f64), fx::ln(v.max(floor))))
        .collect();
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in logs {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    Ok(num / den)
}
