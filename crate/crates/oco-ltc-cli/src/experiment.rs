//! Grid orchestration: deterministic instance construction per (horizon,
//! seed), the per-algorithm round loops, oracle-based regret accounting, and
//! CSV/exponent output.

use std::time::Instant;

use oco_ltc::learners::{
    alg1_schedule, alg1_step, alg1_zero_violation_schedule, alg1_zero_violation_step,
    bandit_schedule, bandit_step, max_constraint, ogd_step_size, penalty_ogd_step,
    penalty_step_size, projected_ogd_step, prox_schedule, prox_step, BanditState, PenaltyMode,
    PrimalDualState, ProxState, ProxVariant,
};
use oco_ltc::metrics::{fit_loglog_slope, RunRecord, RunSummary, SLOPE_FLOOR};
use oco_ltc::oracle::{best_fixed_decision, dykstra_project, OracleConfig};
use oco_ltc::problems::{
    make_linear_losses, make_polyhedral_problem, make_quadratic_losses, penalty_failure_instance,
    ConstraintFn, LossFn, ProblemInstance,
};
use oco_ltc::{ChaCha8Rng, Error};
use rand::SeedableRng;

use crate::config::{Algorithm, ExperimentConfig, LossFamily};
use crate::csv::{write_csv, SummaryRow, TraceRow, WarningRow};
use crate::CliError;

/// Salt XORed into the instance seed to derive the learner-side generator, so
/// the same instance can be replayed under different exploration noise.
pub const LEARNER_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Why a single grid point did not produce a summary row.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// A schedule admissibility precondition failed; the point is skipped
    /// with a warning row rather than aborting the grid.
    Inadmissible(String),
    /// Anything else is fatal for the experiment.
    Other(CliError),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Inadmissible(reason) => write!(f, "inadmissible grid point: {reason}"),
            Self::Other(e) => write!(f, "{e}"),
        }
    }
}

/// Everything an experiment produced, mirroring what was written to disk.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub summary: Vec<SummaryRow>,
    pub warnings: Vec<WarningRow>,
    /// `(metric, fitted exponent)`; empty when fewer than 3 horizons yielded
    /// rows.
    pub exponents: Vec<(&'static str, f64)>,
}

/// The deterministic instance behind a grid point: the seed drives first the
/// constraint set, then the loss sequence.
pub fn build_instance(
    cfg: &ExperimentConfig,
    horizon: u64,
    seed: u64,
) -> Result<ProblemInstance, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rounds = horizon as usize;
    let instance = match cfg.loss_family {
        LossFamily::Linear => polyhedral(cfg, &mut rng)?.with_losses(make_linear_losses(
            &mut rng,
            cfg.dim,
            rounds,
            cfg.grad_bound,
        )),
        LossFamily::Quadratic => polyhedral(cfg, &mut rng)?.with_losses(make_quadratic_losses(
            &mut rng,
            cfg.dim,
            rounds,
            cfg.grad_bound,
            0.5 * cfg.radius,
            cfg.radius,
        )),
        LossFamily::PenaltyFailure => penalty_failure_instance(cfg.dim, rounds),
    };
    Ok(instance)
}

fn polyhedral(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<ProblemInstance, CliError> {
    make_polyhedral_problem(
        rng,
        cfg.dim,
        cfg.num_constraints,
        cfg.radius,
        cfg.inner_radius,
    )
    .map_err(|e| match e {
        Error::InfeasibleGeometry { .. } | Error::EmptyConstraints => {
            CliError::Config(e.to_string())
        }
        other => CliError::Runtime(other.to_string()),
    })
}

fn inadmissible(err: Error) -> RunError {
    match err {
        Error::HorizonTooSmall { .. } | Error::FixedPointDiverged { .. } => {
            RunError::Inadmissible(err.to_string())
        }
        other => RunError::Other(CliError::Runtime(other.to_string())),
    }
}

fn fatal(err: Error) -> RunError {
    RunError::Other(CliError::Runtime(err.to_string()))
}

fn record_round(
    records: &mut Vec<RunRecord>,
    round: u64,
    x: &[f64],
    loss: &LossFn,
    constraints: &[ConstraintFn],
    multiplier_norm: f64,
) {
    let constraint_values: Vec<f64> = constraints.iter().map(|c| c.value(x)).collect();
    records.push(RunRecord {
        round,
        decision: x.to_vec(),
        loss: loss.value(x),
        constraint_values,
        multiplier_norm,
    });
}

/// Runs one learner over the instance's loss sequence, returning the
/// per-round records (decision, loss, constraint values, dual norm).
///
/// `learner_seed` drives learner-side randomness (the bandit's directions);
/// the harness derives it as `seed ^ LEARNER_SEED_SALT`.
pub fn run_learner(
    algorithm: Algorithm,
    instance: &ProblemInstance,
    learner_seed: u64,
    penalty_delta: f64,
) -> Result<Vec<RunRecord>, RunError> {
    let horizon = instance.horizon() as u64;
    assert!(horizon >= 1, "instance carries no losses");
    let dim = instance.dim();
    let m = instance.num_constraints();
    let domain = instance.domain();
    let constraints = instance.constraints();
    let losses = instance.losses();
    let grad_bound = instance.grad_bound();
    let constraint_bound = instance.constraint_bound();
    let radius = domain.radius();
    let mut records = Vec::with_capacity(losses.len());

    match algorithm {
        Algorithm::Alg1 => {
            let params = alg1_schedule(horizon, m, grad_bound, constraint_bound, radius)
                .map_err(inadmissible)?;
            let mut state = PrimalDualState::origin(dim, m);
            for (t, loss) in losses.iter().enumerate() {
                record_round(
                    &mut records,
                    t as u64 + 1,
                    &state.x,
                    loss,
                    constraints,
                    state.lambdas.norm(),
                );
                let grad = loss.gradient(&state.x);
                state = alg1_step(&state, &grad, constraints, domain, &params).map_err(fatal)?;
            }
        }
        Algorithm::Alg1Zero => {
            let params = alg1_zero_violation_schedule(
                horizon,
                grad_bound,
                constraint_bound,
                radius,
                instance.loss_range(),
            )
            .map_err(inadmissible)?;
            let mut state = PrimalDualState::origin(dim, 1);
            for (t, loss) in losses.iter().enumerate() {
                record_round(
                    &mut records,
                    t as u64 + 1,
                    &state.x,
                    loss,
                    constraints,
                    state.lambdas.norm(),
                );
                let grad = loss.gradient(&state.x);
                state = alg1_zero_violation_step(&state, &grad, constraints, domain, &params)
                    .map_err(fatal)?;
            }
        }
        Algorithm::Prox | Algorithm::ProxZero => {
            let variant = if algorithm == Algorithm::Prox {
                ProxVariant::Violating
            } else {
                ProxVariant::ZeroViolation
            };
            let params =
                prox_schedule(horizon, m, variant, instance.loss_range()).map_err(inadmissible)?;
            let mut state = ProxState::origin(dim, m);
            for (t, loss) in losses.iter().enumerate() {
                state = prox_step(&state, |x| loss.gradient(x), constraints, domain, &params)
                    .map_err(fatal)?;
                // The decision for this round is produced inside the step.
                record_round(
                    &mut records,
                    t as u64 + 1,
                    &state.x,
                    loss,
                    constraints,
                    state.lambdas.norm(),
                );
            }
        }
        Algorithm::Bandit => {
            let params = bandit_schedule(
                horizon,
                dim,
                grad_bound,
                constraint_bound,
                radius,
                domain.inner_radius(),
            )
            .map_err(inadmissible)?;
            let dual_cap = constraint_bound / (params.delta * params.eta);
            let mut rng = ChaCha8Rng::seed_from_u64(learner_seed);
            let mut state = BanditState::origin(dim);
            for (t, loss) in losses.iter().enumerate() {
                record_round(
                    &mut records,
                    t as u64 + 1,
                    &state.x,
                    loss,
                    constraints,
                    state.lambda,
                );
                let grad = loss.gradient(&state.x);
                state = bandit_step(
                    &state,
                    &grad,
                    |x| max_constraint(x, constraints).0,
                    domain,
                    &params,
                    &mut rng,
                )
                .map_err(fatal)?;
                if state.lambda > dual_cap * (1.0 + 1e-9) {
                    return Err(RunError::Other(CliError::Runtime(format!(
                        "bandit dual bound breached at round {}: {} > {dual_cap}",
                        t + 1,
                        state.lambda
                    ))));
                }
            }
        }
        Algorithm::OgdProjected => {
            let eta = ogd_step_size(radius, grad_bound, horizon);
            let proj_cfg = OracleConfig {
                max_iters: 10_000,
                tol: 1e-9,
                initial_step: None,
            };
            let mut x =
                dykstra_project(&vec![0.0; dim], constraints, domain, &proj_cfg).map_err(fatal)?;
            for (t, loss) in losses.iter().enumerate() {
                record_round(&mut records, t as u64 + 1, &x, loss, constraints, 0.0);
                let grad = loss.gradient(&x);
                x = projected_ogd_step(
                    &x,
                    &grad,
                    |y| dykstra_project(y, constraints, domain, &proj_cfg),
                    eta,
                )
                .map_err(fatal)?;
            }
        }
        Algorithm::PenaltyLinear | Algorithm::PenaltySquared => {
            let mode = if algorithm == Algorithm::PenaltyLinear {
                PenaltyMode::Linear
            } else {
                PenaltyMode::Squared
            };
            let eta = penalty_step_size(
                radius,
                grad_bound,
                constraint_bound,
                m,
                penalty_delta,
                horizon,
            );
            let mut x = vec![0.0; dim];
            for (t, loss) in losses.iter().enumerate() {
                record_round(&mut records, t as u64 + 1, &x, loss, constraints, 0.0);
                let grad = loss.gradient(&x);
                x = penalty_ogd_step(&x, &grad, constraints, domain, penalty_delta, eta, mode)
                    .map_err(fatal)?;
            }
        }
    }
    Ok(records)
}

fn run_grid_point(
    cfg: &ExperimentConfig,
    horizon: u64,
    seed: u64,
) -> Result<(SummaryRow, Option<Vec<TraceRow>>), RunError> {
    let instance = build_instance(cfg, horizon, seed).map_err(RunError::Other)?;
    let start = Instant::now();
    let records = run_learner(
        cfg.algorithm,
        &instance,
        seed ^ LEARNER_SEED_SALT,
        cfg.penalty_delta,
    )?;
    let (_, oracle_total) = best_fixed_decision(
        instance.domain(),
        instance.constraints(),
        instance.losses(),
        &OracleConfig::default(),
    )
    .map_err(fatal)?;
    let summary = RunSummary::from_records(&records, oracle_total);
    let runtime_ms = if cfg.timings {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    let max_of = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let row = SummaryRow {
        algorithm: cfg.algorithm.name(),
        horizon,
        seed,
        dim: instance.dim(),
        num_constraints: instance.num_constraints(),
        regret: summary.regret,
        raw_violation_max: max_of(&summary.raw_violation),
        clipped_violation_max: max_of(&summary.clipped_violation),
        agg_violation: summary.max_violation,
        runtime_ms,
    };
    let trace = cfg.trace.then(|| {
        records
            .iter()
            .map(|r| TraceRow {
                round: r.round,
                loss: r.loss,
                g_max: max_of(&r.constraint_values),
                lambda_norm: r.multiplier_norm,
            })
            .collect()
    });
    Ok((row, trace))
}

/// Fitted growth exponents: seed-mean of each metric per horizon, then the
/// log-log slope. Returns nothing when fewer than 3 horizons have rows.
pub fn fit_exponents(rows: &[SummaryRow]) -> Vec<(&'static str, f64)> {
    let mut horizons: Vec<u64> = rows.iter().map(|r| r.horizon).collect();
    horizons.sort_unstable();
    horizons.dedup();
    if horizons.len() < 3 {
        return Vec::new();
    }
    type Metric = (&'static str, fn(&SummaryRow) -> f64);
    let metrics: [Metric; 4] = [
        ("regret", |r| r.regret),
        ("raw_violation_max", |r| r.raw_violation_max),
        ("clipped_violation_max", |r| r.clipped_violation_max),
        ("agg_violation", |r| r.agg_violation),
    ];
    metrics
        .iter()
        .filter_map(|&(name, get)| {
            let points: Vec<(u64, f64)> = horizons
                .iter()
                .map(|&t| {
                    let values: Vec<f64> =
                        rows.iter().filter(|r| r.horizon == t).map(get).collect();
                    (t, values.iter().sum::<f64>() / values.len() as f64)
                })
                .collect();
            fit_loglog_slope(&points, SLOPE_FLOOR)
                .ok()
                .map(|slope| (name, slope))
        })
        .collect()
}

/// Runs the whole grid: per-point summaries (skipping inadmissible points
/// with warning rows), `summary.csv` and `warnings.csv` in the output
/// directory, optional per-point trace files, and fitted exponents.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut summary = Vec::new();
    let mut warnings = Vec::new();
    for &horizon in &cfg.horizons {
        for &seed in &cfg.seeds {
            match run_grid_point(cfg, horizon, seed) {
                Ok((row, trace)) => {
                    if let Some(rows) = trace {
                        let name = format!(
                            "trace_{}_T{}_seed{}.csv",
                            cfg.algorithm.name(),
                            horizon,
                            seed
                        );
                        write_csv(&cfg.out_dir.join(name), &rows)?;
                    }
                    summary.push(row);
                }
                Err(RunError::Inadmissible(reason)) => warnings.push(WarningRow {
                    algorithm: cfg.algorithm.name(),
                    horizon,
                    seed,
                    reason,
                }),
                Err(RunError::Other(err)) => return Err(err),
            }
        }
    }
    write_csv(&cfg.out_dir.join("summary.csv"), &summary)?;
    write_csv(&cfg.out_dir.join("warnings.csv"), &warnings)?;
    let exponents = fit_exponents(&summary);
    Ok(ExperimentOutput {
        summary,
        warnings,
        exponents,
    })
}
