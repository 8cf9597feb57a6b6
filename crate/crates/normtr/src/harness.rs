//! Seeded experiment runner and empirical bound checking.
//!
//! [`run`] executes one optimizer trajectory on a problem, recording the
//! objective, the stationarity residual, the iterate norm, and the momentum
//! error (dual distance between the momentum buffer and the exact gradient)
//! at every iteration. [`check_bound`] and [`momentum_error_check`] then
//! compare these trajectories against the closed-form guarantees: per-run for
//! deterministic variants, at the fixed-seed-list mean for stochastic ones.
//! Wall-clock times are recorded for reporting but never participate in any
//! comparison, so records are reproducible bit for bit.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{init, step, OptimizerConfig, Variant};
use crate::point::{axpby, ParamPoint};
use crate::problems::{noisy_oracle, NoiseModel, Problem};
use crate::trstep::stationarity_residual;

/// Seeds used to approximate expectations in stochastic bound checks.
pub const STOCHASTIC_SEEDS: std::ops::Range<u64> = 0..20;

/// Metrics at one iterate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub k: u64,
    /// Objective value F(x_k).
    pub f: f64,
    /// Stationarity residual at x_k (dual norm of gradient plus the best
    /// normal-cone element).
    pub residual: f64,
    /// Primal norm of x_k.
    pub x_norm: f64,
    /// Dual norm of `m_{k+1} - grad F(x_k)`: the error of the momentum
    /// buffer used to leave x_k. Absent on the final row and for variants
    /// without momentum.
    pub momentum_err: Option<f64>,
    /// Cumulative wall time when the row was recorded. Reporting only;
    /// excluded from every determinism or bound comparison.
    pub wall_ms: f64,
}

/// Derived quantities; recomputable from the rows except for the step-norm
/// maximum, which needs consecutive iterates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// Smallest residual over k = 1..=K.
    pub min_residual: f64,
    pub final_f: f64,
    /// F(x_K) - F(x*) when the optimal value is known.
    pub final_gap: Option<f64>,
    /// max_k beta * ||x_k||, for decay runs (should stay at or below eta
    /// whenever eta >= beta * max(||x0||, ||x*||)).
    pub max_shift_bound: Option<f64>,
    /// max_k ||x_{k+1} - x_k|| in the primal norm (at most 2 eta for decay
    /// runs, eta for centered ones).
    pub max_step_norm: f64,
}

/// One seeded trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: OptimizerConfig,
    pub seed: u64,
    pub sigma: f64,
    pub rows: Vec<IterationRow>,
    pub summary: RunSummary,
    pub warnings: Vec<String>,
}

impl RunRecord {
    /// Equality up to wall-clock times.
    pub fn same_trajectory(&self, other: &Self) -> bool {
        self.config == other.config
            && self.seed == other.seed
            && self.sigma == other.sigma
            && self.summary == other.summary
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.k == b.k
                    && a.f == b.f
                    && a.residual == b.residual
                    && a.x_norm == b.x_norm
                    && a.momentum_err == b.momentum_err
            })
    }
}

/// Runs `config.steps` iterations from `x0` with gradient noise of scale
/// `sigma`, deterministically in `seed`.
pub fn run(
    config: &OptimizerConfig,
    problem: &Problem,
    sigma: f64,
    x0: &ParamPoint,
    seed: u64,
) -> Result<RunRecord> {
    use rand::SeedableRng;
    config.validate()?;
    if problem.shape() != config.geometry.shape() {
        return Err(Error::ShapeMismatch(config.geometry.shape(), problem.shape()));
    }
    let started = Instant::now();
    let mut warnings = Vec::new();
    if config.variant == Variant::Extrapolation
        && (config.gamma * config.alpha - 1.0).abs() > 1e-9
    {
        warnings.push(format!(
            "extrapolation factor gamma = {} differs from 1/alpha = {}; the curvature-based \
             guarantees assume gamma = 1/alpha",
            config.gamma,
            1.0 / config.alpha
        ));
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g0 = noisy_oracle(problem, sigma, NoiseModel::GaussianIso, x0, &mut rng)?;
    let mut state = init(config, x0.clone(), g0)?;
    let spec = config.tr_spec();

    let mut rows = Vec::with_capacity(config.steps as usize + 1);
    let mut max_step_norm = 0.0f64;
    for _ in 0..config.steps {
        let grad_here = problem.grad(&state.x)?;
        let f = problem.value(&state.x)?;
        let residual = stationarity_residual(&spec, &state.x, &grad_here)?;
        let x_norm = config.geometry.primal_norm(&state.x)?;

        let sample_at = config.grad_point(&state).clone();
        let g = noisy_oracle(problem, sigma, NoiseModel::GaussianIso, &sample_at, &mut rng)?;
        let next = step(config, &state, &g)?;

        let momentum_err = if config.variant.uses_momentum() {
            let diff = axpby(1.0, &next.m, -1.0, &grad_here)?;
            Some(config.geometry.dual_norm(&diff)?)
        } else {
            None
        };
        let moved = axpby(1.0, &next.x, -1.0, &state.x)?;
        max_step_norm = max_step_norm.max(config.geometry.primal_norm(&moved)?);

        rows.push(IterationRow {
            k: state.k,
            f,
            residual,
            x_norm,
            momentum_err,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        state = next;
    }
    let grad_final = problem.grad(&state.x)?;
    let final_f = problem.value(&state.x)?;
    rows.push(IterationRow {
        k: state.k,
        f: final_f,
        residual: stationarity_residual(&spec, &state.x, &grad_final)?,
        x_norm: config.geometry.primal_norm(&state.x)?,
        momentum_err: None,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    });

    let min_residual = rows[1..].iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    let max_shift_bound = if config.beta > 0.0 {
        Some(rows.iter().map(|r| config.beta * r.x_norm).fold(0.0f64, f64::max))
    } else {
        None
    };
    let summary = RunSummary {
        min_residual,
        final_f,
        final_gap: problem.f_star().map(|fs| final_f - fs),
        max_shift_bound,
        max_step_norm,
    };
    Ok(RunRecord { config: *config, seed, sigma, rows, summary, warnings })
}

/// Identifiers for the guarantees the harness can check. `T*` entries bound
/// trajectory quantities (best residual or final suboptimality); `L*`
/// entries bound the momentum error per iteration. The `D`-suffixed entries
/// are the bounded-domain (clip-ball) versions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundId {
    T1,
    T2,
    T4,
    T5,
    T6,
    T7,
    T8D,
    T9D,
    L2,
    L5,
    L7,
}

impl BoundId {
    /// Whether the guarantee is stated in expectation and therefore checked
    /// at the fixed-seed mean.
    pub fn stochastic(self) -> bool {
        !matches!(self, BoundId::T1 | BoundId::T4 | BoundId::T8D)
    }

    /// Whether the left-hand side is the final-iterate suboptimality (as
    /// opposed to the best residual over the trajectory).
    pub fn final_gap_lhs(self) -> bool {
        matches!(self, BoundId::T4 | BoundId::T5 | BoundId::T7 | BoundId::T8D | BoundId::T9D)
    }
}

/// Problem constants a bound's right-hand side draws on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// Gradient smoothness constant in the run's geometry.
    pub l: f64,
    /// Curvature-variation constant; only the extrapolation bounds read it.
    pub h: f64,
    /// Gradient-noise scale used by the runs.
    pub sigma: f64,
    /// Norm-equivalence constant of the geometry.
    pub rho: f64,
    /// Initial objective gap (exact or a valid upper bound).
    pub delta0: f64,
    /// Domain diameter for the clip-ball bounds.
    pub dist: Option<f64>,
}

/// Outcome of one bound check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub id: BoundId,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// rhs - lhs; for momentum-error checks, the smallest margin over k.
    pub margin: f64,
}

const HOLDS_REL_SLACK: f64 = 1e-9;

fn report(id: BoundId, lhs: f64, rhs: f64) -> BoundReport {
    BoundReport { id, lhs, rhs, holds: lhs <= rhs * (1.0 + HOLDS_REL_SLACK), margin: rhs - lhs }
}

/// Right-hand side of a trajectory guarantee, given the run parameters and
/// problem constants.
pub fn theorem_rhs(
    id: BoundId,
    eta: f64,
    alpha: f64,
    beta: f64,
    k: u64,
    c: &BoundConstants,
) -> Result<f64> {
    let kf = k as f64;
    let ns = c.rho * c.sigma;
    let need_beta = || {
        if beta > 0.0 {
            Ok(beta)
        } else {
            Err(Error::InvalidParam(format!("{id:?} needs a positive center shift beta")))
        }
    };
    let need_dist = || c.dist.ok_or(Error::MissingConstant("dist"));
    Ok(match id {
        BoundId::T1 => c.delta0 / (eta * kf) + 1.5 * c.l * eta,
        BoundId::T2 => {
            c.delta0 / (eta * kf)
                + 2.0 * ns / (alpha * kf)
                + 2.0 * alpha.sqrt() * ns
                + 3.5 * c.l * eta
                + 2.0 * c.l * eta / alpha
        }
        BoundId::T4 => {
            let b = need_beta()?;
            (1.0 - b).powi(k as i32) * c.delta0 + 4.0 * c.l * eta * eta / b
        }
        BoundId::T5 => {
            let b = need_beta()?;
            (1.0 - b).powi(k as i32) * c.delta0
                + 2.0 * eta * ns * (1.0 / alpha + alpha.sqrt() / b)
                + 4.0 * c.l * eta * eta / b * (1.0 + 1.0 / alpha)
        }
        BoundId::T6 => {
            c.delta0 / (eta * kf)
                + 3.5 * c.l * eta
                + c.h * eta * eta / (alpha * alpha)
                + 2.0 * ns / (alpha * kf)
                + 2.0 * alpha.sqrt() * ns
        }
        BoundId::T7 => {
            let b = need_beta()?;
            (1.0 - b).powi(k as i32) * c.delta0
                + 2.0 * eta * ns * (1.0 / alpha + alpha.sqrt() / b)
                + 4.0 * c.l * eta * eta / b
                + 4.0 * c.h * eta.powi(3) / (alpha * alpha * b)
        }
        BoundId::T8D => {
            let d = need_dist()?;
            (d / (eta + d)).powi(k as i32) * c.delta0 + 1.5 * c.l * d * eta
        }
        BoundId::T9D => {
            let d = need_dist()?;
            (d / (eta + d)).powi(k as i32) * c.delta0
                + 2.0 * alpha.sqrt() * d * ns
                + 2.0 * eta * ns / alpha
                + 1.5 * c.l * d * eta
                + 2.0 * c.l * d * eta / alpha
        }
        BoundId::L2 | BoundId::L5 | BoundId::L7 => {
            return Err(Error::InvalidParam(
                "momentum-error bounds are evaluated per iteration; use momentum_error_check"
                    .into(),
            ))
        }
    })
}

fn shared_config(records: &[RunRecord]) -> Result<&OptimizerConfig> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidParam("bound check needs at least one run".into()))?;
    if records.iter().any(|r| r.config != first.config || r.sigma != first.sigma) {
        return Err(Error::InvalidParam(
            "all runs in a bound check must share one config and noise level".into(),
        ));
    }
    Ok(&first.config)
}

/// Compares a trajectory guarantee against recorded runs: the exact per-run
/// quantity for deterministic guarantees (worst run if several), the
/// fixed-seed mean for stochastic ones (at least 20 runs).
pub fn check_bound(id: BoundId, records: &[RunRecord], c: &BoundConstants) -> Result<BoundReport> {
    let config = shared_config(records)?;
    if id.stochastic() && records.len() < STOCHASTIC_SEEDS.end as usize {
        return Err(Error::InvalidParam(format!(
            "{id:?} is checked in expectation and needs >= {} seeded runs, got {}",
            STOCHASTIC_SEEDS.end,
            records.len()
        )));
    }
    let per_run: Vec<f64> = if id.final_gap_lhs() {
        records
            .iter()
            .map(|r| r.summary.final_gap.ok_or(Error::MissingConstant("f_star")))
            .collect::<Result<_>>()?
    } else {
        records.iter().map(|r| r.summary.min_residual).collect()
    };
    let lhs = if id.stochastic() {
        per_run.iter().sum::<f64>() / per_run.len() as f64
    } else {
        per_run.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b))
    };
    let rhs = theorem_rhs(id, config.eta, config.alpha, config.beta, config.steps, c)?;
    Ok(report(id, lhs, rhs))
}

/// Checks the per-iteration momentum-error envelope for the variant the
/// records were produced by. The envelope at iteration k is
///
/// ```text
///   (1 - alpha)^{k+1} rho sigma + sqrt(alpha) rho sigma
///     + c_l * L eta / alpha + c_h * H eta^2 / alpha^2
/// ```
///
/// with `(c_l, c_h)` = (1, 0) for the centered momentum variant, (2, 0) with
/// decay, and (0, 1/2) for extrapolation (which must run with beta = 0).
/// The report carries the iteration with the smallest margin.
pub fn momentum_error_check(records: &[RunRecord], c: &BoundConstants) -> Result<BoundReport> {
    let config = shared_config(records)?;
    let (id, c_l, c_h) = match config.variant {
        Variant::Momentum => (BoundId::L2, 1.0, 0.0),
        Variant::MomentumDecay => (BoundId::L5, 2.0, 0.0),
        Variant::Extrapolation => {
            if config.beta != 0.0 {
                return Err(Error::InvalidParam(
                    "the extrapolation momentum-error envelope assumes beta = 0".into(),
                ));
            }
            (BoundId::L7, 0.0, 0.5)
        }
        v => {
            return Err(Error::InvalidParam(format!(
                "{v:?} has no momentum buffer to check"
            )))
        }
    };
    if records[0].sigma > 0.0 && records.len() < STOCHASTIC_SEEDS.end as usize {
        return Err(Error::InvalidParam(format!(
            "noisy momentum-error checks need >= {} seeded runs",
            STOCHASTIC_SEEDS.end
        )));
    }
    let steps = config.steps as usize;
    let ns = c.rho * records[0].sigma;
    let fixed = c_l * c.l * config.eta / config.alpha
        + c_h * c.h * config.eta * config.eta / (config.alpha * config.alpha);
    let mut worst: Option<BoundReport> = None;
    let mut all_hold = true;
    for k in 0..steps {
        let mut lhs = 0.0;
        for r in records {
            lhs += r.rows[k]
                .momentum_err
                .ok_or(Error::MissingConstant("momentum error metric"))?
                / records.len() as f64;
        }
        let rhs =
            (1.0 - config.alpha).powi(k as i32 + 1) * ns + config.alpha.sqrt() * ns + fixed;
        let rep = report(id, lhs, rhs);
        all_hold &= rep.holds;
        if worst.as_ref().is_none_or(|w| rep.margin < w.margin) {
            worst = Some(rep);
        }
    }
    let mut out = worst.expect("steps >= 1 enforced by config validation");
    out.holds = all_hold;
    Ok(out)
}

/// Seed-mean comparison row for one stepsize of the two reference updates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMean {
    pub eta: f64,
    pub orth_momentum_final_residual: f64,
    pub momentum_orth_final_residual: f64,
    pub orth_momentum_err_mean: f64,
    pub momentum_orth_err_mean: f64,
}

/// Per-seed detail row backing [`ComparisonMean`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub eta: f64,
    pub seed: u64,
    pub orth_momentum_final_residual: f64,
    pub momentum_orth_final_residual: f64,
    pub orth_momentum_err_mean: f64,
    pub momentum_orth_err_mean: f64,
}

/// Qualitative side-by-side of the two reference updates ("orthogonalize the
/// momentum" vs "average orthogonalized gradients") over a stepsize grid.
/// Both runs of a (eta, seed) pair consume identical noise draws because the
/// noise model is additive and position-independent. The momentum-error
/// column is the quantity the momentum lemmas bound for the first update;
/// for the second it is recorded for contrast only, since its buffer
/// averages orthogonalized (biased) directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub means: Vec<ComparisonMean>,
}

/// Runs both reference updates on a matrix-shaped problem for every stepsize
/// in `etas` and every seed, starting from the zero matrix.
pub fn muon_vs_osgdm(
    problem: &Problem,
    sigma: f64,
    alpha: f64,
    steps: u64,
    etas: &[f64],
    seeds: &[u64],
) -> Result<ComparisonTable> {
    use crate::geometry::{NormGeometry, NormKind};
    let geometry = NormGeometry::new(NormKind::Spectral, problem.shape())?;
    let x0 = ParamPoint::zeros(problem.shape());
    let mut rows = Vec::with_capacity(etas.len() * seeds.len());
    let mut means = Vec::with_capacity(etas.len());
    for &eta in etas {
        let mut mean = ComparisonMean {
            eta,
            orth_momentum_final_residual: 0.0,
            momentum_orth_final_residual: 0.0,
            orth_momentum_err_mean: 0.0,
            momentum_orth_err_mean: 0.0,
        };
        for &seed in seeds {
            let mut row = ComparisonRow {
                eta,
                seed,
                orth_momentum_final_residual: 0.0,
                momentum_orth_final_residual: 0.0,
                orth_momentum_err_mean: 0.0,
                momentum_orth_err_mean: 0.0,
            };
            for variant in [Variant::MuonRef, Variant::OsgdmRef] {
                let mut config = OptimizerConfig::new(variant, geometry, eta, steps);
                config.alpha = alpha;
                let rec = run(&config, problem, sigma, &x0, seed)?;
                let final_residual = rec.rows.last().expect("K+1 rows").residual;
                let err_mean = rec.rows[..steps as usize]
                    .iter()
                    .map(|r| r.momentum_err.expect("momentum variants record the error"))
                    .sum::<f64>()
                    / steps as f64;
                match variant {
                    Variant::MuonRef => {
                        row.orth_momentum_final_residual = final_residual;
                        row.orth_momentum_err_mean = err_mean;
                    }
                    _ => {
                        row.momentum_orth_final_residual = final_residual;
                        row.momentum_orth_err_mean = err_mean;
                    }
                }
            }
            mean.orth_momentum_final_residual += row.orth_momentum_final_residual;
            mean.momentum_orth_final_residual += row.momentum_orth_final_residual;
            mean.orth_momentum_err_mean += row.orth_momentum_err_mean;
            mean.momentum_orth_err_mean += row.momentum_orth_err_mean;
            rows.push(row);
        }
        let n = seeds.len() as f64;
        mean.orth_momentum_final_residual /= n;
        mean.momentum_orth_final_residual /= n;
        mean.orth_momentum_err_mean /= n;
        mean.momentum_orth_err_mean /= n;
        means.push(mean);
    }
    Ok(ComparisonTable { rows, means })
}
