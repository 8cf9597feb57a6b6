//! Experiment configuration: the JSON schema the CLI accepts and its
//! resolution into a ready-to-run optimizer setup. Unknown keys are
//! rejected everywhere so typos fail loudly before any run starts.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use normtr::geometry::{NormGeometry, NormKind, OrthConfig};
use normtr::optim::{OptimizerConfig, Variant};
use normtr::point::ParamPoint;
use normtr::problems::{make_matrix_layer, make_quadratic, LossKind, Problem};
use normtr::schedule::{schedule, ScheduleInputs, SchedulePreset};
use normtr::trstep::Regularizer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Problem half of the experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Random positive-definite quadratic.
    Quadratic { dim: usize, condition: f64, seed: u64 },
    /// Single-matrix-layer regression/classification instance.
    MatrixLayer { rows: usize, cols: usize, samples: usize, loss: LossKind, seed: u64 },
}

impl ProblemSpec {
    pub fn build(&self) -> normtr::Result<Problem> {
        match *self {
            ProblemSpec::Quadratic { dim, condition, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                make_quadratic(dim, condition, &mut rng)
            }
            ProblemSpec::MatrixLayer { rows, cols, samples, loss, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                make_matrix_layer(rows, cols, samples, loss, &mut rng)
            }
        }
    }
}

/// Scalar parameters: either explicit (`eta` and `steps` required) or
/// derived from a tuning preset (`schedule` and `eps` required, in which
/// case eta/alpha/beta/steps must be absent). `gamma` may always be given;
/// `dist` feeds presets that need a domain size.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<SchedulePreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<f64>,
}

/// Top-level experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    /// Gradient-noise scale; 0 means exact gradients.
    #[serde(default)]
    pub sigma: f64,
    pub geometry: NormKind,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularizer: Option<Regularizer>,
    pub params: ParamsSpec,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orth: Option<OrthConfig>,
}

/// Constants consumed by a schedule preset, echoed into the summary so a
/// reader can reproduce the derivation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub preset: SchedulePreset,
    pub eps: f64,
    pub l: Option<f64>,
    pub h: Option<f64>,
    pub sigma: f64,
    pub rho: f64,
    pub delta0: f64,
    pub dist: Option<f64>,
}

/// A fully resolved experiment: problem built, parameters concrete.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub experiment: ExperimentConfig,
    pub optimizer: OptimizerConfig,
    pub problem: Problem,
    pub sigma: f64,
    pub x0: ParamPoint,
    pub seeds: Vec<u64>,
    pub schedule_record: Option<ScheduleRecord>,
}

fn config_err(msg: impl Into<String>) -> String {
    msg.into()
}

/// Resolves the parsed file into a runnable setup. All failures here are
/// configuration errors (the caller maps them to exit code 2).
pub fn resolve(experiment: &ExperimentConfig, seed_offset: u64) -> Result<Resolved, String> {
    if experiment.seeds.is_empty() {
        return Err(config_err("seeds must be a non-empty list"));
    }
    if !(experiment.sigma.is_finite() && experiment.sigma >= 0.0) {
        return Err(config_err(format!("sigma must be >= 0, got {}", experiment.sigma)));
    }
    let problem = experiment.problem.build().map_err(|e| format!("problem: {e}"))?;
    let geometry = NormGeometry::new(experiment.geometry, problem.shape())
        .map_err(|e| format!("geometry: {e}"))?;
    let x0 = ParamPoint::zeros(problem.shape());
    let p = &experiment.params;

    let mut schedule_record = None;
    let (eta, alpha, beta, steps) = if let Some(preset) = p.schedule {
        for (name, present) in [
            ("eta", p.eta.is_some()),
            ("alpha", p.alpha.is_some()),
            ("beta", p.beta.is_some()),
            ("steps", p.steps.is_some()),
        ] {
            if present {
                return Err(config_err(format!(
                    "params.{name} cannot be combined with params.schedule; the preset derives it"
                )));
            }
        }
        let eps = p
            .eps
            .ok_or_else(|| config_err("params.eps is required with params.schedule"))?;
        let l = problem.grad_smoothness(experiment.geometry);
        let h = problem.hess_smoothness(experiment.geometry);
        let delta0 = problem.gap_bound(&x0).map_err(|e| format!("initial gap: {e}"))?;
        let dist = p.dist.or(match experiment.regularizer {
            Some(Regularizer::ClipBall { radius, .. }) => Some(2.0 * radius),
            _ => problem
                .x_star()
                .and_then(|xs| geometry.primal_norm(xs).ok()),
        });
        let inputs = ScheduleInputs {
            eps: Some(eps),
            l,
            h,
            sigma: Some(experiment.sigma),
            rho: Some(geometry.rho()),
            delta0: Some(delta0),
            dist,
        };
        let sched = schedule(preset, &inputs).map_err(|e| format!("schedule: {e}"))?;
        schedule_record = Some(ScheduleRecord {
            preset,
            eps,
            l,
            h,
            sigma: experiment.sigma,
            rho: geometry.rho(),
            delta0,
            dist,
        });
        (sched.eta, sched.alpha, sched.beta, sched.k)
    } else {
        if p.eps.is_some() || p.dist.is_some() {
            return Err(config_err(
                "params.eps and params.dist are only meaningful with params.schedule",
            ));
        }
        let eta = p.eta.ok_or_else(|| config_err("params.eta is required without a schedule"))?;
        let steps =
            p.steps.ok_or_else(|| config_err("params.steps is required without a schedule"))?;
        (eta, p.alpha.unwrap_or(1.0), p.beta.unwrap_or(0.0), steps)
    };

    let gamma = p.gamma.unwrap_or(if experiment.variant == Variant::Extrapolation {
        1.0 / alpha
    } else {
        1.0
    });

    let mut optimizer = OptimizerConfig::new(experiment.variant, geometry, eta, steps);
    optimizer.alpha = alpha;
    optimizer.beta = beta;
    optimizer.gamma = gamma;
    optimizer.regularizer = experiment.regularizer.unwrap_or(Regularizer::None);
    if let Some(orth) = experiment.orth {
        optimizer.orth = orth;
    }
    optimizer.validate().map_err(|e| format!("optimizer: {e}"))?;

    let seeds: Vec<u64> = experiment.seeds.iter().map(|s| s + seed_offset).collect();
    Ok(Resolved {
        experiment: experiment.clone(),
        optimizer,
        problem,
        sigma: experiment.sigma,
        x0,
        seeds,
        schedule_record,
    })
}

/// Parses the experiment file, surfacing serde's line/column diagnostics.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}
