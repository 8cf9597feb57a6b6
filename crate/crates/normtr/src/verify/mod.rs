//! Self-contained verification suites: geometry identities, subproblem
//! cross-checks against brute-force searches, momentum-error envelopes, and
//! end-to-end trajectory bounds on canned problem instances. Every check is
//! seeded and timing-free, so a suite renders to byte-identical text across
//! invocations.

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{orth, singular_values, NormGeometry, NormKind, OrthConfig};
use crate::harness::{
    check_bound, momentum_error_check, run, BoundConstants, BoundId, BoundReport, RunRecord,
    STOCHASTIC_SEEDS,
};
use crate::optim::{OptimizerConfig, Variant};
use crate::point::{axpby, euclid_norm, inner, ParamPoint, Shape};
use crate::problems::{make_matrix_layer, make_quadratic, LossKind, Problem};
use crate::schedule::{schedule, ScheduleInputs, SchedulePreset};
use crate::trstep::{
    prox_inequality_check, stationarity_residual, tr_step, Regularizer, TrustRegionSpec,
};

/// Named groups of checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    TrStep,
    Lemmas,
    Theorems,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometry" => Ok(Suite::Geometry),
            "trstep" => Ok(Suite::TrStep),
            "lemmas" => Ok(Suite::Lemmas),
            "theorems" => Ok(Suite::Theorems),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParam(format!(
                "unknown suite {other:?}; expected geometry, trstep, lemmas, theorems, or all"
            ))),
        }
    }
}

/// One named pass/fail check with a human-readable detail string.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn line(name: &'static str, passed: bool, detail: String) -> CheckLine {
    CheckLine { name, passed, detail }
}

/// Results of a suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub lines: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn passed_count(&self) -> usize {
        self.lines.iter().filter(|l| l.passed).count()
    }

    /// Deterministic text rendition: one line per check plus a tally.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let tag = if l.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag}  {:<34}  {}\n", l.name, l.detail));
        }
        out.push_str(&format!("{}/{} checks passed\n", self.passed_count(), self.lines.len()));
        out
    }
}

/// Runs the requested suite (or all of them, in a fixed order).
pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let mut lines = Vec::new();
    if matches!(suite, Suite::Geometry | Suite::All) {
        lines.extend(geometry_checks()?);
    }
    if matches!(suite, Suite::TrStep | Suite::All) {
        lines.extend(trstep_checks()?);
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        lines.extend(lemma_checks()?);
    }
    if matches!(suite, Suite::Theorems | Suite::All) {
        lines.extend(theorem_checks()?);
    }
    Ok(SuiteReport { lines })
}

fn gauss_point(shape: Shape, scale: f64, rng: &mut impl Rng) -> ParamPoint {
    let data = (0..shape.len()).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
    ParamPoint::new(shape, data).expect("gaussian point construction")
}

const GEOMETRY_CASES: [(NormKind, Shape); 3] = [
    (NormKind::Euclidean, Shape::Vector(6)),
    (NormKind::Infinity, Shape::Vector(6)),
    (NormKind::Spectral, Shape::Matrix(4, 3)),
];

/// Norm, pairing, and orthogonalization identities.
pub fn geometry_checks() -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();
    let cfg = OrthConfig::default();

    // Applying the orthogonalization twice changes nothing, and the output
    // of a full-rank input has unit top singular value.
    let mut rng = ChaCha8Rng::seed_from_u64(7001);
    let mut worst_idem = 0.0f64;
    let mut worst_unit = 0.0f64;
    for shape in [Shape::Matrix(4, 3), Shape::Matrix(3, 4), Shape::Matrix(2, 2), Shape::Matrix(5, 5)] {
        for _ in 0..5 {
            let g = gauss_point(shape, 1.0, &mut rng);
            let o = orth(&g, &cfg)?;
            let oo = orth(&o, &cfg)?;
            worst_idem = worst_idem.max(euclid_norm(&axpby(1.0, &oo, -1.0, &o)?));
            worst_unit = worst_unit.max((singular_values(&o)[0] - 1.0).abs());
        }
    }
    lines.push(line(
        "orth_idempotent",
        worst_idem <= 1e-9,
        format!("worst repeat-application drift {worst_idem:.3e} over 20 random matrices"),
    ));
    lines.push(line(
        "orth_unit_top_singular_value",
        worst_unit <= 1e-9,
        format!("worst |s_max - 1| = {worst_unit:.3e} over 20 random matrices"),
    ));

    // The steepest feasible direction beats a 1000-point random search of
    // the unit ball and attains the dual norm exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(7002);
    let mut worst_lead = f64::INFINITY;
    let mut worst_attain = 0.0f64;
    for (kind, shape) in GEOMETRY_CASES {
        let geo = NormGeometry::new(kind, shape)?;
        for _ in 0..10 {
            let m = gauss_point(shape, 1.0, &mut rng);
            let best_dir = geo.lmo(&m, &cfg)?;
            let attained = inner(&m, &best_dir)?;
            worst_attain = worst_attain.max((attained - geo.dual_norm(&m)?).abs());
            let mut best_sampled = f64::NEG_INFINITY;
            for _ in 0..1000 {
                let u = oracle::unit_ball_sample(kind, shape, &mut rng)?;
                best_sampled = best_sampled.max(inner(&m, &u)?.abs());
            }
            worst_lead = worst_lead.min(attained - best_sampled);
        }
    }
    lines.push(line(
        "lmo_beats_sampled_search",
        worst_lead >= -1e-9 && worst_attain <= 1e-9,
        format!(
            "smallest lead over 1000-sample searches {worst_lead:.3e}; worst dual-norm attainment gap {worst_attain:.3e}"
        ),
    ));

    // Pairing bound: |<x, y>| <= primal(x) * dual(y) on random pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(7003);
    let mut worst_slack = f64::INFINITY;
    for (kind, shape) in GEOMETRY_CASES {
        let geo = NormGeometry::new(kind, shape)?;
        for _ in 0..200 {
            let x = gauss_point(shape, 2.0, &mut rng);
            let y = gauss_point(shape, 2.0, &mut rng);
            let lhs = inner(&x, &y)?.abs();
            let rhs = geo.primal_norm(&x)? * geo.dual_norm(&y)?;
            worst_slack = worst_slack.min(rhs - lhs);
        }
    }
    lines.push(line(
        "pairing_bound_random_pairs",
        worst_slack >= -1e-9,
        format!("smallest slack of primal(x)*dual(y) - |<x,y>| is {worst_slack:.3e} over 600 pairs"),
    ));

    // The norm-equivalence constant is attained by an explicit witness and
    // never exceeded by random points.
    let mut rng = ChaCha8Rng::seed_from_u64(7004);
    let mut worst_witness = 0.0f64;
    let mut worst_cap = f64::NEG_INFINITY;
    for (kind, shape) in GEOMETRY_CASES {
        let geo = NormGeometry::new(kind, shape)?;
        let witness = match kind {
            NormKind::Euclidean => gauss_point(shape, 1.0, &mut rng),
            NormKind::Infinity => ParamPoint::new(shape, vec![1.0; shape.len()])?,
            NormKind::Spectral => {
                let Shape::Matrix(r, c) = shape else { unreachable!() };
                let mut data = vec![0.0; shape.len()];
                for i in 0..r.min(c) {
                    data[i * c + i] = 1.0;
                }
                ParamPoint::new(shape, data)?
            }
        };
        let ratio = geo.dual_norm(&witness)? / euclid_norm(&witness);
        worst_witness = worst_witness.max((ratio - geo.rho()).abs());
        for _ in 0..500 {
            let x = gauss_point(shape, 1.5, &mut rng);
            worst_cap = worst_cap.max(geo.dual_norm(&x)? / euclid_norm(&x) - geo.rho());
        }
    }
    lines.push(line(
        "norm_equivalence_tight",
        worst_witness <= 1e-9 && worst_cap <= 1e-9,
        format!(
            "witness ratio off by {worst_witness:.3e}; random excess over the constant at most {worst_cap:.3e}"
        ),
    ));

    Ok(lines)
}

fn spec_of(
    kind: NormKind,
    shape: Shape,
    reg: Regularizer,
    eta: f64,
    beta: f64,
) -> Result<TrustRegionSpec> {
    TrustRegionSpec::new(NormGeometry::new(kind, shape)?, reg, eta, beta)
}

/// Subproblem solver cross-checks: closed forms against named formulas and
/// against independent searches.
pub fn trstep_checks() -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();
    let cfg = OrthConfig::default();

    // Closed forms match their defining formulas exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(7101);
    let mut worst_spectral = 0.0f64;
    let mut worst_euclid = 0.0f64;
    let mut worst_sign = 0.0f64;
    for _ in 0..20 {
        let eta = 0.05 + 0.45 * rng.gen::<f64>();

        let shape = Shape::Matrix(4, 3);
        let s = spec_of(NormKind::Spectral, shape, Regularizer::None, eta, 0.0)?;
        let x = gauss_point(shape, 1.0, &mut rng);
        let g = gauss_point(shape, 1.0, &mut rng);
        let reference = axpby(1.0, &x, -eta, &orth(&g, &cfg)?)?;
        let step = tr_step(&s, &x, &g, &cfg)?;
        worst_spectral = worst_spectral.max(euclid_norm(&axpby(1.0, &step, -1.0, &reference)?));

        let shape = Shape::Vector(6);
        let s = spec_of(NormKind::Euclidean, shape, Regularizer::None, eta, 0.0)?;
        let x = gauss_point(shape, 1.0, &mut rng);
        let g = gauss_point(shape, 1.0, &mut rng);
        let reference = axpby(1.0, &x, -eta / euclid_norm(&g), &g)?;
        let step = tr_step(&s, &x, &g, &cfg)?;
        worst_euclid = worst_euclid.max(euclid_norm(&axpby(1.0, &step, -1.0, &reference)?));

        let s = spec_of(NormKind::Infinity, shape, Regularizer::None, eta, 0.0)?;
        let x = gauss_point(shape, 1.0, &mut rng);
        let g = gauss_point(shape, 1.0, &mut rng);
        let signs = ParamPoint::new(
            shape,
            g.data().iter().map(|v| if *v > 0.0 { 1.0 } else if *v < 0.0 { -1.0 } else { 0.0 }).collect(),
        )?;
        let reference = axpby(1.0, &x, -eta, &signs)?;
        let step = tr_step(&s, &x, &g, &cfg)?;
        worst_sign = worst_sign.max(euclid_norm(&axpby(1.0, &step, -1.0, &reference)?));
    }
    lines.push(line(
        "step_matches_orth_formula",
        worst_spectral <= 1e-12,
        format!("worst gap to x - eta*orth(g) is {worst_spectral:.3e} over 20 trials"),
    ));
    lines.push(line(
        "step_matches_normalized_formula",
        worst_euclid <= 1e-12,
        format!("worst gap to x - eta*g/|g| is {worst_euclid:.3e} over 20 trials"),
    ));
    lines.push(line(
        "step_matches_sign_formula",
        worst_sign <= 1e-12,
        format!("worst gap to x - eta*sign(g) is {worst_sign:.3e} over 20 trials"),
    ));

    // Exact box enumeration for the max-norm geometry, with and without the
    // clip ball and the center shift.
    let mut rng = ChaCha8Rng::seed_from_u64(7102);
    let mut worst_box = 0.0f64;
    for trial in 0..20 {
        let shape = Shape::Vector(3);
        let eta = 0.05 + 0.4 * rng.gen::<f64>();
        let beta = if trial % 2 == 0 { 0.0 } else { 0.05 };
        let reg = if trial % 4 < 2 {
            Regularizer::None
        } else {
            Regularizer::ClipBall { norm: NormKind::Infinity, radius: 0.8 }
        };
        let s = spec_of(NormKind::Infinity, shape, reg, eta, beta)?;
        let x = match reg {
            Regularizer::None => gauss_point(shape, 1.0, &mut rng),
            Regularizer::ClipBall { radius, .. } => {
                ParamPoint::new(shape, (0..3).map(|_| radius * (2.0 * rng.gen::<f64>() - 1.0)).collect())?
            }
        };
        let m = gauss_point(shape, 1.0, &mut rng);
        let step = tr_step(&s, &x, &m, &cfg)?;
        let got = oracle::step_objective(&s, &m, &step)?;
        let best = oracle::box_search_min(&s, &x, &m)?;
        worst_box = worst_box.max((got - best).abs());
    }
    lines.push(line(
        "subproblem_box_enumeration",
        worst_box <= 1e-9,
        format!("worst objective gap to exact box enumeration {worst_box:.3e} over 20 trials"),
    ));

    // Sampled search over the Euclidean ball: the step value must sit
    // between the exact lower-bound certificate and the sampled minimum.
    let mut rng = ChaCha8Rng::seed_from_u64(7103);
    let mut worst_sphere = 0.0f64;
    let mut cert_violation = 0.0f64;
    for _ in 0..10 {
        let shape = Shape::Vector(3);
        let eta = 0.1 + 0.3 * rng.gen::<f64>();
        let s = spec_of(NormKind::Euclidean, shape, Regularizer::None, eta, 0.0)?;
        let x = gauss_point(shape, 1.0, &mut rng);
        let m = gauss_point(shape, 1.0, &mut rng);
        let step = tr_step(&s, &x, &m, &cfg)?;
        let got = oracle::step_objective(&s, &m, &step)?;
        let cert = oracle::duality_certificate(&s, &x, &m)?;
        let sampled = oracle::sampled_search_min(&s, &x, &m, 20_000, &mut rng)?;
        cert_violation = cert_violation.max(cert - got);
        worst_sphere = worst_sphere.max(sampled - got);
    }
    lines.push(line(
        "subproblem_sampled_sphere_search",
        worst_sphere.abs() <= 1e-3 && cert_violation <= 1e-9,
        format!(
            "sampled minimum trails the step value by at most {worst_sphere:.3e}; certificate violation {cert_violation:.3e}"
        ),
    ));

    // Angle-grid search over 2x2 spectral trust regions.
    let mut rng = ChaCha8Rng::seed_from_u64(7104);
    let mut worst_grid = 0.0f64;
    let mut grid_cert_violation = 0.0f64;
    for _ in 0..5 {
        let shape = Shape::Matrix(2, 2);
        let eta = 0.1 + 0.3 * rng.gen::<f64>();
        let s = spec_of(NormKind::Spectral, shape, Regularizer::None, eta, 0.0)?;
        let x = gauss_point(shape, 1.0, &mut rng);
        let m = gauss_point(shape, 1.0, &mut rng);
        let step = tr_step(&s, &x, &m, &cfg)?;
        let got = oracle::step_objective(&s, &m, &step)?;
        let cert = oracle::duality_certificate(&s, &x, &m)?;
        let grid = oracle::spectral_grid_min_2x2(&s, &x, &m, 144, 9)?;
        grid_cert_violation = grid_cert_violation.max(cert - got);
        worst_grid = worst_grid.max(grid - got);
    }
    lines.push(line(
        "subproblem_spectral_grid_search",
        (0.0..=1e-3).contains(&worst_grid) && grid_cert_violation <= 1e-9,
        format!(
            "grid minimum trails the step value by at most {worst_grid:.3e}; certificate violation {grid_cert_violation:.3e}"
        ),
    ));

    // Residual of the clipped geometry against a grid search over the
    // normal cone, with iterates forced onto faces.
    let mut rng = ChaCha8Rng::seed_from_u64(7105);
    let mut worst_residual = 0.0f64;
    for _ in 0..30 {
        let shape = Shape::Vector(3);
        let radius = 1.0;
        let s = spec_of(
            NormKind::Infinity,
            shape,
            Regularizer::ClipBall { norm: NormKind::Infinity, radius },
            0.1,
            0.0,
        )?;
        let x = ParamPoint::new(
            shape,
            (0..3)
                .map(|_| match rng.gen_range(0..3) {
                    0 => radius,
                    1 => -radius,
                    _ => 0.9 * (2.0 * rng.gen::<f64>() - 1.0),
                })
                .collect(),
        )?;
        let g = gauss_point(shape, 2.0, &mut rng);
        let got = stationarity_residual(&s, &x, &g)?;
        let (grid, spacing) = oracle::residual_grid_min(radius, &x, &g, 4001)?;
        worst_residual = worst_residual.max((got - grid).abs() - spacing);
    }
    lines.push(line(
        "residual_matches_grid_search",
        worst_residual <= 1e-9,
        format!(
            "worst |residual - grid minimum| beyond the grid spacing is {worst_residual:.3e} over 30 trials"
        ),
    ));

    // The one-step descent inequality holds on random steps, clipped or not.
    let mut rng = ChaCha8Rng::seed_from_u64(7106);
    let mut worst_prox = f64::INFINITY;
    for trial in 0..50 {
        let shape = Shape::Vector(4);
        let eta = 0.05 + 0.4 * rng.gen::<f64>();
        let beta = if trial % 2 == 0 { 0.0 } else { 0.1 * rng.gen::<f64>() };
        let reg = if trial % 4 < 2 {
            Regularizer::None
        } else {
            Regularizer::ClipBall { norm: NormKind::Infinity, radius: 1.0 }
        };
        let s = spec_of(NormKind::Infinity, shape, reg, eta, beta)?;
        let x = match reg {
            Regularizer::None => gauss_point(shape, 1.0, &mut rng),
            Regularizer::ClipBall { radius, .. } => {
                ParamPoint::new(shape, (0..4).map(|_| radius * (2.0 * rng.gen::<f64>() - 1.0)).collect())?
            }
        };
        let m = gauss_point(shape, 1.0, &mut rng);
        let x_plus = tr_step(&s.without_shift(), &x, &m, &cfg)?;
        let check = prox_inequality_check(&s, &x, &x_plus, &m)?;
        if !check.holds {
            worst_prox = worst_prox.min(check.slack);
        }
    }
    lines.push(line(
        "descent_inequality_random_steps",
        worst_prox == f64::INFINITY,
        if worst_prox == f64::INFINITY {
            "holds on all 50 random steps".to_string()
        } else {
            format!("violated with slack {worst_prox:.3e}")
        },
    ));

    Ok(lines)
}

/// A canned trajectory-bound scenario: a problem instance, an optimizer
/// configuration derived from a tuning preset, and the constants its
/// guarantee draws on.
#[derive(Clone, Debug)]
pub struct TheoremCase {
    pub name: &'static str,
    pub id: BoundId,
    pub config: OptimizerConfig,
    pub problem: Problem,
    pub sigma: f64,
    pub x0: ParamPoint,
    pub constants: BoundConstants,
}

fn known_l(problem: &Problem, kind: NormKind) -> Result<f64> {
    problem.grad_smoothness(kind).ok_or(Error::MissingConstant("gradient smoothness"))
}

fn known_h(problem: &Problem, kind: NormKind) -> Result<f64> {
    problem.hess_smoothness(kind).ok_or(Error::MissingConstant("curvature variation"))
}

/// Deterministic residual bound on a well-conditioned quadratic over the
/// Euclidean geometry; the stepsize comes from the deterministic preset at
/// eps = 0.1 and the budget is fixed at 1000 iterations.
pub fn t1_quadratic_case() -> Result<TheoremCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let problem = make_quadratic(10, 4.0, &mut rng)?;
    let geometry = NormGeometry::new(NormKind::Euclidean, problem.shape())?;
    let x0 = ParamPoint::zeros(problem.shape());
    let l = known_l(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let sched = schedule(
        SchedulePreset::C1,
        &ScheduleInputs {
            eps: Some(0.1),
            l: Some(l),
            delta0: Some(delta0),
            ..Default::default()
        },
    )?;
    let config = OptimizerConfig::new(Variant::DetTr, geometry, sched.eta, 1000);
    let constants =
        BoundConstants { l, h: 0.0, sigma: 0.0, rho: geometry.rho(), delta0, dist: None };
    Ok(TheoremCase { name: "t1_quadratic", id: BoundId::T1, config, problem, sigma: 0.0, x0, constants })
}

/// The same deterministic residual bound on a small matrix layer with
/// quadratic loss over the spectral geometry, using its analytic smoothness
/// constant.
pub fn t1_layer_case() -> Result<TheoremCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let problem = make_matrix_layer(4, 4, 16, LossKind::Quadratic, &mut rng)?;
    let geometry = NormGeometry::new(NormKind::Spectral, problem.shape())?;
    let x0 = ParamPoint::zeros(problem.shape());
    let l = known_l(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let sched = schedule(
        SchedulePreset::C1,
        &ScheduleInputs {
            eps: Some(0.1),
            l: Some(l),
            delta0: Some(delta0),
            ..Default::default()
        },
    )?;
    let config = OptimizerConfig::new(Variant::DetTr, geometry, sched.eta, 1000);
    let constants =
        BoundConstants { l, h: 0.0, sigma: 0.0, rho: geometry.rho(), delta0, dist: None };
    Ok(TheoremCase { name: "t1_matrix_layer", id: BoundId::T1, config, problem, sigma: 0.0, x0, constants })
}

/// Noisy residual bound for the momentum variant on a logistic matrix layer
/// at unit noise, checked at the seed-mean.
pub fn t2_case() -> Result<TheoremCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let problem = make_matrix_layer(4, 4, 16, LossKind::Logistic, &mut rng)?;
    let geometry = NormGeometry::new(NormKind::Spectral, problem.shape())?;
    let x0 = ParamPoint::zeros(problem.shape());
    let sigma = 1.0;
    let l = known_l(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let sched = schedule(
        SchedulePreset::C2,
        &ScheduleInputs {
            eps: Some(0.5),
            l: Some(l),
            sigma: Some(sigma),
            rho: Some(geometry.rho()),
            delta0: Some(delta0),
            ..Default::default()
        },
    )?;
    let mut config = OptimizerConfig::new(Variant::Momentum, geometry, sched.eta, sched.k);
    config.alpha = sched.alpha;
    let constants =
        BoundConstants { l, h: 0.0, sigma, rho: geometry.rho(), delta0, dist: None };
    Ok(TheoremCase { name: "t2_matrix_layer", id: BoundId::T2, config, problem, sigma, x0, constants })
}

/// Final-iterate bound for the deterministic decayed variant on a quadratic
/// whose optimum has unit norm, with the stepsize tied to the shift.
pub fn t4_case() -> Result<TheoremCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let problem = make_quadratic(4, 4.0, &mut rng)?;
    let geometry = NormGeometry::new(NormKind::Euclidean, problem.shape())?;
    let x0 = ParamPoint::zeros(problem.shape());
    let dist = 1.0;
    let l = known_l(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let sched = schedule(
        SchedulePreset::C4,
        &ScheduleInputs {
            eps: Some(0.1),
            l: Some(l),
            dist: Some(dist),
            delta0: Some(delta0),
            ..Default::default()
        },
    )?;
    let mut config = OptimizerConfig::new(Variant::DetTrDecay, geometry, sched.eta, sched.k);
    config.beta = sched.beta;
    let constants =
        BoundConstants { l, h: 0.0, sigma: 0.0, rho: geometry.rho(), delta0, dist: Some(dist) };
    Ok(TheoremCase { name: "t4_decay", id: BoundId::T4, config, problem, sigma: 0.0, x0, constants })
}

/// Final-iterate bound for the noisy momentum variant with decay on a
/// star-convex quadratic, checked at the seed-mean.
pub fn t5_case() -> Result<TheoremCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let problem = make_quadratic(5, 2.0, &mut rng)?;
    let geometry = NormGeometry::new(NormKind::Euclidean, problem.shape())?;
    let x0 = ParamPoint::zeros(problem.shape());
    let sigma = 0.5;
    let dist = 1.0;
    let l = known_l(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let sched = schedule(
        SchedulePreset::C5,
        &ScheduleInputs {
            eps: Some(0.2),
            l: Some(l),
            sigma: Some(sigma),
            rho: Some(geometry.rho()),
            dist: Some(dist),
            delta0: Some(delta0),
            ..Default::default()
        },
    )?;
    let mut config = OptimizerConfig::new(Variant::MomentumDecay, geometry, sched.eta, sched.k);
    config.alpha = sched.alpha;
    config.beta = sched.beta;
    let constants =
        BoundConstants { l, h: 0.0, sigma, rho: geometry.rho(), delta0, dist: Some(dist) };
    Ok(TheoremCase { name: "t5_momentum_decay", id: BoundId::T5, config, problem, sigma, x0, constants })
}

/// Noisy residual bound for the extrapolated variant on a logistic matrix
/// layer, using the analytic curvature-variation constant.
pub fn t6_case() -> Result<TheoremCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let problem = make_matrix_layer(4, 4, 16, LossKind::Logistic, &mut rng)?;
    let geometry = NormGeometry::new(NormKind::Spectral, problem.shape())?;
    let x0 = ParamPoint::zeros(problem.shape());
    let sigma = 1.0;
    let l = known_l(&problem, geometry.kind())?;
    let h = known_h(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let sched = schedule(
        SchedulePreset::C6,
        &ScheduleInputs {
            eps: Some(0.5),
            l: Some(l),
            h: Some(h),
            sigma: Some(sigma),
            rho: Some(geometry.rho()),
            delta0: Some(delta0),
            ..Default::default()
        },
    )?;
    let mut config = OptimizerConfig::new(Variant::Extrapolation, geometry, sched.eta, sched.k);
    config.alpha = sched.alpha;
    config.gamma = 1.0 / sched.alpha;
    let constants = BoundConstants { l, h, sigma, rho: geometry.rho(), delta0, dist: None };
    Ok(TheoremCase { name: "t6_extrapolation", id: BoundId::T6, config, problem, sigma, x0, constants })
}

/// Final-iterate bound for the extrapolated variant with decay on a
/// star-convex quadratic (zero curvature variation), checked at the
/// seed-mean.
pub fn t7_case() -> Result<TheoremCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let problem = make_quadratic(4, 2.0, &mut rng)?;
    let geometry = NormGeometry::new(NormKind::Euclidean, problem.shape())?;
    let x0 = ParamPoint::zeros(problem.shape());
    let sigma = 0.5;
    let dist = 1.0;
    let l = known_l(&problem, geometry.kind())?;
    let h = known_h(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let sched = schedule(
        SchedulePreset::C7,
        &ScheduleInputs {
            eps: Some(0.2),
            l: Some(l),
            h: Some(h),
            sigma: Some(sigma),
            rho: Some(geometry.rho()),
            dist: Some(dist),
            delta0: Some(delta0),
        },
    )?;
    let mut config = OptimizerConfig::new(Variant::Extrapolation, geometry, sched.eta, sched.k);
    config.alpha = sched.alpha;
    config.beta = sched.beta;
    config.gamma = 1.0 / sched.alpha;
    let constants = BoundConstants { l, h, sigma, rho: geometry.rho(), delta0, dist: Some(dist) };
    Ok(TheoremCase { name: "t7_extrapolation_decay", id: BoundId::T7, config, problem, sigma, x0, constants })
}

fn clipped_quadratic() -> Result<(Problem, NormGeometry, ParamPoint, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let problem = make_quadratic(4, 4.0, &mut rng)?;
    let geometry = NormGeometry::new(NormKind::Infinity, problem.shape())?;
    let radius = 1.0;
    let x_star = problem.x_star().expect("quadratic optimum");
    let sup = x_star.data().iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if sup >= radius {
        return Err(Error::InvalidParam(format!(
            "clipped instance needs the optimum strictly inside the ball, got sup-norm {sup}"
        )));
    }
    Ok((problem, geometry, ParamPoint::zeros(geometry.shape()), radius))
}

/// Deterministic final-iterate bound under clipping: sign steps confined to
/// a box that strictly contains the optimum.
pub fn t8d_case() -> Result<TheoremCase> {
    let (problem, geometry, x0, radius) = clipped_quadratic()?;
    let dist = 2.0 * radius;
    let l = known_l(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let sched = schedule(
        SchedulePreset::C8,
        &ScheduleInputs {
            eps: Some(0.5),
            l: Some(l),
            dist: Some(dist),
            delta0: Some(delta0),
            ..Default::default()
        },
    )?;
    let mut config = OptimizerConfig::new(Variant::DetTr, geometry, sched.eta, sched.k);
    config.regularizer = Regularizer::ClipBall { norm: NormKind::Infinity, radius };
    let constants =
        BoundConstants { l, h: 0.0, sigma: 0.0, rho: geometry.rho(), delta0, dist: Some(dist) };
    Ok(TheoremCase { name: "t8d_clipped", id: BoundId::T8D, config, problem, sigma: 0.0, x0, constants })
}

/// Noisy final-iterate bound under clipping for the momentum variant,
/// checked at the seed-mean.
pub fn t9d_case() -> Result<TheoremCase> {
    let (problem, geometry, x0, radius) = clipped_quadratic()?;
    let sigma = 0.5;
    let dist = 2.0 * radius;
    let l = known_l(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let sched = schedule(
        SchedulePreset::C9,
        &ScheduleInputs {
            eps: Some(0.5),
            l: Some(l),
            sigma: Some(sigma),
            rho: Some(geometry.rho()),
            dist: Some(dist),
            delta0: Some(delta0),
            ..Default::default()
        },
    )?;
    let mut config = OptimizerConfig::new(Variant::Momentum, geometry, sched.eta, sched.k);
    config.alpha = sched.alpha;
    config.regularizer = Regularizer::ClipBall { norm: NormKind::Infinity, radius };
    let constants =
        BoundConstants { l, h: 0.0, sigma, rho: geometry.rho(), delta0, dist: Some(dist) };
    Ok(TheoremCase { name: "t9d_clipped_momentum", id: BoundId::T9D, config, problem, sigma, x0, constants })
}

/// Noise-free momentum run whose error envelope collapses to L*eta/alpha,
/// checked per iteration on a single trajectory.
pub fn momentum_noise_free_case() -> Result<TheoremCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let problem = make_quadratic(6, 3.0, &mut rng)?;
    let geometry = NormGeometry::new(NormKind::Euclidean, problem.shape())?;
    let x0 = ParamPoint::zeros(problem.shape());
    let l = known_l(&problem, geometry.kind())?;
    let delta0 = problem.gap_bound(&x0)?;
    let mut config = OptimizerConfig::new(Variant::Momentum, geometry, 0.05, 200);
    config.alpha = 0.25;
    let constants =
        BoundConstants { l, h: 0.0, sigma: 0.0, rho: geometry.rho(), delta0, dist: None };
    Ok(TheoremCase {
        name: "momentum_noise_free",
        id: BoundId::L2,
        config,
        problem,
        sigma: 0.0,
        x0,
        constants,
    })
}

/// All canned trajectory-bound scenarios, in a fixed order.
pub fn all_theorem_cases() -> Result<Vec<TheoremCase>> {
    Ok(vec![
        t1_quadratic_case()?,
        t1_layer_case()?,
        t2_case()?,
        t4_case()?,
        t5_case()?,
        t6_case()?,
        t7_case()?,
        t8d_case()?,
        t9d_case()?,
    ])
}

/// Produces the run records a case's check consumes: the full seed set for
/// noisy expectation-style checks, a single run otherwise.
pub fn case_records(case: &TheoremCase) -> Result<Vec<RunRecord>> {
    let seeds: Vec<u64> = if case.id.stochastic() && case.sigma > 0.0 {
        STOCHASTIC_SEEDS.collect()
    } else {
        vec![0]
    };
    seeds
        .iter()
        .map(|s| run(&case.config, &case.problem, case.sigma, &case.x0, *s))
        .collect()
}

/// Runs a case and checks its trajectory bound.
pub fn run_case(case: &TheoremCase) -> Result<(Vec<RunRecord>, BoundReport)> {
    let records = case_records(case)?;
    let report = check_bound(case.id, &records, &case.constants)?;
    Ok((records, report))
}

fn bound_line(name: &'static str, records: &[RunRecord], report: &BoundReport) -> CheckLine {
    let config = &records[0].config;
    line(
        name,
        report.holds,
        format!(
            "lhs {:.4e} <= rhs {:.4e} (margin {:.2e}; eta {:.3e}, alpha {:.3e}, beta {:.3e}, steps {}, runs {})",
            report.lhs,
            report.rhs,
            report.margin,
            config.eta,
            config.alpha,
            config.beta,
            config.steps,
            records.len()
        ),
    )
}

/// Momentum-error envelopes and iterate-boundedness properties.
pub fn lemma_checks() -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();

    // Noisy momentum-error envelope at the seed-mean, every iteration.
    let case = t2_case()?;
    let records = case_records(&case)?;
    let report = momentum_error_check(&records, &case.constants)?;
    lines.push(bound_line("momentum_error_envelope_noisy", &records, &report));

    // Noise-free specialization: the envelope collapses to L*eta/alpha and
    // must hold on the single trajectory at every iteration.
    let case = momentum_noise_free_case()?;
    let records = case_records(&case)?;
    let report = momentum_error_check(&records, &case.constants)?;
    lines.push(bound_line("momentum_error_noise_free", &records, &report));

    // Envelope for the decayed momentum variant.
    let case = t5_case()?;
    let records = case_records(&case)?;
    let report = momentum_error_check(&records, &case.constants)?;
    lines.push(bound_line("momentum_error_envelope_decay", &records, &report));

    // Envelope for the extrapolated variant (no shift, gamma = 1/alpha).
    let case = t6_case()?;
    let records = case_records(&case)?;
    let report = momentum_error_check(&records, &case.constants)?;
    lines.push(bound_line("momentum_error_envelope_extrap", &records, &report));

    // Decay keeps iterates bounded: beta * |x_k| <= eta and each step moves
    // at most 2 * eta.
    let case = t4_case()?;
    let records = case_records(&case)?;
    let r = &records[0];
    let eta = case.config.eta;
    let shift = r.summary.max_shift_bound.unwrap_or(f64::INFINITY);
    lines.push(line(
        "decay_iterates_bounded",
        shift <= eta * (1.0 + 1e-9),
        format!("max beta*|x_k| = {shift:.4e} against eta = {eta:.4e}"),
    ));
    lines.push(line(
        "decay_steps_bounded",
        r.summary.max_step_norm <= 2.0 * eta * (1.0 + 1e-9),
        format!("max step norm {:.4e} against 2*eta = {:.4e}", r.summary.max_step_norm, 2.0 * eta),
    ));

    // Clipping keeps every iterate inside the ball.
    let case = t8d_case()?;
    let records = case_records(&case)?;
    let radius = match case.config.regularizer {
        Regularizer::ClipBall { radius, .. } => radius,
        Regularizer::None => unreachable!("clipped case carries a clip ball"),
    };
    let worst =
        records[0].rows.iter().map(|row| row.x_norm).fold(f64::NEG_INFINITY, f64::max);
    lines.push(line(
        "clip_iterates_feasible",
        worst <= radius + 1e-12,
        format!("max iterate sup-norm {worst:.6} against radius {radius}"),
    ));

    Ok(lines)
}

/// End-to-end trajectory bounds on the canned scenarios.
pub fn theorem_checks() -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();
    for case in all_theorem_cases()? {
        let (records, report) = run_case(&case)?;
        lines.push(bound_line(case.name, &records, &report));
    }
    Ok(lines)
}
