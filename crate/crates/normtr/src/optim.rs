//! The optimizer family: deterministic and momentum trust-region variants,
//! with optional decay (center shift) and gradient extrapolation, plus the
//! two directly-coded reference updates (orthogonalized momentum and
//! momentum of orthogonalized gradients) they specialize to.
//!
//! Steps are pure: `step(config, state, g)` consumes a gradient sample and
//! returns the next state. Gradient evaluation is the caller's job so the
//! variants stay oracle-agnostic; [`OptimizerConfig::grad_point`] reports
//! where the sample must be taken (the extrapolated point for the
//! extrapolation variant, the current iterate otherwise).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NormGeometry, OrthConfig};
use crate::point::{axpby, ParamPoint};
use crate::trstep::{tr_step, Regularizer, TrustRegionSpec};

/// Which member of the family to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Exact gradient, trust region centered at the iterate.
    DetTr,
    /// Exact gradient, center shifted toward the origin by beta.
    DetTrDecay,
    /// Momentum-averaged stochastic gradient, centered trust region.
    Momentum,
    /// Momentum plus the beta center shift.
    MomentumDecay,
    /// Momentum with gradients sampled at an extrapolated point.
    Extrapolation,
    /// Reference update: orthogonalize the momentum buffer, then step.
    MuonRef,
    /// Reference update: orthogonalize each gradient, then average.
    OsgdmRef,
}

impl Variant {
    pub fn uses_momentum(self) -> bool {
        !matches!(self, Variant::DetTr | Variant::DetTrDecay)
    }

    pub fn uses_decay(self) -> bool {
        matches!(
            self,
            Variant::DetTrDecay | Variant::MomentumDecay | Variant::Extrapolation
        )
    }
}

/// Full description of a run: variant, scalar parameters, geometry,
/// regularizer, orthogonalization settings, and the iteration budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub variant: Variant,
    /// Trust-region radius (step size).
    pub eta: f64,
    /// Momentum averaging weight in (0, 1]; 1 means no averaging.
    pub alpha: f64,
    /// Center shift in [0, 1); must be 0 for variants without decay.
    pub beta: f64,
    /// Extrapolation factor; only the extrapolation variant reads it.
    pub gamma: f64,
    /// Iteration budget K.
    pub steps: u64,
    pub geometry: NormGeometry,
    pub regularizer: Regularizer,
    pub orth: OrthConfig,
}

impl OptimizerConfig {
    pub fn new(variant: Variant, geometry: NormGeometry, eta: f64, steps: u64) -> Self {
        Self {
            variant,
            eta,
            alpha: 1.0,
            beta: 0.0,
            gamma: 1.0,
            steps,
            geometry,
            regularizer: Regularizer::None,
            orth: OrthConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !self.variant.uses_decay() && self.beta != 0.0 {
            return Err(Error::InvalidParam(format!(
                "{:?} has no center shift; set beta = 0 (got {})",
                self.variant, self.beta
            )));
        }
        if self.variant == Variant::Extrapolation && !(self.gamma.is_finite() && self.gamma > 0.0)
        {
            return Err(Error::InvalidParam(format!(
                "extrapolation factor gamma must be positive, got {}",
                self.gamma
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParam("iteration budget must be >= 1".into()));
        }
        self.tr_spec().validate()
    }

    /// The trust-region subproblem this config solves each step.
    pub fn tr_spec(&self) -> TrustRegionSpec {
        TrustRegionSpec {
            geometry: self.geometry,
            regularizer: self.regularizer,
            eta: self.eta,
            beta: self.beta,
        }
    }

    /// Point the next gradient sample must be evaluated at.
    pub fn grad_point<'a>(&self, state: &'a OptimizerState) -> &'a ParamPoint {
        match self.variant {
            Variant::Extrapolation => &state.x_bar,
            _ => &state.x,
        }
    }
}

/// Value-type iteration state. `m` is the momentum buffer (a gradient copy
/// for variants that do not average); `x_bar` is the extrapolated point and
/// simply mirrors `x` for the other variants.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    pub k: u64,
    pub x: ParamPoint,
    pub m: ParamPoint,
    pub x_bar: ParamPoint,
}

/// Initial state: `x = x_bar = x0`, momentum seeded with a gradient sample
/// at `x0` for the variants that average (the deterministic variants store
/// but never read it).
pub fn init(config: &OptimizerConfig, x0: ParamPoint, g0: ParamPoint) -> Result<OptimizerState> {
    config.validate()?;
    if x0.shape() != g0.shape() {
        return Err(Error::ShapeMismatch(x0.shape(), g0.shape()));
    }
    if !config.regularizer.is_feasible(&x0)? {
        return Err(Error::Infeasible("start point violates the clip constraint".into()));
    }
    Ok(OptimizerState { k: 0, x_bar: x0.clone(), m: g0, x: x0 })
}

/// One iteration. `g` must be sampled at `config.grad_point(state)`.
pub fn step(
    config: &OptimizerConfig,
    state: &OptimizerState,
    g: &ParamPoint,
) -> Result<OptimizerState> {
    let spec = config.tr_spec();
    match config.variant {
        Variant::DetTr | Variant::DetTrDecay => {
            let x = tr_step(&spec, &state.x, g, &config.orth)?;
            Ok(OptimizerState {
                k: state.k + 1,
                x_bar: x.clone(),
                m: state.m.clone(),
                x,
            })
        }
        Variant::Momentum | Variant::MomentumDecay => {
            let m = axpby(1.0 - config.alpha, &state.m, config.alpha, g)?;
            let x = tr_step(&spec, &state.x, &m, &config.orth)?;
            Ok(OptimizerState { k: state.k + 1, x_bar: x.clone(), m, x })
        }
        Variant::Extrapolation => {
            let m = axpby(1.0 - config.alpha, &state.m, config.alpha, g)?;
            let x = tr_step(&spec, &state.x, &m, &config.orth)?;
            let x_bar = axpby(1.0 - config.gamma, &state.x, config.gamma, &x)?;
            Ok(OptimizerState { k: state.k + 1, x, m, x_bar })
        }
        Variant::MuonRef => muon_ref_step(state, g, config.eta, config.alpha, &config.orth),
        Variant::OsgdmRef => osgdm_ref_step(state, g, config.eta, config.alpha, &config.orth),
    }
}

/// Reference update that averages raw gradients, then orthogonalizes the
/// buffer: `m <- (1-alpha) m + alpha g; x <- x - eta * orth(m)`.
pub fn muon_ref_step(
    state: &OptimizerState,
    g: &ParamPoint,
    eta: f64,
    alpha: f64,
    cfg: &OrthConfig,
) -> Result<OptimizerState> {
    let m = axpby(1.0 - alpha, &state.m, alpha, g)?;
    let direction = crate::geometry::orth(&m, cfg)?;
    let x = axpby(1.0, &state.x, -eta, &direction)?;
    Ok(OptimizerState { k: state.k + 1, x_bar: x.clone(), m, x })
}

/// Reference update that orthogonalizes each gradient, then averages:
/// `o <- orth(g); m <- (1-alpha) m + alpha o; x <- x - eta * m`.
pub fn osgdm_ref_step(
    state: &OptimizerState,
    g: &ParamPoint,
    eta: f64,
    alpha: f64,
    cfg: &OrthConfig,
) -> Result<OptimizerState> {
    let o = crate::geometry::orth(g, cfg)?;
    let m = axpby(1.0 - alpha, &state.m, alpha, &o)?;
    let x = axpby(1.0, &state.x, -eta, &m)?;
    Ok(OptimizerState { k: state.k + 1, x_bar: x.clone(), m, x })
}
