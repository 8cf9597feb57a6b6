//! Closed-form solver for the trust-region subproblem
//!
//! ```text
//!   minimize  <m, z> + R(z)   subject to  ||z - (1 - beta) x|| <= eta
//! ```
//!
//! together with the generalized stationarity residual and a checker for the
//! step's defining variational inequality. Closed forms exist for R = 0 with
//! any geometry and for max-norm ball clipping under the max-norm geometry;
//! every other pairing reports a "no closed-form solver" error instead of
//! silently approximating.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NormGeometry, NormKind, OrthConfig};
use crate::point::{axpby, inner, ParamPoint};

/// Slack used when classifying a coordinate as sitting on a clip-ball face.
/// Steps produced by `tr_step` land on faces exactly (the clip is a min/max),
/// so this only matters for externally supplied points.
const BOUNDARY_TOL: f64 = 1e-9;

/// Slack allowed when checking feasibility of an input point.
const FEAS_TOL: f64 = 1e-9;

/// The regularizer R in the subproblem objective.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regularizer {
    /// R = 0: the step is an unconstrained move along the negative LMO
    /// direction.
    None,
    /// Indicator of the ball { x : ||x|| <= radius } in the named norm.
    /// Only the max-norm ball has a closed-form solver.
    ClipBall { norm: NormKind, radius: f64 },
}

impl Regularizer {
    pub fn validate(&self) -> Result<()> {
        match self {
            Regularizer::None => Ok(()),
            Regularizer::ClipBall { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    Err(Error::InvalidParam(format!(
                        "clip radius must be a positive finite number, got {radius}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Whether x lies in the regularizer's domain (within `FEAS_TOL`).
    pub fn is_feasible(&self, x: &ParamPoint) -> Result<bool> {
        match self {
            Regularizer::None => Ok(true),
            Regularizer::ClipBall { norm, radius } => {
                let g = NormGeometry::new(*norm, x.shape())?;
                Ok(g.primal_norm(x)? <= radius + FEAS_TOL)
            }
        }
    }
}

/// Immutable description of one trust-region subproblem family: the geometry
/// the radius is measured in, the regularizer, the radius eta, and the
/// center shift beta (the center is (1 - beta) x, so beta = 0 centers the
/// region at the current point and beta > 0 shrinks iterates toward the
/// origin).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrustRegionSpec {
    pub geometry: NormGeometry,
    pub regularizer: Regularizer,
    pub eta: f64,
    pub beta: f64,
}

impl TrustRegionSpec {
    pub fn new(
        geometry: NormGeometry,
        regularizer: Regularizer,
        eta: f64,
        beta: f64,
    ) -> Result<Self> {
        let spec = Self { geometry, regularizer, eta, beta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidParam(format!(
                "trust-region radius eta must be positive, got {}",
                self.eta
            )));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::InvalidParam(format!(
                "center shift beta must lie in [0, 1), got {}",
                self.beta
            )));
        }
        self.regularizer.validate()
    }

    /// Same subproblem with the center shift removed; used by checks that are
    /// stated for the unshifted step.
    pub fn without_shift(&self) -> Self {
        Self { beta: 0.0, ..*self }
    }

    fn supported(&self) -> Result<()> {
        match (self.regularizer, self.geometry.kind()) {
            (Regularizer::None, _) => Ok(()),
            (Regularizer::ClipBall { norm: NormKind::Infinity, .. }, NormKind::Infinity) => Ok(()),
            _ => Err(Error::NoClosedForm(
                "only R = 0 (any geometry) and max-norm clipping under the max-norm geometry \
                 have closed-form trust-region solvers",
            )),
        }
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Exact minimizer of `<m, z> + R(z)` over `||z - (1 - beta) x|| <= eta`.
///
/// With R = 0 the minimizer is `(1 - beta) x - eta * lmo(m)`. With max-norm
/// clipping under the max-norm geometry it is the coordinate-wise clip of
/// `(1 - beta) x_i - eta * sign(m_i)` to `[-radius, radius]`; coordinates
/// with `m_i = 0` keep their (shifted, clipped) value, which makes the step
/// deterministic and a fixed point at stationarity.
pub fn tr_step(
    spec: &TrustRegionSpec,
    x: &ParamPoint,
    m: &ParamPoint,
    cfg: &OrthConfig,
) -> Result<ParamPoint> {
    spec.validate()?;
    spec.supported()?;
    if !spec.regularizer.is_feasible(x)? {
        return Err(Error::Infeasible(format!(
            "current point violates the clip constraint: {:?}",
            spec.regularizer
        )));
    }
    match spec.regularizer {
        Regularizer::None => {
            let u = spec.geometry.lmo(m, cfg)?;
            axpby(1.0 - spec.beta, x, -spec.eta, &u)
        }
        Regularizer::ClipBall { radius, .. } => {
            let shrink = 1.0 - spec.beta;
            let data = x
                .data()
                .iter()
                .zip(m.data())
                .map(|(xi, mi)| {
                    let moved = shrink * xi - spec.eta * sign(*mi);
                    moved.clamp(-radius, radius)
                })
                .collect();
            ParamPoint::new(x.shape(), data)
        }
    }
}

/// Distance from first-order stationarity at x: the smallest dual norm of
/// `grad + v` over subgradients v of the regularizer at x. With R = 0 this is
/// just the dual norm of the gradient. On the max-norm clip ball the normal
/// cone is separable, so the minimum is the l1 sum of per-coordinate
/// contributions: the full |grad_i| on interior coordinates, and only the
/// non-cancellable part (gradient pointing outward) on boundary coordinates.
pub fn stationarity_residual(
    spec: &TrustRegionSpec,
    x: &ParamPoint,
    grad: &ParamPoint,
) -> Result<f64> {
    spec.validate()?;
    spec.supported()?;
    if !spec.regularizer.is_feasible(x)? {
        return Err(Error::Infeasible(
            "stationarity residual requested at an infeasible point".into(),
        ));
    }
    match spec.regularizer {
        Regularizer::None => spec.geometry.dual_norm(grad),
        Regularizer::ClipBall { radius, .. } => {
            let sum = x
                .data()
                .iter()
                .zip(grad.data())
                .map(|(xi, gi)| {
                    if *xi >= radius - BOUNDARY_TOL {
                        gi.max(0.0)
                    } else if *xi <= -radius + BOUNDARY_TOL {
                        (-gi).max(0.0)
                    } else {
                        gi.abs()
                    }
                })
                .sum();
            Ok(sum)
        }
    }
}

/// Result of [`prox_inequality_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProxCheck {
    pub holds: bool,
    /// Value of `R(x) + <m, x - x_plus> - R(x_plus) - eta * ||m + r||_*`
    /// where r is the reconstructed subgradient at `x_plus`. Nonnegative (up
    /// to 1e-8 of float slack) whenever `x_plus` is the exact minimizer.
    pub slack: f64,
}

/// Checks the variational inequality that characterizes the unshifted step
/// (the one with the trust region centered at x itself): for the exact
/// minimizer `x_plus` and some subgradient r of R at `x_plus`,
///
/// ```text
///   R(x) + <m, x - x_plus> - R(x_plus) >= eta * ||m + r||_*
/// ```
///
/// The subgradient is reconstructed from the step's active set: it is zero
/// except on clip-ball coordinates where the clamp strictly binds, where it
/// cancels `m_i` exactly. Callers must pass an `x_plus` produced by
/// [`tr_step`] with the shift removed (see [`TrustRegionSpec::without_shift`]);
/// any `beta` carried by the `spec` argument is ignored here.
pub fn prox_inequality_check(
    spec: &TrustRegionSpec,
    x: &ParamPoint,
    x_plus: &ParamPoint,
    m: &ParamPoint,
) -> Result<ProxCheck> {
    spec.validate()?;
    spec.supported()?;
    for (what, p) in [("x", x), ("x_plus", x_plus)] {
        if !spec.regularizer.is_feasible(p)? {
            return Err(Error::Infeasible(format!("{what} violates the clip constraint")));
        }
    }
    // Indicator regularizers vanish on their domain, so R(x) and R(x_plus)
    // drop out of the slack once feasibility is established.
    let moved = axpby(1.0, x, -1.0, x_plus)?;
    let gain = inner(m, &moved)?;
    let shifted = match spec.regularizer {
        Regularizer::None => m.clone(),
        Regularizer::ClipBall { radius, .. } => {
            let data = x
                .data()
                .iter()
                .zip(m.data())
                .map(|(xi, mi)| {
                    let unclipped = xi - spec.eta * sign(*mi);
                    if unclipped.abs() > radius {
                        0.0 // r_i = -m_i cancels the momentum coordinate
                    } else {
                        *mi
                    }
                })
                .collect();
            ParamPoint::new(x.shape(), data)?
        }
    };
    let slack = gain - spec.eta * spec.geometry.dual_norm(&shifted)?;
    Ok(ProxCheck { holds: slack >= -1e-8, slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::NormKind;
    use crate::point::Shape;

    fn spec(kind: NormKind, shape: Shape, reg: Regularizer, eta: f64, beta: f64) -> TrustRegionSpec {
        TrustRegionSpec::new(NormGeometry::new(kind, shape).unwrap(), reg, eta, beta).unwrap()
    }

    fn assert_close(got: &ParamPoint, want: &[f64], tol: f64) {
        for (g, w) in got.data().iter().zip(want) {
            assert!((g - w).abs() < tol, "got {:?}, want {:?}", got.data(), want);
        }
    }

    #[test]
    fn step_euclidean_no_regularizer() {
        let s = spec(NormKind::Euclidean, Shape::Vector(2), Regularizer::None, 0.5, 0.0);
        let x = ParamPoint::zeros(Shape::Vector(2));
        let m = ParamPoint::vector(vec![3.0, 4.0]).unwrap();
        let z = tr_step(&s, &x, &m, &OrthConfig::default()).unwrap();
        assert_close(&z, &[-0.3, -0.4], 1e-12);
    }

    #[test]
    fn step_spectral_positive_diagonal() {
        let s = spec(NormKind::Spectral, Shape::Matrix(2, 2), Regularizer::None, 1.0, 0.0);
        let x = ParamPoint::zeros(Shape::Matrix(2, 2));
        let m = ParamPoint::matrix(2, 2, vec![2.0, 0.0, 0.0, 3.0]).unwrap();
        let z = tr_step(&s, &x, &m, &OrthConfig::default()).unwrap();
        assert_close(&z, &[-1.0, 0.0, 0.0, -1.0], 1e-12);
    }

    #[test]
    fn step_clip_ball_clamps_each_coordinate() {
        let reg = Regularizer::ClipBall { norm: NormKind::Infinity, radius: 1.0 };
        let s = spec(NormKind::Infinity, Shape::Vector(2), reg, 0.3, 0.0);
        let x = ParamPoint::vector(vec![0.9, -0.5]).unwrap();
        let m = ParamPoint::vector(vec![1.0, -1.0]).unwrap();
        let z = tr_step(&s, &x, &m, &OrthConfig::default()).unwrap();
        assert_close(&z, &[0.6, -0.2], 1e-12);
    }

    #[test]
    fn step_with_center_shift() {
        let s = spec(NormKind::Euclidean, Shape::Vector(2), Regularizer::None, 0.5, 0.1);
        let x = ParamPoint::vector(vec![10.0, 0.0]).unwrap();
        let m = ParamPoint::vector(vec![1.0, 0.0]).unwrap();
        let z = tr_step(&s, &x, &m, &OrthConfig::default()).unwrap();
        assert_close(&z, &[8.5, 0.0], 1e-12);
    }

    #[test]
    fn step_stays_within_radius_of_shifted_center() {
        let reg = Regularizer::ClipBall { norm: NormKind::Infinity, radius: 1.0 };
        let s = spec(NormKind::Infinity, Shape::Vector(3), reg, 0.4, 0.05);
        let x = ParamPoint::vector(vec![0.99, -1.0, 0.2]).unwrap();
        let m = ParamPoint::vector(vec![-2.0, 5.0, 0.0]).unwrap();
        let z = tr_step(&s, &x, &m, &OrthConfig::default()).unwrap();
        let center = axpby(1.0 - s.beta, &x, 0.0, &x).unwrap();
        let dist = s.geometry.primal_norm(&axpby(1.0, &z, -1.0, &center).unwrap()).unwrap();
        assert!(dist <= s.eta + 1e-9, "dist = {dist}");
    }

    #[test]
    fn step_direction_ignores_momentum_scale() {
        let s = spec(NormKind::Infinity, Shape::Vector(3), Regularizer::None, 0.2, 0.0);
        let x = ParamPoint::vector(vec![1.0, -2.0, 0.5]).unwrap();
        let m = ParamPoint::vector(vec![0.3, -0.1, 0.0]).unwrap();
        let m_scaled = axpby(77.0, &m, 0.0, &m).unwrap();
        let cfg = OrthConfig::default();
        let a = tr_step(&s, &x, &m, &cfg).unwrap();
        let b = tr_step(&s, &x, &m_scaled, &cfg).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn step_rejects_unsupported_pairings() {
        let cfg = OrthConfig::default();
        let x = ParamPoint::zeros(Shape::Vector(2));
        let m = ParamPoint::vector(vec![1.0, 1.0]).unwrap();

        let reg = Regularizer::ClipBall { norm: NormKind::Infinity, radius: 1.0 };
        let s = spec(NormKind::Euclidean, Shape::Vector(2), reg, 0.1, 0.0);
        assert!(matches!(tr_step(&s, &x, &m, &cfg), Err(Error::NoClosedForm(_))));

        let reg = Regularizer::ClipBall { norm: NormKind::Euclidean, radius: 1.0 };
        let s = spec(NormKind::Infinity, Shape::Vector(2), reg, 0.1, 0.0);
        assert!(matches!(tr_step(&s, &x, &m, &cfg), Err(Error::NoClosedForm(_))));
    }

    #[test]
    fn step_rejects_infeasible_point() {
        let reg = Regularizer::ClipBall { norm: NormKind::Infinity, radius: 1.0 };
        let s = spec(NormKind::Infinity, Shape::Vector(2), reg, 0.1, 0.0);
        let x = ParamPoint::vector(vec![1.5, 0.0]).unwrap();
        let m = ParamPoint::vector(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            tr_step(&s, &x, &m, &OrthConfig::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn residual_without_regularizer_is_dual_norm() {
        let s = spec(NormKind::Euclidean, Shape::Vector(2), Regularizer::None, 0.1, 0.0);
        let x = ParamPoint::zeros(Shape::Vector(2));
        let g = ParamPoint::vector(vec![3.0, 4.0]).unwrap();
        assert_eq!(stationarity_residual(&s, &x, &g).unwrap(), 5.0);
    }

    #[test]
    fn residual_on_clip_boundary_cancels_inward_gradient() {
        let reg = Regularizer::ClipBall { norm: NormKind::Infinity, radius: 1.0 };
        let s = spec(NormKind::Infinity, Shape::Vector(2), reg, 0.1, 0.0);
        let x = ParamPoint::vector(vec![1.0, 0.0]).unwrap();

        let g = ParamPoint::vector(vec![-2.0, 0.5]).unwrap();
        let r = stationarity_residual(&s, &x, &g).unwrap();
        assert!((r - 0.5).abs() < 1e-12, "r = {r}");

        let g = ParamPoint::vector(vec![2.0, 0.0]).unwrap();
        let r = stationarity_residual(&s, &x, &g).unwrap();
        assert!((r - 2.0).abs() < 1e-12, "r = {r}");
    }

    #[test]
    fn residual_at_lower_face_mirrors_upper_face() {
        let reg = Regularizer::ClipBall { norm: NormKind::Infinity, radius: 2.0 };
        let s = spec(NormKind::Infinity, Shape::Vector(1), reg, 0.1, 0.0);
        let x = ParamPoint::vector(vec![-2.0]).unwrap();
        let g = ParamPoint::vector(vec![1.5]).unwrap();
        assert_eq!(stationarity_residual(&s, &x, &g).unwrap(), 0.0);
        let g = ParamPoint::vector(vec![-1.5]).unwrap();
        assert_eq!(stationarity_residual(&s, &x, &g).unwrap(), 1.5);
    }

    #[test]
    fn prox_slack_is_zero_without_regularizer() {
        let s = spec(NormKind::Euclidean, Shape::Vector(2), Regularizer::None, 0.5, 0.0);
        let x = ParamPoint::vector(vec![2.0, -1.0]).unwrap();
        let m = ParamPoint::vector(vec![3.0, 4.0]).unwrap();
        let x_plus = tr_step(&s, &x, &m, &OrthConfig::default()).unwrap();
        let check = prox_inequality_check(&s, &x, &x_plus, &m).unwrap();
        assert!(check.holds);
        assert!(check.slack.abs() < 1e-12, "slack = {}", check.slack);
    }

    #[test]
    fn prox_slack_is_zero_with_inactive_clip() {
        let reg = Regularizer::ClipBall { norm: NormKind::Infinity, radius: 1.0 };
        let s = spec(NormKind::Infinity, Shape::Vector(2), reg, 0.3, 0.0);
        let x = ParamPoint::vector(vec![0.1, -0.2]).unwrap();
        let m = ParamPoint::vector(vec![1.0, -1.0]).unwrap();
        let x_plus = tr_step(&s, &x, &m, &OrthConfig::default()).unwrap();
        let check = prox_inequality_check(&s, &x, &x_plus, &m).unwrap();
        assert!(check.holds);
        assert!(check.slack.abs() < 1e-12, "slack = {}", check.slack);
    }

    #[test]
    fn prox_holds_with_active_clip() {
        let reg = Regularizer::ClipBall { norm: NormKind::Infinity, radius: 1.0 };
        let s = spec(NormKind::Infinity, Shape::Vector(2), reg, 0.3, 0.0);
        let x = ParamPoint::vector(vec![-0.9, 0.0]).unwrap();
        let m = ParamPoint::vector(vec![1.0, 0.0]).unwrap();
        let x_plus = tr_step(&s, &x, &m, &OrthConfig::default()).unwrap();
        assert_close(&x_plus, &[-1.0, 0.0], 1e-12);
        let check = prox_inequality_check(&s, &x, &x_plus, &m).unwrap();
        assert!(check.holds);
        assert!((check.slack - 0.1).abs() < 1e-12, "slack = {}", check.slack);
    }

    #[test]
    fn spec_validation_rejects_bad_parameters() {
        let g = NormGeometry::new(NormKind::Euclidean, Shape::Vector(2)).unwrap();
        assert!(TrustRegionSpec::new(g, Regularizer::None, 0.0, 0.0).is_err());
        assert!(TrustRegionSpec::new(g, Regularizer::None, 0.1, 1.0).is_err());
        assert!(TrustRegionSpec::new(g, Regularizer::None, 0.1, -0.1).is_err());
        let bad = Regularizer::ClipBall { norm: NormKind::Infinity, radius: 0.0 };
        assert!(TrustRegionSpec::new(g, bad, 0.1, 0.0).is_err());
    }
}
