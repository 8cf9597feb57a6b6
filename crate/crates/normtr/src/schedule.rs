//! Parameter presets that map a target accuracy and problem constants to
//! concrete (eta, alpha, beta, K) values for each optimizer variant.
//!
//! Every preset follows the same conventions:
//!
//! - all hidden proportionality constants are set to 1;
//! - budgets quoted up to log factors are multiplied by
//!   `ceil(ln(1/eps) + 1)` (at least 1);
//! - a zero noise level or zero curvature-variation constant is allowed and
//!   handled through IEEE semantics: the affected min-terms become infinite
//!   (and drop out) and the affected budget terms become zero.
//!
//! The resulting values are harness defaults for bound checking, not tuned
//! settings; they err on the conservative side by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named parameter presets. Each certifies one convergence guarantee of the
/// method family:
///
/// - `C1`/`C2`: small best-iterate stationarity residual for the plain and
///   momentum variants (no decay, no clipping);
/// - `C4`/`C5`: small final-iterate suboptimality for the decay variants on
///   star-convex objectives, with `eta = beta * dist` enforced;
/// - `C6`/`C7`: the extrapolation variant, residual and suboptimality
///   targets respectively;
/// - `C8`/`C9`: suboptimality targets under max-norm clipping with a bounded
///   domain of size `dist`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulePreset {
    C1,
    C2,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
}

/// Problem constants a preset may draw on. Only the subset required by the
/// chosen preset must be present; a missing required field is an error, so a
/// preset never silently falls back to a default constant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleInputs {
    /// Target accuracy (residual or suboptimality, depending on the preset).
    pub eps: Option<f64>,
    /// Gradient smoothness constant of the objective in the chosen geometry.
    pub l: Option<f64>,
    /// Curvature-variation constant (Lipschitz constant of the Hessian);
    /// zero for quadratics.
    pub h: Option<f64>,
    /// Gradient-noise scale; zero for deterministic runs.
    pub sigma: Option<f64>,
    /// Norm-equivalence constant of the geometry (dual norm vs l2).
    pub rho: Option<f64>,
    /// Initial objective gap F(x0) - inf F (upper bounds are fine).
    pub delta0: Option<f64>,
    /// Distance scale: the primal norm of the solution, assumed to dominate
    /// the primal norm of the start point.
    pub dist: Option<f64>,
}

/// Concrete parameters produced by a preset. Variants that ignore a field
/// receive its neutral value (`alpha = 1`, `beta = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub k: u64,
}

fn require(field: Option<f64>, name: &'static str, allow_zero: bool) -> Result<f64> {
    let v = field.ok_or(Error::MissingConstant(name))?;
    if !v.is_finite() || v < 0.0 || (!allow_zero && v == 0.0) {
        return Err(Error::InvalidParam(format!(
            "schedule input {name} must be {} and finite, got {v}",
            if allow_zero { "nonnegative" } else { "positive" }
        )));
    }
    Ok(v)
}

/// Log factor applied to budgets quoted up to logarithmic terms.
fn log_factor(eps: f64) -> f64 {
    ((1.0 / eps).ln() + 1.0).ceil().max(1.0)
}

fn to_budget(terms: &[f64], log_fac: f64) -> Result<u64> {
    let raw = terms.iter().fold(0.0f64, |a, b| a.max(*b));
    let k = (log_fac * raw.ceil()).max(1.0);
    if !k.is_finite() || k > 1e15 {
        return Err(Error::InvalidParam(format!(
            "iteration budget {k:.3e} is not usable; loosen eps or shrink the constants"
        )));
    }
    Ok(k as u64)
}

/// Evaluates the chosen preset on the given constants.
pub fn schedule(preset: SchedulePreset, inputs: &ScheduleInputs) -> Result<Schedule> {
    use SchedulePreset::*;
    let eps = require(inputs.eps, "eps", false)?;
    let l = require(inputs.l, "l", false)?;
    match preset {
        C1 => {
            let delta0 = require(inputs.delta0, "delta0", false)?;
            Ok(Schedule {
                eta: eps / l,
                alpha: 1.0,
                beta: 0.0,
                k: to_budget(&[l * delta0 / eps.powi(2)], 1.0)?,
            })
        }
        C2 => {
            let sigma = require(inputs.sigma, "sigma", true)?;
            let rho = require(inputs.rho, "rho", false)?;
            let delta0 = require(inputs.delta0, "delta0", false)?;
            let ns = rho * sigma;
            Ok(Schedule {
                eta: (eps / l).min(eps.powi(3) / (ns.powi(2) * l)),
                alpha: 1.0f64.min(eps.powi(2) / ns.powi(2)),
                beta: 0.0,
                k: to_budget(
                    &[
                        ns / eps,
                        ns.powi(3) / eps.powi(3),
                        l * delta0 / eps.powi(2),
                        l * delta0 * ns.powi(2) / eps.powi(4),
                    ],
                    1.0,
                )?,
            })
        }
        C4 => {
            let d = require(inputs.dist, "dist", false)?;
            let beta = 1.0f64.min(eps / (l * d.powi(2)));
            Ok(Schedule {
                eta: beta * d,
                alpha: 1.0,
                beta,
                k: to_budget(&[1.0, l * d.powi(2) / eps], log_factor(eps))?,
            })
        }
        C5 => {
            let sigma = require(inputs.sigma, "sigma", true)?;
            let rho = require(inputs.rho, "rho", false)?;
            let d = require(inputs.dist, "dist", false)?;
            let ns = rho * sigma;
            let beta = [
                1.0,
                eps / (l * d.powi(2)),
                eps / (d * ns),
                eps.powi(3) / (d * ns).powi(3),
                eps.powi(3) / (l * d.powi(3) * ns.powi(2)),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            Ok(Schedule {
                eta: beta * d,
                alpha: 1.0f64.min(eps.powi(2) / (d * ns).powi(2)),
                beta,
                k: to_budget(
                    &[
                        1.0,
                        l * d.powi(2) / eps,
                        d * ns / eps,
                        (d * ns).powi(3) / eps.powi(3),
                        l * d.powi(3) * ns.powi(2) / eps.powi(3),
                    ],
                    log_factor(eps),
                )?,
            })
        }
        C6 => {
            let h = require(inputs.h, "h", true)?;
            let sigma = require(inputs.sigma, "sigma", true)?;
            let rho = require(inputs.rho, "rho", false)?;
            let delta0 = require(inputs.delta0, "delta0", false)?;
            let ns = rho * sigma;
            let eta = [
                eps / l,
                (eps / h).sqrt(),
                eps.powf(2.5) / (ns.powi(2) * h.sqrt()),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            Ok(Schedule {
                eta,
                alpha: 1.0f64.min(eps.powi(2) / ns.powi(2)),
                beta: 0.0,
                k: to_budget(
                    &[
                        ns / eps,
                        ns.powi(3) / eps.powi(3),
                        l * delta0 / eps.powi(2),
                        h.sqrt() * delta0 / eps.powf(1.5),
                        h.sqrt() * delta0 * ns.powi(2) / eps.powf(3.5),
                    ],
                    log_factor(eps),
                )?,
            })
        }
        C7 => {
            let h = require(inputs.h, "h", true)?;
            let sigma = require(inputs.sigma, "sigma", true)?;
            let rho = require(inputs.rho, "rho", false)?;
            let d = require(inputs.dist, "dist", false)?;
            let ns = rho * sigma;
            let alpha = 1.0f64.min(eps.powi(2) / (d * ns).powi(2));
            let beta = [
                1.0,
                eps / (l * d.powi(2)),
                alpha * eps / (d * ns),
                alpha * eps.sqrt() / (h.sqrt() * d.powf(1.5)),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            Ok(Schedule {
                eta: beta * d,
                alpha,
                beta,
                k: to_budget(
                    &[
                        1.0,
                        d * ns / eps,
                        (d * ns).powi(3) / eps.powi(3),
                        l * d.powi(2) / eps,
                        h.sqrt() * d.powf(1.5) / eps.sqrt(),
                        h.sqrt() * d.powf(3.5) * ns.powi(2) / eps.powf(2.5),
                    ],
                    log_factor(eps),
                )?,
            })
        }
        C8 => {
            let d = require(inputs.dist, "dist", false)?;
            Ok(Schedule {
                eta: eps / (l * d),
                alpha: 1.0,
                beta: 0.0,
                k: to_budget(&[1.0, l * d.powi(2) / eps], log_factor(eps))?,
            })
        }
        C9 => {
            let sigma = require(inputs.sigma, "sigma", true)?;
            let rho = require(inputs.rho, "rho", false)?;
            let d = require(inputs.dist, "dist", false)?;
            let ns = rho * sigma;
            let eta = [
                eps / (l * d),
                eps / ns,
                eps.powi(3) / (d.powi(2) * ns.powi(3)),
                eps.powi(3) / (l * d.powi(3) * ns.powi(2)),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            Ok(Schedule {
                eta,
                alpha: 1.0f64.min(eps.powi(2) / (d * ns).powi(2)),
                beta: 0.0,
                k: to_budget(
                    &[
                        1.0,
                        l * d.powi(2) / eps,
                        d * ns / eps,
                        (d * ns).powi(3) / eps.powi(3),
                        l * d.powi(4) * ns.powi(2) / eps.powi(3),
                    ],
                    log_factor(eps),
                )?,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs() -> ScheduleInputs {
        ScheduleInputs::default()
    }

    #[test]
    fn c1_hand_values() {
        let s = schedule(
            SchedulePreset::C1,
            &ScheduleInputs { eps: Some(0.1), l: Some(1.0), delta0: Some(10.0), ..inputs() },
        )
        .unwrap();
        assert!((s.eta - 0.1).abs() < 1e-15);
        assert_eq!(s.k, 1000);
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.beta, 0.0);
    }

    #[test]
    fn c2_all_unity() {
        let s = schedule(
            SchedulePreset::C2,
            &ScheduleInputs {
                eps: Some(1.0),
                l: Some(1.0),
                sigma: Some(1.0),
                rho: Some(1.0),
                delta0: Some(1.0),
                ..inputs()
            },
        )
        .unwrap();
        assert_eq!(s.eta, 1.0);
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.k, 1);
    }

    #[test]
    fn c2_with_zero_noise_degenerates_to_c1_values() {
        let s = schedule(
            SchedulePreset::C2,
            &ScheduleInputs {
                eps: Some(0.1),
                l: Some(1.0),
                sigma: Some(0.0),
                rho: Some(1.0),
                delta0: Some(10.0),
                ..inputs()
            },
        )
        .unwrap();
        assert!((s.eta - 0.1).abs() < 1e-15);
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.k, 1000);
    }

    #[test]
    fn c4_hand_values() {
        let s = schedule(
            SchedulePreset::C4,
            &ScheduleInputs { eps: Some(0.1), l: Some(1.0), dist: Some(2.0), ..inputs() },
        )
        .unwrap();
        assert!((s.beta - 0.025).abs() < 1e-15);
        assert!((s.eta - 0.05).abs() < 1e-15);
        // budget 40, log factor ceil(ln 10 + 1) = 4
        assert_eq!(s.k, 160);
    }

    #[test]
    fn c5_couples_eta_to_beta() {
        let s = schedule(
            SchedulePreset::C5,
            &ScheduleInputs {
                eps: Some(0.2),
                l: Some(1.0),
                sigma: Some(0.5),
                rho: Some(1.0),
                dist: Some(1.0),
                ..inputs()
            },
        )
        .unwrap();
        assert!((s.eta - s.beta * 1.0).abs() < 1e-15);
        assert!(s.alpha > 0.0 && s.alpha <= 1.0);
        assert!(s.beta > 0.0 && s.beta < 1.0);
        assert!(s.k >= 1);
    }

    #[test]
    fn c6_with_zero_h_and_zero_noise() {
        let s = schedule(
            SchedulePreset::C6,
            &ScheduleInputs {
                eps: Some(0.1),
                l: Some(2.0),
                h: Some(0.0),
                sigma: Some(0.0),
                rho: Some(1.0),
                delta0: Some(1.0),
                ..inputs()
            },
        )
        .unwrap();
        assert!((s.eta - 0.05).abs() < 1e-15);
        assert_eq!(s.alpha, 1.0);
        // budget ceil(2 / 0.01) = 200, log factor 4
        assert_eq!(s.k, 800);
    }

    #[test]
    fn c8_hand_values() {
        let s = schedule(
            SchedulePreset::C8,
            &ScheduleInputs { eps: Some(0.1), l: Some(1.0), dist: Some(2.0), ..inputs() },
        )
        .unwrap();
        assert!((s.eta - 0.05).abs() < 1e-15);
        assert_eq!(s.k, 160);
    }

    #[test]
    fn c9_hand_values() {
        let s = schedule(
            SchedulePreset::C9,
            &ScheduleInputs {
                eps: Some(0.5),
                l: Some(1.0),
                sigma: Some(0.5),
                rho: Some(2.0),
                dist: Some(2.0),
                ..inputs()
            },
        )
        .unwrap();
        assert!((s.alpha - 0.0625).abs() < 1e-15);
        assert!((s.eta - 0.015625).abs() < 1e-15);
        assert_eq!(s.k, 256);
    }

    #[test]
    fn missing_required_inputs_error() {
        let err = schedule(
            SchedulePreset::C2,
            &ScheduleInputs { eps: Some(0.1), l: Some(1.0), delta0: Some(1.0), ..inputs() },
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingConstant("sigma")));

        let err = schedule(SchedulePreset::C1, &inputs()).unwrap_err();
        assert!(matches!(err, Error::MissingConstant("eps")));
    }

    #[test]
    fn nonpositive_inputs_error() {
        assert!(schedule(
            SchedulePreset::C1,
            &ScheduleInputs { eps: Some(0.0), l: Some(1.0), delta0: Some(1.0), ..inputs() },
        )
        .is_err());
        assert!(schedule(
            SchedulePreset::C4,
            &ScheduleInputs { eps: Some(0.1), l: Some(1.0), dist: Some(-2.0), ..inputs() },
        )
        .is_err());
    }

    #[test]
    fn log_factor_never_below_one() {
        assert_eq!(log_factor(100.0), 1.0);
        assert_eq!(log_factor(1.0), 1.0);
        assert_eq!(log_factor(0.1), 4.0);
    }
}
