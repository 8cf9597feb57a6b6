//! Norm triples (primal norm, dual norm, linear maximization oracle) for the
//! three supported geometries, the norm-equivalence constant rho, and matrix
//! orthogonalization by exact SVD or Newton-Schulz iteration.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{euclid_norm, ParamPoint, Shape};

/// Which norm the trust region is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Self-dual l2 norm (Frobenius for matrices); LMO is plain normalization.
    Euclidean,
    /// Max-abs norm with l1 dual; LMO is the coordinate-wise sign map.
    Infinity,
    /// Largest singular value with nuclear dual; LMO is orthogonalization.
    /// Matrix shapes only.
    Spectral,
}

/// A norm geometry bound to a concrete shape, with its norm-equivalence
/// constant rho precomputed (the smallest c with dual_norm(x) <= c * l2(x)).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormGeometry {
    kind: NormKind,
    shape: Shape,
    rho: f64,
}

impl NormGeometry {
    pub fn new(kind: NormKind, shape: Shape) -> Result<Self> {
        let rho = rho_constant(kind, shape)?;
        Ok(Self { kind, shape, rho })
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn check_shape(&self, x: &ParamPoint) -> Result<()> {
        if x.shape() != self.shape {
            return Err(Error::ShapeMismatch(self.shape, x.shape()));
        }
        Ok(())
    }

    /// Norm the trust-region radius is measured in.
    pub fn primal_norm(&self, x: &ParamPoint) -> Result<f64> {
        self.check_shape(x)?;
        Ok(match self.kind {
            NormKind::Euclidean => euclid_norm(x),
            NormKind::Infinity => x.data().iter().fold(0.0, |acc, v| acc.max(v.abs())),
            NormKind::Spectral => singular_values(x).first().copied().unwrap_or(0.0),
        })
    }

    /// Dual norm sup_{|u| <= 1} <x, u>: l2 -> l2, max-abs -> l1,
    /// spectral -> nuclear.
    pub fn dual_norm(&self, x: &ParamPoint) -> Result<f64> {
        self.check_shape(x)?;
        Ok(match self.kind {
            NormKind::Euclidean => euclid_norm(x),
            NormKind::Infinity => x.data().iter().map(|v| v.abs()).sum(),
            NormKind::Spectral => singular_values(x).iter().sum(),
        })
    }

    /// Linear maximization oracle: the point u with primal_norm(u) <= 1 and
    /// <m, u> = dual_norm(m). The zero input returns the zero point in every
    /// geometry (documented degenerate case, not an error). For coordinates
    /// with m_i = 0 the Infinity oracle uses the tie rule sign(0) = 0, which
    /// keeps the step unbiased on dead coordinates.
    pub fn lmo(&self, m: &ParamPoint, cfg: &OrthConfig) -> Result<ParamPoint> {
        self.check_shape(m)?;
        match self.kind {
            NormKind::Euclidean => {
                let n = euclid_norm(m);
                if n == 0.0 {
                    return Ok(ParamPoint::zeros(m.shape()));
                }
                let data = m.data().iter().map(|v| v / n).collect();
                ParamPoint::new(m.shape(), data)
            }
            NormKind::Infinity => {
                let data = m
                    .data()
                    .iter()
                    .map(|v| {
                        if *v > 0.0 {
                            1.0
                        } else if *v < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                ParamPoint::new(m.shape(), data)
            }
            NormKind::Spectral => orth(m, cfg),
        }
    }
}

/// Norm-equivalence constant: Euclidean 1, Infinity sqrt(d) (l1 vs l2,
/// tight at the all-ones vector), Spectral sqrt(min(m, n)) (nuclear vs
/// Frobenius, tight at any partial isometry of full rank).
pub fn rho_constant(kind: NormKind, shape: Shape) -> Result<f64> {
    match (kind, shape) {
        (NormKind::Euclidean, _) => Ok(1.0),
        (NormKind::Infinity, s) => Ok((s.len() as f64).sqrt()),
        (NormKind::Spectral, Shape::Matrix(m, n)) => Ok((m.min(n) as f64).sqrt()),
        (NormKind::Spectral, s) => Err(Error::UnsupportedShape {
            what: "spectral geometry",
            shape: s,
        }),
    }
}

/// Singular values of a point viewed as a matrix, descending.
pub fn singular_values(x: &ParamPoint) -> Vec<f64> {
    let mat = x.to_dmatrix();
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Coefficients of the quintic update x -> a*x + b*x^3 + c*x^5 applied to
/// every singular value of the Frobenius-normalized input.
///
/// The contractive triple satisfies a+b+c = 1 and a+3b+5c = 0 (fixed point at
/// 1 with zero derivative, so convergence near 1 is quadratic) and keeps the
/// iterates inside the basin (peak overshoot 1.0607, next fixed point at
/// sqrt(1.5)). It is the default because it actually converges to the exact
/// orthogonal factor.
pub const NS_COEFFS_CONTRACTIVE: (f64, f64, f64) = (2.5, -2.5, 1.0);

/// The speed-tuned triple popularized by practical Muon kernels. It does NOT
/// converge: singular values settle into an oscillation roughly inside
/// [0.7, 1.1], which is good enough for an optimizer direction but never
/// approaches the exact factor. Kept as an opt-in preset.
pub const NS_COEFFS_JORDAN: (f64, f64, f64) = (3.4445, -4.7750, 2.0315);

/// How `orth` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthMethod {
    /// Thin SVD with a rank cutoff; the correctness reference.
    ExactSvd,
    /// Quintic Newton-Schulz iteration on the Frobenius-normalized input.
    NewtonSchulz,
}

/// Configuration for the orthogonalization kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthConfig {
    pub method: OrthMethod,
    /// Newton-Schulz iteration count.
    pub ns_steps: usize,
    /// Singular values below rank_tol * sigma_max are treated as zero when
    /// forming the pseudoinverse square root.
    pub rank_tol: f64,
    /// Quintic coefficients (a, b, c) for the Newton-Schulz update.
    pub ns_coeffs: (f64, f64, f64),
}

impl Default for OrthConfig {
    fn default() -> Self {
        Self {
            method: OrthMethod::ExactSvd,
            ns_steps: 5,
            rank_tol: 1e-10,
            ns_coeffs: NS_COEFFS_CONTRACTIVE,
        }
    }
}

impl OrthConfig {
    pub fn newton_schulz(steps: usize) -> Self {
        Self { method: OrthMethod::NewtonSchulz, ns_steps: steps, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns_steps < 1 {
            return Err(Error::InvalidParam("ns_steps must be >= 1".into()));
        }
        if !(self.rank_tol > 0.0 && self.rank_tol < 1.0) {
            return Err(Error::InvalidParam("rank_tol must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Orthogonal factor (G G^T)^{+/2} G: replaces every nonzero singular value
/// of G by 1 while keeping the singular subspaces. The zero matrix maps to
/// the zero matrix.
pub fn orth(g: &ParamPoint, cfg: &OrthConfig) -> Result<ParamPoint> {
    let Shape::Matrix(..) = g.shape() else {
        return Err(Error::UnsupportedShape { what: "orth", shape: g.shape() });
    };
    cfg.validate()?;
    let mat = g.to_dmatrix();
    let out = match cfg.method {
        OrthMethod::ExactSvd => orth_exact_svd(&mat, cfg.rank_tol),
        OrthMethod::NewtonSchulz => newton_schulz(&mat, cfg.ns_steps, cfg.ns_coeffs),
    };
    ParamPoint::from_dmatrix(&out)
}

fn orth_exact_svd(mat: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let svd = mat.clone().svd(true, true);
    let u = svd.u.expect("svd with u requested");
    let v_t = svd.v_t.expect("svd with v_t requested");
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |a, b| a.max(*b));
    if sigma_max == 0.0 {
        return DMatrix::zeros(mat.nrows(), mat.ncols());
    }
    let cutoff = rank_tol * sigma_max;
    // U * diag(1 if sigma > cutoff else 0) * V^T
    let mut scaled = u;
    for (j, s) in svd.singular_values.iter().enumerate() {
        let f = if *s > cutoff { 1.0 } else { 0.0 };
        scaled.column_mut(j).scale_mut(f);
    }
    scaled * v_t
}

/// Quintic Newton-Schulz iteration X -> a*X + (b*A + c*A^2)X with A = X X^T,
/// started from the Frobenius-normalized input so every singular value lies
/// in (0, 1]. Tall inputs are transposed first so A stays as small as
/// possible, then transposed back.
fn newton_schulz(mat: &DMatrix<f64>, steps: usize, coeffs: (f64, f64, f64)) -> DMatrix<f64> {
    let fro = mat.norm();
    if fro == 0.0 {
        return DMatrix::zeros(mat.nrows(), mat.ncols());
    }
    let tall = mat.nrows() > mat.ncols();
    let mut x = if tall { mat.transpose() / fro } else { mat / fro };
    let (a, b, c) = coeffs;
    for _ in 0..steps {
        let xxt = &x * x.transpose();
        let b_mat = &xxt * b + (&xxt * &xxt) * c;
        x = &x * a + b_mat * &x;
    }
    if tall {
        x.transpose()
    } else {
        x
    }
}
