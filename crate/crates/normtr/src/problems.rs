//! Synthetic objectives with exact gradients, known constants, and seeded
//! stochastic gradient oracles.
//!
//! Two families are provided: random positive-definite quadratics on vectors
//! (star-convex, zero curvature variation, known optimum) and a matrix-layer
//! objective `F(X) = mean_i loss_i(X a_i)` with either a quadratic or a
//! logistic per-sample loss, whose smoothness constants have closed forms in
//! the spectral and Frobenius geometries.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NormGeometry, NormKind};
use crate::point::{axpby, euclid_norm, ParamPoint, Shape};

/// Gradient Lipschitz constant of the scalar logistic loss.
pub const LOGISTIC_GRAD_LIPSCHITZ: f64 = 0.25;

/// Hessian Lipschitz constant of the scalar logistic loss: the maximum of
/// |d^3/dz^3 softplus(z)| = |s(1-s)(1-2s)| over s in (0,1) is attained at
/// s = 1/2 +- 1/(2 sqrt 3) with value 1/(6 sqrt 3).
pub const LOGISTIC_HESS_LIPSCHITZ: f64 = 0.09622504486493764; // 1 / (6 sqrt 3)

/// Vector quadratic `f(x) = (x - x*)^T A (x - x*) / 2` with a controlled
/// eigenvalue range.
#[derive(Clone, Debug)]
pub struct QuadraticProblem {
    a: DMatrix<f64>,
    x_star: ParamPoint,
    lambda_max: f64,
}

impl QuadraticProblem {
    /// Builds the problem from an explicit symmetric matrix and optimum;
    /// used by tests that need hand-checkable instances.
    pub fn from_parts(a: DMatrix<f64>, x_star: ParamPoint) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() != x_star.len() {
            return Err(Error::InvalidParam(format!(
                "quadratic matrix is {}x{} but the optimum has {} coordinates",
                a.nrows(),
                a.ncols(),
                x_star.len()
            )));
        }
        let lambda_max = a.clone().symmetric_eigen().eigenvalues.iter().fold(0.0f64, |m, v| m.max(*v));
        Ok(Self { a, x_star, lambda_max })
    }

    fn displacement(&self, x: &ParamPoint) -> DVector<f64> {
        DVector::from_column_slice(x.data()) - DVector::from_column_slice(self.x_star.data())
    }
}

/// Per-sample loss applied to `X a_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `loss(y) = ||y - target||^2 / 2`; optimum and optimal value have
    /// closed forms via the normal equations.
    Quadratic,
    /// `loss(y) = sum_j softplus(-target_j * y_j)` with targets in {-1, +1};
    /// bounded below by zero, no closed-form optimum.
    Logistic,
}

/// `F(X) = (1/N) sum_i loss_i(X a_i)` over m-by-n matrices X.
#[derive(Clone, Debug)]
pub struct MatrixLayerProblem {
    rows: usize,
    cols: usize,
    features: Vec<DVector<f64>>,
    targets: Vec<DVector<f64>>,
    loss: LossKind,
    x_star: Option<ParamPoint>,
    f_star: Option<f64>,
}

impl MatrixLayerProblem {
    /// Builds the problem from explicit features and targets. Quadratic-loss
    /// instances get their optimum from the normal equations; logistic
    /// instances have no closed-form optimum.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        features: Vec<DVector<f64>>,
        targets: Vec<DVector<f64>>,
        loss: LossKind,
    ) -> Result<Self> {
        if features.is_empty() || features.len() != targets.len() {
            return Err(Error::InvalidParam(
                "need equal, nonzero numbers of features and targets".into(),
            ));
        }
        for a in &features {
            if a.len() != cols {
                return Err(Error::InvalidParam("feature length must equal cols".into()));
            }
        }
        for t in &targets {
            if t.len() != rows {
                return Err(Error::InvalidParam("target length must equal rows".into()));
            }
        }
        let mut p = Self { rows, cols, features, targets, loss, x_star: None, f_star: None };
        if loss == LossKind::Quadratic {
            p.solve_normal_equations()?;
        }
        Ok(p)
    }

    fn solve_normal_equations(&mut self) -> Result<()> {
        let n = self.features.len() as f64;
        let mut gram = DMatrix::zeros(self.cols, self.cols);
        let mut cross = DMatrix::zeros(self.rows, self.cols);
        for (a, b) in self.features.iter().zip(&self.targets) {
            gram += a * a.transpose() / n;
            cross += b * a.transpose() / n;
        }
        let inv = gram
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::InvalidParam(format!("feature Gram matrix is degenerate: {e}")))?;
        let x = cross * inv;
        let x_star = ParamPoint::from_dmatrix(&x)?;
        self.f_star = Some(layer_value(self, &x_star)?);
        self.x_star = Some(x_star);
        Ok(())
    }

    /// Mean squared feature norm; multiplied by the loss curvature this is
    /// the gradient smoothness constant in both the spectral and Frobenius
    /// geometries.
    pub fn mean_sq_feature_norm(&self) -> f64 {
        let n = self.features.len() as f64;
        self.features.iter().map(|a| a.norm_squared()).sum::<f64>() / n
    }

    /// Mean cubed feature norm; enters the curvature-variation constant.
    pub fn mean_cubed_feature_norm(&self) -> f64 {
        let n = self.features.len() as f64;
        self.features.iter().map(|a| a.norm().powi(3)).sum::<f64>() / n
    }

    fn grad_lipschitz(&self) -> f64 {
        match self.loss {
            LossKind::Quadratic => 1.0,
            LossKind::Logistic => LOGISTIC_GRAD_LIPSCHITZ,
        }
    }

    fn hess_lipschitz(&self) -> f64 {
        match self.loss {
            LossKind::Quadratic => 0.0,
            LossKind::Logistic => LOGISTIC_HESS_LIPSCHITZ,
        }
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn layer_value(p: &MatrixLayerProblem, x: &ParamPoint) -> Result<f64> {
    let xm = x.to_dmatrix();
    let n = p.features.len() as f64;
    let mut total = 0.0;
    for (a, t) in p.features.iter().zip(&p.targets) {
        let y = &xm * a;
        total += match p.loss {
            LossKind::Quadratic => (y - t).norm_squared() / 2.0,
            LossKind::Logistic => y.iter().zip(t.iter()).map(|(yj, tj)| softplus(-tj * yj)).sum(),
        };
    }
    Ok(total / n)
}

fn layer_grad(p: &MatrixLayerProblem, x: &ParamPoint) -> Result<ParamPoint> {
    let xm = x.to_dmatrix();
    let n = p.features.len() as f64;
    let mut g = DMatrix::zeros(p.rows, p.cols);
    for (a, t) in p.features.iter().zip(&p.targets) {
        let y = &xm * a;
        let gy = match p.loss {
            LossKind::Quadratic => y - t,
            LossKind::Logistic => DVector::from_iterator(
                p.rows,
                y.iter().zip(t.iter()).map(|(yj, tj)| -tj * sigmoid(-tj * yj)),
            ),
        };
        g += gy * a.transpose() / n;
    }
    ParamPoint::from_dmatrix(&g)
}

/// A synthetic objective the harness can run against.
#[derive(Clone, Debug)]
pub enum Problem {
    Quadratic(QuadraticProblem),
    MatrixLayer(MatrixLayerProblem),
}

impl Problem {
    pub fn shape(&self) -> Shape {
        match self {
            Problem::Quadratic(q) => q.x_star.shape(),
            Problem::MatrixLayer(p) => Shape::Matrix(p.rows, p.cols),
        }
    }

    pub fn value(&self, x: &ParamPoint) -> Result<f64> {
        self.check_shape(x)?;
        match self {
            Problem::Quadratic(q) => {
                let d = q.displacement(x);
                Ok(0.5 * (&q.a * &d).dot(&d))
            }
            Problem::MatrixLayer(p) => layer_value(p, x),
        }
    }

    pub fn grad(&self, x: &ParamPoint) -> Result<ParamPoint> {
        self.check_shape(x)?;
        match self {
            Problem::Quadratic(q) => {
                let g = &q.a * q.displacement(x);
                ParamPoint::new(x.shape(), g.iter().copied().collect())
            }
            Problem::MatrixLayer(p) => layer_grad(p, x),
        }
    }

    /// Gradient smoothness constant in the given geometry, when known
    /// analytically (upper bounds in the sound direction).
    pub fn grad_smoothness(&self, kind: NormKind) -> Option<f64> {
        match self {
            Problem::Quadratic(q) => match kind {
                NormKind::Euclidean => Some(q.lambda_max),
                // l1 dual of l-inf: ||A v||_1 <= (sum_ij |A_ij|) ||v||_inf.
                NormKind::Infinity => Some(q.a.iter().map(|v| v.abs()).sum()),
                NormKind::Spectral => None,
            },
            Problem::MatrixLayer(p) => match kind {
                NormKind::Spectral | NormKind::Euclidean => {
                    Some(p.grad_lipschitz() * p.mean_sq_feature_norm())
                }
                NormKind::Infinity => None,
            },
        }
    }

    /// Curvature-variation constant (Lipschitz constant of the Hessian) in
    /// the given geometry, when known analytically.
    pub fn hess_smoothness(&self, kind: NormKind) -> Option<f64> {
        match self {
            Problem::Quadratic(_) => Some(0.0),
            Problem::MatrixLayer(p) => match kind {
                NormKind::Spectral | NormKind::Euclidean => {
                    Some(p.hess_lipschitz() * p.mean_cubed_feature_norm())
                }
                NormKind::Infinity => None,
            },
        }
    }

    pub fn x_star(&self) -> Option<&ParamPoint> {
        match self {
            Problem::Quadratic(q) => Some(&q.x_star),
            Problem::MatrixLayer(p) => p.x_star.as_ref(),
        }
    }

    pub fn f_star(&self) -> Option<f64> {
        match self {
            Problem::Quadratic(_) => Some(0.0),
            Problem::MatrixLayer(p) => p.f_star,
        }
    }

    /// Whether the objective satisfies the star-convexity inequality toward
    /// its optimum. Both families are convex, hence star-convex.
    pub fn star_convex(&self) -> bool {
        true
    }

    /// Upper bound on the initial objective gap `F(x0) - inf F`. Exact when
    /// the optimal value is known; logistic instances fall back to `F(x0)`,
    /// which is valid because their loss is nonnegative.
    pub fn gap_bound(&self, x0: &ParamPoint) -> Result<f64> {
        Ok(self.value(x0)? - self.f_star().unwrap_or(0.0))
    }

    fn check_shape(&self, x: &ParamPoint) -> Result<()> {
        if x.shape() != self.shape() {
            return Err(Error::ShapeMismatch(self.shape(), x.shape()));
        }
        Ok(())
    }
}

/// Random positive-definite quadratic with eigenvalues spread linearly over
/// `[1, condition]` (a single eigenvalue `condition` when dim = 1), a
/// uniformly random eigenbasis, and a random unit-norm optimum.
pub fn make_quadratic(dim: usize, condition: f64, rng: &mut impl Rng) -> Result<Problem> {
    if dim == 0 {
        return Err(Error::InvalidParam("quadratic needs dim >= 1".into()));
    }
    if !(condition.is_finite() && condition >= 1.0) {
        return Err(Error::InvalidParam(format!("condition must be >= 1, got {condition}")));
    }
    let eigs: Vec<f64> = if dim == 1 {
        vec![condition]
    } else {
        (0..dim)
            .map(|i| 1.0 + (condition - 1.0) * i as f64 / (dim - 1) as f64)
            .collect()
    };
    let gauss = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = gauss.qr().q();
    let a = &q * DMatrix::from_diagonal(&DVector::from_vec(eigs)) * q.transpose();
    let a = (&a + a.transpose()) / 2.0;

    let mut x_star = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    while x_star.norm() < 1e-12 {
        x_star = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    }
    x_star /= x_star.norm();
    let x_star = ParamPoint::vector(x_star.iter().copied().collect())?;
    Ok(Problem::Quadratic(QuadraticProblem::from_parts(a, x_star)?))
}

/// Random matrix-layer instance: standard normal features, a planted matrix
/// scaled so the pre-loss outputs have unit-order coordinates, quadratic
/// targets perturbed by noise (so the optimal value is positive), logistic
/// targets given by the planted signs.
pub fn make_matrix_layer(
    rows: usize,
    cols: usize,
    samples: usize,
    loss: LossKind,
    rng: &mut impl Rng,
) -> Result<Problem> {
    if rows == 0 || cols == 0 || samples == 0 {
        return Err(Error::InvalidParam("matrix layer needs positive dims and samples".into()));
    }
    let planted =
        DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
            / (cols as f64).sqrt();
    let mut features = Vec::with_capacity(samples);
    let mut targets = Vec::with_capacity(samples);
    for _ in 0..samples {
        let a = DVector::from_fn(cols, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = &planted * &a;
        let t = match loss {
            LossKind::Quadratic => {
                y + DVector::from_fn(rows, |_, _| rng.sample::<f64, _>(StandardNormal)) * 0.25
            }
            LossKind::Logistic => {
                DVector::from_iterator(rows, y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }))
            }
        };
        features.push(a);
        targets.push(t);
    }
    Ok(Problem::MatrixLayer(MatrixLayerProblem::from_parts(
        rows, cols, features, targets, loss,
    )?))
}

/// Supported gradient-noise models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Independent Gaussian per coordinate with variance `sigma^2 / d`, so
    /// the expected squared l2 norm of the perturbation is exactly `sigma^2`.
    GaussianIso,
}

/// Unbiased stochastic gradient: the exact gradient plus model noise. With
/// `sigma = 0` the exact gradient is returned bitwise.
pub fn noisy_oracle(
    p: &Problem,
    sigma: f64,
    model: NoiseModel,
    x: &ParamPoint,
    rng: &mut impl Rng,
) -> Result<ParamPoint> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidParam(format!("sigma must be >= 0, got {sigma}")));
    }
    let grad = p.grad(x)?;
    if sigma == 0.0 {
        return Ok(grad);
    }
    match model {
        NoiseModel::GaussianIso => {
            let scale = sigma / (grad.len() as f64).sqrt();
            let data = grad
                .data()
                .iter()
                .map(|g| g + scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            ParamPoint::new(grad.shape(), data)
        }
    }
}

fn random_point(shape: Shape, center: Option<&ParamPoint>, rng: &mut impl Rng) -> ParamPoint {
    let data: Vec<f64> = (0..shape.len()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let z = ParamPoint::new(shape, data).expect("finite gaussian draw");
    match center {
        Some(c) => axpby(1.0, c, 1.0, &z).expect("matching shapes"),
        None => z,
    }
}

/// Sampling lower bound on the gradient smoothness constant: the largest
/// observed ratio of dual gradient change to primal point change over random
/// pairs near the optimum (or the origin when no optimum is known).
pub fn estimate_l(
    p: &Problem,
    geometry: &NormGeometry,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParam("estimate_l needs trials >= 1".into()));
    }
    let shape = p.shape();
    let mut best = 0.0f64;
    for _ in 0..trials {
        let x = random_point(shape, p.x_star(), rng);
        let y = random_point(shape, p.x_star(), rng);
        let dx = axpby(1.0, &x, -1.0, &y)?;
        let denom = geometry.primal_norm(&dx)?;
        if denom < 1e-12 {
            continue;
        }
        let dg = axpby(1.0, &p.grad(&x)?, -1.0, &p.grad(&y)?)?;
        best = best.max(geometry.dual_norm(&dg)? / denom);
    }
    Ok(best)
}

/// Hessian-vector product by central differences of the gradient.
fn hess_vec(p: &Problem, at: &ParamPoint, v: &ParamPoint) -> Result<ParamPoint> {
    let vn = euclid_norm(v);
    let t = 1e-5 / vn.max(1e-12);
    let plus = p.grad(&axpby(1.0, at, t, v)?)?;
    let minus = p.grad(&axpby(1.0, at, -t, v)?)?;
    axpby(0.5 / t, &plus, -0.5 / t, &minus)
}

/// Sampling lower bound on the curvature-variation constant: largest
/// observed `dual((H(x) - H(y)) v) / primal(v)^2` with `v = x - y`, using
/// finite-difference Hessian-vector products.
pub fn estimate_h(
    p: &Problem,
    geometry: &NormGeometry,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParam("estimate_h needs trials >= 1".into()));
    }
    let shape = p.shape();
    let mut best = 0.0f64;
    for _ in 0..trials {
        let x = random_point(shape, p.x_star(), rng);
        let y = random_point(shape, p.x_star(), rng);
        let v = axpby(1.0, &x, -1.0, &y)?;
        let denom = geometry.primal_norm(&v)?;
        if denom < 1e-9 {
            continue;
        }
        let dh = axpby(1.0, &hess_vec(p, &x, &v)?, -1.0, &hess_vec(p, &y, &v)?)?;
        best = best.max(geometry.dual_norm(&dh)? / denom.powi(2));
    }
    Ok(best)
}

/// Central finite-difference gradient, the reference oracle for gradient
/// correctness checks.
pub fn finite_diff_grad(p: &Problem, x: &ParamPoint, h: f64) -> Result<ParamPoint> {
    let shape = p.shape();
    let mut out = Vec::with_capacity(shape.len());
    for i in 0..shape.len() {
        let mut plus = x.data().to_vec();
        let mut minus = x.data().to_vec();
        plus[i] += h;
        minus[i] -= h;
        let fp = p.value(&ParamPoint::new(shape, plus)?)?;
        let fm = p.value(&ParamPoint::new(shape, minus)?)?;
        out.push((fp - fm) / (2.0 * h));
    }
    ParamPoint::new(shape, out)
}
