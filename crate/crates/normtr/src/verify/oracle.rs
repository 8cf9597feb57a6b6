//! Independent reference computations used to cross-check the closed forms:
//! exhaustive or sampled subproblem searches, a grid search over the
//! normal-cone residual, and an eigendecomposition route to the orthogonal
//! factor. Nothing here shares code with the implementations under test.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::NormKind;
use crate::point::{axpby, inner, ParamPoint, Shape};
use crate::trstep::{Regularizer, TrustRegionSpec};

/// Value of the subproblem objective `<m, z> + R(z)` at a candidate point;
/// infeasible candidates evaluate to +inf.
pub fn step_objective(spec: &TrustRegionSpec, m: &ParamPoint, z: &ParamPoint) -> Result<f64> {
    if !spec.regularizer.is_feasible(z)? {
        return Ok(f64::INFINITY);
    }
    inner(m, z)
}

/// Trust-region center `(1 - beta) x`.
fn center(spec: &TrustRegionSpec, x: &ParamPoint) -> Result<ParamPoint> {
    axpby(1.0 - spec.beta, x, 0.0, x)
}

/// Exact subproblem minimum for the max-norm geometry, by per-coordinate
/// interval endpoints: the feasible set is a box (the trust box intersected
/// with the clip box, if any), and a linear objective over a box attains its
/// minimum with every coordinate at an interval end.
pub fn box_search_min(spec: &TrustRegionSpec, x: &ParamPoint, m: &ParamPoint) -> Result<f64> {
    if spec.geometry.kind() != NormKind::Infinity {
        return Err(Error::InvalidParam(
            "box enumeration applies to the max-norm geometry only".into(),
        ));
    }
    let c = center(spec, x)?;
    let mut total = 0.0;
    for (ci, mi) in c.data().iter().zip(m.data()) {
        let (mut lo, mut hi) = (ci - spec.eta, ci + spec.eta);
        if let Regularizer::ClipBall { radius, .. } = spec.regularizer {
            lo = lo.max(-radius);
            hi = hi.min(radius);
            if lo > hi {
                return Err(Error::Infeasible("trust box misses the clip box".into()));
            }
        }
        total += (mi * lo).min(mi * hi);
    }
    Ok(total)
}

/// Random point with unit primal norm: a normalized Gaussian for the
/// Euclidean geometry, a random sign vertex for the max norm (the extreme
/// points of its unit ball), an orthogonal factor of a Gaussian matrix for
/// the spectral norm (the extreme points of its unit ball).
pub fn unit_ball_sample(
    kind: NormKind,
    shape: Shape,
    rng: &mut impl Rng,
) -> Result<ParamPoint> {
    match kind {
        NormKind::Euclidean => {
            let mut data: Vec<f64> =
                (0..shape.len()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let n = data.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n < 1e-12 {
                data[0] = 1.0;
            } else {
                for v in &mut data {
                    *v /= n;
                }
            }
            ParamPoint::new(shape, data)
        }
        NormKind::Infinity => {
            let data =
                (0..shape.len()).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            ParamPoint::new(shape, data)
        }
        NormKind::Spectral => {
            let Shape::Matrix(r, c) = shape else {
                return Err(Error::UnsupportedShape { what: "spectral sample", shape });
            };
            let g = DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal));
            let svd = g.svd(true, true);
            let u = svd.u.expect("svd with u");
            let v_t = svd.v_t.expect("svd with v_t");
            ParamPoint::from_dmatrix(&(u * v_t))
        }
    }
}

/// Sampled subproblem search for the unregularized case: the best objective
/// over random extreme points of the trust region. An upper bound on the
/// true minimum that tightens with the sample count.
pub fn sampled_search_min(
    spec: &TrustRegionSpec,
    x: &ParamPoint,
    m: &ParamPoint,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    if spec.regularizer != Regularizer::None {
        return Err(Error::InvalidParam(
            "sampled search handles the unregularized subproblem only".into(),
        ));
    }
    let c = center(spec, x)?;
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let u = unit_ball_sample(spec.geometry.kind(), x.shape(), rng)?;
        for sign in [-1.0, 1.0] {
            let z = axpby(1.0, &c, sign * spec.eta, &u)?;
            best = best.min(inner(m, &z)?);
        }
    }
    Ok(best)
}

/// Lower-bound certificate for the unregularized subproblem: minimizing a
/// linear form over a ball of radius eta around the center c gives exactly
/// `<m, c> - eta * dual_norm(m)`.
pub fn duality_certificate(spec: &TrustRegionSpec, x: &ParamPoint, m: &ParamPoint) -> Result<f64> {
    let c = center(spec, x)?;
    Ok(inner(m, &c)? - spec.eta * spec.geometry.dual_norm(m)?)
}

/// Grid search over the 2x2 spectral trust region: candidate displacements
/// `R(t1) diag(a, b) R(t2)` with angles on a grid over [0, pi) and diagonal
/// entries on a grid over [-eta, eta]. Independent of the SVD code path.
pub fn spectral_grid_min_2x2(
    spec: &TrustRegionSpec,
    x: &ParamPoint,
    m: &ParamPoint,
    n_angles: usize,
    n_diag: usize,
) -> Result<f64> {
    if x.shape() != Shape::Matrix(2, 2) {
        return Err(Error::UnsupportedShape { what: "2x2 grid search", shape: x.shape() });
    }
    let c = center(spec, x)?;
    let rot = |t: f64| DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
    let diag_vals: Vec<f64> = (0..n_diag)
        .map(|i| -spec.eta + 2.0 * spec.eta * i as f64 / (n_diag - 1) as f64)
        .collect();
    let mut best = f64::INFINITY;
    for i in 0..n_angles {
        let t1 = std::f64::consts::PI * i as f64 / n_angles as f64;
        let r1 = rot(t1);
        for j in 0..n_angles {
            let t2 = std::f64::consts::PI * j as f64 / n_angles as f64;
            let r2 = rot(t2);
            for a in &diag_vals {
                for b in &diag_vals {
                    let delta = &r1 * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![*a, *b])) * &r2;
                    let z = axpby(1.0, &c, 1.0, &ParamPoint::from_dmatrix(&delta)?)?;
                    best = best.min(inner(m, &z)?);
                }
            }
        }
    }
    Ok(best)
}

/// Grid minimization of `||grad + v||_1` over the normal cone of the
/// max-norm ball at x: coordinates classified onto a face scan their
/// one-sided ray on a grid, interior coordinates admit only v = 0. Accurate
/// to the grid spacing, which is returned alongside the value.
pub fn residual_grid_min(
    radius: f64,
    x: &ParamPoint,
    grad: &ParamPoint,
    points_per_coord: usize,
) -> Result<(f64, f64)> {
    let boundary_tol = 1e-9;
    let mut total = 0.0;
    let mut worst_spacing = 0.0f64;
    for (xi, gi) in x.data().iter().zip(grad.data()) {
        let reach = 2.0 * gi.abs() + 1.0;
        let spacing = reach / (points_per_coord - 1) as f64;
        let scan = |dir: f64| {
            (0..points_per_coord)
                .map(|i| dir * spacing * i as f64)
                .map(|v| (gi + v).abs())
                .fold(f64::INFINITY, f64::min)
        };
        if *xi >= radius - boundary_tol {
            total += scan(1.0);
            worst_spacing = worst_spacing.max(spacing);
        } else if *xi <= -radius + boundary_tol {
            total += scan(-1.0);
            worst_spacing = worst_spacing.max(spacing);
        } else {
            total += gi.abs();
        }
    }
    Ok((total, worst_spacing))
}

/// Orthogonal factor via an eigendecomposition of `G G^T` instead of the
/// SVD: `(G G^T)^{+/2} G` computed literally.
pub fn orth_eigen_route(g: &ParamPoint, rank_tol: f64) -> Result<ParamPoint> {
    let Shape::Matrix(..) = g.shape() else {
        return Err(Error::UnsupportedShape { what: "orth", shape: g.shape() });
    };
    let mat = g.to_dmatrix();
    let gram = &mat * mat.transpose();
    let eig = gram.symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |a, b| a.max(*b));
    if lambda_max == 0.0 {
        return ParamPoint::from_dmatrix(&DMatrix::zeros(mat.nrows(), mat.ncols()));
    }
    let cutoff = rank_tol * rank_tol * lambda_max;
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| {
        if l > cutoff {
            1.0 / l.sqrt()
        } else {
            0.0
        }
    }));
    let root = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
    ParamPoint::from_dmatrix(&(root * mat))
}
