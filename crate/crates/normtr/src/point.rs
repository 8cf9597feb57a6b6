//! Elements of the optimization space: flat 64-bit real vectors with optional
//! matrix shape metadata, plus the Euclidean primitives every other module
//! builds on.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Layout of a point: a plain vector or a row-major matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Vector(usize),
    Matrix(usize, usize),
}

impl Shape {
    /// Total number of scalar entries.
    pub fn len(&self) -> usize {
        match *self {
            Shape::Vector(d) => d,
            Shape::Matrix(m, n) => m * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Shape::Vector(d) => d > 0,
            Shape::Matrix(m, n) => m > 0 && n > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParam("shape dimensions must be positive".into()))
        }
    }
}

/// An element of the optimization space: finite 64-bit reals in row-major
/// order, tagged with a shape. Immutable after construction; operations
/// return fresh values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    shape: Shape,
    data: Vec<f64>,
}

impl ParamPoint {
    /// Builds a point, checking that the data length matches the shape and
    /// that every entry is finite.
    pub fn new(shape: Shape, data: Vec<f64>) -> Result<Self> {
        shape.validate()?;
        if data.len() != shape.len() {
            return Err(Error::InvalidParam(format!(
                "data length {} does not match shape {:?}",
                data.len(),
                shape
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { shape, data })
    }

    pub fn vector(data: Vec<f64>) -> Result<Self> {
        let d = data.len();
        Self::new(Shape::Vector(d), data)
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(Shape::Matrix(rows, cols), data)
    }

    pub fn zeros(shape: Shape) -> Self {
        Self { shape, data: vec![0.0; shape.len()] }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Converts a Matrix-shaped point into a dense matrix. Vector shapes are
    /// treated as single-column matrices.
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        match self.shape {
            Shape::Vector(d) => DMatrix::from_column_slice(d, 1, &self.data),
            Shape::Matrix(m, n) => DMatrix::from_row_slice(m, n, &self.data),
        }
    }

    /// Rebuilds a Matrix-shaped point from a dense matrix.
    pub fn from_dmatrix(mat: &DMatrix<f64>) -> Result<Self> {
        let (m, n) = mat.shape();
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                data.push(mat[(i, j)]);
            }
        }
        Self::new(Shape::Matrix(m, n), data)
    }

    fn check_same_shape(&self, other: &ParamPoint) -> Result<()> {
        if self.shape != other.shape {
            Err(Error::ShapeMismatch(self.shape, other.shape))
        } else {
            Ok(())
        }
    }
}

/// Standard inner product: the sum of entrywise products. For matrices this
/// is the trace inner product.
pub fn inner(a: &ParamPoint, b: &ParamPoint) -> Result<f64> {
    a.check_same_shape(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

/// Euclidean norm induced by the inner product (Frobenius norm for matrices).
pub fn euclid_norm(a: &ParamPoint) -> f64 {
    a.data.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Linear combination alpha*a + beta*b.
pub fn axpby(alpha: f64, a: &ParamPoint, beta: f64, b: &ParamPoint) -> Result<ParamPoint> {
    a.check_same_shape(b)?;
    let data = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| alpha * x + beta * y)
        .collect();
    ParamPoint::new(a.shape, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_sums_products() {
        let a = ParamPoint::vector(vec![1.0, 2.0]).unwrap();
        let b = ParamPoint::vector(vec![3.0, 4.0]).unwrap();
        assert_eq!(inner(&a, &b).unwrap(), 11.0);
    }

    #[test]
    fn inner_with_zero_vector_is_zero() {
        let a = ParamPoint::vector(vec![0.0, 0.0]).unwrap();
        let b = ParamPoint::vector(vec![5.0, -7.0]).unwrap();
        assert_eq!(inner(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn inner_on_matrices_is_trace_inner_product() {
        let a = ParamPoint::matrix(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let b = ParamPoint::matrix(2, 2, vec![2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(inner(&a, &b).unwrap(), 7.0);
    }

    #[test]
    fn inner_rejects_shape_mismatch() {
        let a = ParamPoint::vector(vec![1.0, 2.0]).unwrap();
        let b = ParamPoint::vector(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(inner(&a, &b), Err(Error::ShapeMismatch(_, _))));
    }

    #[test]
    fn euclid_norm_pythagorean() {
        let a = ParamPoint::vector(vec![3.0, 4.0]).unwrap();
        assert_eq!(euclid_norm(&a), 5.0);
    }

    #[test]
    fn euclid_norm_of_zero_is_zero() {
        assert_eq!(euclid_norm(&ParamPoint::zeros(Shape::Vector(7))), 0.0);
        assert_eq!(euclid_norm(&ParamPoint::zeros(Shape::Matrix(3, 2))), 0.0);
    }

    #[test]
    fn euclid_norm_of_ones_matrix() {
        let a = ParamPoint::matrix(2, 2, vec![1.0; 4]).unwrap();
        assert_eq!(euclid_norm(&a), 2.0);
    }

    #[test]
    fn axpby_adds_and_scales() {
        let a = ParamPoint::vector(vec![1.0, 2.0]).unwrap();
        let b = ParamPoint::vector(vec![3.0, 4.0]).unwrap();
        let s = axpby(1.0, &a, 1.0, &b).unwrap();
        assert_eq!(s.data(), &[4.0, 6.0]);

        let a = ParamPoint::vector(vec![10.0, 10.0]).unwrap();
        let b = ParamPoint::zeros(Shape::Vector(2));
        let s = axpby(0.9, &a, 0.1, &b).unwrap();
        assert_eq!(s.data(), &[9.0, 9.0]);
    }

    #[test]
    fn axpby_cancellation_is_exact() {
        let x = ParamPoint::vector(vec![0.1, -2.7, 3.3]).unwrap();
        let z = axpby(1.0, &x, -1.0, &x).unwrap();
        assert_eq!(z.data(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn construction_rejects_non_finite() {
        assert!(matches!(
            ParamPoint::vector(vec![1.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
        assert!(matches!(
            ParamPoint::vector(vec![f64::INFINITY]),
            Err(Error::NonFinite(0))
        ));
    }

    #[test]
    fn matrix_round_trips_through_dense_form() {
        let a = ParamPoint::matrix(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let m = a.to_dmatrix();
        assert_eq!(m[(0, 2)], 3.0);
        assert_eq!(m[(1, 0)], 4.0);
        let back = ParamPoint::from_dmatrix(&m).unwrap();
        assert_eq!(back, a);
    }
}
