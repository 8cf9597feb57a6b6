use crate::point::Shape;

/// Errors shared across the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("incompatible shapes: {0:?} vs {1:?}")]
    ShapeMismatch(Shape, Shape),

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("shape {shape:?} is not supported by the {what} operation")]
    UnsupportedShape { what: &'static str, shape: Shape },

    #[error("no closed-form solver for this geometry/regularizer pair: {0}")]
    NoClosedForm(&'static str),

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("missing required constant: {0}")]
    MissingConstant(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
