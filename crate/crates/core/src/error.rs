use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("tensor degree {degree} exceeds the level cap {cap}")]
    DegreeExceedsCap { degree: usize, cap: usize },

    #[error("edge sequence is not a composable path: {0}")]
    NotComposable(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("duplicate identifier `{0}`")]
    Duplicate(String),

    #[error("shape mismatch for {what}: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        what: String,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("covariance residual {residual:e} exceeds tolerance")]
    CovarianceViolation { residual: f64 },

    #[error("not a Fourier-graded element (roundtrip residual {residual:e})")]
    NotFourierGraded { residual: f64 },

    #[error("radius exceeded after {terms} terms (last term norm {last_term:e})")]
    RadiusExceeded {
        partial: DMatrix<Complex64>,
        terms: usize,
        last_term: f64,
    },

    #[error("operator is not contractive (norm {norm})")]
    NotContractive { norm: f64 },

    #[error("element is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("boundary point; use boundary_np_check (spectral radius {spectral_radius})")]
    BoundaryPoint { spectral_radius: f64 },

    #[error("realization is not coisometric (residual {residual:e})")]
    NotCoisometric { residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
