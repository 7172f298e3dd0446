use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    /// Two values lie in the refusal band `(tol, 2 tol]`: neither merging nor
    /// separating them is stable at this tolerance.
    #[error("ambiguous clustering: {a} and {b} are {distance:.3e} apart (tol {tol:.1e})")]
    ClusterAmbiguity {
        a: Complex64,
        b: Complex64,
        distance: f64,
        tol: f64,
    },

    #[error("matrix is singular ({context})")]
    Singular { context: &'static str },

    #[error("matrix is not unipotent (residual {residual:.3e})")]
    NotUnipotent { residual: f64 },

    #[error("matrix is not semisimple (nilpotent residual {residual:.3e})")]
    NotSemisimple { residual: f64 },

    #[error("matrix is not real semisimple (imaginary residual {residual:.3e})")]
    NotRealSemisimple { residual: f64 },

    #[error("element is outside the parabolic (negative-weight residual {residual:.3e})")]
    NotInParabolic { residual: f64 },

    #[error("path meets a singular point near {z}")]
    PathThroughSingularity { z: Complex64 },

    #[error("integrator could not meet rtol {rtol:.1e} near {z}")]
    StepFailure { z: Complex64, rtol: f64 },

    #[error("Schur iteration did not converge")]
    SchurFailure,

    #[error("resonant obstruction at order {order} (cokernel residual {residual:.3e})")]
    ResonantObstruction { order: usize, residual: f64 },

    #[error("gauge series truncated at order {order} misses tolerance (residual {residual:.3e})")]
    TruncationFailure { order: usize, residual: f64 },

    #[error("datum failed validation: {0}")]
    ValidationFailure(String),

    #[error("nilpotent logarithm has non-integer weight components (residual {residual:.3e})")]
    WeightLeak { residual: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors meaning "cannot decide at this tolerance" rather than
    /// "the input is wrong".
    pub fn is_numerical_refusal(&self) -> bool {
        matches!(
            self,
            Error::ClusterAmbiguity { .. }
                | Error::StepFailure { .. }
                | Error::SchurFailure
                | Error::TruncationFailure { .. }
                | Error::NonFinite { .. }
        )
    }
}
