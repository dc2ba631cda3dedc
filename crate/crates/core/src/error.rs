use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid degree {0}: need N >= 2")]
    InvalidDegree(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("omega must have unit modulus (|omega| = {0})")]
    NotUnitModulus(f64),

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("coefficients are not omega-conjugate-reciprocal (residual {residual:.3e})")]
    NotConjugateReciprocal { residual: f64 },

    #[error("inverse map left an imaginary residue of {residual:.3e}")]
    ImaginaryResidue { residual: f64 },

    #[error("root finder did not converge (max residual {max_residual:.3e})")]
    NumericFailure {
        best: Vec<Complex64>,
        residuals: Vec<f64>,
        max_residual: f64,
    },

    #[error("root {index} lies off the unit circle (radial deviation {deviation:.3e})")]
    OffCircle { index: usize, deviation: f64 },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("quadrature needs more than {min} points, got {got}")]
    InvalidResolution { got: usize, min: usize },

    #[error("near-singular configuration: minimum angular gap {gap:.3e} below {threshold:.3e}")]
    NearSingular { gap: f64, threshold: f64 },

    #[error("quadrature failed to reach tolerance (estimated error {estimate:.3e})")]
    QuadratureFailure { estimate: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
