//! Error type shared by every module.
//!
//! Variants split into two families: domain errors (bad inputs or inputs
//! outside an operation's validity window) and numeric failures (a certified
//! bound or iterative scheme could not reach the requested tolerance). The
//! command line layer maps the first family to exit code 2 and the second to
//! exit code 3.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A physical parameter (r, m, omega, hbar) was zero, negative, or non-finite.
    #[error("parameter {name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    /// Sphere dimension must be odd for the closed kernel recursion.
    #[error("dim must be odd, got {dim}")]
    EvenDimension { dim: u32 },

    /// Sphere dimension outside the supported range.
    #[error("dim must be between 1 and {max}, got {dim}")]
    DimensionRange { dim: u32, max: u32 },

    /// A chart point left the domain where the embedding is defined.
    #[error("point norm {norm} must stay below the radius {radius}")]
    ChartDomain { norm: f64, radius: f64 },

    /// A vector had the wrong number of components.
    #[error("expected a vector of length {expected}, got {got}")]
    VectorLength { expected: usize, got: usize },

    /// A complex label does not satisfy the sphere constraint sum a_k^2 = r^2.
    #[error("label violates the sphere constraint: |sum a_k^2 - r^2| = {defect} exceeds {tolerance}")]
    InconsistentLabel { defect: f64, tolerance: f64 },

    /// A complex label cannot be inverted because |Re a| < r.
    #[error("label cannot come from a real phase point: |Re a| = {norm} is below the radius {radius}")]
    LabelNotInvertible { norm: f64, radius: f64 },

    /// An angle left the window where an asymptotic decomposition is valid.
    #[error("angle modulus {theta_abs} is outside the window {window}; increase the radius or widen the window")]
    OutsideAngleWindow { theta_abs: f64, window: f64 },

    /// The lattice window could not certify the requested truncation tolerance.
    #[error("truncation certificate failed: bound {bound} above tolerance {tolerance} at window {window}")]
    TruncationCertificate { bound: f64, tolerance: f64, window: u32 },

    /// The spectral series would need an infeasible number of terms.
    #[error("spectral oracle unavailable: tau = {tau} needs more than {max_terms} terms")]
    OracleUnavailable { tau: f64, max_terms: u32 },

    /// Adaptive quadrature hit its subdivision limit before converging.
    #[error("quadrature failed to reach tolerance {tolerance}: residual estimate {residual}")]
    QuadratureFailure { tolerance: f64, residual: f64 },

    /// A regression or fit had too few points.
    #[error("need at least {needed} samples for the fit, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    /// Basis cutoff too small: coefficient mass beyond the cutoff is not negligible.
    #[error("basis cutoff too small: dropped coefficient mass {mass} exceeds {tolerance}")]
    CutoffTooSmall { mass: f64, tolerance: f64 },

    /// Basis cutoff below the supported floor.
    #[error("basis cutoff must be at least {min}, got {got}")]
    BasisTooSmall { min: u32, got: u32 },
}

impl Error {
    /// True for inputs the caller could have validated; false for numeric
    /// failures inside an otherwise valid computation.
    pub fn is_domain(&self) -> bool {
        !matches!(
            self,
            Error::TruncationCertificate { .. }
                | Error::OracleUnavailable { .. }
                | Error::QuadratureFailure { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
