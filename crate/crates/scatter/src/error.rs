//! Error type shared by every module of the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, ScatterError>;

/// Failure modes surfaced by the public API.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatterError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested quantity diverges (for example `E_1(0)`).
    #[error("divergent quantity: {0}")]
    Divergence(String),

    /// An iterative or series evaluation did not reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Geometric inconsistency (artificial boundary inside the foci, non-constant radius, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Azimuth is undefined on the interior of the focal segment.
    #[error("undefined azimuth at ({0}, {1}, {2})")]
    UndefinedAzimuth(f64, f64, f64),

    /// The prolate metric is singular (r equals the focal distance).
    #[error("singular metric at r = {0}")]
    SingularMetric(f64),

    /// A Jacobian determinant vanished to working precision.
    #[error("degenerate parametrization: |det J| = {0:e}")]
    DegenerateParametrization(f64),

    /// A mode determinant of the elastic shell solution is numerically zero.
    #[error("resonance proximity in mode {mode}: |det| = {det:e}")]
    Resonance {
        /// Mode index n.
        mode: usize,
        /// Scaled determinant magnitude.
        det: f64,
    },

    /// A linear system or collocation matrix is singular to working precision.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// Two discretizations that must match do not.
    #[error("incompatible discretizations: {0}")]
    Incompatible(String),

    /// Parameters of two objects that must agree do not.
    #[error("inconsistent parameters: {0}")]
    Consistency(String),

    /// Configuration file or command line problem.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input/output failure, carried as text so the error stays `Clone`.
    #[error("io error: {0}")]
    Io(String),

    /// Malformed serialized data.
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for ScatterError {
    fn from(e: std::io::Error) -> Self {
        ScatterError::Io(e.to_string())
    }
}
