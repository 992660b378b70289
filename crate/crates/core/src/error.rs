use thiserror::Error;

/// Every failure the library can report.
///
/// Variant names mirror the public error vocabulary used by the CLI and the
/// config tooling; [`Error::name`] returns that vocabulary string.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("jump points must be strictly increasing inside (0, pi): {0}")]
    JumpOrder(String),
    #[error("jump {index} has a*b = {product} (must be > 0)")]
    JumpSign { index: usize, product: f64 },
    #[error("boundary constraint violated: {0}")]
    BoundaryConstraint(String),
    #[error("invalid potential: {0}")]
    Potential(String),
    #[error("position or argument out of domain: {0}")]
    Domain(String),
    #[error("integrator failed to reach tolerance: {0}")]
    Tolerance(String),
    #[error("solutions evaluated at different spectral points: {0}")]
    Mismatch(String),
    #[error("eigenvalue search inconsistent with contour count: found {found}, contour counted {counted}")]
    MissedEigenvalue { found: usize, counted: i64 },
    #[error("contour passes too close to a zero near lambda = {re} + {im}i")]
    ContourTooClose { re: f64, im: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("lambda = {re} + {im}i is at or near a pole")]
    Pole { re: f64, im: f64 },
    #[error("spectra do not interlace at index {0}")]
    Interlacing(usize),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("operation requires the {expected} boundary variant")]
    Variant { expected: &'static str },
    #[error("forward solve failed: {0}")]
    ForwardSolve(String),
    #[error("fit did not converge after {iterations} iterations (residual norm {residual_norm:e})")]
    Nonconvergence { iterations: usize, residual_norm: f64 },
    #[error("unknown-parameter mask rejected: {0}")]
    Mask(String),
    #[error("config parse error: {0}")]
    ConfigParse(String),
}

impl Error {
    /// Stable name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::JumpOrder(_) => "JumpOrderError",
            Error::JumpSign { .. } => "JumpSignError",
            Error::BoundaryConstraint(_) => "BoundaryConstraintError",
            Error::Potential(_) => "PotentialError",
            Error::Domain(_) => "DomainError",
            Error::Tolerance(_) => "ToleranceError",
            Error::Mismatch(_) => "MismatchError",
            Error::MissedEigenvalue { .. } => "MissedEigenvalueError",
            Error::ContourTooClose { .. } => "ContourTooCloseError",
            Error::Quadrature(_) => "QuadratureError",
            Error::Pole { .. } => "PoleError",
            Error::Interlacing(_) => "InterlacingError",
            Error::Calibration(_) => "CalibrationError",
            Error::Variant { .. } => "VariantError",
            Error::ForwardSolve(_) => "ForwardSolveError",
            Error::Nonconvergence { .. } => "NonconvergenceError",
            Error::Mask(_) => "MaskError",
            Error::ConfigParse(_) => "ConfigParseError",
        }
    }

    /// True for problems with the input data, false for numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::JumpOrder(_)
                | Error::JumpSign { .. }
                | Error::BoundaryConstraint(_)
                | Error::Potential(_)
                | Error::Domain(_)
                | Error::Variant { .. }
                | Error::Mask(_)
                | Error::ConfigParse(_)
                | Error::Interlacing(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
