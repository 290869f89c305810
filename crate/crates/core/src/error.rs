use thiserror::Error;

/// Failures raised by the numerical routines in this crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular generating angle {angle} (must lie strictly inside (0, pi) with guard band {guard})")]
    SingularAngle { angle: f64, guard: f64 },

    #[error("inconsistent angle field: sine-Gordon residual {residual:e} exceeds threshold {threshold:e}")]
    InconsistentField { residual: f64, threshold: f64 },

    #[error("geodesic starts on a singular point of the chart")]
    StartOnSingularity,

    #[error("boundary exceeded in direction psi={direction}: attainable radius {max_radius}")]
    BoundaryExceeded { direction: f64, max_radius: f64 },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("integration failed: {0}")]
    Integration(String),
}

impl Error {
    /// Short machine-readable name used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::SingularAngle { .. } => "singular-angle",
            Error::InconsistentField { .. } => "inconsistent-field",
            Error::StartOnSingularity => "start-on-singularity",
            Error::BoundaryExceeded { .. } => "boundary-exceeded",
            Error::NoRoot(_) => "no-root",
            Error::Integration(_) => "integration",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
