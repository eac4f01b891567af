use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures of the numerical pipeline.
///
/// Every variant is a hard error: nothing in the crate silently regularizes a
/// singular configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-positive frequency argument: Re(zeta) = {0}")]
    NonPositiveFrequency(f64),
    #[error("invalid material model: {0}")]
    InvalidModel(String),
    #[error("degenerate mode: u = v = 0 leaves the polarization basis undefined")]
    DegenerateMode,
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("beta = {0} outside [0, 1)")]
    InvalidBeta(f64),
    #[error("square-root branch violation: Re({name}) = {re} <= 0")]
    BranchViolation { name: &'static str, re: f64 },
    #[error("near-pole denominator in {context} (relative size {relative:.3e})")]
    PoleProximity {
        context: &'static str,
        relative: f64,
    },
    #[error("singular multiple-reflection system at kappa={kappa}, u={u}, v={v}")]
    InversionFailure { kappa: f64, u: f64, v: f64 },
    #[error("coincidence limit of the unregularized Green tensor requested")]
    CoincidenceUnregularized,
    #[error("Green blocks belong to different modes or positions")]
    MismatchedMode,
    #[error("quadrature did not converge: error {error:.3e} > target {target:.3e} after {cells} cells")]
    QuadratureDivergence {
        error: f64,
        target: f64,
        cells: usize,
    },
    #[error("integrand parity contract violated (deviation {0:.3e})")]
    ParityViolation(f64),
    #[error("the O(beta^2) force formula needs non-dispersive plates")]
    DispersionNotSupported,
    #[error("reflection series does not converge: spectral radius {0}")]
    SeriesNotConvergent(f64),
    #[error("finite-difference step {h} too large for margin {margin}")]
    StepTooLarge { h: f64, margin: f64 },
    #[error("interface matching system is singular")]
    SingularMatching,
    #[error("boundary-value system ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("position {0} outside the region required by this operation")]
    OutOfRegion(f64),
}

impl Error {
    /// Stable machine-readable identifier, used in CSV error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveFrequency(_) => "NonPositiveFrequency",
            Error::InvalidModel(_) => "InvalidModel",
            Error::DegenerateMode => "DegenerateMode",
            Error::InvalidMode(_) => "InvalidMode",
            Error::InvalidBeta(_) => "InvalidBeta",
            Error::BranchViolation { .. } => "BranchViolation",
            Error::PoleProximity { .. } => "PoleProximity",
            Error::InversionFailure { .. } => "InversionFailure",
            Error::CoincidenceUnregularized => "CoincidenceUnregularized",
            Error::MismatchedMode => "MismatchedMode",
            Error::QuadratureDivergence { .. } => "QuadratureDivergence",
            Error::ParityViolation(_) => "ParityViolation",
            Error::DispersionNotSupported => "DispersionNotSupported",
            Error::SeriesNotConvergent(_) => "SeriesNotConvergent",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::SingularMatching => "SingularMatching",
            Error::IllConditioned(_) => "IllConditioned",
            Error::OutOfRegion(_) => "OutOfRegion",
        }
    }
}
