use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin: 2J = {0} (must be at least 1)")]
    InvalidSpin(u32),

    #[error("non-physical state: {0}")]
    NonPhysicalState(String),

    #[error("operation requires spin-1/2, got dimension {0}")]
    WrongDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid frequency {0}: must be positive")]
    InvalidFrequency(f64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("time-dependent damping rate is negative ({rate}) at t = {time}")]
    NonMarkovianRate { time: f64, rate: f64 },

    #[error("step size underflow at t = {time} (h = {step})")]
    StiffnessFailure { time: f64, step: f64 },

    #[error("angles undefined at the origin of the (alpha, beta) plane")]
    UndefinedAngles,

    #[error("2F1({a}, {b}; {c}; {z}) is outside the supported parameter regime")]
    UnsupportedParameters { a: f64, b: f64, c: f64, z: f64 },

    #[error("2F1 series did not converge within {terms} terms")]
    PrecisionFailure { terms: usize },

    #[error("exact flux is singular at zero temperature; use the zero-temperature formula")]
    ZeroTemperatureBoundary,

    #[error("Clausius ratio undefined: energy flux is zero")]
    UndefinedRatio,

    #[error("entropy production tail has not decayed: |Pi| = {last} at the final time")]
    TailNotConverged { last: f64 },

    #[error("pulse amplitude |a(t)| = {0} is too small to define effective rates")]
    AmplitudeUnderflow(f64),

    #[error("effective decay rate becomes negative (Gamma_t = {rate} at t = {time})")]
    NonMarkovianRegime { time: f64, rate: f64 },
}

impl Error {
    /// Stable identifier used by the command-line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidSpin(_) => "InvalidSpin",
            Error::NonPhysicalState(_) => "NonPhysicalState",
            Error::WrongDimension(_) => "WrongDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidFrequency(_) => "InvalidFrequency",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::NonMarkovianRate { .. } => "NonMarkovianRate",
            Error::StiffnessFailure { .. } => "StiffnessFailure",
            Error::UndefinedAngles => "UndefinedAngles",
            Error::UnsupportedParameters { .. } => "UnsupportedParameters",
            Error::PrecisionFailure { .. } => "PrecisionFailure",
            Error::ZeroTemperatureBoundary => "ZeroTemperatureBoundary",
            Error::UndefinedRatio => "UndefinedRatio",
            Error::TailNotConverged { .. } => "TailNotConverged",
            Error::AmplitudeUnderflow(_) => "AmplitudeUnderflow",
            Error::NonMarkovianRegime { .. } => "NonMarkovianRegime",
        }
    }
}
