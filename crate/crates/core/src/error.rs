use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Collective emission is undefined without population or inversion.
    #[error("no superradiance: {0}")]
    NoSuperradiance(&'static str),

    #[error("degenerate Bloch angle {theta} rad: {reason}")]
    DegenerateAngle { theta: f64, reason: &'static str },

    #[error("pressure {pressure} mbar is below the superradiance threshold {threshold} mbar")]
    BelowThreshold { pressure: f64, threshold: f64 },

    #[error("not a pulse: {0}")]
    NotAPulse(&'static str),

    #[error("integration produced a non-finite state at t = {t:e} s")]
    NonFinite { t: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("trace and model time ranges do not overlap")]
    DisjointSupport,

    #[error("trace '{0}' carries no pressure metadata")]
    MissingPressure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
