use thiserror::Error;

/// Errors raised by the library.
///
/// Validation failures (bad modes, out-of-range angles, malformed profiles)
/// are kept apart from numerical failures so that front ends can map them to
/// different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mode (l={l}, m={m}): requires l >= 0 and |m| <= l")]
    InvalidMode { l: i64, m: i64 },

    #[error("angle out of range: {0}")]
    AngleOutOfRange(String),

    #[error("degree l = 0 carries no transverse field; Maxwell solutions require l >= 1")]
    MonopoleMode,

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWavenumber(f64),

    #[error("singular medium: eps and mu must be nonzero and finite")]
    SingularMedium,

    #[error("invalid radial profile: {0}")]
    InvalidProfile(String),

    #[error("basis is not orthonormal (max defect {0:e})")]
    NonOrthonormalBasis(f64),

    #[error("{kind} is singular at the origin")]
    SingularAtOrigin { kind: &'static str },

    #[error("overflow evaluating {kind} of order {l} at |x| = {x:e}")]
    Overflow { kind: &'static str, l: usize, x: f64 },

    #[error("quadrature under-resolved: doubling changed the result by {change:e} (tolerance {tol:e})")]
    UnderResolved { change: f64, tol: f64 },

    #[error("sampling grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("integrator step size underflow at r = {r:e}")]
    StepUnderflow { r: f64 },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("singular boundary-matching system for l = {l} (|det| = {det:e})")]
    SingularMatch { l: usize, det: f64 },

    #[error("not a multipole configuration for (l={l}, m={m}): {reason}")]
    NotMultipole { l: usize, m: i64, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidMode { .. }
                | Error::AngleOutOfRange(_)
                | Error::MonopoleMode
                | Error::NonPositiveRadius(_)
                | Error::InvalidWavenumber(_)
                | Error::SingularMedium
                | Error::InvalidProfile(_)
                | Error::NonOrthonormalBasis(_)
                | Error::SingularAtOrigin { .. }
                | Error::GridTooCoarse(_)
                | Error::NotMultipole { .. }
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
