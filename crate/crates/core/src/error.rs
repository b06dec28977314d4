use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report. Variant names double as the error
/// names surfaced by the command line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("InvalidProfile: {0}")]
    InvalidProfile(String),
    #[error("InvalidSupernatural: {0}")]
    InvalidSupernatural(String),
    #[error("InvalidPoint: {0}")]
    InvalidPoint(String),
    #[error("NotRepresentable: {0}")]
    NotRepresentable(String),
    #[error("NotGapPoint: the point has a tail of ones")]
    NotGapPoint,
    #[error("NotTailEquivalent: the points have different right tails")]
    NotTailEquivalent,
    #[error("DegenerateSystem: solution space has dimension {0}, expected 1")]
    DegenerateSystem(usize),
    #[error("SizeMismatch: expected size {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("InvalidMatrixUnit: e({row},{col}) in T_{size}")]
    InvalidMatrixUnit { row: usize, col: usize, size: usize },
    #[error("PrimeNotInfinite: {0} does not divide infinitely many terms")]
    PrimeNotInfinite(u64),
    #[error("WrongShape: {0}")]
    WrongShape(String),
    #[error("InvalidScaling: prime {0} is not a common infinite prime")]
    InvalidScaling(u64),
    #[error("LevelTooSmall: point support {support} exceeds level {level}")]
    LevelTooSmall { support: usize, level: usize },
    #[error("LevelNotAligned: term r_{index} = {term} is not the prime {prime}")]
    LevelNotAligned { index: usize, term: u64, prime: u64 },
    #[error("NotInvertible: {0}")]
    NotInvertible(String),
    #[error("LevelOrder: need m > n >= 1, got n = {n}, m = {m}")]
    LevelOrder { n: u32, m: u32 },
    #[error("Overflow: {0}")]
    Overflow(String),
}

impl Error {
    /// The bare variant name, e.g. `"NotGapPoint"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidProfile(_) => "InvalidProfile",
            Error::InvalidSupernatural(_) => "InvalidSupernatural",
            Error::InvalidPoint(_) => "InvalidPoint",
            Error::NotRepresentable(_) => "NotRepresentable",
            Error::NotGapPoint => "NotGapPoint",
            Error::NotTailEquivalent => "NotTailEquivalent",
            Error::DegenerateSystem(_) => "DegenerateSystem",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::InvalidMatrixUnit { .. } => "InvalidMatrixUnit",
            Error::PrimeNotInfinite(_) => "PrimeNotInfinite",
            Error::WrongShape(_) => "WrongShape",
            Error::InvalidScaling(_) => "InvalidScaling",
            Error::LevelTooSmall { .. } => "LevelTooSmall",
            Error::LevelNotAligned { .. } => "LevelNotAligned",
            Error::NotInvertible(_) => "NotInvertible",
            Error::LevelOrder { .. } => "LevelOrder",
            Error::Overflow(_) => "Overflow",
        }
    }
}
