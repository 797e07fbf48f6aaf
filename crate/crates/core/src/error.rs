use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty set")]
    EmptySet,

    #[error("empty output")]
    EmptyOutput,

    #[error("resolution violation: scale {scale:e} is below 10 x resolution {resolution:e}")]
    ResolutionViolation { scale: f64, resolution: f64 },

    #[error("center off-set: no point within resolution of the requested center")]
    CenterOffSet,

    #[error("product too large: {points} points exceeds cap {cap}")]
    ProductTooLarge { points: u128, cap: usize },

    #[error("cap exceeded: {requested} exceeds cap {cap}{}", suggestion.map(|d| format!(" (suggested depth {d})")).unwrap_or_default())]
    CapExceeded {
        requested: u128,
        cap: usize,
        suggestion: Option<usize>,
    },

    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("too few valid scales: {found} found, at least {required} required")]
    TooFewScales { found: usize, required: usize },

    #[error("no valid centers")]
    NoValidCenters,

    #[error("no valid scale pairs")]
    NoValidPairs,

    #[error("word too short: length {len}, need at least {required}")]
    WordTooShort { len: usize, required: usize },

    #[error("invalid letter {letter} (alphabet size {alphabet})")]
    InvalidLetter { letter: usize, alphabet: usize },

    #[error("subcritical retention probability {p} <= m^-d = {critical}")]
    Subcritical { p: f64, critical: f64 },

    #[error("no surviving runs after {attempts} attempts")]
    NoSurvivingRuns { attempts: usize },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Default point/cell cap: `2^24`, overridable through `ASSOUAD_KIT_CAP`.
pub fn default_cap() -> usize {
    std::env::var("ASSOUAD_KIT_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(1 << 24)
}
