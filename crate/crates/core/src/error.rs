use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("filter needs at least 2 taps, got {0}")]
    TooFewTaps(usize),

    #[error("filter tap {index} is not finite")]
    NonFiniteTap { index: usize },

    #[error("theta must be a finite number, got {0}")]
    NonFiniteTheta(f64),

    #[error("cannot parse theta from {0:?}")]
    ThetaParse(String),

    #[error("expected a filter with {expected} taps, got {found}")]
    TapCountMismatch { expected: usize, found: usize },

    #[error("operation requires real filter taps")]
    ComplexFilter,

    #[error("eigenvalue iteration did not converge after {iterations} QR sweeps")]
    NoConvergence { iterations: usize },

    #[error("step function window [{lo}, {hi}) does not contain the support [0, {degree}] needed by the cascade")]
    SupportOverflow { lo: i64, hi: i64, degree: usize },

    #[error("grid level {level} exceeds the cap of {cap}")]
    LevelCap { level: u32, cap: u32 },

    #[error("step function value count {found} does not match window length {expected}")]
    ValueCount { expected: usize, found: usize },

    #[error("empty support window [{lo}, {hi})")]
    EmptyWindow { lo: i64, hi: i64 },

    #[error("resolution {0} outside the supported range 1..=16")]
    Resolution(u32),

    #[error("no limit formula at theta = {theta}: sin(theta) = {sin} is degenerate")]
    DegenerateTheta { theta: f64, sin: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
