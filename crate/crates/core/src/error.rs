use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("small divisor at frequency {freq}: |1 - e(m alpha)| = {size:e}")]
    SmallDivisor { freq: i64, size: f64 },

    #[error("empty or invalid range: {0}")]
    Range(String),

    #[error("grid too coarse: {grid} points, need at least {needed}")]
    Grid { grid: usize, needed: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("spectrum width {width} exceeds the cap {cap}")]
    Truncation { width: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
