use thiserror::Error;

/// Errors raised by lattice construction, synthesis and evolution.
#[derive(Debug, Error)]
pub enum Error {
    #[error("site (n={n}, t={t}) violates parity: n + t must be even")]
    Parity { n: i64, t: i64 },

    #[error("site (n={n}, t={t}) lies outside the light cone |n| <= t")]
    Cone { n: i64, t: i64 },

    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("slice t={t} has {found} entries, expected {expected}")]
    Shape { t: usize, found: usize, expected: usize },

    #[error("slice t={t} sums to {sum}, not 1")]
    Normalization { t: usize, sum: f64 },

    #[error("negative probability {value} at (n={n}, t={t})")]
    Negative { n: i64, t: usize, value: f64 },

    #[error("infeasible at (n={n}, t={t}): {detail}")]
    Infeasible { n: i64, t: usize, detail: String },

    #[error("integrity check failed at (n={n}, t={t}): {detail}")]
    Integrity { n: i64, t: usize, detail: String },

    #[error("schedule undefined at (n={n}, t={t}) but {weight} arrives there")]
    Coverage { n: i64, t: usize, weight: f64 },

    #[error("horizon {requested} exceeds available horizon {available}")]
    Horizon { requested: usize, available: usize },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
