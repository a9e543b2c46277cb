use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension n={n} outside supported range 1..={max}")]
    DimensionOutOfRange { n: u32, max: u32 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },

    #[error("invalid length: expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what}: {count} cases exceeds the enumeration limit {limit}")]
    ResourceGuard {
        what: &'static str,
        count: u128,
        limit: u128,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(
        "independence precondition unmet: level {level} has coefficient magnitude {magnitude:.3e} \
         (need {required}-wise independence)"
    )]
    Precondition {
        level: u32,
        magnitude: f64,
        required: u32,
    },

    #[error("bound not applicable: {0}")]
    NotApplicable(String),

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("{0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
