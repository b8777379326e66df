use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported configuration class k={0} (expected 3, 4 or 5)")]
    UnsupportedConfig(usize),

    #[error("node budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("set is empty")]
    EmptySet,

    #[error("member {value} outside ground range [{lo}, {hi}]")]
    OutOfRange { value: usize, lo: usize, hi: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("task mode mismatch: expected {expected}, got {got}")]
    ModeMismatch { expected: &'static str, got: &'static str },

    #[error("n={n} exceeds the limit of {limit} for this operation")]
    TooLarge { n: usize, limit: usize },

    #[error("{0} is not prime")]
    NotPrime(usize),

    #[error("dilation factor is zero modulo {0}")]
    ZeroDilation(usize),

    #[error("census mismatch for {key}: stored {stored}, computed {computed}")]
    CensusMismatch {
        key: String,
        stored: String,
        computed: String,
    },

    #[error("store: {0}")]
    Io(#[from] std::io::Error),

    #[error("store record: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
