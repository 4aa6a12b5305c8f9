use thiserror::Error;

/// Errors produced by the library. Validation errors map to exit code 2 in the
/// command line tool, precision errors to exit code 3.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported field F_{p}^{m}: {reason}")]
    UnsupportedField { p: u64, m: usize, reason: String },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("extension exhausted: no solution in extensions up to degree {max_degree}{}", required_note(*.required))]
    ExtensionExhausted {
        max_degree: usize,
        required: Option<usize>,
    },

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("not divisible by p")]
    NotDivisible,

    #[error("insufficient precision: need at least {required}, have {available}")]
    InsufficientPrecision { required: u32, available: u32 },

    #[error("not a Dieudonne module: {0}")]
    NotDieudonne(String),

    #[error("invalid slope data: {0}")]
    InvalidSlopeData(String),

    #[error("no embedding: {0}")]
    NoEmbedding(String),

    #[error("not of rank two (rank {0})")]
    NotRankTwo(usize),

    #[error("not of elliptic shape: {0}")]
    NotEllipticShape(String),

    #[error("not monic: {0}")]
    NotMonic(String),

    #[error("fraction {s}/{r} is not in lowest terms")]
    NotReduced { s: i64, r: i64 },

    #[error("not of superspecial shape: {0}")]
    NotSuperspecialShape(String),

    #[error("equation has no solution: {0}")]
    Unsolvable(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("the formula needs an odd prime")]
    EvenPrime,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

fn required_note(r: Option<usize>) -> String {
    match r {
        Some(d) => format!(" (degree {d} required)"),
        None => String::new(),
    }
}

impl Error {
    /// True for the precision failure class.
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::InsufficientPrecision { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
