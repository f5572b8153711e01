use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands whose shapes (variable count, truncation degree) disagree.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// An operation was applied outside the domain where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("degenerate frequency vector: {0}")]
    Degenerate(String),

    #[error(
        "small divisor |{divisor:.3e}| below floor for component j={j}, harmonic m={m:?} \
         at order k={k} (monomial degree {degree})"
    )]
    SmallDivisor {
        j: usize,
        m: Vec<i64>,
        k: usize,
        degree: usize,
        divisor: f64,
    },

    #[error("consistency failure: {0}")]
    Consistency(String),

    /// A trajectory left the neighbourhood where the truncated surface is trusted.
    #[error("trajectory escaped: {0}")]
    Escape(String),

    #[error("point outside the trusted ball: {0}")]
    OutOfDomain(String),

    /// A vanishing coefficient where a ratio is taken; resonance artifact.
    #[error("gap: {0}")]
    Gap(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig { .. } | Error::Degenerate(_) | Error::Parse(_) | Error::Json(_) => 1,
            Error::SmallDivisor { .. } | Error::Gap(_) => 2,
            Error::Consistency(_)
            | Error::Structural(_)
            | Error::Domain(_)
            | Error::Escape(_)
            | Error::OutOfDomain(_)
            | Error::Fit(_) => 3,
            Error::Io(_) => 4,
        }
    }
}
