use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ratio rule: {0}")]
    InvalidRule(String),

    #[error("no level cell contains index {0}")]
    UncoveredIndex(u64),

    #[error("level cells overlap at index {0}")]
    OverlappingCells(u64),

    #[error("index {index} is outside the enumeration bound {bound} of a sampled set")]
    BeyondBound { index: u64, bound: u64 },

    #[error("digit {digit} at index {index} is not below the ratio {ratio}")]
    DigitOutOfRange { index: u64, digit: u64, ratio: u64 },

    #[error("invalid digit rule: {0}")]
    InvalidDigitRule(String),

    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty prefix: {0}")]
    EmptyPrefix(String),

    #[error("density budget unachievable: {0}")]
    BudgetUnachievable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed spec at {location}: {message}")]
    Spec { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in structured CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidRule(_) => "invalid_rule",
            Error::UncoveredIndex(_) => "uncovered_index",
            Error::OverlappingCells(_) => "overlapping_cells",
            Error::BeyondBound { .. } => "beyond_bound",
            Error::DigitOutOfRange { .. } => "digit_out_of_range",
            Error::InvalidDigitRule(_) => "invalid_digit_rule",
            Error::InvalidRational(_) => "invalid_rational",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::EmptyPrefix(_) => "empty_prefix",
            Error::BudgetUnachievable(_) => "budget_unachievable",
            Error::Precondition(_) => "precondition",
            Error::Unsupported(_) => "unsupported",
            Error::Spec { .. } => "malformed_spec",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
