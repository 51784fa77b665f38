use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the requested operation.
    #[error("parameter domain violation: {0}")]
    Domain(String),

    /// The verification rerun at higher precision disagreed with the
    /// primary result.
    #[error(
        "precision failure in {what}: results at {bits} and {verify_bits} bits differ by \
         relative {rel_diff:.3e} (allowed {allowed:.3e}); raise --bits"
    )]
    Precision {
        what: String,
        bits: u32,
        verify_bits: u32,
        rel_diff: f64,
        allowed: f64,
    },

    /// An elimination pivot that must be positive for a positive measure
    /// came out non-positive.
    #[error("precision failure in {what}: pivot {index} is not positive at {bits} bits; raise --bits")]
    NonPositivePivot { what: String, index: usize, bits: u32 },

    #[error("size guard: {0}")]
    Guard(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures that more working precision would fix.
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Precision { .. } | Error::NonPositivePivot { .. })
    }
}
