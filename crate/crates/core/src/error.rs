use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("empty range: limit {0} is below 2")]
    EmptyRange(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported degree {degree} (maximum {max})")]
    UnsupportedDegree { degree: usize, max: usize },

    #[error("polynomial vanishes identically modulo {0}")]
    VanishesModP(u64),

    #[error("search budget exhausted: {0}")]
    Budget(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("bound violated: {0}")]
    Violation(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyRange(_) => "empty_range",
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::UnsupportedDegree { .. } => "unsupported_degree",
            Error::VanishesModP(_) => "vanishes_mod_p",
            Error::Budget(_) => "budget",
            Error::Regime(_) => "regime",
            Error::SizeCap(_) => "size_cap",
            Error::Violation(_) => "violation",
        }
    }
}
