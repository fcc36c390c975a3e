use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("subgroup does not have finite index")]
    NotFiniteIndex,

    #[error("matrix does not satisfy the diagonalizability precondition: {0}")]
    NotDiagonalizable(String),

    #[error("no separating homomorphism exists: {0}")]
    NoWitness(String),

    #[error("{what} exceeds the cap of {cap}")]
    CapExceeded { what: String, cap: u64 },

    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn cap(what: impl Into<String>, cap: u64) -> Self {
        Error::CapExceeded { what: what.into(), cap }
    }

    /// True for the resource-limit family (caps and search budgets).
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::BudgetExhausted(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
