use thiserror::Error;

use crate::verify::CheckReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{value} has a cofactor {residue} with no prime factor below {bound}")]
    UnfactoredResidue {
        value: String,
        residue: String,
        bound: u64,
    },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("zero is not allowed here: {0}")]
    ZeroElement(&'static str),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("counter support {needed} exceeds the memory budget of {cap} entries")]
    MemoryBudgetExceeded { needed: u128, cap: u128 },

    #[error("brute force over {needed} tuples exceeds the budget of {cap}")]
    BruteForceBudgetExceeded { needed: u128, cap: u128 },

    #[error("enumeration of {needed} items exceeds the budget of {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },

    #[error("sampler exhausted after {attempts} draws with {found} of {wanted} distinct elements")]
    ExhaustedSampler {
        attempts: usize,
        found: usize,
        wanted: usize,
    },

    #[error("generators are multiplicatively dependent (exponent matrix has rank {rank} < {generators})")]
    DependentGenerators { rank: usize, generators: usize },

    #[error("check failed: {}", .0.name)]
    CheckFailed(Box<CheckReport>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for the three budget variants.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::MemoryBudgetExceeded { .. }
                | Error::BruteForceBudgetExceeded { .. }
                | Error::BudgetExceeded { .. }
        )
    }
}
