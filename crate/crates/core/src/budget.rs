use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resource caps shared by every operation that can blow up combinatorially.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest support a counter (or intermediate set) may reach.
    pub max_support: u128,
    /// Largest number of tuples / pairs an enumeration may visit.
    pub max_enumeration: u128,
    /// Largest side of a dense count matrix.
    pub max_matrix_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_support: 20_000_000,
            max_enumeration: 50_000_000,
            max_matrix_dim: 2_000,
        }
    }
}

impl Budget {
    pub fn validate(&self) -> Result<()> {
        if self.max_support == 0 || self.max_enumeration == 0 || self.max_matrix_dim == 0 {
            return Err(Error::InvalidParameter("budgets must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn check_support(&self, needed: u128) -> Result<()> {
        if needed > self.max_support {
            Err(Error::MemoryBudgetExceeded {
                needed,
                cap: self.max_support,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_enumeration(&self, needed: u128) -> Result<()> {
        if needed > self.max_enumeration {
            Err(Error::BudgetExceeded {
                needed,
                cap: self.max_enumeration,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_brute_force(&self, needed: u128) -> Result<()> {
        if needed > self.max_enumeration {
            Err(Error::BruteForceBudgetExceeded {
                needed,
                cap: self.max_enumeration,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_matrix(&self, dim: usize) -> Result<()> {
        if dim > self.max_matrix_dim {
            Err(Error::MemoryBudgetExceeded {
                needed: dim as u128,
                cap: self.max_matrix_dim as u128,
            })
        } else {
            Ok(())
        }
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn saturating_pow(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
