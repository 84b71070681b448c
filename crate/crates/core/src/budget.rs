//! Enumeration limits shared by the brute-force routines.

use crate::error::{EscError, Result};

/// Environment variable overriding [`Budget::max_omega`].
pub const BUDGET_ENV: &str = "ESC_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest group order accepted by element/character enumeration.
    pub max_group_order: u64,
    /// Largest number of candidate endomorphism matrices scanned when
    /// enumerating automorphisms (the product of `gcd(m_i, m_j)`).
    pub max_endomorphisms: u64,
    /// Largest `|G|^(2n)` accepted by the naive fixed-point oracle.
    pub max_omega: u64,
    /// Largest `|G|^(2n)` for which orbits are materialised explicitly.
    pub max_orbit_omega: u64,
    /// Largest `n!` for which the naive oracle walks every permutation.
    pub max_permutations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_group_order: 64,
            max_endomorphisms: 1 << 24,
            max_omega: 1 << 24,
            max_orbit_omega: 1 << 16,
            max_permutations: 40_320,
        }
    }
}

impl Budget {
    /// Default budget with `max_omega` taken from `ESC_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        let mut budget = Budget::default();
        if let Ok(raw) = std::env::var(BUDGET_ENV) {
            let value = raw.trim().parse::<u64>().map_err(|_| EscError::Parse {
                position: 0,
                message: format!("{BUDGET_ENV} must be an unsigned integer, got {raw:?}"),
            })?;
            budget.max_omega = value;
        }
        Ok(budget)
    }

    /// Budget with every limit lifted.
    pub fn unlimited() -> Self {
        Budget {
            max_group_order: u64::MAX,
            max_endomorphisms: u64::MAX,
            max_omega: u64::MAX,
            max_orbit_omega: u64::MAX,
            max_permutations: u64::MAX,
        }
    }

    pub(crate) fn check(what: &'static str, limit: u64, required: Option<u64>) -> Result<u64> {
        match required {
            Some(required) if required <= limit => Ok(required),
            Some(required) => Err(EscError::BudgetExceeded {
                what,
                limit,
                required,
            }),
            None => Err(EscError::BudgetExceeded {
                what,
                limit,
                required: u64::MAX,
            }),
        }
    }
}

