use std::env;

/// Environment variable that overrides the default operation budget.
pub const BUDGET_ENV: &str = "SPHORD_BUDGET";

/// Upper bound on the number of elementary operations (membership tests,
/// candidate relations, ...) an exhaustive routine may perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Budget(u64);

impl Budget {
    pub const DEFAULT: Budget = Budget(100_000_000);

    pub const fn new(limit: u64) -> Self {
        Budget(limit)
    }

    pub const fn limit(self) -> u64 {
        self.0
    }

    /// Reads `SPHORD_BUDGET`, falling back to [`Budget::DEFAULT`] when the
    /// variable is unset or not a positive integer.
    pub fn from_env() -> Self {
        env::var(BUDGET_ENV)
            .ok()
            .and_then(|raw| raw.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
            .map(Budget)
            .unwrap_or(Budget::DEFAULT)
    }

    pub fn allows(self, cost: u128) -> bool {
        cost <= u128::from(self.0)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}
