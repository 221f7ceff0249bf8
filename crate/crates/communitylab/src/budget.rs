use crate::error::{Error, Result};

/// Default work budget: roughly "a few seconds of exact arithmetic".
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Environment variable that overrides the default budget.
pub const BUDGET_ENV: &str = "COMMUNITYLAB_BUDGET";

/// A hard cap on combinatorial work.
///
/// Enumeration and exhaustive-detection routines estimate or count their
/// work in abstract units (search nodes, subsets scanned, tuples tried) and
/// refuse to start, or stop mid-way, once the cap is hit. The cap is a
/// correctness tool, not a profiler: exceeding it returns
/// [`Error::BudgetExceeded`] rather than partial results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    limit: u128,
}

impl Budget {
    pub fn new(limit: u128) -> Self {
        Budget { limit }
    }

    /// Budget from `COMMUNITYLAB_BUDGET` if set and parseable, else the
    /// default.
    pub fn from_env() -> Self {
        match std::env::var(BUDGET_ENV) {
            Ok(s) => match s.trim().parse::<u128>() {
                Ok(v) => Budget::new(v),
                Err(_) => Budget::new(DEFAULT_BUDGET),
            },
            Err(_) => Budget::new(DEFAULT_BUDGET),
        }
    }

    pub fn limit(&self) -> u128 {
        self.limit
    }

    /// Check an up-front work estimate against the cap.
    pub fn check(&self, needed: u128) -> Result<()> {
        if needed > self.limit {
            Err(Error::BudgetExceeded {
                needed,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from_env()
    }
}

/// Running tally charged against a [`Budget`] during a search.
#[derive(Debug)]
pub struct Meter {
    used: u128,
    limit: u128,
}

impl Meter {
    pub fn new(budget: Budget) -> Self {
        Meter {
            used: 0,
            limit: budget.limit(),
        }
    }

    /// Charge `units` of work; errors once the total passes the cap.
    pub fn charge(&mut self, units: u128) -> Result<()> {
        self.used = self.used.saturating_add(units);
        if self.used > self.limit {
            Err(Error::BudgetExceeded {
                needed: self.used,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u128 {
        self.used
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_respects_limit() {
        let b = Budget::new(100);
        assert!(b.check(100).is_ok());
        assert!(b.check(101).is_err());
    }

    #[test]
    fn meter_accumulates() {
        let mut m = Meter::new(Budget::new(10));
        assert!(m.charge(4).is_ok());
        assert!(m.charge(6).is_ok());
        assert!(m.charge(1).is_err());
        assert_eq!(m.used(), 11);
    }
}
