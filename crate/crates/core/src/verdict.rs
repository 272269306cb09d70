//! Pass/fail bookkeeping for identity checks.

use std::fmt::{self, Display};

/// The first mismatch of a failed check: enough to reproduce it in isolation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub context: String,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of an identity check over one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub comparisons: usize,
    pub failures: usize,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), comparisons: 0, failures: 0, witness: None }
    }

    /// Records one exact comparison; the context closure only runs on failure.
    pub fn check<T, F>(&mut self, context: F, lhs: &T, rhs: &T) -> bool
    where
        T: PartialEq + Display + ?Sized,
        F: FnOnce() -> String,
    {
        self.comparisons += 1;
        if lhs == rhs {
            return true;
        }
        self.failures += 1;
        if self.witness.is_none() {
            self.witness = Some(Witness { context: context(), lhs: lhs.to_string(), rhs: rhs.to_string() });
        }
        false
    }

    /// Records a boolean condition.
    pub fn check_that<F: FnOnce() -> String>(&mut self, context: F, ok: bool) -> bool {
        self.check(context, &ok, &true)
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Folds another verdict's comparisons into this one.
    pub fn absorb(&mut self, other: Verdict) {
        self.comparisons += other.comparisons;
        self.failures += other.failures;
        if self.witness.is_none() {
            self.witness = other.witness.map(|w| Witness { context: format!("{}: {}", other.name, w.context), ..w });
        }
    }
}

impl Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} comparisons)", self.name, self.comparisons)?;
        if let Some(w) = &self.witness {
            write!(f, " first mismatch at {}: {} != {}", w.context, w.lhs, w.rhs)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_first_witness_only() {
        let mut v = Verdict::new("demo");
        assert!(v.check(|| "a".into(), &1, &1));
        assert!(!v.check(|| "b".into(), &1, &2));
        assert!(!v.check(|| "c".into(), &3, &4));
        assert_eq!(v.comparisons, 3);
        assert_eq!(v.failures, 2);
        assert_eq!(v.witness.as_ref().unwrap().context, "b");
        assert!(!v.passed());
    }
}
