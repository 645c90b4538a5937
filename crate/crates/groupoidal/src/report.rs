//! Validation reports.

use std::fmt;

/// One violated law, with the ids of the offending elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Short machine-readable rule name, e.g. `"associativity"`.
    pub rule: &'static str,
    /// Ids of the arrows/objects witnessing the violation.
    pub witnesses: Vec<String>,
    /// Human-readable detail.
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} (witnesses: {})", self.rule, self.detail, self.witnesses.join(", "))
    }
}

/// Outcome of a `validate_*` operation: either a validity certificate
/// (no entries) or the list of every violated invariant.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, rule: &'static str, witnesses: Vec<String>, detail: impl Into<String>) {
        self.violations.push(Violation { rule, witnesses, detail: detail.into() });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// The distinct rule names that were violated.
    pub fn rules(&self) -> Vec<&'static str> {
        let mut rules: Vec<_> = self.violations.iter().map(|v| v.rule).collect();
        rules.sort_unstable();
        rules.dedup();
        rules
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            writeln!(f, "valid")
        } else {
            writeln!(f, "{} violation(s):", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}
