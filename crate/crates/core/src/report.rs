use serde::Serialize;

/// Outcome of an exhaustive check. A failed check is data, not an error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub holds: bool,
    /// Number of cases examined.
    pub checked: u64,
    /// First counterexample in enumeration order.
    pub counterexample: Option<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            holds: true,
            checked: 0,
            counterexample: None,
        }
    }

    pub fn tick(&mut self) {
        self.checked += 1;
    }

    /// Records a failure; only the first counterexample is kept.
    pub fn fail(&mut self, counterexample: impl Into<String>) {
        if self.holds {
            self.holds = false;
            self.counterexample = Some(counterexample.into());
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        if let Some(c) = other.counterexample {
            self.fail(c);
        } else if !other.holds {
            self.holds = false;
        }
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} ({} cases)",
            self.check,
            if self.holds { "holds" } else { "FALSIFIED" },
            self.checked
        )?;
        if let Some(c) = &self.counterexample {
            write!(f, "; counterexample {c}")?;
        }
        Ok(())
    }
}
