//! Pass/fail reports produced by every relation checker.

use std::fmt;

use crate::qfield::QScalar;

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    /// Relation identifier, e.g. `[E12,E21] = [H1]_q`.
    pub relation: String,
    /// Whether the relation held everywhere it was tested.
    pub passed: bool,
    /// First counterexample location (a state or a matrix position).
    pub location: Option<String>,
    /// Left and right sides at the counterexample, when they are scalars.
    pub mismatch: Option<(QScalar, QScalar)>,
}

impl Check {
    /// A passing check.
    pub fn pass(relation: impl Into<String>) -> Self {
        Check {
            relation: relation.into(),
            passed: true,
            location: None,
            mismatch: None,
        }
    }

    /// A failing check with a located counterexample.
    pub fn fail(relation: impl Into<String>, location: impl Into<String>) -> Self {
        Check {
            relation: relation.into(),
            passed: false,
            location: Some(location.into()),
            mismatch: None,
        }
    }

    /// Attach the two disagreeing values.
    pub fn with_mismatch(mut self, lhs: QScalar, rhs: QScalar) -> Self {
        self.mismatch = Some((lhs, rhs));
        self
    }
}

/// An ordered list of checks. The report passes iff every check passes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    /// Checks in the order they were run.
    pub checks: Vec<Check>,
}

impl Report {
    /// Empty report (vacuously passing).
    pub fn new() -> Self {
        Report::default()
    }

    /// Append one check.
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Append all checks of another report, prefixing their names.
    pub fn extend_prefixed(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.relation = format!("{prefix}: {}", c.relation);
            }
            self.checks.push(c);
        }
    }

    /// True iff no check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// The failing checks.
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Look up a check by exact relation name.
    pub fn get(&self, relation: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.relation == relation)
    }
}

impl FromIterator<Check> for Report {
    fn from_iter<I: IntoIterator<Item = Check>>(iter: I) -> Self {
        Report {
            checks: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Report {
    /// One line per check: `PASS relation` or `FAIL relation at location`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            if c.passed {
                writeln!(f, "PASS  {}", c.relation)?;
            } else {
                write!(f, "FAIL  {}", c.relation)?;
                if let Some(loc) = &c.location {
                    write!(f, "  at {loc}")?;
                }
                if let Some((l, r)) = &c.mismatch {
                    write!(f, "  lhs={l} rhs={r}")?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}
