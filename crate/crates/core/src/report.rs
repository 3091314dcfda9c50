//! Pass/fail reports with residual witnesses.

use std::fmt;

use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// A failure the catalog predicts (non-orderable planes); counts as success.
    Expected,
}

impl Status {
    pub fn is_ok(self) -> bool {
        !matches!(self, Status::Fail)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Expected => "expected",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// 1-based index tuple of the first nonzero residual entry.
    pub index: Vec<usize>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: &str) -> Check {
        Check { name: name.to_string(), status: Status::Pass, witness: None, detail: None }
    }

    pub fn fail(name: &str, detail: impl Into<String>) -> Check {
        Check { name: name.to_string(), status: Status::Fail, witness: None, detail: Some(detail.into()) }
    }

    pub fn skipped(name: &str, detail: impl Into<String>) -> Check {
        Check { name: name.to_string(), status: Status::Skipped, witness: None, detail: Some(detail.into()) }
    }

    pub fn expected(name: &str, detail: impl Into<String>) -> Check {
        Check { name: name.to_string(), status: Status::Expected, witness: None, detail: Some(detail.into()) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }

    /// Passes iff every residual entry is exactly zero; `shape` converts a flat
    /// position to a 0-based index tuple.
    pub fn residual<'a>(
        name: &str,
        entries: impl IntoIterator<Item = &'a Scalar>,
        shape: impl Fn(usize) -> Vec<usize>,
    ) -> Check {
        for (p, x) in entries.into_iter().enumerate() {
            if !x.is_zero() {
                let index = shape(p).into_iter().map(|i| i + 1).collect();
                return Check {
                    name: name.to_string(),
                    status: Status::Fail,
                    witness: Some(Witness { index, value: x.render() }),
                    detail: None,
                };
            }
        }
        Check::pass(name)
    }

    pub fn equal(name: &str, got: &Scalar, want: &Scalar) -> Check {
        if got == want {
            Check::pass(name)
        } else {
            Check {
                name: name.to_string(),
                status: Status::Fail,
                witness: Some(Witness { index: vec![], value: (got - want).render() }),
                detail: Some(format!("got {}, expected {}", got.render(), want.render())),
            }
        }
    }

    pub fn flag(name: &str, ok: bool, detail: impl Into<String>) -> Check {
        if ok {
            Check::pass(name)
        } else {
            Check::fail(name, detail)
        }
    }
}

/// Splits a flat position into digits of the given radices (most significant first).
pub fn unflatten(p: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    let mut rest = p;
    for (slot, d) in out.iter_mut().zip(dims).rev() {
        *slot = rest % d;
        rest /= d;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub subject: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl ConditionReport {
    pub fn new(subject: impl Into<String>) -> ConditionReport {
        ConditionReport { subject: subject.into(), checks: Vec::new(), flags: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: ConditionReport) {
        self.checks.extend(other.checks);
        for f in other.flags {
            if !self.flags.contains(&f) {
                self.flags.push(f);
            }
        }
    }

    pub fn flag(&mut self, f: &str) {
        if !self.flags.iter().any(|x| x == f) {
            self.flags.push(f.to_string());
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status.is_ok())
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.status.is_ok()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.subject, if self.passed() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            write!(f, "  {:<28} {}", c.name, c.status)?;
            if let Some(w) = &c.witness {
                write!(f, "  at {:?} residual {}", w.index, w.value)?;
            }
            if let Some(d) = &c.detail {
                write!(f, "  ({d})")?;
            }
            writeln!(f)?;
        }
        if !self.flags.is_empty() {
            writeln!(f, "  flags: {}", self.flags.join(", "))?;
        }
        Ok(())
    }
}
