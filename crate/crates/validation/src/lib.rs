//! Bookkeeping for the acceptance run: pinned targets, measured values and
//! the one-line verdict printed per criterion.

use std::fmt;
use std::time::Duration;

/// A published value with its allowed absolute deviation.
#[derive(Debug, Clone, Copy)]
pub struct Target {
    pub value: f64,
    pub tol: f64,
}

pub const fn target(value: f64, tol: f64) -> Target {
    Target { value, tol }
}

/// One measured quantity of a criterion.
#[derive(Debug, Clone)]
pub struct Check {
    pub what: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn near(what: impl Into<String>, got: f64, t: Target) -> Self {
        let pass = got.is_finite() && (got - t.value).abs() <= t.tol;
        Self {
            what: what.into(),
            pass,
            detail: format!("{got:.4} (want {:.4} ± {})", t.value, t.tol),
        }
    }

    pub fn below(what: impl Into<String>, got: Duration, limit: Duration) -> Self {
        Self {
            what: what.into(),
            pass: got < limit,
            detail: format!("{:.2}s (limit {}s)", got.as_secs_f64(), limit.as_secs_f64()),
        }
    }

    pub fn flag(what: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { what: what.into(), pass, detail: detail.into() }
    }

    /// A computation that could not produce a value.
    pub fn error(what: impl Into<String>, err: impl fmt::Display) -> Self {
        Self { what: what.into(), pass: false, detail: format!("error: {err}") }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for Verdict {
    /// One status line, then the failed checks (or all of them with `{:#}`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n_ok = self.checks.iter().filter(|c| c.pass).count();
        let status = if self.pass() { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {status} {} [{n_ok}/{} checks]", self.id, self.title, self.checks.len())?;
        let all = f.alternate();
        for c in self.checks.iter().filter(|c| all || !c.pass) {
            let mark = if c.pass { "ok  " } else { "MISS" };
            write!(f, "\n    {mark} {}: {}", c.what, c.detail)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_is_inclusive_and_rejects_nan() {
        assert!(Check::near("x", 1.05, target(1.0, 0.05 + 1e-12)).pass);
        assert!(!Check::near("x", 1.06, target(1.0, 0.05)).pass);
        assert!(!Check::near("x", f64::NAN, target(1.0, 10.0)).pass);
    }

    #[test]
    fn empty_verdict_fails() {
        let v = Verdict { id: 1, title: "t", checks: vec![] };
        assert!(!v.pass());
        assert!(v.to_string().starts_with("criterion  1 FAIL"));
    }
}
