//! Reporting helpers for the acceptance test target.

use std::io::Write;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn check(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }

    /// Fails the outcome when `elapsed` exceeds `limit`.
    pub fn within(self, elapsed: Duration, limit: Duration) -> Self {
        if elapsed <= limit {
            Outcome { detail: format!("{}; {:.2?} <= {:.0?}", self.detail, elapsed, limit), ..self }
        } else {
            Outcome { pass: false, detail: format!("{}; took {:.2?} > {:.0?}", self.detail, elapsed, limit) }
        }
    }
}

/// Runs `f`, writes one PASS/FAIL line to the process stderr (outside the
/// test harness capture) and returns the outcome.
pub fn criterion(id: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    if let Some(limit) = limit {
        out = out.within(start.elapsed(), limit);
    }
    let line = format!(
        "criterion {id:>2} {} {title}: {}\n",
        if out.pass { "PASS" } else { "FAIL" },
        out.detail
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    out
}
