//! Reporting for the acceptance suite in `tests/acceptance.rs`.
//!
//! The suite lives in its own package so that a workspace test run executes
//! every unit and integration suite before it.

use std::process::ExitCode;

/// Result of one acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    /// Measured values next to their targets and tolerances.
    pub detail: String,
}

pub fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

pub fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

/// Formats one report line, e.g. `PASS [ 4] ...`.
pub fn report_line(id: usize, outcome: &Outcome) -> String {
    let tag = if outcome.pass { "PASS" } else { "FAIL" };
    format!("{tag} [{id:>2}] {}", outcome.detail)
}

/// Runs the criteria in order, printing one line each, and fails if any fails.
pub fn run_criteria<'a>(criteria: Vec<(usize, Box<dyn Fn() -> Outcome + 'a>)>) -> ExitCode {
    let mut failed = 0;
    for (id, run) in &criteria {
        let outcome = run();
        if !outcome.pass {
            failed += 1;
        }
        println!("{}", report_line(*id, &outcome));
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_lines() {
        assert_eq!(report_line(3, &check(true, "x 1.0")), "PASS [ 3] x 1.0");
        assert_eq!(report_line(12, &check(false, "y")), "FAIL [12] y");
    }

    #[test]
    fn tolerance_is_inclusive() {
        assert!(within(1.25, 1.0, 0.25));
        assert!(!within(1.2501, 1.0, 0.25));
        assert!(within(-3.0, -3.1, 0.1 + 1e-12));
    }
}
