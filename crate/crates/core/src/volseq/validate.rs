use core::f64::consts::LN_2;

use super::VolumeSequence;
use crate::special::ln_factorial;

/// Floating slack allowed on every log-domain inequality.
pub const VALIDATION_SLACK: f64 = 1e-9;

/// Outcome of checking an inequality at every admissible index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub passed: bool,
    /// First index where the slack drops below `-VALIDATION_SLACK`.
    pub first_failure: Option<usize>,
    /// Smallest log-domain slack seen (`+inf` if nothing was checked).
    pub worst_slack: f64,
    pub worst_index: Option<usize>,
    pub checked: usize,
}

impl ValidationReport {
    fn new() -> Self {
        ValidationReport {
            passed: true,
            first_failure: None,
            worst_slack: f64::INFINITY,
            worst_index: None,
            checked: 0,
        }
    }

    fn record(&mut self, k: usize, slack: f64) {
        self.checked += 1;
        if slack < self.worst_slack {
            self.worst_slack = slack;
            self.worst_index = Some(k);
        }
        if slack < -VALIDATION_SLACK && self.first_failure.is_none() {
            self.first_failure = Some(k);
            self.passed = false;
        }
    }
}

/// Ultra-log-concavity `V_k² ≥ ((k+1)/k) V_{k+1} V_{k-1}` for `k ≥ 1`.
///
/// Slack is `2 ln V_k − ln V_{k+1} − ln V_{k-1} − ln((k+1)/k)`. Indices where
/// the right-hand side vanishes pass vacuously, which covers the zero tail of
/// finite-dimensional sequences.
pub fn validate_ulc(v: &VolumeSequence) -> ValidationReport {
    let l = v.log_v();
    let mut report = ValidationReport::new();
    for k in 1..v.k_max() {
        let rhs = l[k + 1] + l[k - 1];
        if rhs == f64::NEG_INFINITY {
            continue;
        }
        let factor = if k == 1 { LN_2 } else { libm::log1p(1.0 / k as f64) };
        let slack = 2.0 * l[k] - rhs - factor;
        report.record(k, slack);
    }
    report
}

/// Chevet bound `V_k ≤ V_1^k / k!` for `k ≥ 1`.
pub fn validate_chevet(v: &VolumeSequence) -> ValidationReport {
    let l = v.log_v();
    let mut report = ValidationReport::new();
    if v.k_max() < 1 {
        return report;
    }
    let l1 = l[1];
    for (k, &lk) in l.iter().enumerate().skip(2) {
        if lk == f64::NEG_INFINITY {
            continue;
        }
        let bound = if l1 == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            k as f64 * l1 - ln_factorial(k)
        };
        report.record(k, bound - lk);
    }
    report
}
