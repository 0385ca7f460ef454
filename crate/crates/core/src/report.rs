//! Inequality certificates shared by every module.

use serde::{Deserialize, Serialize};

/// One checked inequality `lhs <= rhs`. `slack = rhs - lhs`; the check
/// holds when `slack >= -tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(inequality: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        InequalityCheck {
            inequality: inequality.into(),
            lhs,
            rhs,
            slack,
            window: None,
            tail_bound: None,
            holds: slack >= -tolerance,
        }
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_tail_bound(mut self, tail: f64) -> Self {
        self.tail_bound = Some(tail);
        self
    }
}

/// Outcome of a check whose preconditions may not be verifiable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Violated(String),
    Indeterminate(String),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }

    /// `Verified` if every check holds, otherwise `Violated` naming the first
    /// failing inequality.
    pub fn from_checks(checks: &[InequalityCheck]) -> Self {
        match checks.iter().find(|c| !c.holds) {
            None => Verdict::Verified,
            Some(c) => Verdict::Violated(format!("{} (slack {:.3e})", c.inequality, c.slack)),
        }
    }
}

/// Least-squares slope of `ys` against `xs`, with the residual RMS.
pub fn slope_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (0.0, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

/// Indices of the final third of `1..=n_max` used for slope fits
/// (at least two points).
pub fn final_third(n_min: usize, n_max: usize) -> std::ops::RangeInclusive<usize> {
    let span = n_max.saturating_sub(n_min);
    let start = n_max - (span / 3).max(1).min(span);
    start..=n_max
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_affine_data_is_exact() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 3.0).collect();
        let (s, r) = slope_fit(&xs, &ys);
        assert!((s - 0.5).abs() < 1e-14 && r < 1e-12);
    }

    #[test]
    fn final_third_windows() {
        assert_eq!(final_third(1, 20), 14..=20);
        assert_eq!(final_third(1, 24), 17..=24);
        assert_eq!(final_third(3, 4), 3..=4);
    }

    #[test]
    fn verdict_from_checks() {
        let ok = InequalityCheck::new("a <= b", 1.0, 2.0, 0.0);
        let bad = InequalityCheck::new("c <= d", 3.0, 2.0, 0.0);
        assert!(Verdict::from_checks(&[ok.clone()]).is_verified());
        assert!(matches!(Verdict::from_checks(&[ok, bad]), Verdict::Violated(_)));
    }
}
