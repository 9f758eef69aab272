//! Position-based mean error and run statistics.
//!
//! The position-based mean error (pb_me) of step `t` averages, over the last
//! `t_ref` steps, the root-mean-square distance between the particles and
//! the swarm's best position, each axis normalised by its feasible width:
//!
//! ```text
//! term(i) = sqrt( sum_j sum_k ((x_kj(i) - g_j(i)) / (hi_j - lo_j))^2 / (m n) )
//! pb_me(t) = mean of term(i) for i in (t - t_ref, t]
//! ```
//!
//! When fewer than `t_ref` steps are available the mean runs over those.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default averaging window, in steps.
pub const DEFAULT_T_REF: usize = 100;

/// Success threshold on the final error.
pub const SUCCESS_THRESHOLD: f64 = 1e-4;

/// Clustering term of a single step. `positions` is row-major `m x n`.
pub fn clustering_term(positions: &[f64], gbest: &[f64], inv_width: &[f64]) -> f64 {
    let n = gbest.len();
    let m = positions.len() / n;
    let mut sum = 0.0;
    for row in positions.chunks_exact(n) {
        for j in 0..n {
            let d = (row[j] - gbest[j]) * inv_width[j];
            sum += d * d;
        }
    }
    (sum / (m * n) as f64).sqrt()
}

/// Reciprocal feasible widths, rejecting degenerate intervals.
pub fn inverse_widths(lower: &[f64], upper: &[f64]) -> Result<Vec<f64>> {
    if lower.len() != upper.len() {
        return Err(Error::DimensionMismatch {
            expected: lower.len(),
            got: upper.len(),
        });
    }
    lower
        .iter()
        .zip(upper)
        .enumerate()
        .map(|(j, (lo, hi))| {
            let w = hi - lo;
            if w == 0.0 || !w.is_finite() {
                Err(Error::domain(format!("degenerate bounds on axis {j}: [{lo}, {hi}]")))
            } else {
                Ok(1.0 / w)
            }
        })
        .collect()
}

/// Trailing window of `(positions, gbest)` snapshots.
#[derive(Debug, Clone)]
pub struct PbMeWindow {
    t_ref: usize,
    steps: VecDeque<(Vec<f64>, Vec<f64>)>,
}

impl PbMeWindow {
    pub fn new(t_ref: usize) -> Self {
        Self {
            t_ref: t_ref.max(1),
            steps: VecDeque::with_capacity(t_ref.max(1)),
        }
    }

    pub fn t_ref(&self) -> usize {
        self.t_ref
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Records one step; the oldest snapshot drops out once the window is
    /// full.
    pub fn push(&mut self, positions: Vec<f64>, gbest: Vec<f64>) {
        if self.steps.len() == self.t_ref {
            self.steps.pop_front();
        }
        self.steps.push_back((positions, gbest));
    }

    pub fn pb_me(&self, lower: &[f64], upper: &[f64]) -> Result<f64> {
        if self.steps.is_empty() {
            return Err(Error::Empty("pb_me window"));
        }
        let inv = inverse_widths(lower, upper)?;
        let mut total = 0.0;
        for (positions, gbest) in &self.steps {
            if gbest.len() != inv.len() || positions.len() % inv.len() != 0 {
                return Err(Error::DimensionMismatch {
                    expected: inv.len(),
                    got: gbest.len(),
                });
            }
            total += clustering_term(positions, gbest, &inv);
        }
        Ok(total / self.steps.len() as f64)
    }
}

/// Scalar form of [`PbMeWindow`] used by the engine: it keeps only the
/// per-step terms.
#[derive(Debug, Clone)]
pub struct PbMeTracker {
    t_ref: usize,
    terms: VecDeque<f64>,
}

impl PbMeTracker {
    pub fn new(t_ref: usize) -> Self {
        Self {
            t_ref: t_ref.max(1),
            terms: VecDeque::with_capacity(t_ref.max(1)),
        }
    }

    pub fn push(&mut self, term: f64) {
        if self.terms.len() == self.t_ref {
            self.terms.pop_front();
        }
        self.terms.push_back(term);
    }

    pub fn value(&self) -> f64 {
        if self.terms.is_empty() {
            return f64::NAN;
        }
        self.terms.iter().sum::<f64>() / self.terms.len() as f64
    }
}

/// Statistics of a batch of runs at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub best: f64,
    pub median: f64,
    pub mean: f64,
    pub worst: f64,
    pub mean_pb_me: f64,
    /// Percentage of runs with error no greater than the threshold.
    pub success_rate: f64,
}

pub fn summarize(errors: &[f64], pb_mes: &[f64], threshold: f64) -> Result<RunSummary> {
    if errors.is_empty() {
        return Err(Error::Empty("run errors"));
    }
    if pb_mes.len() != errors.len() {
        return Err(Error::DimensionMismatch {
            expected: errors.len(),
            got: pb_mes.len(),
        });
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    };
    let successes = errors.iter().filter(|&&e| e <= threshold).count();
    Ok(RunSummary {
        best: sorted[0],
        median,
        mean: sorted.iter().sum::<f64>() / k as f64,
        worst: sorted[k - 1],
        mean_pb_me: {
            let mut p = pb_mes.to_vec();
            p.sort_by(f64::total_cmp);
            p.iter().sum::<f64>() / k as f64
        },
        success_rate: 100.0 * successes as f64 / k as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapsed_swarm_is_zero() {
        let mut w = PbMeWindow::new(3);
        for _ in 0..5 {
            w.push(vec![1.0, 2.0, 1.0, 2.0], vec![1.0, 2.0]);
        }
        assert_eq!(w.len(), 3);
        assert_eq!(w.pb_me(&[0.0, 0.0], &[4.0, 4.0]).unwrap(), 0.0);
    }

    #[test]
    fn single_particle_single_axis() {
        let mut w = PbMeWindow::new(100);
        w.push(vec![3.5], vec![2.0]);
        assert!((w.pb_me(&[-1.0], &[5.0]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn window_errors() {
        let w = PbMeWindow::new(10);
        assert!(matches!(w.pb_me(&[0.0], &[1.0]), Err(Error::Empty(_))));
        let mut w = PbMeWindow::new(10);
        w.push(vec![0.0], vec![0.0]);
        assert!(matches!(w.pb_me(&[1.0], &[1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn tracker_matches_window() {
        let (lo, hi) = ([0.0, -2.0], [1.0, 2.0]);
        let inv = inverse_widths(&lo, &hi).unwrap();
        let mut w = PbMeWindow::new(2);
        let mut t = PbMeTracker::new(2);
        for k in 0..4 {
            let x = vec![0.1 * k as f64, 1.0, 0.5, -1.0 + k as f64 * 0.2];
            let g = vec![0.3, 0.0];
            t.push(clustering_term(&x, &g, &inv));
            w.push(x, g);
        }
        assert!((t.value() - w.pb_me(&lo, &hi).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn all_zero_batch() {
        let s = summarize(&[0.0; 25], &[0.0; 25], SUCCESS_THRESHOLD).unwrap();
        assert_eq!((s.best, s.median, s.mean, s.worst, s.success_rate), (0.0, 0.0, 0.0, 0.0, 100.0));
    }

    #[test]
    fn one_failure_in_25() {
        let mut errors = vec![1e-5; 24];
        errors.push(1.0);
        let s = summarize(&errors, &[0.0; 25], SUCCESS_THRESHOLD).unwrap();
        assert_eq!(s.success_rate, 96.0);
        assert_eq!(s.worst, 1.0);
        assert_eq!(s.median, 1e-5);
    }

    #[test]
    fn threshold_is_inclusive() {
        let s = summarize(&[1e-4, 2e-4], &[0.0, 0.0], SUCCESS_THRESHOLD).unwrap();
        assert_eq!(s.success_rate, 50.0);
        assert!((s.median - 1.5e-4).abs() < 1e-18);
    }

    #[test]
    fn summary_errors() {
        assert!(matches!(summarize(&[], &[], 1e-4), Err(Error::Empty(_))));
        assert!(summarize(&[1.0], &[], 1e-4).is_err());
    }
}
