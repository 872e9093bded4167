//! Step-up rejections and the `lambda * V - T` loss.

use serde::{Deserialize, Serialize};

use crate::scaling::{ScalingFunction, ThresholdSequence};
use crate::{Error, Result};

/// False and true rejection counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub v: usize,
    pub t: usize,
}

impl ErrorCounts {
    pub fn r(&self) -> usize {
        self.v + self.t
    }
}

/// Result of a step-up run over `m` hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionOutcome {
    m: usize,
    /// Rejected hypothesis indices, ascending.
    rejected: Vec<usize>,
    counts: Option<ErrorCounts>,
}

impl RejectionOutcome {
    pub fn new(m: usize, mut rejected: Vec<usize>) -> Result<Self> {
        rejected.sort_unstable();
        rejected.dedup();
        if rejected.last().is_some_and(|&i| i >= m) {
            return Err(Error::contract("rejected index out of range"));
        }
        Ok(Self {
            m,
            rejected,
            counts: None,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of rejections `R`.
    pub fn r(&self) -> usize {
        self.rejected.len()
    }

    pub fn rejected(&self) -> &[usize] {
        &self.rejected
    }

    pub fn is_rejected(&self, i: usize) -> bool {
        self.rejected.binary_search(&i).is_ok()
    }

    /// `(V, T)` once the outcome has been classified against the truth.
    pub fn counts(&self) -> Option<ErrorCounts> {
        self.counts
    }

    /// Attaches ground truth (`true` marks a true null).
    pub fn with_truth(mut self, truth: &[bool]) -> Result<Self> {
        self.counts = Some(classify_outcome(&self, truth)?);
        Ok(self)
    }
}

/// Sorts `(p-value, index)` pairs; NaN is rejected before this is called.
fn sorted_order(pvalues: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pvalues.len()).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]).then(a.cmp(&b)));
    order
}

/// Number of step-up rejections for ascending p-values:
/// `max { i : p_(i) <= t_i }`, or 0.
pub fn step_up_count(sorted_pvalues: &[f64], thresholds: &[f64]) -> usize {
    debug_assert_eq!(sorted_pvalues.len(), thresholds.len());
    sorted_pvalues
        .iter()
        .zip(thresholds)
        .rposition(|(p, t)| p <= t)
        .map_or(0, |i| i + 1)
}

/// Step-up procedure: with `p_(1) <= ... <= p_(m)`, `R = max { i : p_(i) <= t_i }`
/// and every hypothesis with `p <= p_(R)` is rejected.
pub fn step_up(pvalues: &[f64], thresholds: &ThresholdSequence) -> Result<RejectionOutcome> {
    let m = pvalues.len();
    if m != thresholds.m() {
        return Err(Error::contract(format!(
            "{m} p-values but {} thresholds",
            thresholds.m()
        )));
    }
    if let Some(i) = pvalues.iter().position(|p| p.is_nan()) {
        return Err(Error::Data(format!("p-value {} is NaN", i + 1)));
    }
    if let Some(p) = pvalues.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Data(format!("p-value {p} outside [0, 1]")));
    }
    let order = sorted_order(pvalues);
    let sorted: Vec<f64> = order.iter().map(|&i| pvalues[i]).collect();
    let r = step_up_count(&sorted, thresholds.as_slice());
    let mut rejected = order[..r].to_vec();
    rejected.sort_unstable();
    Ok(RejectionOutcome {
        m,
        rejected,
        counts: None,
    })
}

/// `(V, T)` from the rejected set and a truth vector (`true` = null).
pub fn classify_outcome(outcome: &RejectionOutcome, truth: &[bool]) -> Result<ErrorCounts> {
    if truth.len() != outcome.m {
        return Err(Error::contract(format!(
            "truth has length {} but the outcome covers {} hypotheses",
            truth.len(),
            outcome.m
        )));
    }
    let v = outcome.rejected.iter().filter(|&&i| truth[i]).count();
    Ok(ErrorCounts {
        v,
        t: outcome.r() - v,
    })
}

/// Price of a false rejection in the loss `lambda * V - T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    lambda: f64,
}

impl LossSpec {
    /// Requires `lambda >= 1`.
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 1.0) {
            return Err(Error::domain(format!("lambda = {lambda} must be >= 1")));
        }
        Ok(Self { lambda })
    }

    /// Accepts any finite `lambda > 0`.
    pub fn permissive(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::domain(format!("lambda = {lambda} must be > 0")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `lambda * V - T`, equal to `(lambda + 1) * V - R`.
pub fn loss(v: usize, t: usize, spec: &LossSpec) -> f64 {
    spec.lambda * v as f64 - t as f64
}

/// `V / s(R v 1)` for explicit counts.
pub fn sfdp(v: usize, r: usize, s: &ScalingFunction) -> Result<f64> {
    if v > r {
        return Err(Error::contract(format!("V = {v} exceeds R = {r}")));
    }
    Ok(v as f64 / s.eval_floor1(r)?)
}

/// Realised scaled false discovery proportion of a classified outcome.
pub fn empirical_sfdp(outcome: &RejectionOutcome, s: &ScalingFunction) -> Result<f64> {
    let counts = outcome
        .counts
        .ok_or_else(|| Error::contract("outcome has not been classified against the truth"))?;
    sfdp(counts.v, counts.r(), s)
}
