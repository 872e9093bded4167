//! Two-hypothesis model case: one null `N(0, 1)` statistic and one
//! alternative `N(delta, 1)`, both tested against the same critical value.
//!
//! With a price `lambda` per false positive the criterion is
//! `lambda * p0 - p1 = lambda * Phi(-cv) - Phi(delta - cv)`.

use serde::Serialize;

use crate::normal;
use crate::roots::golden_max;
use crate::{Error, Result};

/// Parameters of the model case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelCase {
    pub delta: f64,
    pub lambda: f64,
}

impl ModelCase {
    pub fn new(delta: f64, lambda: f64) -> Result<Self> {
        check_delta(delta)?;
        check_lambda(lambda)?;
        Ok(Self { delta, lambda })
    }

    pub fn optimal_cv(&self) -> f64 {
        self.lambda.ln() / self.delta + 0.5 * self.delta
    }

    pub fn criterion(&self, cv: f64) -> f64 {
        model_gain(self.delta, self.lambda, cv)
    }

    /// False and true positive probabilities `(p0, p1)` at `cv`.
    pub fn rates(&self, cv: f64) -> (f64, f64) {
        (normal::sf(cv), normal::cdf(self.delta - cv))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::domain(format!("effect delta = {delta} must be > 0")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(Error::domain(format!("price lambda = {lambda} must be >= 1")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    Ok(())
}

/// Critical value minimising `lambda * p0 - p1`: `ln(lambda)/delta + delta/2`.
pub fn optimal_cv(delta: f64, lambda: f64) -> Result<f64> {
    Ok(ModelCase::new(delta, lambda)?.optimal_cv())
}

/// The criterion `lambda * Phi(-cv) - Phi(delta - cv)`; the gain is its negative.
pub fn model_gain(delta: f64, lambda: f64, cv: f64) -> f64 {
    lambda * normal::sf(cv) - normal::cdf(delta - cv)
}

/// Price of a false positive at which testing at level `alpha` is optimal
/// for effect `delta`: `exp(delta * (z_{1-alpha} - delta/2))`.
pub fn lambda_of_delta(delta: f64, alpha: f64) -> f64 {
    let z = normal::upper_quantile(alpha);
    (delta * (z - 0.5 * delta)).exp()
}

/// Location and height of the maximum of `lambda_of_delta` over `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaPeak {
    pub alpha: f64,
    /// Numerical maximiser.
    pub delta: f64,
    /// Numerical maximum.
    pub lambda: f64,
    /// Closed form `exp(z_{1-alpha}^2 / 2)`.
    pub lambda_closed_form: f64,
}

pub fn lambda_peak(alpha: f64) -> Result<LambdaPeak> {
    check_alpha(alpha)?;
    let z = normal::upper_quantile(alpha);
    let hi = (2.0 * z).max(1.0);
    let (delta, log_lambda) = golden_max(|d| d * (z - 0.5 * d), 0.0, hi, 1e-10);
    Ok(LambdaPeak {
        alpha,
        delta,
        lambda: log_lambda.exp(),
        lambda_closed_form: (0.5 * z * z).exp(),
    })
}

/// `n` points `lo, lo + step, ...` stopping at `hi` (inclusive up to
/// rounding). Points are computed as `lo + i * step`, not accumulated.
pub fn delta_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && step > 0.0) {
        return Err(Error::domain(format!("bad delta grid [{lo}, {hi}] step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceCurveRow {
    pub alpha: f64,
    pub delta: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceCurves {
    pub rows: Vec<PriceCurveRow>,
    pub peaks: Vec<LambdaPeak>,
}

/// `lambda(delta)` curves for each level in `alphas`, plus their peaks.
pub fn figure1_data(alphas: &[f64], deltas: &[f64]) -> Result<PriceCurves> {
    if alphas.is_empty() || deltas.is_empty() {
        return Err(Error::domain("price curves need at least one alpha and one delta"));
    }
    for &d in deltas {
        check_delta(d)?;
    }
    let mut rows = Vec::with_capacity(alphas.len() * deltas.len());
    let mut peaks = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        peaks.push(lambda_peak(alpha)?);
        rows.extend(deltas.iter().map(|&delta| PriceCurveRow {
            alpha,
            delta,
            lambda: lambda_of_delta(delta, alpha),
        }));
    }
    Ok(PriceCurves { rows, peaks })
}
