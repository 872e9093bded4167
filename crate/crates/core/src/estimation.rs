//! EM fit of the z-score mixture `pi0 N(0, 1) + (1 - pi0) N(delta, 1)`
//! and the plug-in optimal exponent built on it.

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotic::{optimal_gamma, AsymptoticProblem, OptimalGamma};
use crate::normal;
use crate::summation::Accumulator;
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 2000;
/// Exponent used when the data carry no usable signal.
pub const FALLBACK_GAMMA: f64 = 0.5;
/// Twice the log-likelihood gain over the null-only model below which a
/// fit is treated as "no alternatives" (chi-square, 2 df, level 1e-3).
pub const SIGNAL_LR_THRESHOLD: f64 = 13.815_510_557_964_274;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Starting points `(pi0, delta)` of the multi-start fit.
pub fn default_starts() -> Vec<(f64, f64)> {
    let mut v = Vec::with_capacity(9);
    for pi0 in [0.5, 0.8, 0.95] {
        for delta in [1.0, 2.0, 4.0] {
            v.push((pi0, delta));
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmFit {
    pub pi0: f64,
    /// `None` when the fit found no alternative component.
    pub delta: Option<f64>,
    /// Log-likelihood at the start and after every iteration.
    pub loglik: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub degenerate: bool,
}

impl EmFit {
    pub fn final_loglik(&self) -> f64 {
        *self.loglik.last().expect("trace holds the starting value")
    }

    /// Largest decrease along the trace (zero for a monotone run).
    pub fn max_decrease(&self) -> f64 {
        self.loglik.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }
}

/// `z = Phi^{-1}(1 - p)`. P-values of exactly 0 or 1 are moved inward to
/// the nearest representable values so every score is finite.
pub fn zscores(pvalues: &[f64]) -> Result<Vec<f64>> {
    pvalues
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Data(format!("p-value {} = {p} outside [0, 1]", i + 1)));
            }
            let p = p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
            Ok(normal::upper_quantile(p))
        })
        .collect()
}

fn loglik_null(z: &[f64]) -> f64 {
    let mut acc = Accumulator::new(true);
    for &x in z {
        acc.add(-0.5 * x * x - LN_SQRT_2PI);
    }
    acc.total()
}

/// One E-step: log-likelihood at `(pi0, delta)` plus the sums the M-step
/// needs, `sum r_i` and `sum (1 - r_i) z_i`, `sum (1 - r_i)`.
fn e_step(z: &[f64], pi0: f64, delta: f64) -> (f64, f64, f64, f64) {
    let (lp0, lp1) = (pi0.ln(), (1.0 - pi0).ln());
    let (mut ll, mut sr, mut sz, mut s1) = (
        Accumulator::new(true),
        Accumulator::new(true),
        Accumulator::new(true),
        Accumulator::new(true),
    );
    for &x in z {
        let a = lp0 - 0.5 * x * x;
        let b = lp1 - 0.5 * (x - delta) * (x - delta);
        let hi = a.max(b);
        let lse = hi + ((a - hi).exp() + (b - hi).exp()).ln();
        ll.add(lse - LN_SQRT_2PI);
        let r = (a - lse).exp();
        let q = (b - lse).exp();
        sr.add(r);
        sz.add(q * x);
        s1.add(q);
    }
    (ll.total(), sr.total(), sz.total(), s1.total())
}

/// Two-component EM with the null component fixed at `N(0, 1)`.
///
/// Stops when the log-likelihood gains less than `tol` in one iteration
/// or after `max_iter` iterations. `delta` is projected onto `[0, inf)`.
/// A fit whose likelihood-ratio statistic against the null-only model is
/// below [`SIGNAL_LR_THRESHOLD`] is reported as degenerate with `pi0 = 1`.
pub fn em_fit(z: &[f64], init: (f64, f64), tol: f64, max_iter: usize) -> Result<EmFit> {
    if z.len() < 10 {
        return Err(Error::domain(format!("EM needs at least 10 scores, got {}", z.len())));
    }
    if let Some(i) = z.iter().position(|x| !x.is_finite()) {
        return Err(Error::Data(format!("score {} is not finite", i + 1)));
    }
    let (mut pi0, mut delta) = init;
    if !(pi0 > 0.0 && pi0 < 1.0 && delta > 0.0 && delta.is_finite()) {
        return Err(Error::domain(format!(
            "EM start needs pi0 in (0, 1) and delta > 0, got ({pi0}, {delta})"
        )));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::domain("EM needs tol > 0 and max_iter >= 1"));
    }
    let n = z.len() as f64;
    let (mut ll, mut sr, mut sz, mut s1) = e_step(z, pi0, delta);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    let mut collapsed = false;
    while iterations < max_iter {
        iterations += 1;
        pi0 = sr / n;
        if s1 <= 0.0 || pi0 >= 1.0 {
            collapsed = true;
            break;
        }
        delta = (sz / s1).max(0.0);
        let next = e_step(z, pi0, delta);
        let gain = next.0 - ll;
        (ll, sr, sz, s1) = next;
        trace.push(ll);
        if gain < tol {
            converged = true;
            break;
        }
    }
    let signal = 2.0 * (ll - loglik_null(z));
    let degenerate = collapsed || !(signal >= SIGNAL_LR_THRESHOLD) || delta == 0.0;
    Ok(EmFit {
        pi0: if degenerate { 1.0 } else { pi0 },
        delta: (!degenerate).then_some(delta),
        loglik: trace,
        iterations,
        converged: converged || collapsed,
        degenerate,
    })
}

/// Runs [`em_fit`] from every start and keeps the best final likelihood
/// (earliest start on ties).
pub fn em_fit_multistart(z: &[f64], starts: &[(f64, f64)], tol: f64, max_iter: usize) -> Result<EmFit> {
    if starts.is_empty() {
        return Err(Error::domain("no EM starting points"));
    }
    let fits: Vec<EmFit> = starts
        .par_iter()
        .map(|&s| em_fit(z, s, tol, max_iter))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, f) in fits.iter().enumerate().skip(1) {
        if f.final_loglik() > fits[best].final_loglik() {
            best = i;
        }
    }
    Ok(fits.into_iter().nth(best).unwrap())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatedGamma {
    pub gamma: f64,
    /// True when the fit or the solver failed and [`FALLBACK_GAMMA`] was used.
    pub fallback: bool,
    pub m0: Option<usize>,
    pub fit: EmFit,
    pub solution: Option<OptimalGamma>,
}

/// Fits the mixture to `z`, plugs `m0 = round(m pi0)` and `delta` into
/// [`optimal_gamma`], and falls back to `gamma = 0.5` when either step
/// has nothing to work with.
pub fn estimated_optimal_gamma(z: &[f64], alpha: f64, lambda: f64) -> Result<EstimatedGamma> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(Error::domain(format!("price lambda = {lambda} must be >= 1")));
    }
    let fit = em_fit_multistart(z, &default_starts(), DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    plug_in_gamma(fit, z.len(), alpha, lambda)
}

/// The plug-in step of [`estimated_optimal_gamma`] for an existing fit to
/// `m` scores.
pub fn plug_in_gamma(fit: EmFit, m: usize, alpha: f64, lambda: f64) -> Result<EstimatedGamma> {
    let fallback = |fit: EmFit, m0| EstimatedGamma {
        gamma: FALLBACK_GAMMA,
        fallback: true,
        m0,
        fit,
        solution: None,
    };
    let Some(delta) = fit.delta else {
        return Ok(fallback(fit, None));
    };
    let m0 = (m as f64 * fit.pi0).round() as usize;
    if m0 < 1 || m0 >= m {
        return Ok(fallback(fit, Some(m0)));
    }
    let solved = AsymptoticProblem::gaussian(m, m0, alpha, lambda, delta, 1.0).and_then(|p| optimal_gamma(&p));
    match solved {
        Ok(sol) => Ok(EstimatedGamma {
            gamma: sol.gamma,
            fallback: false,
            m0: Some(m0),
            fit,
            solution: Some(sol),
        }),
        Err(Error::NoSolution(msg)) => {
            log::warn!("plug-in solve failed ({msg}); using gamma = {FALLBACK_GAMMA}");
            Ok(fallback(fit, Some(m0)))
        }
        Err(e) => Err(e),
    }
}
