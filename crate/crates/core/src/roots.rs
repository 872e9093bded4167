//! Derivative-free one-dimensional solvers used by the asymptotic and
//! model-case modules.

use crate::{Error, Result};

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs
/// (or one of them is zero). Iterates until the bracket is narrower than
/// `xtol` or cannot be split any further in floating point.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoSolution(format!(
            "no sign change on [{lo:e}, {hi:e}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= xtol {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    // Endpoint with the smaller residual.
    if f(lo).abs() <= f(hi).abs() {
        Ok(lo)
    } else {
        Ok(hi)
    }
}

/// Grows `[lo, hi]` geometrically (by `factor` on the width) until `f`
/// changes sign, keeping the result inside `limits`.
pub fn expand_bracket<F>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    limits: (f64, f64),
    factor: f64,
    max_steps: usize,
) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    for _ in 0..max_steps {
        let (flo, fhi) = (f(lo), f(hi));
        if flo.signum() != fhi.signum() || flo == 0.0 || fhi == 0.0 {
            return Some((lo, hi));
        }
        let width = (hi - lo) * factor;
        lo = (lo - width).max(limits.0);
        hi = (hi + width).min(limits.1);
        if lo <= limits.0 && hi >= limits.1 {
            let (flo, fhi) = (f(lo), f(hi));
            return (flo.signum() != fhi.signum()).then_some((lo, hi));
        }
    }
    None
}

/// Brackets of every sign change of `f` over the ordered grid `xs`.
pub fn sign_changes<F>(f: F, xs: &[f64]) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    sign_changes_of(xs, &values)
}

pub(crate) fn sign_changes_of(xs: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    xs.windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| {
            v[0].is_finite() && v[1].is_finite() && (v[0] > 0.0) != (v[1] > 0.0)
        })
        .map(|(x, _)| (x[0], x[1]))
        .collect()
}

/// `n` log-spaced points from `lo` to `hi` inclusive (`lo > 0`).
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_max<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > xtol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
        if x1 >= x2 {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}
