//! Standard normal helpers built on the `erfc` family.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// `Phi(x)`. Evaluated through `erfc` so both tails keep relative accuracy.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Phi(x)`.
pub fn sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// `Phi^{-1}(p)`, with `-inf` / `+inf` at the endpoints.
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        // The series inverse is only good to ~1e-10 in the tails; polish with Halley steps.
        let mut x = -SQRT_2 * erfc_inv(2.0 * p);
        // Cubic convergence: one step takes ~1e-10 to below rounding.
        for _ in 0..1 {
            let e = if x < 0.0 { cdf(x) - p } else { (1.0 - p) - sf(x) };
            let d = pdf(x);
            if d == 0.0 || !x.is_finite() {
                break;
            }
            let u = e / d;
            x -= u / (1.0 + 0.5 * x * u);
        }
        x
    }
}

/// `Phi^{-1}(1 - p)`, computed without forming `1 - p`.
pub fn upper_quantile(p: f64) -> f64 {
    -quantile(p)
}
