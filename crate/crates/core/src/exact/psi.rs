//! Joint order-statistic probabilities
//! `Psi_k(t_1, ..., t_k) = P(U_(1) <= t_1, ..., U_(k) <= t_k)` for i.i.d. uniforms.
//!
//! Two evaluators share one contract: both return `Psi_k` for every prefix
//! `k = 0..=n` of the input.
//!
//! * [`prefixes_standard`] runs a forward recursion over the gaps
//!   `d_i = t_i - t_{i-1}`. Writing `P_i(n)` for `n!` times the Poissonised
//!   mass of `n` points in `[0, t_i]` with `N(t_j) >= j` for `j <= i`,
//!   `P_i(n) = sum_j C(n, j) d_i^j P_{i-1}(n - j)` and `Psi_k = P_k(k)`.
//!   Every term is nonnegative, so there is no cancellation; cost is `O(n^3)`.
//! * [`prefixes_exact`] runs the first-crossing recursion
//!   `Psi_k = 1 - sum_{j<k} C(k, j) Psi_j (1 - t_{j+1})^(k-j)` in exact
//!   rational arithmetic. In floating point that recursion loses all
//!   accuracy past `k ~ 60`; with rationals it is exact and serves as the
//!   referee for the standard path.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::summation::Accumulator;

/// `ln(k!)` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Accumulator::new(true);
    out.push(0.0);
    for k in 1..=n {
        acc.add((k as f64).ln());
        out.push(acc.total());
    }
    out
}

pub(crate) fn prefixes_standard(t: &[f64], compensated: bool) -> Vec<f64> {
    let n = t.len();
    let lf = ln_factorials(n);
    let mut cur = vec![0.0; n + 1];
    let mut next = vec![0.0; n + 1];
    cur[0] = 1.0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    let mut prev_t = 0.0;
    for i in 1..=n {
        let d = t[i - 1] - prev_t;
        prev_t = t[i - 1];
        next[..i].iter_mut().for_each(|x| *x = 0.0);
        if d <= 0.0 {
            next[i..].copy_from_slice(&cur[i..]);
        } else {
            let ln_d = d.ln();
            for target in i..=n {
                let mut acc = Accumulator::new(compensated);
                // P_{i-1}(s) vanishes for s < i - 1.
                for s in (i - 1)..=target {
                    let ps = cur[s];
                    if ps == 0.0 {
                        continue;
                    }
                    let j = target - s;
                    if j == 0 {
                        acc.add(ps);
                    } else {
                        let ln_coef = lf[target] - lf[j] - lf[s] + j as f64 * ln_d;
                        acc.add(ps * ln_coef.exp());
                    }
                }
                next[target] = acc.total();
            }
        }
        std::mem::swap(&mut cur, &mut next);
        out.push(cur[i].min(1.0));
        if cur[i..].iter().all(|&x| x == 0.0) {
            out.resize(n + 1, 0.0);
            break;
        }
    }
    out
}

pub(crate) fn prefixes_exact(t: &[BigRational]) -> Vec<BigRational> {
    let n = t.len();
    let one = BigRational::one();
    let complement: Vec<BigRational> = t.iter().map(|x| &one - x).collect();
    let mut psi: Vec<BigRational> = Vec::with_capacity(n + 1);
    psi.push(one.clone());
    // powers[j] = (1 - t_{j+1})^(k - j) for the current k
    let mut powers: Vec<BigRational> = Vec::with_capacity(n);
    // Pascal row C(k, .)
    let mut binom: Vec<BigInt> = vec![BigInt::one()];
    for k in 1..=n {
        for (j, p) in powers.iter_mut().enumerate() {
            *p = &*p * &complement[j];
        }
        powers.push(complement[k - 1].clone());
        let mut row = Vec::with_capacity(k + 1);
        row.push(BigInt::one());
        for j in 1..k {
            row.push(&binom[j - 1] + &binom[j]);
        }
        row.push(BigInt::one());
        binom = row;
        let mut crossed = BigRational::zero();
        for j in 0..k {
            if psi[j].is_zero() || powers[j].is_zero() {
                continue;
            }
            crossed += BigRational::from_integer(binom[j].clone()) * &psi[j] * &powers[j];
        }
        psi.push(&one - crossed);
    }
    psi
}

pub(crate) fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}
