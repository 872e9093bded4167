//! Exact finite-`m` calculations for step-up procedures under the
//! unconditional independent model.
//!
//! The central object is
//! `D_m(T, r) = C(m, r) t_r^r Psi_{m-r}(1 - t_m, ..., 1 - t_{r+1})`,
//! the probability that a step-up procedure with thresholds `T` applied to
//! `m` i.i.d. uniforms rejects exactly `r` hypotheses. Under the mixture
//! model, `P(R = r) = D_m([G(t_j)], r)` and, given `R = r`, the number of false
//! rejections is `Binomial(r, pi0 F0(t_r) / G(t_r))`. Every quantity here is
//! assembled from the shifted terms `D_{m-l}([G(t_{j+l})], r - l)`, which all
//! share the same `Psi` tail and are computed from one pass.

mod psi;
mod stirling;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::mixture::MixtureModel;
use crate::scaling::{build_thresholds, check_thresholds, ScalingFunction, ThresholdSequence};
use crate::summation::Accumulator;
use crate::{Error, Result};

pub use stirling::{stirling2, StirlingTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Double precision, nonnegative forward recursion.
    #[default]
    StandardFloat,
    /// Exact rational arithmetic, used as a referee for small `m`.
    ExtendedPrecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSettings {
    pub backend: Backend,
    /// Largest `m` accepted by the double-precision backend (cost is `O(m^3)`).
    pub max_m_standard: usize,
    /// Largest `m` accepted by the exact backend.
    pub max_m_extended: usize,
    pub compensated_summation: bool,
    /// Added to `x * s(r)` before flooring in [`sfdp_cdf`], so products that
    /// should be integers are not pushed just below by rounding.
    pub floor_nudge: f64,
}

impl Default for ExactSettings {
    fn default() -> Self {
        Self {
            backend: Backend::StandardFloat,
            max_m_standard: 500,
            max_m_extended: 64,
            compensated_summation: true,
            floor_nudge: 1e-12,
        }
    }
}

impl ExactSettings {
    pub fn extended() -> Self {
        Self {
            backend: Backend::ExtendedPrecision,
            ..Self::default()
        }
    }

    fn check_size(&self, m: usize) -> Result<()> {
        let (cap, backend) = match self.backend {
            Backend::StandardFloat => (self.max_m_standard, "standard-float"),
            Backend::ExtendedPrecision => (self.max_m_extended, "extended-precision"),
        };
        if m > cap {
            return Err(Error::TooLarge { m, cap, backend });
        }
        Ok(())
    }

    fn acc(&self) -> Accumulator {
        Accumulator::new(self.compensated_summation)
    }
}

/// `Psi_k(t_1..t_k)` for every `k = 0..=t.len()`.
pub fn psi_prefixes(t: &[f64], settings: &ExactSettings) -> Result<Vec<f64>> {
    if !t.is_empty() {
        check_thresholds(t)?;
    }
    settings.check_size(t.len())?;
    Ok(match settings.backend {
        Backend::StandardFloat => psi::prefixes_standard(t, settings.compensated_summation),
        Backend::ExtendedPrecision => {
            let exact: Vec<BigRational> = t.iter().map(|&x| psi::to_rational(x)).collect();
            psi::prefixes_exact(&exact)
                .iter()
                .map(|x| x.to_f64().unwrap_or(0.0))
                .collect()
        }
    })
}

/// `P(U_(1) <= t_1, ..., U_(r) <= t_r)`; `Psi_0 = 1`.
pub fn psi_with(t: &[f64], settings: &ExactSettings) -> Result<f64> {
    Ok(*psi_prefixes(t, settings)?.last().expect("at least Psi_0"))
}

pub fn psi(t: &[f64]) -> Result<f64> {
    psi_with(t, &ExactSettings::default())
}

/// Shared `Psi` tail for the shifted step-up terms of one threshold vector.
///
/// For `g = (g_1, ..., g_m)`, computes
/// `term(l, r) = D_{m-l}((g_{1+l}, ..., g_m), r - l)
///             = C(m - l, r - l) g_r^(r - l) Psi_{m-r}(1 - g_m, ..., 1 - g_{r+1})`.
struct ShiftedLaw {
    m: usize,
    g: Vec<f64>,
    repr: LawRepr,
}

enum LawRepr {
    Standard {
        ln_fact: Vec<f64>,
        /// `tail[k] = Psi_k(1 - g_m, ..., 1 - g_{m-k+1})`
        tail: Vec<f64>,
    },
    Exact {
        g: Vec<BigRational>,
        tail: Vec<BigRational>,
    },
}

impl ShiftedLaw {
    fn new(g: Vec<f64>, settings: &ExactSettings) -> Result<Self> {
        check_thresholds(&g)?;
        let m = g.len();
        settings.check_size(m)?;
        let repr = match settings.backend {
            Backend::StandardFloat => {
                let w: Vec<f64> = g.iter().rev().map(|x| 1.0 - x).collect();
                LawRepr::Standard {
                    ln_fact: psi::ln_factorials(m),
                    tail: psi::prefixes_standard(&w, settings.compensated_summation),
                }
            }
            Backend::ExtendedPrecision => {
                let gx: Vec<BigRational> = g.iter().map(|&x| psi::to_rational(x)).collect();
                let one = BigRational::one();
                let w: Vec<BigRational> = gx.iter().rev().map(|x| &one - x).collect();
                LawRepr::Exact {
                    tail: psi::prefixes_exact(&w),
                    g: gx,
                }
            }
        };
        Ok(Self { m, g, repr })
    }

    fn term(&self, l: usize, r: usize) -> f64 {
        debug_assert!(l <= r && r <= self.m);
        let n = self.m - l;
        let k = r - l;
        let tail_len = self.m - r;
        match &self.repr {
            LawRepr::Standard { ln_fact, tail } => {
                let psi = tail[tail_len];
                if psi == 0.0 {
                    return 0.0;
                }
                if k == 0 {
                    return psi;
                }
                let g = self.g[r - 1];
                if g == 0.0 {
                    return 0.0;
                }
                let ln = ln_fact[n] - ln_fact[k] - ln_fact[n - k] + k as f64 * g.ln() + psi.ln();
                ln.exp()
            }
            LawRepr::Exact { g, tail } => {
                let psi = &tail[tail_len];
                if psi.is_zero() {
                    return 0.0;
                }
                let gr = if k == 0 {
                    BigRational::one()
                } else {
                    num_traits::pow(g[r - 1].clone(), k)
                };
                let value = BigRational::from_integer(binomial_big(n, k)) * gr * psi;
                value.to_f64().unwrap_or(0.0)
            }
        }
    }
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `D_m(T, r)` for a nondecreasing vector of probabilities `t`.
pub fn dsu_with(t: &[f64], r: usize, settings: &ExactSettings) -> Result<f64> {
    if r > t.len() {
        return Err(Error::domain(format!("r = {r} exceeds m = {}", t.len())));
    }
    if t.is_empty() {
        return Ok(1.0);
    }
    Ok(ShiftedLaw::new(t.to_vec(), settings)?.term(0, r))
}

pub fn dsu(t: &[f64], r: usize) -> Result<f64> {
    dsu_with(t, r, &ExactSettings::default())
}

/// `D_m(T, r)` for `r = 0..=m` from a single `Psi` pass.
pub fn dsu_all(t: &[f64], settings: &ExactSettings) -> Result<Vec<f64>> {
    if t.is_empty() {
        return Ok(vec![1.0]);
    }
    let law = ShiftedLaw::new(t.to_vec(), settings)?;
    Ok((0..=t.len()).map(|r| law.term(0, r)).collect())
}

fn check_pair(model: &MixtureModel, t: &ThresholdSequence) -> Result<()> {
    if model.m() != t.m() {
        return Err(Error::contract(format!(
            "model has m = {} but {} thresholds were given",
            model.m(),
            t.m()
        )));
    }
    Ok(())
}

fn mixture_law(model: &MixtureModel, t: &ThresholdSequence, settings: &ExactSettings) -> Result<ShiftedLaw> {
    check_pair(model, t)?;
    let g: Vec<f64> = t.as_slice().iter().map(|&x| model.g(x)).collect();
    ShiftedLaw::new(g, settings)
}

/// `P(R = r)` for `r = 0..=m` under the mixture model.
pub fn rejection_count_pmf(
    model: &MixtureModel,
    t: &ThresholdSequence,
    settings: &ExactSettings,
) -> Result<Vec<f64>> {
    let law = mixture_law(model, t, settings)?;
    Ok((0..=law.m).map(|r| law.term(0, r)).collect())
}

/// Success probability `pi0 F0(t_r) / G(t_r)` of `V` given `R = r`.
pub fn conditional_fp_parameter(model: &MixtureModel, t_r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t_r) {
        return Err(Error::domain(format!("t_r = {t_r} outside [0, 1]")));
    }
    let g = model.g(t_r);
    if g <= 0.0 {
        return Err(Error::UndefinedConditional(format!("G({t_r}) = 0")));
    }
    Ok((model.pi0() * model.f0(t_r) / g).min(1.0))
}

/// `P(Binomial(r, q) <= j_max)` with `q = a / (a + b)` given as the pair
/// `(a / g, b / g)` so neither tail is formed by subtraction.
fn binomial_cdf(r: usize, q: f64, q_bar: f64, j_max: usize, ln_fact: &[f64], acc: &mut Accumulator) {
    if j_max >= r {
        acc.add(1.0);
        return;
    }
    if q == 0.0 {
        acc.add(1.0);
        return;
    }
    if q_bar == 0.0 {
        // all mass at j = r > j_max
        return;
    }
    let (lq, lqb) = (q.ln(), q_bar.ln());
    for j in 0..=j_max {
        let ln = ln_fact[r] - ln_fact[j] - ln_fact[r - j] + j as f64 * lq + (r - j) as f64 * lqb;
        acc.add(ln.exp());
    }
}

fn check_scaling(s: &ScalingFunction, m: usize) -> Result<Vec<f64>> {
    s.validate_on(m)?;
    s.values(m)
}

/// `P(V / s(R v 1) <= x)`.
pub fn sfdp_cdf(
    model: &MixtureModel,
    t: &ThresholdSequence,
    s: &ScalingFunction,
    x: f64,
    settings: &ExactSettings,
) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::domain(format!("x = {x} must be a nonnegative number")));
    }
    let law = mixture_law(model, t, settings)?;
    let s_vals = check_scaling(s, law.m)?;
    let ln_fact = psi::ln_factorials(law.m);
    let mut total = settings.acc();
    total.add(law.term(0, 0));
    for r in 1..=law.m {
        let p_r = law.term(0, r);
        if p_r == 0.0 {
            continue;
        }
        let tr = t.as_slice()[r - 1];
        let g = law.g[r - 1];
        let q = (model.pi0() * model.f0(tr) / g).min(1.0);
        let q_bar = (model.pi1() * model.f1(tr) / g).min(1.0);
        let j_max = (x * s_vals[r - 1] + settings.floor_nudge).floor() as usize;
        let mut inner = settings.acc();
        binomial_cdf(r, q, q_bar, j_max, &ln_fact, &mut inner);
        total.add(inner.total().min(1.0) * p_r);
    }
    Ok(total.total().clamp(0.0, 1.0))
}

/// `E[(V / s(R v 1))^kappa]` through the binomial factorial-moment expansion.
pub fn sfdp_moment(
    model: &MixtureModel,
    t: &ThresholdSequence,
    s: &ScalingFunction,
    kappa: usize,
    settings: &ExactSettings,
) -> Result<f64> {
    if kappa == 0 {
        return Err(Error::domain("moment order kappa must be >= 1"));
    }
    let law = mixture_law(model, t, settings)?;
    let m = law.m;
    let s_vals = check_scaling(s, m)?;
    if model.pi0() == 0.0 {
        return Ok(0.0);
    }
    let l_max = kappa.min(m);
    let stirling = StirlingTable::new(kappa, l_max);
    let ln_pi0 = model.pi0().ln();
    let mut total = settings.acc();
    for l in 1..=l_max {
        let s_kl = stirling.get(kappa, l).to_f64().unwrap_or(f64::INFINITY);
        if s_kl == 0.0 {
            continue;
        }
        // ln(m! / (m - l)!)
        let ln_falling: f64 = (0..l).map(|i| ((m - i) as f64).ln()).sum();
        let mut inner = settings.acc();
        for r in l..=m {
            let f0 = model.f0(t.as_slice()[r - 1]);
            if f0 == 0.0 {
                continue;
            }
            let term = law.term(l, r);
            if term == 0.0 {
                continue;
            }
            let ln_factor = ln_falling + l as f64 * (ln_pi0 + f0.ln())
                - kappa as f64 * s_vals[r - 1].ln();
            inner.add(ln_factor.exp() * term);
        }
        total.add(s_kl * inner.total());
    }
    Ok(total.total().max(0.0))
}

/// `SEV = pi0 m sum_r F0(t_r) / s(r) D_{m-1}([G(t_{j+1})], r - 1)`.
pub fn sev_exact(
    model: &MixtureModel,
    t: &ThresholdSequence,
    s: &ScalingFunction,
    settings: &ExactSettings,
) -> Result<f64> {
    let law = mixture_law(model, t, settings)?;
    let s_vals = check_scaling(s, law.m)?;
    if model.pi0() == 0.0 {
        return Ok(0.0);
    }
    let mut acc = settings.acc();
    for r in 1..=law.m {
        let f0 = model.f0(t.as_slice()[r - 1]);
        acc.add(f0 / s_vals[r - 1] * law.term(1, r));
    }
    Ok(model.pi0() * law.m as f64 * acc.total())
}

/// Per-alternative rejection probability
/// `sum_r F1(t_r) D_{m-1}([G(t_{j+1})], r - 1)`.
pub fn power_exact(model: &MixtureModel, t: &ThresholdSequence, settings: &ExactSettings) -> Result<f64> {
    if model.pi0() >= 1.0 {
        return Err(Error::UndefinedPower("pi0 = 1 leaves no alternatives".into()));
    }
    let law = mixture_law(model, t, settings)?;
    let mut acc = settings.acc();
    for r in 1..=law.m {
        let f1 = model.f1(t.as_slice()[r - 1]);
        acc.add(f1 * law.term(1, r));
    }
    Ok(acc.total().clamp(0.0, 1.0))
}

/// [`power_exact`] at the thresholds `t_r = alpha s(r) / m`.
pub fn power_exact_scaled(
    model: &MixtureModel,
    s: &ScalingFunction,
    alpha: f64,
    settings: &ExactSettings,
) -> Result<f64> {
    let t = build_thresholds(s, model.m(), alpha)?;
    power_exact(model, &t, settings)
}
