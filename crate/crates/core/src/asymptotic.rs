//! Large-`m` behaviour of the power-family step-up procedures `SU_gamma`.
//!
//! With `m0` nulls and `m1 = m - m0` alternatives whose p-values follow `F`,
//! the procedure asymptotically rejects every p-value below the threshold
//! `u*` solving
//!
//! ```text
//! s^{-1}(u m0 / alpha) = m0 u + m1 F(u),    s(r) = r^gamma,
//! ```
//!
//! so that `E[V] ~ m0 u*` and `E[T] ~ m1 F(u*)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::mixture::Cdf;
use crate::roots::{bisect, log_grid, sign_changes_of};
use crate::scaling::ScalingFunction;
use crate::{Error, Result};

/// Number of points of the log grid scanned for sign changes of the
/// fixed-point equation.
pub const USTAR_GRID_POINTS: usize = 10_000;
/// Relative depth of the scan below the largest admissible threshold.
const USTAR_GRID_DEPTH: f64 = 1e-14;
/// Smallest exponent considered by [`optimal_gamma`].
pub const GAMMA_MIN: f64 = 0.05;
/// Spacing of the outer scan in [`optimal_gamma`].
pub const GAMMA_SCAN_STEP: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct AsymptoticProblem {
    m: usize,
    m0: usize,
    alpha: f64,
    lambda: f64,
    alternative: Cdf,
    scaling: ScalingFunction,
}

impl AsymptoticProblem {
    pub fn new(
        m: usize,
        m0: usize,
        alpha: f64,
        lambda: f64,
        alternative: Cdf,
        scaling: ScalingFunction,
    ) -> Result<Self> {
        if m < 2 || m0 < 1 || m0 >= m {
            return Err(Error::domain(format!(
                "need 1 <= m0 <= m - 1, got m = {m}, m0 = {m0}"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if !(lambda.is_finite() && lambda >= 1.0) {
            return Err(Error::domain(format!("price lambda = {lambda} must be >= 1")));
        }
        let gamma = scaling.gamma().ok_or_else(|| {
            Error::contract("asymptotic results need a power-family scaling function")
        })?;
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::domain(format!("gamma = {gamma} outside [0, 1]")));
        }
        Ok(Self { m, m0, alpha, lambda, alternative, scaling })
    }

    /// Gaussian one-sided alternative `F(u) = 1 - Phi(z_{1-u} - delta)`.
    pub fn gaussian(m: usize, m0: usize, alpha: f64, lambda: f64, delta: f64, gamma: f64) -> Result<Self> {
        Self::new(
            m,
            m0,
            alpha,
            lambda,
            Cdf::gaussian_shift(delta)?,
            ScalingFunction::power(gamma)?,
        )
    }

    /// Same problem with `s(r) = r^gamma`.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let mut p = self.clone();
        p.scaling = ScalingFunction::power(gamma)?;
        Ok(p)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 1.0) {
            return Err(Error::domain(format!("price lambda = {lambda} must be >= 1")));
        }
        let mut p = self.clone();
        p.lambda = lambda;
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn m0(&self) -> usize {
        self.m0
    }

    pub fn m1(&self) -> usize {
        self.m - self.m0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alternative(&self) -> &Cdf {
        &self.alternative
    }

    pub fn gamma(&self) -> f64 {
        self.scaling.gamma().expect("checked in constructor")
    }

    /// Largest threshold the procedure can use, `alpha * s(m) / m`.
    pub fn u_max(&self) -> f64 {
        self.alpha * (self.m as f64).powf(self.gamma()) / self.m as f64
    }

    /// `v = u m0 / alpha`.
    pub fn v(&self, u: f64) -> f64 {
        u * self.m0 as f64 / self.alpha
    }

    fn s_inv(&self, v: f64) -> f64 {
        v.powf(1.0 / self.gamma())
    }

    /// `s^{-1}(u m0 / alpha) - m0 u - m1 F(u)`; zero at `u*`.
    pub fn fixed_point_residual(&self, u: f64) -> f64 {
        let m0 = self.m0 as f64;
        self.s_inv(self.v(u)) - m0 * u - self.m1() as f64 * self.alternative.eval(u)
    }

    /// `lambda m0 u - m1 F(u)`, the limit of `lambda E[V] - E[T]` when
    /// every p-value below `u` is rejected.
    pub fn expected_loss_limit(&self, u: f64) -> f64 {
        self.lambda * self.m0 as f64 * u - self.m1() as f64 * self.alternative.eval(u)
    }
}

/// Asymptotic rejection threshold `u*`.
///
/// Scans a log grid on `(0, alpha s(m)/m]` and returns the largest root.
/// If the equation stays negative up to the largest admissible threshold,
/// that threshold is returned. For `gamma = 0` the procedure is Bonferroni
/// and the answer is `alpha / m`.
pub fn ustar(problem: &AsymptoticProblem) -> Result<f64> {
    if problem.gamma() == 0.0 {
        return Ok(problem.alpha / problem.m as f64);
    }
    let u_max = problem.u_max().min(1.0);
    let grid = log_grid(u_max * USTAR_GRID_DEPTH, u_max, USTAR_GRID_POINTS);
    let f: Vec<f64> = grid.iter().map(|&u| problem.alternative.eval(u)).collect();
    ustar_on_grid(problem, &grid, &f)
}

/// [`ustar`] with `F` already tabulated on an increasing grid; points
/// above `alpha s(m)/m` are ignored and that bound is always checked.
fn ustar_on_grid(problem: &AsymptoticProblem, grid: &[f64], f: &[f64]) -> Result<f64> {
    let u_max = problem.u_max().min(1.0);
    let h = |u: f64| problem.fixed_point_residual(u);
    if h(u_max) <= 0.0 {
        return Ok(u_max);
    }
    let (m0, m1) = (problem.m0 as f64, problem.m1() as f64);
    let n = grid.partition_point(|&u| u < u_max);
    let mut xs: Vec<f64> = grid[..n].to_vec();
    let mut values: Vec<f64> = xs
        .iter()
        .zip(f)
        .map(|(&u, &fu)| problem.s_inv(problem.v(u)) - m0 * u - m1 * fu)
        .collect();
    xs.push(u_max);
    values.push(h(u_max));
    let brackets = sign_changes_of(&xs, &values);
    let Some(&(lo, hi)) = brackets.last() else {
        return Err(Error::NoSolution(format!(
            "threshold equation has no positive root for m = {}, m0 = {}, gamma = {}",
            problem.m,
            problem.m0,
            problem.gamma()
        )));
    };
    if brackets.len() > 1 {
        log::warn!(
            "threshold equation has {} roots (gamma = {}); using the largest",
            brackets.len(),
            problem.gamma()
        );
    }
    bisect(h, lo, hi, 0.0)
}

/// Root of the threshold equation inside `[lo, hi]` when the bracket is
/// valid and nothing beyond `hi` could be a larger root.
fn ustar_in(problem: &AsymptoticProblem, (lo, hi): (f64, f64)) -> Option<f64> {
    let u_max = problem.u_max().min(1.0);
    let h = |u: f64| problem.fixed_point_residual(u);
    let (lo, hi) = (lo * (1.0 - 1e-9), (hi * (1.0 + 1e-9)).min(u_max));
    if hi >= u_max || !(h(lo) <= 0.0 && h(hi) > 0.0) {
        return None;
    }
    // h must stay positive above the bracket for this to be the largest root.
    let tail = log_grid(hi, u_max, 64);
    if tail.iter().any(|&u| h(u) <= 0.0) {
        return None;
    }
    bisect(h, lo, hi, 0.0).ok()
}

/// `(lambda - 1) alpha v - s^{-1}(v)` with `v = u m0 / alpha`. For
/// `gamma = 0` the Bonferroni loss `lambda m0 u - m1 F(u)` is returned.
pub fn asymptotic_loss(problem: &AsymptoticProblem, u: f64) -> f64 {
    if problem.gamma() == 0.0 {
        return problem.expected_loss_limit(u);
    }
    let v = problem.v(u);
    (problem.lambda - 1.0) * problem.alpha * v - problem.s_inv(v)
}

fn check_rates(m0: f64, m1: f64, p0: f64, p1: f64, gamma: f64) -> Result<f64> {
    if !(m0 >= 0.0 && m1 >= 0.0) {
        return Err(Error::domain("counts must be nonnegative"));
    }
    if !((0.0..=1.0).contains(&p0) && (0.0..=1.0).contains(&p1)) {
        return Err(Error::domain(format!("rates p0 = {p0}, p1 = {p1} must lie in [0, 1]")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain(format!("gamma = {gamma} outside [0, 1]")));
    }
    let mu = m0 * p0 + m1 * p1;
    if mu <= 0.0 {
        return Err(Error::domain("m0 p0 + m1 p1 must be positive"));
    }
    Ok(mu)
}

/// First-order approximation `m0 p0 / (m0 p0 + m1 p1)^gamma` of `E[V / R^gamma]`.
pub fn sev_delta_approx(m0: f64, m1: f64, p0: f64, p1: f64, gamma: f64) -> Result<f64> {
    let mu = check_rates(m0, m1, p0, p1, gamma)?;
    Ok(m0 * p0 / mu.powf(gamma))
}

/// Delta-method variance of `V / (V + T)^gamma` with `V ~ Bin(m0, p0)` and
/// `T ~ Bin(m1, p1)` independent.
pub fn sev_delta_variance(m0: f64, m1: f64, p0: f64, p1: f64, gamma: f64) -> Result<f64> {
    let mu = check_rates(m0, m1, p0, p1, gamma)?;
    let (mu_v, mu_t) = (m0 * p0, m1 * p1);
    let dv = (1.0 - gamma) * mu_v + mu_t;
    let dt = gamma * mu_v;
    let num = dv * dv * m0 * p0 * (1.0 - p0) + dt * dt * m1 * p1 * (1.0 - p1);
    Ok(num / mu.powf(2.0 * gamma + 2.0))
}

/// Solution of the optimal-exponent system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalGamma {
    pub gamma: f64,
    pub ustar: f64,
    /// `|s^{-1}(v) - m0 u* - m1 F(u*)| / m`.
    pub residual_threshold: f64,
    /// `|m1 F'(u*) - lambda m0| / (lambda m0)`; only meaningful for an
    /// interior solution.
    pub residual_stationarity: f64,
    /// `lambda m0 u* - m1 F(u*)`.
    pub loss: f64,
    /// `m0 u* + m1 F(u*)`. Below one the large-`m` approximation has
    /// little to say about the actual procedure.
    pub expected_rejections: f64,
    /// Exact `lambda E[V] - E[T]` of Bonferroni (`gamma = 0`), which lies
    /// outside the search range and is reported for comparison.
    pub bonferroni_loss: f64,
    /// True when no interior solution exists and a boundary of
    /// `[GAMMA_MIN, 1]` was returned.
    pub boundary: bool,
}

/// Exponent minimising the asymptotic loss `lambda m0 u* - m1 F(u*)`.
///
/// Since `E[V] ~ m0 u*` and `E[T] ~ m1 F(u*)`, the loss moves with `gamma`
/// only through `u*`, and it is stationary where `m1 F'(u*) = lambda m0`.
/// The pair `(gamma, u*)` therefore solves
///
/// ```text
/// m1 F(u) = (u m0 / alpha)^{1/gamma} - m0 u,
/// m1 F'(u) = lambda m0.
/// ```
///
/// The second equation is scanned over a `gamma` grid (each point needs
/// an inner `u*` solve) and refined by bisection. Without an interior sign
/// change the boundary with the smaller loss is returned and flagged.
/// The exponent stored in `problem` is ignored.
pub fn optimal_gamma(problem: &AsymptoticProblem) -> Result<OptimalGamma> {
    let n = ((1.0 - GAMMA_MIN) / GAMMA_SCAN_STEP).round() as usize + 1;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { 1.0 } else { GAMMA_MIN + i as f64 * GAMMA_SCAN_STEP })
        .collect();
    let target = problem.lambda * problem.m0 as f64;
    let m1 = problem.m1() as f64;
    let stationarity = |u: f64| (m1 * problem.alternative.density(u) - target) / target;

    // One shared scan grid from the deepest point any exponent needs up to
    // the largest threshold, with F tabulated once.
    let lowest = problem.with_gamma(GAMMA_MIN)?.u_max() * USTAR_GRID_DEPTH;
    let u_grid = log_grid(lowest, problem.alpha, USTAR_GRID_POINTS);
    let f_grid: Vec<f64> = u_grid.par_iter().map(|&u| problem.alternative.eval(u)).collect();
    let us: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&g| {
            let p = problem.with_gamma(g).ok()?;
            ustar_on_grid(&p, &u_grid, &f_grid).ok()
        })
        .collect();
    let feasible: Vec<(f64, f64)> = grid
        .iter()
        .zip(&us)
        .filter_map(|(&g, u)| u.map(|u| (g, u)))
        .collect();
    if feasible.is_empty() {
        return Err(Error::NoSolution(
            "threshold equation has no root for any gamma in the search range".into(),
        ));
    }

    if feasible.iter().all(|&(_, u)| problem.alternative.eval(u) <= u * (1.0 + 1e-9)) {
        return Err(Error::NoSolution(
            "alternative p-values are not stochastically smaller than null ones".into(),
        ));
    }

    let finish = |gamma: f64, u: f64, boundary: bool| -> Result<OptimalGamma> {
        let p = problem.with_gamma(gamma)?;
        Ok(OptimalGamma {
            gamma,
            ustar: u,
            residual_threshold: p.fixed_point_residual(u).abs() / problem.m as f64,
            residual_stationarity: stationarity(u).abs(),
            loss: problem.expected_loss_limit(u),
            expected_rejections: problem.m0 as f64 * u + m1 * problem.alternative.eval(u),
            bonferroni_loss: problem.expected_loss_limit(problem.alpha / problem.m as f64),
            boundary,
        })
    };

    let gs: Vec<f64> = feasible.iter().map(|x| x.0).collect();
    let rs: Vec<f64> = feasible.iter().map(|x| stationarity(x.1)).collect();
    let mut best: Option<OptimalGamma> = None;
    for (lo, hi) in sign_changes_of(&gs, &rs) {
        // Between neighbouring scan points u* stays between their solutions,
        // which saves the full grid scan on every bisection step.
        let ulo = feasible.iter().find(|x| x.0 == lo).unwrap().1;
        let uhi = feasible.iter().find(|x| x.0 == hi).unwrap().1;
        let window = (ulo.min(uhi), ulo.max(uhi));
        let solve_at = |g: f64| -> Option<f64> {
            let p = problem.with_gamma(g).ok()?;
            ustar_in(&p, window).or_else(|| ustar(&p).ok())
        };
        let f = |g: f64| solve_at(g).map_or(f64::NAN, stationarity);
        let g = bisect(f, lo, hi, 0.0)?;
        let u = solve_at(g).ok_or_else(|| Error::NoSolution(format!("lost root at gamma = {g}")))?;
        let cand = finish(g, u, false)?;
        if best.is_none_or(|b| cand.loss < b.loss) {
            best = Some(cand);
        }
    }
    if let Some(b) = best {
        return Ok(b);
    }
    let (g_lo, u_lo) = feasible[0];
    let (g_hi, u_hi) = *feasible.last().unwrap();
    let (g, u) = if problem.expected_loss_limit(u_hi) < problem.expected_loss_limit(u_lo) {
        (g_hi, u_hi)
    } else {
        (g_lo, u_lo)
    };
    finish(g, u, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian(m: usize, m0: usize, delta: f64, gamma: f64) -> AsymptoticProblem {
        AsymptoticProblem::gaussian(m, m0, 0.05, 1.0, delta, gamma).unwrap()
    }

    #[test]
    fn constructor_checks() {
        assert!(AsymptoticProblem::gaussian(100, 0, 0.05, 1.0, 2.0, 0.5).is_err());
        assert!(AsymptoticProblem::gaussian(100, 100, 0.05, 1.0, 2.0, 0.5).is_err());
        assert!(AsymptoticProblem::gaussian(100, 90, 0.05, 0.5, 2.0, 0.5).is_err());
        assert!(AsymptoticProblem::gaussian(100, 90, 1.5, 1.0, 2.0, 0.5).is_err());
        let table = ScalingFunction::table(vec![1.0, 2.0]).unwrap();
        assert!(AsymptoticProblem::new(100, 90, 0.05, 1.0, Cdf::Uniform, table).is_err());
    }

    #[test]
    fn linear_alternative_has_algebraic_root() {
        // With s the identity and F(u) = c u + b (capped at 1) the equation is
        // linear: u (m0/alpha - m0 - m1 c) = m1 b.
        let (m, m0, alpha) = (1000usize, 800usize, 0.05);
        let (c, b) = (30.0, 0.002);
        let f = Cdf::custom(move |u: f64| (b + c * u).min(1.0));
        let p = AsymptoticProblem::new(m, m0, alpha, 1.0, f, ScalingFunction::Identity).unwrap();
        let m1 = (m - m0) as f64;
        let expect = m1 * b / (m0 as f64 / alpha - m0 as f64 - m1 * c);
        let u = ustar(&p).unwrap();
        assert!((u - expect).abs() < 1e-12, "{u} vs {expect}");
    }

    #[test]
    fn uniform_alternative_is_degenerate() {
        let p = gaussian(1000, 900, 0.0, 1.0);
        assert!(matches!(ustar(&p), Err(Error::NoSolution(_))));
    }

    #[test]
    fn ustar_matches_fine_scan() {
        let p = gaussian(1000, 900, 4.0, 1.0);
        let u = ustar(&p).unwrap();
        // Independent uniform scan of the residual at resolution 1e-9.
        let (mut last_neg, mut prev) = (0.0, f64::NAN);
        let n = (p.u_max() / 1e-9) as usize;
        for i in 1..=n {
            let x = i as f64 * 1e-9;
            let h = p.fixed_point_residual(x);
            if h <= 0.0 {
                last_neg = x;
            }
            prev = h;
        }
        assert!(prev > 0.0);
        assert!((u - last_neg).abs() <= 1e-9, "{u} vs {last_neg}");
    }

    #[test]
    fn ustar_residual_small() {
        for &(m, m0, delta) in &[(1000, 900, 2.0), (1000, 990, 4.0), (10_000, 9000, 1.0), (200, 100, 3.0)] {
            for &gamma in &[0.05, 0.3, 0.5, 0.8, 1.0] {
                let p = gaussian(m, m0, delta, gamma);
                let u = ustar(&p).unwrap();
                assert!(u > 0.0 && u <= p.u_max());
                if u < p.u_max() {
                    assert!(p.fixed_point_residual(u).abs() < 1e-10 * m as f64);
                }
            }
        }
    }

    #[test]
    fn ustar_grows_with_gamma() {
        let mut prev = 0.0;
        for i in 0..=20 {
            let g = 0.05 + 0.95 * i as f64 / 20.0;
            let u = ustar(&gaussian(1000, 900, 2.0, g)).unwrap();
            assert!(u >= prev);
            prev = u;
        }
    }

    #[test]
    fn bonferroni_branch() {
        let p = AsymptoticProblem::gaussian(1000, 900, 0.05, 3.0, 2.0, 0.0).unwrap();
        let u = ustar(&p).unwrap();
        assert_eq!(u, 0.05 / 1000.0);
        let f = Cdf::GaussianShift { delta: 2.0 }.eval(u);
        assert!((asymptotic_loss(&p, u) - (3.0 * 900.0 * u - 100.0 * f)).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_loss_examples() {
        let p = AsymptoticProblem::gaussian(1000, 900, 0.05, 1.0, 2.0, 0.5).unwrap();
        let u = 0.01;
        let v = p.v(u);
        assert!((asymptotic_loss(&p, u) + v * v).abs() < 1e-12);
        // v = 1, gamma = 0.5, lambda = 2, alpha = 0.05
        let p = p.with_lambda(2.0).unwrap();
        let u = 0.05 / 900.0;
        assert!((asymptotic_loss(&p, u) + 0.95).abs() < 1e-12);
    }

    #[test]
    fn delta_method_examples() {
        assert!((sev_delta_approx(900.0, 100.0, 0.01, 0.5, 0.0).unwrap() - 9.0).abs() < 1e-12);
        assert!((sev_delta_approx(900.0, 100.0, 0.01, 0.5, 1.0).unwrap() - 9.0 / 59.0).abs() < 1e-15);
        let x = sev_delta_approx(900.0, 100.0, 0.01, 0.5, 0.5).unwrap();
        assert!((x - 9.0 / 59f64.sqrt()).abs() < 1e-12);
        assert!((x - 1.17170).abs() < 1e-5);
        assert!(sev_delta_approx(900.0, 100.0, 0.0, 0.0, 0.5).is_err());

        let v = sev_delta_variance(900.0, 100.0, 0.01, 0.5, 0.0).unwrap();
        assert!((v - 900.0 * 0.01 * 0.99).abs() < 1e-12);
        // p1 = 1 removes the T term.
        let (m0, m1, p0, g) = (900.0f64, 100.0f64, 0.01f64, 0.5f64);
        let mu = m0 * p0 + m1;
        let first = ((1.0 - g) * m0 * p0 + m1).powi(2) * (1.0 - p0) * m0 * p0 / mu.powf(2.0 * g + 2.0);
        assert!((sev_delta_variance(m0, m1, p0, 1.0, g).unwrap() - first).abs() < 1e-15);
    }

    #[test]
    fn optimal_gamma_small_price_is_fdr() {
        let p = AsymptoticProblem::gaussian(1000, 900, 0.05, 1.0 + 1e-9, 2.0, 1.0).unwrap();
        let sol = optimal_gamma(&p).unwrap();
        assert!(sol.gamma > 0.95, "{sol:?}");
    }

    #[test]
    fn optimal_gamma_interior_residuals() {
        let p = AsymptoticProblem::gaussian(1000, 990, 0.05, 5.0, 2.0, 1.0).unwrap();
        let sol = optimal_gamma(&p).unwrap();
        assert!(!sol.boundary, "{sol:?}");
        assert!(sol.residual_threshold < 1e-8 && sol.residual_stationarity < 1e-8, "{sol:?}");
        assert!(sol.gamma > 0.3 && sol.gamma < 0.7, "{sol:?}");
    }

    #[test]
    fn optimal_gamma_nonincreasing_in_lambda() {
        // (m0 = 990, delta = 2) is left out: there u* shrinks as gamma grows
        // and fewer than one rejection is expected at every gamma.
        for &(m0, delta) in &[(950, 2.0), (900, 2.0), (990, 4.0), (900, 4.0)] {
            let base = AsymptoticProblem::gaussian(1000, m0, 0.05, 1.0, delta, 1.0).unwrap();
            let mut prev = f64::INFINITY;
            for lambda in log_grid(1.0, 100.0, 12) {
                let g = optimal_gamma(&base.with_lambda(lambda).unwrap()).unwrap().gamma;
                assert!(g <= prev + 1e-9, "m0 {m0}, delta {delta}, lambda {lambda}");
                prev = g;
            }
        }
    }

    #[test]
    fn sparse_weak_signal_is_reported() {
        let p = AsymptoticProblem::gaussian(1000, 990, 0.05, 6.0, 2.0, 1.0).unwrap();
        let sol = optimal_gamma(&p).unwrap();
        assert!(sol.expected_rejections < 1.0, "{sol:?}");
        let b = 6.0 * 990.0 * 5e-5 - 10.0 * Cdf::GaussianShift { delta: 2.0 }.eval(5e-5);
        assert!((sol.bonferroni_loss - b).abs() < 1e-12);
    }

    #[test]
    fn few_strong_alternatives_approach_one_half() {
        let base = AsymptoticProblem::gaussian(1000, 990, 0.05, 1.0, 4.0, 1.0).unwrap();
        for lambda in [7.0, 8.0, 9.0] {
            let g = optimal_gamma(&base.with_lambda(lambda).unwrap()).unwrap().gamma;
            assert!((0.4..=0.6).contains(&g), "lambda {lambda}: {g}");
        }
    }

    #[test]
    fn optimal_gamma_infeasible() {
        let p = AsymptoticProblem::gaussian(1000, 900, 0.05, 2.0, 0.0, 1.0).unwrap();
        assert!(matches!(optimal_gamma(&p), Err(Error::NoSolution(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn delta_variance_nonnegative(m0 in 1.0f64..1e4, m1 in 0.0f64..1e4, p0 in 1e-6f64..1.0, p1 in 0.0f64..1.0, g in 0.0f64..1.0) {
            prop_assert!(sev_delta_variance(m0, m1, p0, p1, g).unwrap() >= 0.0);
        }
    }
}
