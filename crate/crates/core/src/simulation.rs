//! Monte Carlo evaluation of `SU_gamma` under independent one-sided
//! Gaussian tests.
//!
//! Each replication draws `m0` uniform null p-values followed by `m1`
//! alternative p-values `1 - Phi(Z + delta)`. Replication `k` uses its own
//! ChaCha8 stream (`seed`, stream `k`), and per-replication counts are
//! reduced in replication order, so results do not depend on how many
//! threads did the work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::normal;
use crate::procedures::{step_up_count, ErrorCounts};
use crate::roots::log_grid;
use crate::scaling::{build_thresholds, ScalingFunction};
use crate::summation::Accumulator;
use crate::{Error, Result};

pub const DEFAULT_REPLICATIONS: usize = 10_000;

/// `0, 0.02, ..., 1`.
pub fn default_gamma_grid() -> Vec<f64> {
    (0..=50).map(|i| i as f64 / 50.0).collect()
}

/// 20 log-spaced prices in `[1, 100]`.
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1.0, 100.0, 20)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub m: usize,
    pub m1: usize,
    pub delta: f64,
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
}

impl Scenario {
    /// Scenario with the default grids and replication count.
    pub fn new(m: usize, m1: usize, delta: f64, alpha: f64, seed: u64) -> Result<Self> {
        let s = Self {
            m,
            m1,
            delta,
            alpha,
            lambdas: default_lambda_grid(),
            gammas: default_gamma_grid(),
            replications: DEFAULT_REPLICATIONS,
            seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_replications(mut self, replications: usize) -> Result<Self> {
        self.replications = replications;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gammas(mut self, gammas: Vec<f64>) -> Result<Self> {
        self.gammas = gammas;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lambdas(mut self, lambdas: Vec<f64>) -> Result<Self> {
        self.lambdas = lambdas;
        self.validate()?;
        Ok(self)
    }

    pub fn m0(&self) -> usize {
        self.m - self.m1
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m1 >= self.m {
            return Err(Error::domain(format!(
                "need m >= 1 and m1 < m, got m = {}, m1 = {}",
                self.m, self.m1
            )));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::domain(format!("effect delta = {} must be >= 0", self.delta)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        if self.replications == 0 {
            return Err(Error::domain("replications must be >= 1"));
        }
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return Err(Error::domain("gamma grid must be nonempty and inside [0, 1]"));
        }
        if self.lambdas.iter().any(|l| !(l.is_finite() && *l >= 1.0)) {
            return Err(Error::domain("price grid values must be >= 1"));
        }
        // alpha * m^gamma / m <= alpha, so thresholds are always valid.
        Ok(())
    }
}

/// The random generator for replication `rep`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// P-values and truth labels (`true` = null) for one replication; the
/// `m0` nulls come first.
pub fn generate_pvalues(scenario: &Scenario, rep: u64) -> (Vec<f64>, Vec<bool>) {
    let mut rng = replication_rng(scenario.seed, rep);
    let m0 = scenario.m0();
    let mut p = Vec::with_capacity(scenario.m);
    p.extend((0..m0).map(|_| rng.random::<f64>()));
    p.extend((0..scenario.m1).map(|_| {
        let z: f64 = rng.sample(StandardNormal);
        normal::sf(z + scenario.delta)
    }));
    let mut truth = vec![true; m0];
    truth.resize(scenario.m, false);
    (p, truth)
}

/// `(V, T)` for every threshold set on one replication.
fn replicate(scenario: &Scenario, thresholds: &[Vec<f64>], rep: u64) -> Vec<ErrorCounts> {
    let (p, truth) = generate_pvalues(scenario, rep);
    let mut pairs: Vec<(f64, bool)> = p.into_iter().zip(truth).collect();
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let sorted: Vec<f64> = pairs.iter().map(|x| x.0).collect();
    let mut nulls_below = Vec::with_capacity(pairs.len() + 1);
    nulls_below.push(0usize);
    for (_, is_null) in &pairs {
        nulls_below.push(nulls_below.last().unwrap() + *is_null as usize);
    }
    thresholds
        .iter()
        .map(|t| {
            let r = step_up_count(&sorted, t);
            let v = nulls_below[r];
            ErrorCounts { v, t: r - v }
        })
        .collect()
}

/// Sample mean and standard error of `V / s(R v 1)` and of `V / (R v 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SevFdr {
    pub sev: f64,
    pub sev_se: f64,
    pub fdr: f64,
    pub fdr_se: f64,
}

fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut sum, mut sq) = (0usize, Accumulator::new(true), Accumulator::new(true));
    let xs: Vec<f64> = xs.collect();
    for &x in &xs {
        n += 1;
        sum.add(x);
    }
    let mean = sum.total() / n as f64;
    for &x in &xs {
        sq.add((x - mean) * (x - mean));
    }
    let var = if n > 1 { sq.total() / (n - 1) as f64 } else { 0.0 };
    (mean, (var / n as f64).sqrt())
}

pub fn empirical_sev_fdr(results: &[ErrorCounts], s: &ScalingFunction) -> Result<SevFdr> {
    if results.len() < 2 {
        return Err(Error::domain("need at least two replications"));
    }
    let sev: Vec<f64> = results
        .iter()
        .map(|c| Ok(c.v as f64 / s.eval_floor1(c.r())?))
        .collect::<Result<_>>()?;
    let (sev, sev_se) = mean_se(sev.into_iter());
    let (fdr, fdr_se) = mean_se(results.iter().map(|c| c.v as f64 / c.r().max(1) as f64));
    Ok(SevFdr { sev, sev_se, fdr, fdr_se })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaSummary {
    pub gamma: f64,
    pub mean_v: f64,
    pub mean_t: f64,
    pub mean_r: f64,
    pub sev: f64,
    pub sev_se: f64,
    pub fdr: f64,
    pub fdr_se: f64,
    /// `E[T] / m1`; absent when there are no alternatives.
    pub power: Option<f64>,
    /// Fraction of replications with `V >= 1`.
    pub fwer: f64,
    pub fwer_se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossCell {
    pub gamma: f64,
    pub lambda: f64,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArgminGamma {
    pub lambda: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub scenario: Scenario,
    pub per_gamma: Vec<GammaSummary>,
    /// Gamma-major: all prices for the first gamma, then the next.
    pub loss: Vec<LossCell>,
    pub argmin: Vec<ArgminGamma>,
}

impl SimulationResult {
    pub fn loss_at(&self, gamma_index: usize, lambda_index: usize) -> &LossCell {
        &self.loss[gamma_index * self.scenario.lambdas.len() + lambda_index]
    }
}

/// Per-replication `(V, T)` for each gamma of the grid, in replication order.
pub fn simulate_counts(scenario: &Scenario) -> Result<Vec<Vec<ErrorCounts>>> {
    scenario.validate()?;
    let thresholds: Vec<Vec<f64>> = scenario
        .gammas
        .iter()
        .map(|&g| Ok(build_thresholds(&ScalingFunction::power(g)?, scenario.m, scenario.alpha)?.into_vec()))
        .collect::<Result<_>>()?;
    Ok((0..scenario.replications as u64)
        .into_par_iter()
        .map(|rep| replicate(scenario, &thresholds, rep))
        .collect())
}

/// Runs every replication on the current rayon pool and summarises.
pub fn run_grid(scenario: &Scenario) -> Result<SimulationResult> {
    let counts = simulate_counts(scenario)?;
    summarize(scenario, &counts)
}

/// As [`run_grid`] on a dedicated pool of `threads` workers.
pub fn run_grid_with_threads(scenario: &Scenario, threads: usize) -> Result<SimulationResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::contract(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_grid(scenario))
}

fn summarize(scenario: &Scenario, counts: &[Vec<ErrorCounts>]) -> Result<SimulationResult> {
    let n = counts.len() as f64;
    let mut per_gamma = Vec::with_capacity(scenario.gammas.len());
    let mut loss = Vec::with_capacity(scenario.gammas.len() * scenario.lambdas.len());
    for (k, &gamma) in scenario.gammas.iter().enumerate() {
        let column: Vec<ErrorCounts> = counts.iter().map(|c| c[k]).collect();
        // Integer moments keep the reduction exact.
        let (mut sv, mut st, mut svv, mut stt, mut svt, mut hits) = (0u128, 0u128, 0u128, 0u128, 0u128, 0usize);
        for c in &column {
            let (v, t) = (c.v as u128, c.t as u128);
            sv += v;
            st += t;
            svv += v * v;
            stt += t * t;
            svt += v * t;
            hits += (c.v >= 1) as usize;
        }
        let mean_v = sv as f64 / n;
        let mean_t = st as f64 / n;
        let sef = if column.len() >= 2 {
            empirical_sev_fdr(&column, &ScalingFunction::power(gamma)?)?
        } else {
            let c = column[0];
            let sev = c.v as f64 / (c.r().max(1) as f64).powf(gamma);
            let fdr = c.v as f64 / c.r().max(1) as f64;
            SevFdr { sev, sev_se: 0.0, fdr, fdr_se: 0.0 }
        };
        let fwer = hits as f64 / n;
        per_gamma.push(GammaSummary {
            gamma,
            mean_v,
            mean_t,
            mean_r: mean_v + mean_t,
            sev: sef.sev,
            sev_se: sef.sev_se,
            fdr: sef.fdr,
            fdr_se: sef.fdr_se,
            power: (scenario.m1 > 0).then(|| mean_t / scenario.m1 as f64),
            fwer,
            fwer_se: (fwer * (1.0 - fwer) / n).sqrt(),
        });
        for &lambda in &scenario.lambdas {
            let mean = lambda * mean_v - mean_t;
            let second = lambda * lambda * svv as f64 - 2.0 * lambda * svt as f64 + stt as f64;
            let var = if n > 1.0 { ((second - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
            loss.push(LossCell { gamma, lambda, mean, se: (var / n).sqrt() });
        }
    }
    let nl = scenario.lambdas.len();
    let argmin = scenario
        .lambdas
        .iter()
        .enumerate()
        .map(|(j, &lambda)| {
            let mut best = 0;
            for k in 1..scenario.gammas.len() {
                let (a, b) = (loss[k * nl + j].mean, loss[best * nl + j].mean);
                let smaller_gamma = scenario.gammas[k] < scenario.gammas[best];
                if a < b || (a == b && smaller_gamma) {
                    best = k;
                }
            }
            ArgminGamma { lambda, gamma: scenario.gammas[best] }
        })
        .collect();
    Ok(SimulationResult { scenario: scenario.clone(), per_gamma, loss, argmin })
}
