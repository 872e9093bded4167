//! The two-groups p-value model `G = pi0 * F0 + (1 - pi0) * F1`.

use std::fmt;
use std::sync::Arc;

use crate::normal;
use crate::{Error, Result};

/// A p-value distribution function on `[0, 1]`.
#[derive(Clone)]
pub enum Cdf {
    /// `F(u) = u`, exact p-values under the null.
    Uniform,
    /// One-sided Gaussian test with the statistic shifted by `delta`:
    /// `F(u) = 1 - Phi(z_{1-u} - delta)`.
    GaussianShift { delta: f64 },
    /// Piecewise-linear interpolation through tabulated `(u, F(u))` points.
    Table(PiecewiseLinear),
    /// Arbitrary monotone function handle.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Cdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cdf::Uniform => write!(f, "Uniform"),
            Cdf::GaussianShift { delta } => write!(f, "GaussianShift({delta})"),
            Cdf::Table(t) => write!(f, "Table({} points)", t.u.len()),
            Cdf::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Cdf {
    pub fn gaussian_shift(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::domain(format!("effect delta = {delta} must be >= 0")));
        }
        Ok(Cdf::GaussianShift { delta })
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Cdf::Custom(Arc::new(f))
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        match self {
            Cdf::Uniform => u,
            // 1 - Phi(z_{1-u} - delta) = Phi(delta + Phi^{-1}(u))
            Cdf::GaussianShift { delta } => normal::cdf(delta + normal::quantile(u)),
            Cdf::Table(t) => t.eval(u),
            Cdf::Custom(f) => f(u),
        }
    }

    /// Density `F'(u)` on `(0, 1)`. Tables use the slope of the active
    /// segment; custom handles fall back to a central difference.
    pub fn density(&self, u: f64) -> f64 {
        if !(u > 0.0 && u < 1.0) {
            return 0.0;
        }
        match self {
            Cdf::Uniform => 1.0,
            // phi(delta + q) / phi(q) with q = Phi^{-1}(u)
            Cdf::GaussianShift { delta } => {
                let q = normal::quantile(u);
                (-delta * q - 0.5 * delta * delta).exp()
            }
            Cdf::Table(t) => t.slope(u),
            Cdf::Custom(f) => {
                let h = 1e-6 * u.min(1.0 - u);
                (f(u + h) - f(u - h)) / (2.0 * h)
            }
        }
    }

    /// Grid check that this is a cdf on `[0, 1]`.
    pub fn validate(&self, grid_points: usize) -> Result<()> {
        let n = grid_points.max(2);
        let mut prev = 0.0;
        for i in 0..=n {
            let u = i as f64 / n as f64;
            let f = self.eval(u);
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::domain(format!("F({u}) = {f} outside [0, 1]")));
            }
            if f < prev {
                return Err(Error::domain(format!("cdf decreases near u = {u}")));
            }
            prev = f;
        }
        // The endpoints are pinned by `eval`; check the raw handle too.
        if let Cdf::Custom(f) = self {
            let (f0, f1) = (f(0.0), f(1.0));
            if f0 != 0.0 || f1 != 1.0 {
                return Err(Error::domain(format!(
                    "custom cdf must satisfy F(0) = 0 and F(1) = 1, got {f0} and {f1}"
                )));
            }
        }
        Ok(())
    }
}

/// Tabulated cdf with linear interpolation between knots.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    u: Vec<f64>,
    f: Vec<f64>,
}

impl PiecewiseLinear {
    /// Knots must start at `(0, 0)`, end at `(1, 1)`, have strictly
    /// increasing `u` and nondecreasing `F`.
    pub fn new(u: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if u.len() != f.len() || u.len() < 2 {
            return Err(Error::contract("cdf table needs at least two (u, F) pairs"));
        }
        if u[0] != 0.0 || f[0] != 0.0 || *u.last().unwrap() != 1.0 || *f.last().unwrap() != 1.0 {
            return Err(Error::domain("cdf table must start at (0, 0) and end at (1, 1)"));
        }
        if u.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("cdf table u values must increase strictly"));
        }
        if f.windows(2).any(|w| w[1] < w[0]) || f.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::domain("cdf table F values must be nondecreasing in [0, 1]"));
        }
        Ok(Self { u, f })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.u.partition_point(|&u| u <= x);
        if k == 0 {
            return self.f[0];
        }
        if k >= self.u.len() {
            return *self.f.last().unwrap();
        }
        let (u0, u1) = (self.u[k - 1], self.u[k]);
        let (f0, f1) = (self.f[k - 1], self.f[k]);
        if x == u0 {
            return f0;
        }
        f0 + (f1 - f0) * (x - u0) / (u1 - u0)
    }

    /// Right-continuous slope at `x`.
    pub fn slope(&self, x: f64) -> f64 {
        let k = self.u.partition_point(|&u| u <= x).clamp(1, self.u.len() - 1);
        (self.f[k] - self.f[k - 1]) / (self.u[k] - self.u[k - 1])
    }
}

/// Unconditional two-groups model over `m` hypotheses: each is null with
/// probability `pi0`, null p-values follow `F0`, alternatives `F1`.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    m: usize,
    pi0: f64,
    null: Cdf,
    alternative: Cdf,
}

const VALIDATION_GRID: usize = 1000;

impl MixtureModel {
    pub fn new(m: usize, pi0: f64, alternative: Cdf) -> Result<Self> {
        Self::with_null(m, pi0, Cdf::Uniform, alternative)
    }

    pub fn with_null(m: usize, pi0: f64, null: Cdf, alternative: Cdf) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("m must be at least 1"));
        }
        if !(0.0..=1.0).contains(&pi0) {
            return Err(Error::domain(format!("pi0 = {pi0} outside [0, 1]")));
        }
        if let Cdf::GaussianShift { delta } = alternative {
            Cdf::gaussian_shift(delta)?;
        }
        null.validate(VALIDATION_GRID)?;
        alternative.validate(VALIDATION_GRID)?;
        Ok(Self {
            m,
            pi0,
            null,
            alternative,
        })
    }

    /// `pi0 = m0 / m`.
    pub fn from_counts(m: usize, m0: usize, alternative: Cdf) -> Result<Self> {
        if m0 > m {
            return Err(Error::domain(format!("m0 = {m0} exceeds m = {m}")));
        }
        Self::new(m, m0 as f64 / m.max(1) as f64, alternative)
    }

    /// Gaussian one-sided model with effect `delta`.
    pub fn gaussian(m: usize, pi0: f64, delta: f64) -> Result<Self> {
        Self::new(m, pi0, Cdf::gaussian_shift(delta)?)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    pub fn pi1(&self) -> f64 {
        1.0 - self.pi0
    }

    pub fn null(&self) -> &Cdf {
        &self.null
    }

    pub fn alternative(&self) -> &Cdf {
        &self.alternative
    }

    pub fn f0(&self, u: f64) -> f64 {
        self.null.eval(u)
    }

    pub fn f1(&self, u: f64) -> f64 {
        self.alternative.eval(u)
    }

    /// `G(u) = pi0 F0(u) + (1 - pi0) F1(u)`.
    pub fn g(&self, u: f64) -> f64 {
        let g = self.pi0 * self.f0(u) + self.pi1() * self.f1(u);
        g.clamp(0.0, 1.0)
    }
}

/// `G(u)` with the domain checked.
pub fn mixture_cdf(model: &MixtureModel, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain(format!("u = {u} outside [0, 1]")));
    }
    Ok(model.g(u))
}
