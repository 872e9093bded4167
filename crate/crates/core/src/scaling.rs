//! Scaling functions and the step-up threshold sequences they induce.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A nondecreasing positive function on `{1, ..., m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalingFunction {
    /// `s(r) = 1`: the Bonferroni / PFER end of the family.
    Constant,
    /// `s(r) = r`: the linear step-up (FDR) end of the family.
    Identity,
    /// `s(r) = r^gamma` with `gamma` in `[0, 1]`.
    Power { gamma: f64 },
    /// User supplied values `s(1), ..., s(m)`.
    Table { values: Vec<f64> },
}

impl ScalingFunction {
    pub fn power(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::domain(format!("gamma = {gamma} outside [0, 1]")));
        }
        Ok(ScalingFunction::Power { gamma })
    }

    /// Validates positivity and monotonicity of a user table.
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("empty scaling table"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::domain(format!(
                "scaling table entry s({}) = {v} is not a positive finite number",
                i + 1
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::domain(format!(
                "scaling table decreases at r = {}: {} > {}",
                i + 2,
                values[i],
                values[i + 1]
            )));
        }
        Ok(ScalingFunction::Table { values })
    }

    /// Exponent of the power family, when this function belongs to it.
    pub fn gamma(&self) -> Option<f64> {
        match self {
            ScalingFunction::Constant => Some(0.0),
            ScalingFunction::Identity => Some(1.0),
            ScalingFunction::Power { gamma } => Some(*gamma),
            ScalingFunction::Table { .. } => None,
        }
    }

    /// Largest `r` this function is defined for, if bounded.
    pub fn domain_max(&self) -> Option<usize> {
        match self {
            ScalingFunction::Table { values } => Some(values.len()),
            _ => None,
        }
    }

    /// `s(r)` for `r >= 1`.
    pub fn eval(&self, r: usize) -> Result<f64> {
        if r == 0 {
            return Err(Error::domain("scaling functions are defined on r >= 1"));
        }
        Ok(match self {
            ScalingFunction::Constant => 1.0,
            ScalingFunction::Identity => r as f64,
            ScalingFunction::Power { gamma } => (r as f64).powf(*gamma),
            ScalingFunction::Table { values } => *values.get(r - 1).ok_or_else(|| {
                Error::domain(format!(
                    "r = {r} outside the table domain 1..={}",
                    values.len()
                ))
            })?,
        })
    }

    /// `s(r)` with `r` checked against `1..=m`.
    pub fn eval_in(&self, r: usize, m: usize) -> Result<f64> {
        if r > m {
            return Err(Error::domain(format!("r = {r} outside 1..={m}")));
        }
        self.eval(r)
    }

    /// `s(r v 1)`, the denominator of the scaled false discovery proportion.
    pub fn eval_floor1(&self, r: usize) -> Result<f64> {
        self.eval(r.max(1))
    }

    /// Values `s(1), ..., s(m)`.
    pub fn values(&self, m: usize) -> Result<Vec<f64>> {
        (1..=m).map(|r| self.eval(r)).collect()
    }

    /// Checks that `s` is defined, positive and nondecreasing on `1..=m`.
    pub fn validate_on(&self, m: usize) -> Result<()> {
        if let ScalingFunction::Power { gamma } = self {
            if !(0.0..=1.0).contains(gamma) {
                return Err(Error::domain(format!("gamma = {gamma} outside [0, 1]")));
            }
        }
        if let Some(max) = self.domain_max() {
            if max < m {
                return Err(Error::domain(format!(
                    "scaling table has {max} entries but m = {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            ScalingFunction::Constant => "constant".into(),
            ScalingFunction::Identity => "identity".into(),
            ScalingFunction::Power { gamma } => format!("power({gamma})"),
            ScalingFunction::Table { values } => format!("table[{}]", values.len()),
        }
    }
}

/// Nondecreasing step-up thresholds `t_1 <= ... <= t_m` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSequence {
    thresholds: Vec<f64>,
    /// Level used to build the sequence; `None` for sequences given directly.
    alpha: Option<f64>,
}

impl ThresholdSequence {
    /// Wraps an arbitrary sequence, checking `0 <= t_1 <= ... <= t_m <= 1`.
    pub fn from_values(thresholds: Vec<f64>) -> Result<Self> {
        check_thresholds(&thresholds)?;
        Ok(Self {
            thresholds,
            alpha: None,
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn m(&self) -> usize {
        self.thresholds.len()
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// `t_r` for `r` in `1..=m`.
    pub fn get(&self, r: usize) -> Option<f64> {
        r.checked_sub(1).and_then(|i| self.thresholds.get(i).copied())
    }

    pub fn last(&self) -> f64 {
        *self.thresholds.last().expect("threshold sequences are nonempty")
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.thresholds
    }
}

pub(crate) fn check_thresholds(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::contract("empty threshold sequence"));
    }
    if let Some(x) = t.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidThreshold(format!("{x} is not a probability")));
    }
    if let Some(i) = t.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::contract(format!(
            "thresholds decrease at position {}: {} > {}",
            i + 2,
            t[i],
            t[i + 1]
        )));
    }
    Ok(())
}

/// `t_i = alpha * s(i) / m` for `i = 1..=m`.
pub fn build_thresholds(s: &ScalingFunction, m: usize, alpha: f64) -> Result<ThresholdSequence> {
    if m == 0 {
        return Err(Error::domain("m must be at least 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 1)")));
    }
    s.validate_on(m)?;
    let mf = m as f64;
    let thresholds = (1..=m)
        .map(|i| s.eval(i).map(|si| alpha * si / mf))
        .collect::<Result<Vec<_>>>()?;
    let last = thresholds[m - 1];
    if last > 1.0 {
        return Err(Error::InvalidThreshold(format!(
            "t_m = alpha * s(m) / m = {last} exceeds 1"
        )));
    }
    Ok(ThresholdSequence {
        thresholds,
        alpha: Some(alpha),
    })
}
