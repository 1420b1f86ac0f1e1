use crate::error::{Error, Result};
use crate::matroid::WeightedComplex;

use super::up_operator;

/// A non-negative real function on one level set, indexed like `M(level)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelFunction {
    pub level: usize,
    pub values: Vec<f64>,
    /// Set when the values were scaled to unit expectation.
    pub normalized: bool,
}

impl LevelFunction {
    pub fn new(level: usize, values: Vec<f64>) -> Result<Self> {
        if let Some(x) = values.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidFunction(format!("value {x} is not a finite non-negative number")));
        }
        Ok(LevelFunction { level, values, normalized: false })
    }

    pub fn constant(level: usize, len: usize, c: f64) -> Result<Self> {
        Self::new(level, vec![c; len])
    }

    pub fn expectation(&self, pi: &[f64]) -> f64 {
        pi.iter().zip(&self.values).map(|(p, f)| p * f).sum()
    }

    /// Rescales so that the expectation under `pi` is one.
    pub fn normalize(mut self, pi: &[f64]) -> Result<Self> {
        let e = self.expectation(pi);
        if !(e > 0.0) {
            return Err(Error::InvalidFunction("cannot normalise a function with zero mean".into()));
        }
        for v in &mut self.values {
            *v /= e;
        }
        self.normalized = true;
        Ok(self)
    }
}

/// Pushes `f` on `M(k)` down to `M(target)` by applying the up operators
/// `P_up(target) ... P_up(k-1)`, so that the value at `J` is the conditional
/// expectation of `f` over the sets above `J`.
pub fn push_down(wc: &WeightedComplex, f: &LevelFunction, target: usize) -> Result<LevelFunction> {
    let k = f.level;
    if target > k || k > wc.rank() {
        return Err(Error::InvalidArgument(format!("cannot push level {k} down to {target}")));
    }
    if f.values.len() != wc.level(k).len() {
        return Err(Error::InvalidFunction(format!(
            "function has {} values but M({k}) has {} sets",
            f.values.len(),
            wc.level(k).len()
        )));
    }
    if f.values.iter().any(|x| *x < 0.0) {
        return Err(Error::InvalidFunction("negative values".into()));
    }
    let mut values = f.values.clone();
    for j in (target..k).rev() {
        values = up_operator(wc, j)?.apply(&values);
    }
    Ok(LevelFunction { level: target, values, normalized: f.normalized })
}
