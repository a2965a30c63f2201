//! One-factor-at-a-time sweeps with a correlation significance test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// p-values below this are reported as significant.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfatResult {
    pub factor: String,
    pub sweep: Vec<f64>,
    pub outputs: Vec<f64>,
    /// Pearson correlation between sweep values and outputs.
    pub r: f64,
    /// Two-tailed p-value of the t-test on `r`.
    pub p_value: f64,
    /// Inputs or outputs were constant, so `r` is undefined (reported as 0, p = 1).
    pub degenerate: bool,
}

impl OfatResult {
    /// Correlation test on paired observations.
    pub fn from_samples(factor: impl Into<String>, sweep: Vec<f64>, outputs: Vec<f64>) -> Result<Self> {
        if sweep.len() != outputs.len() {
            return Err(Error::OutputLength {
                expected: sweep.len(),
                got: outputs.len(),
            });
        }
        if sweep.len() < 3 {
            return Err(Error::InvalidConfig(format!("a sweep needs at least 3 values, got {}", sweep.len())));
        }
        let (r, p_value, degenerate) = match pearson(&sweep, &outputs) {
            Some(r) => (r, correlation_p_value(r, sweep.len()), false),
            None => (0.0, 1.0, true),
        };
        Ok(Self {
            factor: factor.into(),
            sweep,
            outputs,
            r,
            p_value,
            degenerate,
        })
    }

    pub fn is_significant(&self) -> bool {
        !self.degenerate && self.p_value < SIGNIFICANCE_LEVEL
    }
}

/// Pearson correlation, `None` when either sample has no spread.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x[..n].iter().zip(&y[..n]) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let tol = 1e-24;
    if sxx <= tol * (1.0 + mx * mx) * n as f64 || syy <= tol * (1.0 + my * my) * n as f64 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-tailed p-value of `t = r sqrt((n - 2) / (1 - r²))` under a Student t
/// distribution with `n - 2` degrees of freedom.
pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    if n < 3 {
        return 1.0;
    }
    let df = (n - 2) as f64;
    let denom = 1.0 - r * r;
    if denom <= 0.0 {
        return 0.0;
    }
    let t = r.abs() * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t)).clamp(0.0, 1.0)
}

/// Evaluates `evaluate` at each sweep value and tests for correlation.
pub fn ofat_sweep<F>(factor: impl Into<String>, sweep: &[f64], mut evaluate: F) -> Result<OfatResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if sweep.len() < 3 {
        return Err(Error::InvalidConfig(format!("a sweep needs at least 3 values, got {}", sweep.len())));
    }
    let outputs = sweep.iter().map(|&x| evaluate(x)).collect::<Result<Vec<_>>>()?;
    OfatResult::from_samples(factor, sweep.to_vec(), outputs)
}
