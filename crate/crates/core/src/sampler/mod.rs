//! Heterogeneous fleet generation.
//!
//! Each sampled parameter is drawn from an independent Gaussian centred on
//! the fleet mean with standard deviation `(σ/2)(θ_max - θ_min)`, then
//! clamped into `[θ_min, θ_max]`. `T`, `c` and `b_safe` are fleet constants.

mod bounds;
mod rng;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub use bounds::{
    is_sampled, ParamBounds, PerParam, DEFAULT_B_SAFE, FIXED_COOLNESS, FIXED_HEADWAY,
    SAMPLED_PARAMS,
};
pub use rng::{derive_seed, label_hash, stream_rng};

use crate::error::{Error, Result};
use crate::model::{ControllerParams, Param};

/// Sampling distribution of a heterogeneous fleet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FleetSpec {
    pub bounds: ParamBounds,
    /// Fleet mean θ̄. Non-sampled fields carry the fixed values.
    pub mean: ControllerParams,
    /// Per-parameter heterogeneity σ_i; ignored for non-sampled parameters.
    pub sigma: PerParam<f64>,
}

impl FleetSpec {
    /// Same σ for every sampled parameter.
    pub fn new(bounds: ParamBounds, mean: ControllerParams, sigma: f64) -> Self {
        let mut spec = Self {
            bounds,
            mean,
            sigma: PerParam::splat(sigma),
        };
        spec.apply_fixed();
        spec
    }

    /// Homogeneous fleet at the midpoint of the default bounds.
    pub fn homogeneous_midrange() -> Self {
        let bounds = ParamBounds::default();
        Self::new(bounds, bounds.midpoint(), 0.0)
    }

    pub fn with_sigma(mut self, param: Param, sigma: f64) -> Self {
        self.sigma[param] = sigma;
        self
    }

    /// Standard deviation of the Gaussian for `param` before capping.
    pub fn std_dev(&self, param: Param) -> f64 {
        0.5 * self.sigma[param] * self.bounds.range(param)
    }

    fn apply_fixed(&mut self) {
        for p in Param::ALL {
            if !is_sampled(p) {
                self.mean.set(p, self.bounds.min[p]);
                self.sigma[p] = 0.0;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        for p in SAMPLED_PARAMS {
            let m = self.mean.get(p);
            if !(m >= self.bounds.min[p] && m <= self.bounds.max[p]) {
                return Err(Error::InvalidConfig(format!(
                    "mean of {p} = {m} outside [{}, {}]",
                    self.bounds.min[p], self.bounds.max[p]
                )));
            }
            let s = self.sigma[p];
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::InvalidConfig(format!("sigma of {p} = {s} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Draws one controller.
///
/// A standard normal is drawn for every sampled parameter even when its σ is
/// zero, so a given random stream yields the same standardized draws for any
/// heterogeneity setting.
pub fn sample_controller<R: Rng + ?Sized>(spec: &FleetSpec, rng: &mut R) -> ControllerParams {
    let mut out = spec.mean;
    for param in SAMPLED_PARAMS {
        let z: f64 = StandardNormal.sample(rng);
        let value = spec.mean.get(param) + spec.std_dev(param) * z;
        out.set(param, spec.bounds.cap(param, value));
    }
    for param in Param::ALL {
        if !is_sampled(param) {
            out.set(param, spec.bounds.min[param]);
        }
    }
    out
}

pub fn sample_fleet<R: Rng + ?Sized>(spec: &FleetSpec, n: usize, rng: &mut R) -> Vec<ControllerParams> {
    (0..n).map(|_| sample_controller(spec, rng)).collect()
}

/// How far the fleet mean is kept from the caps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MarginRule {
    /// Margin of this many sampling standard deviations.
    StdDevs(f64),
}

impl Default for MarginRule {
    fn default() -> Self {
        MarginRule::StdDevs(2.0)
    }
}

impl MarginRule {
    pub fn margin(&self, bounds: &ParamBounds, param: Param, sigma: f64) -> f64 {
        match *self {
            MarginRule::StdDevs(k) => k * 0.5 * sigma * bounds.range(param),
        }
    }
}

/// Draws a fleet mean uniformly from the bounds box shrunk by the margin.
pub fn sample_mean_vector<R: Rng + ?Sized>(
    bounds: &ParamBounds,
    sigma: f64,
    margin_rule: MarginRule,
    rng: &mut R,
) -> Result<ControllerParams> {
    let mut out = bounds.midpoint();
    for param in SAMPLED_PARAMS {
        let margin = margin_rule.margin(bounds, param, sigma);
        let half_range = 0.5 * bounds.range(param);
        if margin > 0.0 && margin >= half_range {
            return Err(Error::EmptyInterval {
                name: param.name(),
                margin,
                half_range,
            });
        }
        let lo = bounds.min[param] + margin;
        let hi = bounds.max[param] - margin;
        let u: f64 = rng.random();
        out.set(param, lo + u * (hi - lo));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_reproduces_mean() {
        let spec = FleetSpec::homogeneous_midrange();
        let mut rng = stream_rng(1, 0);
        for c in sample_fleet(&spec, 100, &mut rng) {
            assert_eq!(c, spec.mean);
        }
    }

    #[test]
    fn fixed_parameters_untouched() {
        let bounds = ParamBounds::default();
        let spec = FleetSpec::new(bounds, bounds.midpoint(), 0.9);
        let mut rng = stream_rng(2, 0);
        for c in sample_fleet(&spec, 500, &mut rng) {
            assert_eq!(c.t, 2.0);
            assert_eq!(c.c, 0.95);
            assert_eq!(c.b_safe, DEFAULT_B_SAFE);
            assert!(bounds.contains(&c));
        }
    }

    #[test]
    fn empty_fleet() {
        let spec = FleetSpec::homogeneous_midrange();
        assert!(sample_fleet(&spec, 0, &mut stream_rng(0, 0)).is_empty());
    }

    #[test]
    fn margin_rule_examples() {
        let bounds = ParamBounds::default();
        let mut rng = stream_rng(3, 0);
        assert!(matches!(
            sample_mean_vector(&bounds, 1.0, MarginRule::default(), &mut rng),
            Err(Error::EmptyInterval { .. })
        ));
        let m = MarginRule::default().margin(&bounds, Param::V0, 0.4);
        assert!((m - 0.4 * bounds.range(Param::V0)).abs() < 1e-12);
        for _ in 0..200 {
            let mean = sample_mean_vector(&bounds, 0.4, MarginRule::default(), &mut rng).unwrap();
            for p in SAMPLED_PARAMS {
                let lo = bounds.min[p] + 0.4 * bounds.range(p);
                let hi = bounds.max[p] - 0.4 * bounds.range(p);
                let v = mean.get(p);
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "{p}: {v}");
            }
        }
    }
}
