use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::model::{mph_to_mps, ControllerParams, Param};

/// Parameters drawn per vehicle, in the order the random draws are made.
pub const SAMPLED_PARAMS: [Param; 11] = [
    Param::P,
    Param::ABias,
    Param::S0,
    Param::VCrit,
    Param::ADelta,
    Param::B,
    Param::Delta,
    Param::Length,
    Param::VMax,
    Param::V0,
    Param::A,
];

pub const FIXED_HEADWAY: f64 = 2.0;
pub const FIXED_COOLNESS: f64 = 0.95;
/// Fleet-wide safe deceleration for the MOBIL safety criterion (m/s²).
pub const DEFAULT_B_SAFE: f64 = 4.0;

pub fn is_sampled(param: Param) -> bool {
    SAMPLED_PARAMS.contains(&param)
}

/// One value per controller parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerParam<T>(pub [T; 14]);

impl<T: Copy> PerParam<T> {
    pub fn splat(value: T) -> Self {
        PerParam([value; 14])
    }
}

impl<T> Index<Param> for PerParam<T> {
    type Output = T;
    fn index(&self, param: Param) -> &T {
        &self.0[param as usize]
    }
}

impl<T> IndexMut<Param> for PerParam<T> {
    fn index_mut(&mut self, param: Param) -> &mut T {
        &mut self.0[param as usize]
    }
}

/// Hard caps `[θ_min, θ_max]` on every parameter, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub min: PerParam<f64>,
    pub max: PerParam<f64>,
}

impl ParamBounds {
    /// The default bounds with mph entries converted to m/s.
    pub fn table() -> Self {
        let mut min = PerParam::splat(0.0);
        let mut max = PerParam::splat(0.0);
        let rows: [(Param, f64, f64); 14] = [
            (Param::P, 0.0, 1.0),
            (Param::ABias, 0.2, 1.0),
            (Param::S0, 3.0, 5.0),
            (Param::VCrit, mph_to_mps(40.0), mph_to_mps(65.0)),
            (Param::ADelta, 0.0, 1.0),
            (Param::B, 4.0, 7.5),
            (Param::Delta, 3.0, 5.0),
            (Param::Length, 3.0, 16.5),
            (Param::VMax, mph_to_mps(70.0), mph_to_mps(150.0)),
            (Param::V0, mph_to_mps(40.0), mph_to_mps(100.0)),
            (Param::A, 0.5, 6.5),
            (Param::T, FIXED_HEADWAY, FIXED_HEADWAY),
            (Param::C, FIXED_COOLNESS, FIXED_COOLNESS),
            (Param::BSafe, DEFAULT_B_SAFE, DEFAULT_B_SAFE),
        ];
        for (param, lo, hi) in rows {
            min[param] = lo;
            max[param] = hi;
        }
        Self { min, max }
    }

    pub fn range(&self, param: Param) -> f64 {
        self.max[param] - self.min[param]
    }

    pub fn cap(&self, param: Param, value: f64) -> f64 {
        value.clamp(self.min[param], self.max[param])
    }

    pub fn contains(&self, params: &ControllerParams) -> bool {
        Param::ALL.into_iter().all(|p| {
            let v = params.get(p);
            v >= self.min[p] && v <= self.max[p]
        })
    }

    pub fn midpoint(&self) -> ControllerParams {
        let mut out = ControllerParams {
            v0: 0.0,
            t: 0.0,
            a: 0.0,
            b: 0.0,
            delta: 0.0,
            s0: 0.0,
            c: 0.0,
            p: 0.0,
            a_delta: 0.0,
            a_bias: 0.0,
            v_crit: 0.0,
            b_safe: 0.0,
            length: 0.0,
            v_max: 0.0,
        };
        for p in Param::ALL {
            out.set(p, 0.5 * (self.min[p] + self.max[p]));
        }
        out
    }

    /// Maps `u ∈ [0, 1]` linearly onto the allowed range of `param`.
    pub fn lerp(&self, param: Param, u: f64) -> f64 {
        self.min[param] + u * self.range(param)
    }

    pub fn validate(&self) -> crate::Result<()> {
        for p in Param::ALL {
            let (lo, hi) = (self.min[p], self.max[p]);
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(crate::Error::InvalidConfig(format!(
                    "bounds for {p} are not an interval: [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self::table()
    }
}
