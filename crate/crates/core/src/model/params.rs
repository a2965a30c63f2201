//! Controller parameter vector for a single vehicle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metres per second in one mile per hour.
pub const MPH: f64 = 0.44704;

/// Converts miles per hour to metres per second.
pub fn mph_to_mps(mph: f64) -> f64 {
    mph * MPH
}

/// Converts metres per second to miles per hour.
pub fn mps_to_mph(mps: f64) -> f64 {
    mps / MPH
}

/// Names every component of [`ControllerParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    V0,
    T,
    A,
    B,
    Delta,
    S0,
    C,
    P,
    ADelta,
    ABias,
    VCrit,
    BSafe,
    Length,
    VMax,
}

impl Param {
    pub const ALL: [Param; 14] = [
        Param::V0,
        Param::T,
        Param::A,
        Param::B,
        Param::Delta,
        Param::S0,
        Param::C,
        Param::P,
        Param::ADelta,
        Param::ABias,
        Param::VCrit,
        Param::BSafe,
        Param::Length,
        Param::VMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::V0 => "v0",
            Param::T => "T",
            Param::A => "a",
            Param::B => "b",
            Param::Delta => "delta",
            Param::S0 => "s0",
            Param::C => "c",
            Param::P => "p",
            Param::ADelta => "a_delta",
            Param::ABias => "a_bias",
            Param::VCrit => "v_crit",
            Param::BSafe => "b_safe",
            Param::Length => "L",
            Param::VMax => "v_max",
        }
    }

    pub fn from_name(name: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == name)
    }

    /// True for parameters whose bounds are written in mph.
    pub fn is_velocity(self) -> bool {
        matches!(self, Param::V0 | Param::VCrit | Param::VMax)
    }
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// E-IDM longitudinal and MOBIL lateral parameters of one controller.
///
/// All quantities are SI: metres, seconds, m/s and m/s². Decelerations
/// (`b`, `b_safe`) are stored as positive magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    pub v0: f64,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub s0: f64,
    pub c: f64,
    pub p: f64,
    pub a_delta: f64,
    pub a_bias: f64,
    pub v_crit: f64,
    pub b_safe: f64,
    pub length: f64,
    pub v_max: f64,
}

impl ControllerParams {
    pub fn get(&self, param: Param) -> f64 {
        match param {
            Param::V0 => self.v0,
            Param::T => self.t,
            Param::A => self.a,
            Param::B => self.b,
            Param::Delta => self.delta,
            Param::S0 => self.s0,
            Param::C => self.c,
            Param::P => self.p,
            Param::ADelta => self.a_delta,
            Param::ABias => self.a_bias,
            Param::VCrit => self.v_crit,
            Param::BSafe => self.b_safe,
            Param::Length => self.length,
            Param::VMax => self.v_max,
        }
    }

    pub fn set(&mut self, param: Param, value: f64) {
        let slot = match param {
            Param::V0 => &mut self.v0,
            Param::T => &mut self.t,
            Param::A => &mut self.a,
            Param::B => &mut self.b,
            Param::Delta => &mut self.delta,
            Param::S0 => &mut self.s0,
            Param::C => &mut self.c,
            Param::P => &mut self.p,
            Param::ADelta => &mut self.a_delta,
            Param::ABias => &mut self.a_bias,
            Param::VCrit => &mut self.v_crit,
            Param::BSafe => &mut self.b_safe,
            Param::Length => &mut self.length,
            Param::VMax => &mut self.v_max,
        };
        *slot = value;
    }

    /// Checks the sign and range constraints every controller must meet.
    ///
    /// `a_delta` may be zero because the bounds table allows it; `p` may be
    /// any finite value.
    pub fn validate(&self) -> Result<()> {
        for param in Param::ALL {
            let value = self.get(param);
            if !value.is_finite() {
                return Err(Error::InvalidParam {
                    name: param.name(),
                    value,
                    reason: "not finite",
                });
            }
            let ok = match param {
                Param::C => (0.0..1.0).contains(&value),
                Param::P => true,
                Param::ADelta | Param::ABias => value >= 0.0,
                _ => value > 0.0,
            };
            if !ok {
                let reason = match param {
                    Param::C => "must lie in [0, 1)",
                    Param::ADelta | Param::ABias => "must be non-negative",
                    _ => "must be strictly positive",
                };
                return Err(Error::InvalidParam {
                    name: param.name(),
                    value,
                    reason,
                });
            }
        }
        Ok(())
    }

    /// Midpoint of the default bounds with the fixed values for `T`, `c`
    /// and `b_safe`.
    pub fn midrange() -> Self {
        let bounds = crate::sampler::ParamBounds::default();
        bounds.midpoint()
    }
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self::midrange()
    }
}
