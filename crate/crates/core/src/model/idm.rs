//! Intelligent Driver Model and its coolness-factor enhancement.

use super::ControllerParams;
use crate::error::{Error, Result};

/// Hard lower bound on commanded acceleration (m/s²).
pub const DEFAULT_EMERGENCY_DECEL: f64 = 9.0;

/// Situation of a vehicle relative to the vehicle ahead.
///
/// A free road is represented by an infinite gap, which makes the
/// interaction term vanish exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongitudinalContext {
    /// Ego velocity (m/s).
    pub v: f64,
    /// Bumper-to-bumper gap to the leader (m).
    pub s: f64,
    /// Approach rate `v_ego - v_leader` (m/s).
    pub dv: f64,
    /// Leader acceleration (m/s²).
    pub leader_acc: f64,
}

impl LongitudinalContext {
    pub fn new(v: f64, s: f64, dv: f64, leader_acc: f64) -> Self {
        Self {
            v,
            s,
            dv,
            leader_acc,
        }
    }

    /// No vehicle ahead within the lookahead horizon.
    pub fn free(v: f64) -> Self {
        Self {
            v,
            s: f64::INFINITY,
            dv: 0.0,
            leader_acc: 0.0,
        }
    }

    pub fn has_leader(&self) -> bool {
        self.s.is_finite()
    }

    pub fn leader_velocity(&self) -> f64 {
        self.v - self.dv
    }
}

/// Dynamic desired gap `s* = s0 + v T + v dv / (2 sqrt(a b))`, floored at `s0`.
pub fn idm_desired_gap(params: &ControllerParams, v: f64, dv: f64) -> f64 {
    let interaction = v * params.t + v * dv / (2.0 * (params.a * params.b).sqrt());
    params.s0 + interaction.max(0.0)
}

/// IDM acceleration clamped below at `-DEFAULT_EMERGENCY_DECEL`.
pub fn idm_acceleration(params: &ControllerParams, ctx: &LongitudinalContext) -> Result<f64> {
    idm_acceleration_with_floor(params, ctx, DEFAULT_EMERGENCY_DECEL)
}

pub fn idm_acceleration_with_floor(
    params: &ControllerParams,
    ctx: &LongitudinalContext,
    emergency_decel: f64,
) -> Result<f64> {
    if !(ctx.s > 0.0) {
        return Err(Error::Collision { gap: ctx.s });
    }
    let free = (ctx.v / params.v0).powf(params.delta);
    let interaction = if ctx.has_leader() {
        let ratio = idm_desired_gap(params, ctx.v, ctx.dv) / ctx.s;
        ratio * ratio
    } else {
        0.0
    };
    let acc = params.a * (1.0 - free - interaction);
    Ok(acc.max(-emergency_decel))
}

/// Acceleration under the constant-acceleration heuristic: the leader is
/// assumed to keep its current acceleration (capped at `a`) and the ego
/// vehicle picks the constant acceleration that just avoids a collision.
pub fn cah_acceleration(params: &ControllerParams, ctx: &LongitudinalContext) -> f64 {
    if !ctx.has_leader() {
        return params.a;
    }
    let v = ctx.v;
    let v_lead = ctx.leader_velocity();
    let a_lead = ctx.leader_acc.min(params.a);
    let denom = v_lead * v_lead - 2.0 * ctx.s * a_lead;
    if v_lead * (v - v_lead) <= -2.0 * ctx.s * a_lead && denom > f64::EPSILON {
        v * v * a_lead / denom
    } else {
        let closing = (v - v_lead).max(0.0);
        a_lead - closing * closing / (2.0 * ctx.s)
    }
}

/// Enhanced IDM: blends IDM with the constant-acceleration heuristic
/// according to the coolness factor `c`. With `c = 0` this is plain IDM.
pub fn eidm_acceleration(params: &ControllerParams, ctx: &LongitudinalContext) -> Result<f64> {
    eidm_acceleration_with_floor(params, ctx, DEFAULT_EMERGENCY_DECEL)
}

pub fn eidm_acceleration_with_floor(
    params: &ControllerParams,
    ctx: &LongitudinalContext,
    emergency_decel: f64,
) -> Result<f64> {
    let a_idm = idm_acceleration_with_floor(params, ctx, emergency_decel)?;
    if params.c == 0.0 || !ctx.has_leader() {
        return Ok(a_idm);
    }
    let a_cah = cah_acceleration(params, ctx);
    if a_idm >= a_cah {
        return Ok(a_idm);
    }
    let relaxed = a_cah + params.b * ((a_idm - a_cah) / params.b).tanh();
    Ok((1.0 - params.c) * a_idm + params.c * relaxed)
}
