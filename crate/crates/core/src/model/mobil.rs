//! MOBIL lane-change decision with asymmetric keep-lane bias.

use serde::{Deserialize, Serialize};

use super::ControllerParams;

/// Lane index 0 is the rightmost (slowest) lane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LaneDirection {
    TowardFaster,
    TowardSlower,
}

impl LaneDirection {
    pub fn offset(self) -> isize {
        match self {
            LaneDirection::TowardFaster => 1,
            LaneDirection::TowardSlower => -1,
        }
    }

    pub fn from_offset(offset: isize) -> Option<Self> {
        match offset {
            1 => Some(LaneDirection::TowardFaster),
            -1 => Some(LaneDirection::TowardSlower),
            _ => None,
        }
    }
}

/// Accelerations of the three affected vehicles before and after a
/// prospective lane change. Missing followers contribute zero to both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaneChangeContext {
    pub acc_ego_now: f64,
    pub acc_ego_after: f64,
    pub acc_newfollower_now: f64,
    pub acc_newfollower_after: f64,
    pub acc_oldfollower_now: f64,
    pub acc_oldfollower_after: f64,
    pub direction: LaneDirection,
    pub congested: bool,
}

impl LaneChangeContext {
    pub fn ego_advantage(&self) -> f64 {
        self.acc_ego_after - self.acc_ego_now
    }

    pub fn new_follower_delta(&self) -> f64 {
        self.acc_newfollower_after - self.acc_newfollower_now
    }

    pub fn old_follower_delta(&self) -> f64 {
        self.acc_oldfollower_after - self.acc_oldfollower_now
    }
}

/// Safety criterion: the new follower must not be forced to brake harder
/// than `b_safe`.
pub fn mobil_safety_ok(ctx: &LaneChangeContext, params: &ControllerParams) -> bool {
    ctx.acc_newfollower_after >= -params.b_safe
}

/// Threshold the weighted advantage has to exceed.
pub fn mobil_threshold(ctx: &LaneChangeContext, params: &ControllerParams) -> f64 {
    if ctx.congested {
        return params.a_delta;
    }
    match ctx.direction {
        LaneDirection::TowardFaster => params.a_delta + params.a_bias,
        LaneDirection::TowardSlower => params.a_delta - params.a_bias,
    }
}

/// Incentive criterion. Assumes the caller already checked safety.
pub fn mobil_incentive(ctx: &LaneChangeContext, params: &ControllerParams) -> bool {
    let advantage =
        ctx.ego_advantage() + params.p * (ctx.new_follower_delta() + ctx.old_follower_delta());
    advantage > mobil_threshold(ctx, params)
}

/// Safety followed by incentive.
pub fn mobil_decision(ctx: &LaneChangeContext, params: &ControllerParams) -> bool {
    mobil_safety_ok(ctx, params) && mobil_incentive(ctx, params)
}
