//! Vehicle controller laws: E-IDM car following and MOBIL lane changing.
//!
//! Everything here is a pure function of its inputs.

mod idm;
mod mobil;
mod params;

pub use idm::{
    cah_acceleration, eidm_acceleration, eidm_acceleration_with_floor, idm_acceleration,
    idm_acceleration_with_floor, idm_desired_gap, LongitudinalContext, DEFAULT_EMERGENCY_DECEL,
};
pub use mobil::{
    mobil_decision, mobil_incentive, mobil_safety_ok, mobil_threshold, LaneChangeContext,
    LaneDirection,
};
pub use params::{mph_to_mps, mps_to_mph, ControllerParams, Param, MPH};
