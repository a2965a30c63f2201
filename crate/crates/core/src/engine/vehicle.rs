use serde::{Deserialize, Serialize};

use crate::model::ControllerParams;
use crate::network::{ExitId, LaneRef, RouteId, SegmentId};

/// Kinematic state of one vehicle. `x` is the front bumper position
/// measured from the start of the current segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub id: u64,
    pub segment: SegmentId,
    pub lane: usize,
    pub x: f64,
    pub v: f64,
    /// Realised acceleration over the last step (m/s²).
    pub acc: f64,
    pub params: ControllerParams,
    /// Destination exit.
    pub exit: ExitId,
    pub route: RouteId,
    /// Index of the current segment within the route.
    pub route_step: usize,
    pub lane_changes: u32,
    /// Simulation time of the last executed lane change.
    pub last_lane_change: f64,
}

impl VehicleState {
    pub fn lane_ref(&self) -> LaneRef {
        LaneRef {
            segment: self.segment,
            lane: self.lane,
        }
    }

    /// Position of the rear bumper.
    pub fn rear(&self) -> f64 {
        self.x - self.params.length
    }
}
