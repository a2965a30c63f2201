use serde::{Deserialize, Serialize};

pub type SegmentId = usize;
pub type ExitId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentClass {
    Mainline,
    OnRamp,
    OffRamp,
    LoopRamp,
    DirectRamp,
}

/// Where a lane leads at the downstream end of its segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaneLink {
    Next { segment: SegmentId, lane: usize },
    Exit(ExitId),
    /// Acceleration lane that ends; occupants must change lanes before the
    /// segment end, which acts as a standing obstacle.
    Taper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadSegment {
    pub id: SegmentId,
    pub name: String,
    pub length: f64,
    pub lane_count: usize,
    pub class: SegmentClass,
    /// One entry per lane, lane 0 rightmost.
    pub successors: Vec<LaneLink>,
    /// Nominal speed (m/s) used only to label detector output.
    pub speed_context: f64,
}

impl RoadSegment {
    pub fn successor(&self, lane: usize) -> Option<LaneLink> {
        self.successors.get(lane).copied()
    }

    pub fn is_taper(&self, lane: usize) -> bool {
        matches!(self.successor(lane), Some(LaneLink::Taper))
    }
}

/// Vehicles arrive at position 0 of `lane` on `segment`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryBoundary {
    pub segment: SegmentId,
    pub lane: usize,
    /// Fraction of the total inflow assigned to this entry.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitBoundary {
    pub id: ExitId,
    pub segment: SegmentId,
    pub name: String,
}

/// Virtual loop detector counting crossings over fixed time windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    pub segment: SegmentId,
    pub position: f64,
    /// Cross-sections sharing a group observe the same stream; their counts
    /// are averaged before groups are summed into the network flow.
    pub group: usize,
    /// Aggregation window (s).
    pub window: f64,
}
