//! Per-lane vehicle index and leader/follower queries.

use super::{LaneLink, LaneRef, RoadNetwork};
use crate::engine::VehicleState;

/// Neighbour search stops beyond this distance (m).
pub const DEFAULT_LOOKAHEAD: f64 = 1000.0;
/// Neighbour search follows at most this many segment boundaries.
pub const DEFAULT_MAX_HOPS: usize = 3;

/// Nearest vehicle (or lane-end obstacle) in a given direction.
#[derive(Debug, Clone, Copy)]
pub struct Neighbor<'a> {
    /// Bumper-to-bumper gap (m).
    pub gap: f64,
    pub velocity: f64,
    pub acceleration: f64,
    /// `None` for the standing obstacle at the end of a tapering lane.
    pub vehicle: Option<&'a VehicleState>,
}

/// Vehicles of every lane, sorted by ascending position.
#[derive(Debug, Clone)]
pub struct LaneOccupancy {
    lanes: Vec<Vec<Vec<VehicleState>>>,
    lookahead: f64,
    max_hops: usize,
}

impl LaneOccupancy {
    pub fn new(net: &RoadNetwork) -> Self {
        Self {
            lanes: net.segments.iter().map(|s| vec![Vec::new(); s.lane_count]).collect(),
            lookahead: DEFAULT_LOOKAHEAD,
            max_hops: DEFAULT_MAX_HOPS,
        }
    }

    pub fn with_horizon(mut self, lookahead: f64, max_hops: usize) -> Self {
        self.lookahead = lookahead;
        self.max_hops = max_hops;
        self
    }

    pub fn lane(&self, lane: LaneRef) -> &[VehicleState] {
        &self.lanes[lane.segment][lane.lane]
    }

    pub fn lane_mut(&mut self, lane: LaneRef) -> &mut Vec<VehicleState> {
        &mut self.lanes[lane.segment][lane.lane]
    }

    pub fn len(&self) -> usize {
        self.lanes.iter().flatten().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &VehicleState> {
        self.lanes.iter().flatten().flatten()
    }

    pub fn lane_refs(&self) -> impl Iterator<Item = LaneRef> + '_ {
        self.lanes.iter().enumerate().flat_map(|(segment, lanes)| {
            (0..lanes.len()).map(move |lane| LaneRef { segment, lane })
        })
    }

    /// Inserts keeping the lane sorted; returns the index used.
    pub fn insert(&mut self, vehicle: VehicleState) -> usize {
        let lane = self.lane_mut(vehicle.lane_ref());
        let idx = lane.partition_point(|v| v.x <= vehicle.x);
        lane.insert(idx, vehicle);
        idx
    }

    pub fn remove(&mut self, lane: LaneRef, idx: usize) -> VehicleState {
        self.lane_mut(lane).remove(idx)
    }

    pub fn index_of(&self, lane: LaneRef, id: u64) -> Option<usize> {
        self.lane(lane).iter().position(|v| v.id == id)
    }

    /// Leader of the vehicle at `idx` in `lane`.
    pub fn leader_by_index<'a>(&'a self, net: &RoadNetwork, lane: LaneRef, idx: usize) -> Option<Neighbor<'a>> {
        let ego = &self.lane(lane)[idx];
        self.search_ahead(net, lane, idx + 1, ego.x)
    }

    /// Follower of the vehicle at `idx` in `lane`.
    pub fn follower_by_index<'a>(&'a self, net: &RoadNetwork, lane: LaneRef, idx: usize) -> Option<Neighbor<'a>> {
        let ego = &self.lane(lane)[idx];
        self.search_behind(net, lane, idx, ego.x, ego.params.length)
    }

    /// Leader seen by a vehicle whose front is at `x` in `lane` (the vehicle
    /// itself need not be in that lane).
    pub fn leader_at<'a>(&'a self, net: &RoadNetwork, lane: LaneRef, x: f64) -> Option<Neighbor<'a>> {
        let start = self.lane(lane).partition_point(|v| v.x <= x);
        self.search_ahead(net, lane, start, x)
    }

    /// First vehicle (or obstacle) downstream of the start of `lane`.
    pub fn leader_from_start<'a>(&'a self, net: &RoadNetwork, lane: LaneRef) -> Option<Neighbor<'a>> {
        self.search_ahead(net, lane, 0, 0.0)
    }

    /// Follower seen by a vehicle of length `length` with front at `x`.
    pub fn follower_at<'a>(&'a self, net: &RoadNetwork, lane: LaneRef, x: f64, length: f64) -> Option<Neighbor<'a>> {
        let end = self.lane(lane).partition_point(|v| v.x <= x);
        self.search_behind(net, lane, end, x, length)
    }

    /// Leader of `vehicle` in the lane `lane_offset` lanes to its left
    /// (positive) or right (negative). `None` when no such lane exists.
    pub fn leader_of<'a>(&'a self, net: &RoadNetwork, vehicle: &VehicleState, lane_offset: isize) -> Option<Neighbor<'a>> {
        let lane = offset_lane(net, vehicle.lane_ref(), lane_offset)?;
        if lane_offset == 0 {
            let idx = self.index_of(lane, vehicle.id)?;
            self.leader_by_index(net, lane, idx)
        } else {
            self.leader_at(net, lane, vehicle.x)
        }
    }

    pub fn follower_of<'a>(&'a self, net: &RoadNetwork, vehicle: &VehicleState, lane_offset: isize) -> Option<Neighbor<'a>> {
        let lane = offset_lane(net, vehicle.lane_ref(), lane_offset)?;
        if lane_offset == 0 {
            let idx = self.index_of(lane, vehicle.id)?;
            self.follower_by_index(net, lane, idx)
        } else {
            self.follower_at(net, lane, vehicle.x, vehicle.params.length)
        }
    }

    fn search_ahead<'a>(&'a self, net: &RoadNetwork, mut lane: LaneRef, mut start: usize, x: f64) -> Option<Neighbor<'a>> {
        let mut offset = 0.0;
        for _ in 0..=self.max_hops {
            if let Some(v) = self.lane(lane).get(start) {
                let gap = offset + v.x - v.params.length - x;
                return (gap <= self.lookahead).then_some(Neighbor {
                    gap,
                    velocity: v.v,
                    acceleration: v.acc,
                    vehicle: Some(v),
                });
            }
            let seg_len = net.segments[lane.segment].length;
            match net.successor(lane) {
                LaneLink::Next { segment, lane: next } => {
                    offset += seg_len;
                    if offset - x > self.lookahead {
                        return None;
                    }
                    lane = LaneRef { segment, lane: next };
                    start = 0;
                }
                LaneLink::Taper => {
                    let gap = offset + seg_len - x;
                    return (gap <= self.lookahead).then_some(Neighbor {
                        gap,
                        velocity: 0.0,
                        acceleration: 0.0,
                        vehicle: None,
                    });
                }
                LaneLink::Exit(_) => return None,
            }
        }
        None
    }

    fn search_behind<'a>(
        &'a self,
        net: &RoadNetwork,
        mut lane: LaneRef,
        mut end: usize,
        x: f64,
        length: f64,
    ) -> Option<Neighbor<'a>> {
        let mut offset = 0.0;
        for _ in 0..=self.max_hops {
            if end > 0 {
                let v = &self.lane(lane)[end - 1];
                let gap = x - length - (v.x - offset);
                return (gap <= self.lookahead).then_some(Neighbor {
                    gap,
                    velocity: v.v,
                    acceleration: v.acc,
                    vehicle: Some(v),
                });
            }
            if x + offset - length > self.lookahead {
                return None;
            }
            let pred = net.predecessor(lane)?;
            offset += net.segments[pred.segment].length;
            lane = pred;
            end = self.lane(lane).len();
        }
        None
    }
}

fn offset_lane(net: &RoadNetwork, lane: LaneRef, offset: isize) -> Option<LaneRef> {
    let target = lane.lane as isize + offset;
    if target < 0 || target as usize >= net.segments[lane.segment].lane_count {
        return None;
    }
    Some(LaneRef {
        segment: lane.segment,
        lane: target as usize,
    })
}
