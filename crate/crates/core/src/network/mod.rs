//! Directed multi-lane road graph.
//!
//! Every lane has at most one successor and at most one predecessor, so the
//! lanes of the network form disjoint chains. Diverges and merges are
//! modelled with auxiliary lanes: a deceleration lane that appears at the
//! start of a section and leads onto a ramp, and an acceleration lane fed by
//! a ramp that tapers off at the end of its section.

mod cloverleaf;
mod occupancy;
mod routing;
mod segment;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use cloverleaf::{build_cloverleaf, CloverleafGeometry, Heading};
pub use occupancy::{LaneOccupancy, Neighbor, DEFAULT_LOOKAHEAD, DEFAULT_MAX_HOPS};
pub use routing::{Route, RouteId, RouteStep, RouteTable};
pub use segment::{
    Detector, EntryBoundary, ExitBoundary, ExitId, LaneLink, RoadSegment, SegmentClass, SegmentId,
};

use crate::error::{Error, Result};

/// Position of a lane in the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LaneRef {
    pub segment: SegmentId,
    pub lane: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadNetwork {
    pub segments: Vec<RoadSegment>,
    pub entries: Vec<EntryBoundary>,
    pub exits: Vec<ExitBoundary>,
    pub detectors: Vec<Detector>,
    /// `predecessors[segment][lane]`
    predecessors: Vec<Vec<Option<LaneRef>>>,
}

impl RoadNetwork {
    /// Assembles and validates a network.
    pub fn new(
        segments: Vec<RoadSegment>,
        entries: Vec<EntryBoundary>,
        exits: Vec<ExitBoundary>,
        detectors: Vec<Detector>,
    ) -> Result<Self> {
        let predecessors = segments
            .iter()
            .map(|s| vec![None; s.lane_count])
            .collect();
        let mut net = Self {
            segments,
            entries,
            exits,
            detectors,
            predecessors,
        };
        net.link_predecessors()?;
        net.validate()?;
        Ok(net)
    }

    fn link_predecessors(&mut self) -> Result<()> {
        for seg in &self.segments {
            for (lane, link) in seg.successors.iter().enumerate() {
                if let LaneLink::Next { segment, lane: to } = *link {
                    let slot = self
                        .predecessors
                        .get_mut(segment)
                        .and_then(|lanes| lanes.get_mut(to))
                        .ok_or_else(|| {
                            Error::InvalidNetwork(format!(
                                "{} lane {lane} links to missing lane {to} of segment {segment}",
                                seg.name
                            ))
                        })?;
                    if slot.is_some() {
                        return Err(Error::InvalidNetwork(format!(
                            "lane {to} of segment {segment} has two predecessors"
                        )));
                    }
                    *slot = Some(LaneRef {
                        segment: seg.id,
                        lane,
                    });
                }
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for (idx, seg) in self.segments.iter().enumerate() {
            if seg.id != idx {
                return Err(Error::InvalidNetwork(format!("segment {} stored at {idx}", seg.id)));
            }
            if !(seg.length > 0.0) || seg.lane_count == 0 || seg.successors.len() != seg.lane_count {
                return Err(Error::InvalidNetwork(format!("malformed segment {}", seg.name)));
            }
            for link in &seg.successors {
                if let LaneLink::Exit(e) = link {
                    if *e >= self.exits.len() {
                        return Err(Error::InvalidNetwork(format!("unknown exit {e}")));
                    }
                }
            }
        }
        for e in &self.entries {
            if e.segment >= self.segments.len() || e.lane >= self.segments[e.segment].lane_count {
                return Err(Error::InvalidNetwork(format!("entry on missing lane {e:?}")));
            }
        }
        for d in &self.detectors {
            let ok = d.segment < self.segments.len()
                && d.position >= 0.0
                && d.position <= self.segments[d.segment].length
                && d.window > 0.0;
            if !ok {
                return Err(Error::InvalidNetwork(format!("invalid detector {d:?}")));
            }
        }
        // Every lane chain ends at an exit or a taper.
        let total_lanes: usize = self.segments.iter().map(|s| s.lane_count).sum();
        for seg in &self.segments {
            for lane in 0..seg.lane_count {
                let mut cur = LaneRef {
                    segment: seg.id,
                    lane,
                };
                let mut steps = 0;
                while let LaneLink::Next { segment, lane } = self.segments[cur.segment].successors[cur.lane] {
                    cur = LaneRef { segment, lane };
                    steps += 1;
                    if steps > total_lanes {
                        return Err(Error::InvalidNetwork(format!(
                            "lane {lane} of {} is part of a cycle",
                            seg.name
                        )));
                    }
                }
            }
        }
        for entry in &self.entries {
            let reach = self.reachable_segments(entry.segment);
            for exit in &self.exits {
                if !reach[exit.segment] {
                    return Err(Error::InvalidNetwork(format!(
                        "exit {} unreachable from {}",
                        exit.name, self.segments[entry.segment].name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn segment(&self, id: SegmentId) -> &RoadSegment {
        &self.segments[id]
    }

    pub fn predecessor(&self, lane: LaneRef) -> Option<LaneRef> {
        self.predecessors[lane.segment][lane.lane]
    }

    pub fn successor(&self, lane: LaneRef) -> LaneLink {
        self.segments[lane.segment].successors[lane.lane]
    }

    /// Distinct downstream segments of `id`.
    pub fn next_segments(&self, id: SegmentId) -> Vec<SegmentId> {
        let mut out = Vec::new();
        for link in &self.segments[id].successors {
            if let LaneLink::Next { segment, .. } = *link {
                if !out.contains(&segment) {
                    out.push(segment);
                }
            }
        }
        out
    }

    pub fn reachable_segments(&self, from: SegmentId) -> Vec<bool> {
        let mut seen = vec![false; self.segments.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(s) = queue.pop_front() {
            for n in self.next_segments(s) {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    pub fn exit_of_segment(&self, id: SegmentId) -> Option<ExitId> {
        self.segments[id].successors.iter().find_map(|l| match l {
            LaneLink::Exit(e) => Some(*e),
            _ => None,
        })
    }

    pub fn total_length_km(&self) -> f64 {
        self.segments.iter().map(|s| s.length * s.lane_count as f64).sum::<f64>() / 1000.0
    }
}
