//! Parametric cloverleaf interchange between two dual carriageways.
//!
//! Each of the four directional mainlines runs
//! `approach -> diverge-right -> merge-loop -> bridge -> diverge-loop ->
//! merge-right -> departure`. Right turns leave on a direct ramp before the
//! bridge; left turns leave after the bridge onto a 270° loop that joins the
//! crossing road before its own bridge.

use serde::{Deserialize, Serialize};

use super::{
    Detector, EntryBoundary, ExitBoundary, LaneLink, RoadNetwork, RoadSegment, SegmentClass,
    SegmentId,
};
use crate::error::{Error, Result};

/// Travel heading of a directional mainline, counter-clockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Heading {
    East,
    North,
    West,
    South,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::East, Heading::North, Heading::West, Heading::South];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Heading {
        Heading::ALL[i % 4]
    }

    /// Heading after a right turn (right-hand traffic).
    pub fn right(self) -> Heading {
        Heading::from_index(self.index() + 3)
    }

    pub fn left(self) -> Heading {
        Heading::from_index(self.index() + 1)
    }

    pub fn label(self) -> &'static str {
        match self {
            Heading::East => "EB",
            Heading::North => "NB",
            Heading::West => "WB",
            Heading::South => "SB",
        }
    }
}

/// Dimensions of the generated interchange (metres).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloverleafGeometry {
    /// Length of each approach and each departure arm.
    pub arm_length: f64,
    pub lanes: usize,
    /// Direct (right-turn) ramp length.
    pub ramp_length: f64,
    /// Loop ramp length (radius-equivalent arc length of the 270° turn).
    pub loop_length: f64,
    /// Length of the deceleration and acceleration lane sections.
    pub section_length: f64,
    pub bridge_length: f64,
    /// Distance between detector cross-sections along each departure arm.
    pub detector_spacing: f64,
    pub detector_window: f64,
    /// Nominal mainline speed (m/s) used for labels.
    pub speed_context: f64,
}

impl Default for CloverleafGeometry {
    fn default() -> Self {
        Self {
            arm_length: 500.0,
            lanes: 2,
            ramp_length: 250.0,
            loop_length: 250.0,
            section_length: 250.0,
            bridge_length: 100.0,
            detector_spacing: 50.0,
            detector_window: 10.0,
            speed_context: 31.3,
        }
    }
}

impl CloverleafGeometry {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64); 9] = [
            ("arm_length", self.arm_length),
            ("lanes", self.lanes as f64),
            ("ramp_length", self.ramp_length),
            ("loop_length", self.loop_length),
            ("section_length", self.section_length),
            ("bridge_length", self.bridge_length),
            ("detector_spacing", self.detector_spacing),
            ("detector_window", self.detector_window),
            ("speed_context", self.speed_context),
        ];
        for (name, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidGeometry { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Carriageway {
    approach: SegmentId,
    diverge_right: SegmentId,
    merge_loop: SegmentId,
    bridge: SegmentId,
    diverge_loop: SegmentId,
    merge_right: SegmentId,
    departure: SegmentId,
    right_ramp: SegmentId,
    loop_ramp: SegmentId,
}

/// Builds the interchange with one lane-level entry per mainline lane and
/// one exit per departure arm.
pub fn build_cloverleaf(geometry: &CloverleafGeometry) -> Result<RoadNetwork> {
    geometry.validate()?;
    let n = geometry.lanes;
    let g = geometry;

    let mut ids = Vec::new();
    let mut next_id = 0usize;
    for _ in Heading::ALL {
        let mut take = || {
            next_id += 1;
            next_id - 1
        };
        ids.push(Carriageway {
            approach: take(),
            diverge_right: take(),
            merge_loop: take(),
            bridge: take(),
            diverge_loop: take(),
            merge_right: take(),
            departure: take(),
            right_ramp: take(),
            loop_ramp: take(),
        });
    }

    let shift_up = |to: SegmentId| -> Vec<LaneLink> {
        (0..n).map(|i| LaneLink::Next { segment: to, lane: i + 1 }).collect()
    };
    let mut segments: Vec<Option<RoadSegment>> = vec![None; next_id];
    let mut put = |id: SegmentId, name: String, length: f64, lanes: usize, class, successors| {
        segments[id] = Some(RoadSegment {
            id,
            name,
            length,
            lane_count: lanes,
            class,
            successors,
            speed_context: g.speed_context,
        });
    };

    for heading in Heading::ALL {
        let c = ids[heading.index()];
        let right_target = ids[heading.right().index()];
        let left_target = ids[heading.left().index()];
        let tag = heading.label();

        put(c.approach, format!("{tag}-approach"), g.arm_length, n, SegmentClass::Mainline, shift_up(c.diverge_right));

        let mut links = vec![LaneLink::Next { segment: c.right_ramp, lane: 0 }];
        links.extend((1..=n).map(|i| LaneLink::Next { segment: c.merge_loop, lane: i }));
        put(c.diverge_right, format!("{tag}-diverge-right"), g.section_length, n + 1, SegmentClass::Mainline, links);

        let mut links = vec![LaneLink::Taper];
        links.extend((1..=n).map(|i| LaneLink::Next { segment: c.bridge, lane: i - 1 }));
        put(c.merge_loop, format!("{tag}-merge-loop"), g.section_length, n + 1, SegmentClass::Mainline, links);

        put(c.bridge, format!("{tag}-bridge"), g.bridge_length, n, SegmentClass::Mainline, shift_up(c.diverge_loop));

        let mut links = vec![LaneLink::Next { segment: c.loop_ramp, lane: 0 }];
        links.extend((1..=n).map(|i| LaneLink::Next { segment: c.merge_right, lane: i }));
        put(c.diverge_loop, format!("{tag}-diverge-loop"), g.section_length, n + 1, SegmentClass::Mainline, links);

        let mut links = vec![LaneLink::Taper];
        links.extend((1..=n).map(|i| LaneLink::Next { segment: c.departure, lane: i - 1 }));
        put(c.merge_right, format!("{tag}-merge-right"), g.section_length, n + 1, SegmentClass::Mainline, links);

        put(
            c.departure,
            format!("{tag}-departure"),
            g.arm_length,
            n,
            SegmentClass::Mainline,
            vec![LaneLink::Exit(heading.index()); n],
        );

        put(
            c.right_ramp,
            format!("{tag}-to-{}-ramp", heading.right().label()),
            g.ramp_length,
            1,
            SegmentClass::DirectRamp,
            vec![LaneLink::Next { segment: right_target.merge_right, lane: 0 }],
        );
        put(
            c.loop_ramp,
            format!("{tag}-to-{}-loop", heading.left().label()),
            g.loop_length,
            1,
            SegmentClass::LoopRamp,
            vec![LaneLink::Next { segment: left_target.merge_loop, lane: 0 }],
        );
    }

    let segments: Vec<RoadSegment> = segments.into_iter().map(|s| s.expect("all ids assigned")).collect();
    let share = 1.0 / (4 * n) as f64;
    let entries = Heading::ALL
        .iter()
        .flat_map(|h| {
            let seg = ids[h.index()].approach;
            (0..n).map(move |lane| EntryBoundary { segment: seg, lane, share })
        })
        .collect();
    let exits = Heading::ALL
        .iter()
        .map(|h| ExitBoundary {
            id: h.index(),
            segment: ids[h.index()].departure,
            name: format!("{}-exit", h.label()),
        })
        .collect();
    let per_arm = ((g.arm_length / g.detector_spacing).floor() as usize).max(1);
    let detectors = Heading::ALL
        .iter()
        .flat_map(|h| {
            let segment = ids[h.index()].departure;
            (0..per_arm).map(move |k| Detector {
                segment,
                position: (k as f64 + 0.5) * g.arm_length / per_arm as f64,
                group: h.index(),
                window: g.detector_window,
            })
        })
        .collect();
    RoadNetwork::new(segments, entries, exits, detectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout_counts() {
        let net = build_cloverleaf(&CloverleafGeometry::default()).unwrap();
        assert_eq!(net.entries.len(), 8);
        assert_eq!(net.exits.len(), 4);
        assert_eq!(net.segments.len(), 36);
        let loops = net.segments.iter().filter(|s| s.class == SegmentClass::LoopRamp).count();
        let direct = net.segments.iter().filter(|s| s.class == SegmentClass::DirectRamp).count();
        assert_eq!((loops, direct), (4, 4));
        let total: f64 = net.entries.iter().map(|e| e.share).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_lane_is_valid() {
        let geometry = CloverleafGeometry {
            lanes: 1,
            ..Default::default()
        };
        let net = build_cloverleaf(&geometry).unwrap();
        assert_eq!(net.entries.len(), 4);
    }

    #[test]
    fn zero_ramp_length_rejected() {
        let geometry = CloverleafGeometry {
            ramp_length: 0.0,
            ..Default::default()
        };
        match build_cloverleaf(&geometry) {
            Err(Error::InvalidGeometry { name, .. }) => assert_eq!(name, "ramp_length"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn turn_headings() {
        assert_eq!(Heading::East.right(), Heading::South);
        assert_eq!(Heading::East.left(), Heading::North);
        assert_eq!(Heading::South.right(), Heading::West);
    }
}
