#![allow(dead_code)]

use std::sync::Arc;

use hetflow::engine::VehicleState;
use hetflow::model::ControllerParams;
use hetflow::network::{Detector, EntryBoundary, ExitBoundary, LaneLink, RoadNetwork, RoadSegment, SegmentClass};

/// `count` identical segments chained end to end, exiting after the last.
pub fn straight_road(count: usize, length: f64, lanes: usize) -> RoadNetwork {
    let segments = (0..count)
        .map(|id| RoadSegment {
            id,
            name: format!("s{id}"),
            length,
            lane_count: lanes,
            class: SegmentClass::Mainline,
            successors: (0..lanes)
                .map(|lane| if id + 1 == count { LaneLink::Exit(0) } else { LaneLink::Next { segment: id + 1, lane } })
                .collect(),
            speed_context: 30.0,
        })
        .collect();
    let share = 1.0 / lanes as f64;
    let entries = (0..lanes).map(|lane| EntryBoundary { segment: 0, lane, share }).collect();
    let exits = vec![ExitBoundary { id: 0, segment: count - 1, name: "end".into() }];
    let detectors = vec![Detector { segment: count - 1, position: 0.5 * length, group: 0, window: 10.0 }];
    RoadNetwork::new(segments, entries, exits, detectors).expect("valid straight road")
}

/// Two-lane segment whose right lane tapers, feeding a one-lane segment.
pub fn merge_road(length: f64) -> RoadNetwork {
    let segments = vec![
        RoadSegment {
            id: 0,
            name: "merge".into(),
            length,
            lane_count: 2,
            class: SegmentClass::OnRamp,
            successors: vec![LaneLink::Taper, LaneLink::Next { segment: 1, lane: 0 }],
            speed_context: 30.0,
        },
        RoadSegment {
            id: 1,
            name: "after".into(),
            length,
            lane_count: 1,
            class: SegmentClass::Mainline,
            successors: vec![LaneLink::Exit(0)],
            speed_context: 30.0,
        },
    ];
    let entries = vec![
        EntryBoundary { segment: 0, lane: 0, share: 0.5 },
        EntryBoundary { segment: 0, lane: 1, share: 0.5 },
    ];
    let exits = vec![ExitBoundary { id: 0, segment: 1, name: "end".into() }];
    RoadNetwork::new(segments, entries, exits, vec![]).expect("valid merge")
}

pub fn shared(net: RoadNetwork) -> Arc<RoadNetwork> {
    Arc::new(net)
}

pub fn vehicle(id: u64, segment: usize, lane: usize, x: f64, v: f64) -> VehicleState {
    VehicleState {
        id,
        segment,
        lane,
        x,
        v,
        acc: 0.0,
        params: ControllerParams::midrange(),
        exit: 0,
        route: 0,
        route_step: 0,
        lane_changes: 0,
        last_lane_change: f64::NEG_INFINITY,
    }
}
