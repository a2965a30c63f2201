//! Shortest-path routes with per-segment lane requirements.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::{ExitId, LaneLink, RoadNetwork, SegmentId};

pub type RouteId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct RouteStep {
    pub segment: SegmentId,
    /// Bit `i` set when lane `i` leads on along the route.
    pub allowed: u64,
}

impl RouteStep {
    pub fn allows(&self, lane: usize) -> bool {
        self.allowed & (1 << lane) != 0
    }

    /// Direction (-1, 0, +1) of the closest allowed lane.
    pub fn direction_from(&self, lane: usize) -> isize {
        if self.allows(lane) {
            return 0;
        }
        let mut best: Option<(usize, isize)> = None;
        for i in 0..64usize {
            if self.allows(i) {
                let d = i.abs_diff(lane);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, if i > lane { 1 } else { -1 }));
                }
            }
        }
        best.map_or(0, |(_, dir)| dir)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub exit: ExitId,
    pub steps: Vec<RouteStep>,
}

impl Route {
    pub fn position_of(&self, segment: SegmentId, from_step: usize) -> Option<usize> {
        (from_step..self.steps.len()).find(|&i| self.steps[i].segment == segment)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    cost: f64,
    segment: SegmentId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.segment.cmp(&self.segment))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Route cache keyed by origin segment and exit.
#[derive(Debug, Default, Clone)]
pub struct RouteTable {
    routes: Vec<Route>,
    cache: HashMap<(SegmentId, ExitId), Option<RouteId>>,
}

impl RouteTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: RouteId) -> &Route {
        &self.routes[id]
    }

    /// Route from `from` to `exit`, or `None` when unreachable.
    pub fn route(&mut self, net: &RoadNetwork, from: SegmentId, exit: ExitId) -> Option<RouteId> {
        if let Some(hit) = self.cache.get(&(from, exit)) {
            return *hit;
        }
        let id = compute_route(net, from, exit).map(|r| {
            self.routes.push(r);
            self.routes.len() - 1
        });
        self.cache.insert((from, exit), id);
        id
    }

    /// Route to `preferred` if reachable, otherwise to the nearest exit.
    pub fn route_or_nearest(&mut self, net: &RoadNetwork, from: SegmentId, preferred: ExitId) -> Option<RouteId> {
        if let Some(id) = self.route(net, from, preferred) {
            return Some(id);
        }
        let mut best: Option<(f64, RouteId)> = None;
        for exit in 0..net.exits.len() {
            if let Some(id) = self.route(net, from, exit) {
                let len: f64 = self.routes[id].steps.iter().map(|s| net.segments[s.segment].length).sum();
                if best.is_none_or(|(b, _)| len < b) {
                    best = Some((len, id));
                }
            }
        }
        best.map(|(_, id)| id)
    }
}

fn compute_route(net: &RoadNetwork, from: SegmentId, exit: ExitId) -> Option<Route> {
    let target = net.exits.get(exit)?.segment;
    let n = net.segments.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[from] = 0.0;
    heap.push(HeapEntry { cost: 0.0, segment: from });
    while let Some(HeapEntry { cost, segment }) = heap.pop() {
        if cost > dist[segment] {
            continue;
        }
        if segment == target {
            break;
        }
        for next in net.next_segments(segment) {
            let c = cost + net.segments[next].length;
            if c < dist[next] {
                dist[next] = c;
                prev[next] = segment;
                heap.push(HeapEntry { cost: c, segment: next });
            }
        }
    }
    if !dist[target].is_finite() {
        return None;
    }
    let mut path = vec![target];
    while *path.last().unwrap() != from {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();

    let mut steps: Vec<RouteStep> = path.iter().map(|&segment| RouteStep { segment, allowed: 0 }).collect();
    let last = steps.len() - 1;
    let seg = &net.segments[steps[last].segment];
    steps[last].allowed = lane_mask(seg.successors.iter().map(|l| matches!(l, LaneLink::Exit(e) if *e == exit)));
    for k in (0..last).rev() {
        let next = &steps[k + 1];
        let seg = &net.segments[steps[k].segment];
        let direct = lane_mask(seg.successors.iter().map(|l| {
            matches!(l, LaneLink::Next { segment, lane } if *segment == next.segment && next.allows(*lane))
        }));
        steps[k].allowed = if direct != 0 {
            direct
        } else {
            // No lane connects straight into an allowed lane: keep the
            // lanes whose successor is closest to one.
            let mut best = usize::MAX;
            let mut mask = 0u64;
            for (i, link) in seg.successors.iter().enumerate() {
                if let LaneLink::Next { segment, lane } = *link {
                    if segment != next.segment {
                        continue;
                    }
                    let d = (0..64).filter(|&j| next.allows(j)).map(|j| j.abs_diff(lane)).min().unwrap_or(usize::MAX);
                    match d.cmp(&best) {
                        Ordering::Less => {
                            best = d;
                            mask = 1 << i;
                        }
                        Ordering::Equal => mask |= 1 << i,
                        Ordering::Greater => {}
                    }
                }
            }
            mask
        };
    }
    Some(Route { exit, steps })
}

fn lane_mask(flags: impl Iterator<Item = bool>) -> u64 {
    flags.enumerate().fold(0, |m, (i, f)| if f { m | (1 << i) } else { m })
}
