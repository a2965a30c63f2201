use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::events::{Event, EventKind};
use super::metrics::{CrashReport, MetricsAccumulator, MetricsRecord};
use super::{LcpsNormalization, SimulationConfig, VehicleState};
use crate::error::{Error, Result};
use crate::model::{
    eidm_acceleration_with_floor, idm_desired_gap, mobil_incentive, mobil_safety_ok,
    mobil_threshold, ControllerParams, LaneChangeContext, LaneDirection, LongitudinalContext,
};
use crate::network::{
    build_cloverleaf, ExitId, Heading, LaneLink, LaneOccupancy, LaneRef, Neighbor, RoadNetwork,
    RouteTable,
};
use crate::sampler::{derive_seed, sample_controller, stream_rng, FleetSpec};

const FLEET_STREAM_TAG: u64 = 0xF1EE7;
const ARRIVAL_STREAM_TAG: u64 = 0xA771;

struct EntryState {
    rng: ChaCha8Rng,
    cumulative: f64,
    next_arrival: f64,
    queue: VecDeque<VehicleState>,
    /// Destination exits with their probabilities.
    exits: Vec<(ExitId, f64)>,
}

struct Decision {
    target: usize,
    mandatory: bool,
    new_follower_acc: f64,
}

/// One microscopic simulation on a fixed network.
pub struct Simulation {
    net: Arc<RoadNetwork>,
    config: SimulationConfig,
    fleet: FleetSpec,
    occupancy: LaneOccupancy,
    routes: RouteTable,
    entries: Vec<EntryState>,
    fleet_seed: u64,
    time: f64,
    step_index: usize,
    next_id: u64,
    metrics: MetricsAccumulator,
    events: Vec<Event>,
    acc_buf: Vec<f64>,
    detectors_by_segment: Vec<Vec<(usize, f64)>>,
    window_steps: usize,
}

impl Simulation {
    /// Simulation on the cloverleaf described by `config.geometry`.
    pub fn new(config: SimulationConfig, fleet: FleetSpec) -> Result<Self> {
        config.validate()?;
        let net = Arc::new(build_cloverleaf(&config.geometry)?);
        let turns = config.turns;
        let total = turns.straight + turns.right + turns.left;
        // Cloverleaf entries are ordered heading by heading, one per lane.
        let lanes = config.geometry.lanes;
        let choices = (0..net.entries.len())
            .map(|i| {
                let heading = Heading::from_index(i / lanes);
                vec![
                    (heading.index(), turns.straight / total),
                    (heading.right().index(), turns.right / total),
                    (heading.left().index(), turns.left / total),
                ]
            })
            .collect();
        Self::with_network(net.clone(), config, fleet, choices)
    }

    /// Simulation on an arbitrary network. `exit_choices[i]` lists the
    /// destinations (and their probabilities) of vehicles arriving at entry `i`.
    pub fn with_network(
        net: Arc<RoadNetwork>,
        config: SimulationConfig,
        fleet: FleetSpec,
        exit_choices: Vec<Vec<(ExitId, f64)>>,
    ) -> Result<Self> {
        config.validate()?;
        fleet.validate()?;
        if exit_choices.len() != net.entries.len() {
            return Err(Error::InvalidConfig("one exit choice list per entry required".into()));
        }
        let arrival_seed = derive_seed(&[config.seed, ARRIVAL_STREAM_TAG]);
        let entries = exit_choices
            .into_iter()
            .enumerate()
            .map(|(i, exits)| {
                let mut rng = stream_rng(arrival_seed, i as u64);
                let next_arrival: f64 = Exp1.sample(&mut rng);
                EntryState {
                    rng,
                    cumulative: 0.0,
                    next_arrival,
                    queue: VecDeque::new(),
                    exits,
                }
            })
            .collect();
        let mut detectors_by_segment = vec![Vec::new(); net.segments.len()];
        for (i, d) in net.detectors.iter().enumerate() {
            detectors_by_segment[d.segment].push((i, d.position));
        }
        let window = net.detectors.first().map_or(config.geometry.detector_window, |d| d.window);
        let window_steps = ((window / config.timestep).round() as usize).max(1);
        Ok(Self {
            occupancy: LaneOccupancy::new(&net),
            routes: RouteTable::new(),
            entries,
            fleet_seed: derive_seed(&[config.seed, FLEET_STREAM_TAG]),
            time: 0.0,
            step_index: 0,
            next_id: 0,
            metrics: MetricsAccumulator::new(&net.detectors),
            events: Vec::new(),
            acc_buf: Vec::new(),
            detectors_by_segment,
            window_steps,
            net,
            config,
            fleet,
        })
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.net
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn occupancy(&self) -> &LaneOccupancy {
        &self.occupancy
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn inserted(&self) -> u64 {
        self.metrics.inserted
    }

    pub fn exited(&self) -> u64 {
        self.metrics.exited
    }

    pub fn lane_changes(&self) -> u64 {
        self.metrics.lane_changes
    }

    pub fn queued(&self) -> usize {
        self.entries.iter().map(|e| e.queue.len()).sum()
    }

    pub fn vehicles(&self) -> impl Iterator<Item = &VehicleState> {
        self.occupancy.iter()
    }

    /// Places a vehicle directly on the network, bypassing the entry queues.
    /// The route is computed from its segment to `exit`.
    pub fn place_vehicle(&mut self, mut vehicle: VehicleState) -> Result<u64> {
        vehicle.params.validate()?;
        vehicle.route = self
            .routes
            .route_or_nearest(&self.net, vehicle.segment, vehicle.exit)
            .ok_or_else(|| Error::InvalidConfig(format!("no exit reachable from segment {}", vehicle.segment)))?;
        vehicle.route_step = 0;
        vehicle.id = self.next_id;
        self.next_id += 1;
        let id = vehicle.id;
        self.occupancy.insert(vehicle);
        self.metrics.inserted += 1;
        Ok(id)
    }

    /// Template vehicle for [`Simulation::place_vehicle`].
    pub fn vehicle_template(params: ControllerParams, segment: usize, lane: usize, x: f64, v: f64, exit: ExitId) -> VehicleState {
        VehicleState {
            id: 0,
            segment,
            lane,
            x,
            v,
            acc: 0.0,
            params,
            exit,
            route: 0,
            route_step: 0,
            lane_changes: 0,
            last_lane_change: f64::NEG_INFINITY,
        }
    }

    fn accel(&self, params: &ControllerParams, ctx: &LongitudinalContext) -> Result<f64> {
        eidm_acceleration_with_floor(params, ctx, self.config.emergency_decel)
    }

    fn context(v: f64, leader: Option<&Neighbor<'_>>) -> LongitudinalContext {
        match leader {
            Some(n) => LongitudinalContext::new(v, n.gap, v - n.velocity, n.acceleration),
            None => LongitudinalContext::free(v),
        }
    }

    fn crash(&self, vehicle: &VehicleState, gap: f64) -> Error {
        Error::Crash {
            time: self.time,
            vehicle: vehicle.id,
            segment: vehicle.segment,
            gap,
        }
    }

    /// Advances the simulation by one timestep.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.config.timestep;
        self.compute_accelerations()?;
        self.integrate(dt);
        self.advance_segments();
        self.check_gaps()?;
        self.change_lanes()?;
        let rate = self.config.inflow.rate_at(self.time, self.config.duration);
        self.insert_vehicles(rate);
        self.metrics.vehicle_seconds += self.occupancy.len() as f64 * dt;
        self.step_index += 1;
        self.time = self.step_index as f64 * dt;
        self.update_windows();
        Ok(())
    }

    fn compute_accelerations(&mut self) -> Result<()> {
        let mut buf = std::mem::take(&mut self.acc_buf);
        buf.clear();
        for lane in self.occupancy.lane_refs().collect::<Vec<_>>() {
            for idx in 0..self.occupancy.lane(lane).len() {
                let ego = &self.occupancy.lane(lane)[idx];
                let leader = self.occupancy.leader_by_index(&self.net, lane, idx);
                let ctx = Self::context(ego.v, leader.as_ref());
                let acc = self.accel(&ego.params, &ctx).map_err(|_| self.crash(ego, ctx.s))?;
                buf.push(acc);
            }
        }
        self.acc_buf = buf;
        Ok(())
    }

    fn integrate(&mut self, dt: f64) {
        let mut k = 0;
        let lanes: Vec<LaneRef> = self.occupancy.lane_refs().collect();
        for lane in lanes {
            let detectors = &self.detectors_by_segment[lane.segment];
            let vehicles = self.occupancy.lane_mut(lane);
            for veh in vehicles.iter_mut() {
                let acc = self.acc_buf[k];
                k += 1;
                let x_old = veh.x;
                let mut v_new = veh.v + acc * dt;
                if v_new < 0.0 {
                    // Stops within the step.
                    if acc < 0.0 {
                        veh.x -= 0.5 * veh.v * veh.v / acc;
                    }
                    v_new = 0.0;
                } else {
                    v_new = v_new.min(veh.params.v_max);
                    veh.x += 0.5 * (veh.v + v_new) * dt;
                }
                veh.acc = (v_new - veh.v) / dt;
                veh.v = v_new;
                self.metrics.record_acceleration(veh.acc);
                for &(det, pos) in detectors {
                    if x_old < pos && veh.x >= pos {
                        self.metrics.record_crossing(det);
                    }
                }
            }
        }
    }

    fn advance_segments(&mut self) {
        let mut movers = Vec::new();
        let lanes: Vec<LaneRef> = self.occupancy.lane_refs().collect();
        for lane in lanes {
            let seg_len = self.net.segments[lane.segment].length;
            loop {
                let vehicles = self.occupancy.lane_mut(lane);
                match vehicles.last() {
                    Some(v) if v.x >= seg_len => {
                        let v = vehicles.pop().expect("non-empty");
                        movers.push(v);
                    }
                    _ => break,
                }
            }
        }
        for mut veh in movers {
            loop {
                let seg_len = self.net.segments[veh.segment].length;
                if veh.x < seg_len {
                    self.occupancy.insert(veh);
                    break;
                }
                match self.net.successor(veh.lane_ref()) {
                    LaneLink::Next { segment, lane } => {
                        veh.x -= seg_len;
                        veh.segment = segment;
                        veh.lane = lane;
                        let route = self.routes.get(veh.route);
                        match route.steps.get(veh.route_step + 1) {
                            Some(s) if s.segment == segment => veh.route_step += 1,
                            _ => {
                                if let Some(r) = self.routes.route_or_nearest(&self.net, segment, veh.exit) {
                                    veh.route = r;
                                    veh.route_step = 0;
                                }
                            }
                        }
                    }
                    LaneLink::Exit(_) => {
                        self.metrics.exited += 1;
                        self.log(&veh, EventKind::Exited);
                        break;
                    }
                    LaneLink::Taper => {
                        veh.x = seg_len - 1e-3;
                        veh.v = 0.0;
                        self.occupancy.insert(veh);
                        break;
                    }
                }
            }
        }
    }

    fn check_gaps(&self) -> Result<()> {
        for lane in self.occupancy.lane_refs() {
            let vehicles = self.occupancy.lane(lane);
            for pair in vehicles.windows(2) {
                let gap = pair[1].rear() - pair[0].x;
                if gap <= 0.0 {
                    return Err(self.crash(&pair[0], gap));
                }
            }
            if let Some(last) = vehicles.len().checked_sub(1) {
                if let Some(n) = self.occupancy.leader_by_index(&self.net, lane, last) {
                    if n.gap <= 0.0 && n.vehicle.is_some() {
                        return Err(self.crash(&vehicles[last], n.gap));
                    }
                }
            }
        }
        Ok(())
    }

    fn change_lanes(&mut self) -> Result<()> {
        let snapshot: Vec<(LaneRef, u64)> = self
            .occupancy
            .lane_refs()
            .flat_map(|lane| self.occupancy.lane(lane).iter().map(move |v| (lane, v.id)))
            .collect();
        for (lane, id) in snapshot {
            let Some(idx) = self.occupancy.index_of(lane, id) else {
                continue;
            };
            if let Some(decision) = self.decide_lane_change(lane, idx)? {
                let mut veh = self.occupancy.remove(lane, idx);
                let from = veh.lane;
                veh.lane = decision.target;
                veh.lane_changes += 1;
                veh.last_lane_change = self.time;
                self.metrics.lane_changes += 1;
                self.log(
                    &veh,
                    EventKind::LaneChange {
                        from,
                        to: decision.target,
                        mandatory: decision.mandatory,
                        new_follower_acc: decision.new_follower_acc,
                        b_safe: veh.params.b_safe,
                    },
                );
                self.occupancy.insert(veh);
            }
        }
        Ok(())
    }

    fn decide_lane_change(&self, lane: LaneRef, idx: usize) -> Result<Option<Decision>> {
        let net = &*self.net;
        let ego = &self.occupancy.lane(lane)[idx];
        if self.time - ego.last_lane_change < self.config.lane_change_cooldown {
            return Ok(None);
        }
        let seg = net.segment(lane.segment);
        let step = &self.routes.get(ego.route).steps[ego.route_step];
        let in_zone = seg.length - ego.x <= self.config.mandatory_zone || seg.is_taper(lane.lane);
        let required = if in_zone { step.direction_from(lane.lane) } else { 0 };

        let leader = self.occupancy.leader_by_index(net, lane, idx);
        let acc_now = self.accel(&ego.params, &Self::context(ego.v, leader.as_ref()))?;
        let old_follower = self.occupancy.follower_by_index(net, lane, idx);
        let (of_now, of_after) = match old_follower.as_ref().and_then(|n| n.vehicle.map(|f| (n, f))) {
            Some((n, f)) => {
                let now = LongitudinalContext::new(f.v, n.gap, f.v - ego.v, ego.acc);
                let after = match &leader {
                    Some(l) => LongitudinalContext::new(f.v, n.gap + ego.params.length + l.gap, f.v - l.velocity, l.acceleration),
                    None => LongitudinalContext::free(f.v),
                };
                (self.accel(&f.params, &now)?, self.accel(&f.params, &after)?)
            }
            None => (0.0, 0.0),
        };

        let directions: &[isize] = match required {
            0 => &[-1, 1],
            1 => &[1],
            _ => &[-1],
        };
        let mut best: Option<(f64, Decision)> = None;
        for &dir in directions {
            let target = lane.lane as isize + dir;
            if target < 0 || target as usize >= seg.lane_count {
                continue;
            }
            let target = target as usize;
            if seg.is_taper(target) || (required == 0 && in_zone && !step.allows(target)) {
                continue;
            }
            let t_ref = LaneRef {
                segment: lane.segment,
                lane: target,
            };
            let new_leader = self.occupancy.leader_at(net, t_ref, ego.x);
            let new_follower = self.occupancy.follower_at(net, t_ref, ego.x, ego.params.length);
            if new_leader.as_ref().is_some_and(|n| n.gap <= 0.0) || new_follower.as_ref().is_some_and(|n| n.gap <= 0.0) {
                continue;
            }
            let acc_after = self.accel(&ego.params, &Self::context(ego.v, new_leader.as_ref()))?;
            let (nf_now, nf_after) = match new_follower.as_ref().and_then(|n| n.vehicle.map(|f| (n, f))) {
                Some((n, f)) => {
                    let now = match &new_leader {
                        Some(l) => LongitudinalContext::new(f.v, n.gap + ego.params.length + l.gap, f.v - l.velocity, l.acceleration),
                        None => LongitudinalContext::free(f.v),
                    };
                    let after = LongitudinalContext::new(f.v, n.gap, f.v - ego.v, ego.acc);
                    (self.accel(&f.params, &now)?, self.accel(&f.params, &after)?)
                }
                None => (0.0, 0.0),
            };
            let ctx = LaneChangeContext {
                acc_ego_now: acc_now,
                acc_ego_after: acc_after,
                acc_newfollower_now: nf_now,
                acc_newfollower_after: nf_after,
                acc_oldfollower_now: of_now,
                acc_oldfollower_after: of_after,
                direction: LaneDirection::from_offset(dir).expect("unit offset"),
                congested: ego.v < ego.params.v_crit,
            };
            if !mobil_safety_ok(&ctx, &ego.params) {
                continue;
            }
            let decision = Decision {
                target,
                mandatory: required != 0,
                new_follower_acc: nf_after,
            };
            if required != 0 {
                // Route-forced change: only safety gates it, for the ego too.
                if acc_after >= -ego.params.b_safe {
                    return Ok(Some(decision));
                }
                continue;
            }
            if mobil_incentive(&ctx, &ego.params) {
                let margin = ctx.ego_advantage() + ego.params.p * (ctx.new_follower_delta() + ctx.old_follower_delta())
                    - mobil_threshold(&ctx, &ego.params);
                if best.as_ref().is_none_or(|(m, _)| margin > *m) {
                    best = Some((margin, decision));
                }
            }
        }
        Ok(best.map(|(_, d)| d))
    }

    /// Generates arrivals for this step at total rate `rate_vph` and inserts
    /// queued vehicles where the entry lane has a safe gap.
    pub fn insert_vehicles(&mut self, rate_vph: f64) {
        let dt = self.config.timestep;
        for e in 0..self.entries.len() {
            let entry = self.net.entries[e];
            let increment = rate_vph.max(0.0) * entry.share * dt / 3600.0;
            self.entries[e].cumulative += increment;
            while self.entries[e].cumulative >= self.entries[e].next_arrival {
                let gap: f64 = Exp1.sample(&mut self.entries[e].rng);
                self.entries[e].next_arrival += gap;
                let vehicle = self.spawn(e);
                self.entries[e].queue.push_back(vehicle);
            }
            self.try_insert(e);
        }
    }

    fn spawn(&mut self, entry: usize) -> VehicleState {
        let id = self.next_id;
        self.next_id += 1;
        let mut rng = stream_rng(self.fleet_seed, id);
        let params = sample_controller(&self.fleet, &mut rng);
        let u: f64 = rng.random();
        let choices = &self.entries[entry].exits;
        let mut acc = 0.0;
        let mut exit = choices.last().map_or(0, |c| c.0);
        for &(candidate, p) in choices {
            acc += p;
            if u < acc {
                exit = candidate;
                break;
            }
        }
        let boundary = self.net.entries[entry];
        let route = self.routes.route_or_nearest(&self.net, boundary.segment, exit).unwrap_or(0);
        VehicleState {
            id,
            segment: boundary.segment,
            lane: boundary.lane,
            x: 0.0,
            v: 0.0,
            acc: 0.0,
            params,
            exit,
            route,
            route_step: 0,
            lane_changes: 0,
            last_lane_change: f64::NEG_INFINITY,
        }
    }

    fn try_insert(&mut self, entry: usize) {
        let Some(candidate) = self.entries[entry].queue.front() else {
            return;
        };
        let boundary = self.net.entries[entry];
        let lane = LaneRef {
            segment: boundary.segment,
            lane: boundary.lane,
        };
        let params = candidate.params;
        let v_free = params.v0.min(params.v_max);
        let leader = self.occupancy.leader_from_start(&self.net, lane);
        let v_ins = match &leader {
            Some(n) => v_free.min(n.velocity),
            None => v_free,
        };
        if let Some(n) = &leader {
            let lead_v = n.velocity;
            if n.gap <= 0.0 || n.gap < idm_desired_gap(&params, v_ins, v_ins - lead_v) {
                return;
            }
        }
        let mut veh = self.entries[entry].queue.pop_front().expect("front checked");
        veh.v = v_ins;
        self.metrics.inserted += 1;
        self.log(&veh, EventKind::Inserted);
        self.occupancy.insert(veh);
    }

    fn update_windows(&mut self) {
        if self.net.detectors.is_empty() {
            return;
        }
        let w = self.window_steps;
        let s = self.step_index;
        if s % w == w / 2 {
            let mut counts = vec![0usize; self.net.segments.len()];
            for v in self.occupancy.iter() {
                if !self.net.segments[v.segment].is_taper(v.lane) {
                    counts[v.segment] += 1;
                }
            }
            self.metrics.snapshot_density(&self.net, &counts);
        }
        if s.is_multiple_of(w) {
            let window = w as f64 * self.config.timestep;
            let start = (s - w) as f64 * self.config.timestep;
            self.metrics.close_window(start, window);
        }
    }

    fn log(&mut self, v: &VehicleState, kind: EventKind) {
        if self.config.record_events {
            self.events.push(Event {
                time: self.time,
                vehicle: v.id,
                segment: v.segment,
                lane: v.lane,
                x: v.x,
                v: v.v,
                acc: v.acc,
                kind,
            });
        }
    }

    /// Runs the remaining steps and summarises the run. A crash ends the run
    /// early and is reported in the record.
    pub fn run(mut self) -> MetricsRecord {
        let steps = self.config.steps();
        let mut crash = None;
        while self.step_index < steps {
            if let Err(err) = self.step() {
                if let Error::Crash {
                    time,
                    vehicle,
                    segment,
                    gap,
                } = err
                {
                    crash = Some(CrashReport {
                        time,
                        vehicle,
                        segment,
                        gap,
                    });
                    break;
                }
                crash = Some(CrashReport {
                    time: self.time,
                    vehicle: u64::MAX,
                    segment: usize::MAX,
                    gap: f64::NAN,
                });
                break;
            }
        }
        self.finish(crash)
    }

    /// Summary of the run so far.
    pub fn metrics(&self) -> MetricsRecord {
        self.summarise(None)
    }

    fn finish(self, crash: Option<CrashReport>) -> MetricsRecord {
        self.summarise(crash)
    }

    fn summarise(&self, crash: Option<CrashReport>) -> MetricsRecord {
        let seconds = self.time;
        let mut lcps = if seconds > 0.0 {
            self.metrics.lane_changes as f64 / seconds
        } else {
            0.0
        };
        if self.config.lcps_normalization == LcpsNormalization::PerVehicle {
            let mean_vehicles = if seconds > 0.0 { self.metrics.vehicle_seconds / seconds } else { 0.0 };
            lcps = if mean_vehicles > 0.0 { lcps / mean_vehicles } else { 0.0 };
        }
        MetricsRecord {
            lane_changes_per_second: lcps,
            mean_absolute_acceleration: self.metrics.mean_absolute_acceleration(),
            max_throughput: self.metrics.max_throughput(),
            density_flow: self.metrics.density_flow.clone(),
            detector_samples: self.metrics.detector_samples.clone(),
            inserted: self.metrics.inserted,
            exited: self.metrics.exited,
            on_network: self.occupancy.len() as u64,
            queued: self.queued() as u64,
            lane_changes: self.metrics.lane_changes,
            simulated_seconds: seconds,
            crash,
        }
    }
}

/// Builds the cloverleaf from `config`, runs it to completion and returns
/// the metrics.
pub fn run_simulation(config: &SimulationConfig, fleet: &FleetSpec) -> Result<MetricsRecord> {
    Ok(Simulation::new(config.clone(), *fleet)?.run())
}
