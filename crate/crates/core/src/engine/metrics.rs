use serde::{Deserialize, Serialize};

use crate::network::{Detector, LaneLink, RoadNetwork};

/// Density-flow pair for one aggregation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityFlowSample {
    /// Start of the window (s).
    pub window_start: f64,
    /// Detector index, `None` for the network aggregate.
    pub detector: Option<usize>,
    /// Vehicles per km per lane.
    pub density: f64,
    /// Vehicles per hour across the cross-section(s).
    pub flow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashReport {
    pub time: f64,
    pub vehicle: u64,
    pub segment: usize,
    pub gap: f64,
}

/// Outcome of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub lane_changes_per_second: f64,
    pub mean_absolute_acceleration: f64,
    /// Peak network flow over the detector windows (veh/h).
    pub max_throughput: f64,
    /// Network aggregate per window.
    pub density_flow: Vec<DensityFlowSample>,
    /// One sample per detector per window.
    pub detector_samples: Vec<DensityFlowSample>,
    pub inserted: u64,
    pub exited: u64,
    pub on_network: u64,
    pub queued: u64,
    pub lane_changes: u64,
    pub simulated_seconds: f64,
    pub crash: Option<CrashReport>,
}

impl MetricsRecord {
    pub fn crashed(&self) -> bool {
        self.crash.is_some()
    }
}

/// Running tallies accumulated by the engine.
#[derive(Debug, Clone, Default)]
pub struct MetricsAccumulator {
    pub abs_acc_sum: f64,
    pub acc_samples: u64,
    pub lane_changes: u64,
    pub inserted: u64,
    pub exited: u64,
    pub vehicle_seconds: f64,
    detector_counts: Vec<u64>,
    detector_density: Vec<f64>,
    detector_group: Vec<usize>,
    groups: usize,
    pub density_flow: Vec<DensityFlowSample>,
    pub detector_samples: Vec<DensityFlowSample>,
}

impl MetricsAccumulator {
    pub fn new(detectors: &[Detector]) -> Self {
        let detector_group: Vec<usize> = detectors.iter().map(|d| d.group).collect();
        Self {
            detector_counts: vec![0; detectors.len()],
            detector_density: vec![0.0; detectors.len()],
            groups: detector_group.iter().map(|g| g + 1).max().unwrap_or(0),
            detector_group,
            ..Default::default()
        }
    }

    pub fn record_acceleration(&mut self, acc: f64) {
        self.abs_acc_sum += acc.abs();
        self.acc_samples += 1;
    }

    pub fn record_crossing(&mut self, detector: usize) {
        self.detector_counts[detector] += 1;
    }

    /// Instantaneous per-lane density on each detector's segment.
    pub fn snapshot_density(&mut self, net: &RoadNetwork, counts_per_segment: &[usize]) {
        for (i, d) in net.detectors.iter().enumerate() {
            let seg = &net.segments[d.segment];
            let lanes = seg.successors.iter().filter(|l| !matches!(l, LaneLink::Taper)).count().max(1);
            self.detector_density[i] = counts_per_segment[d.segment] as f64 / (seg.length / 1000.0 * lanes as f64);
        }
    }

    /// Closes a window of `window` seconds that started at `start`. The
    /// network flow sums the groups, each represented by the mean flow of
    /// its cross-sections; the network density is the mean over detectors.
    pub fn close_window(&mut self, start: f64, window: f64) {
        if self.detector_counts.is_empty() {
            return;
        }
        let mut group_flow = vec![0.0; self.groups];
        let mut group_size = vec![0usize; self.groups];
        let mut density_sum = 0.0;
        for i in 0..self.detector_counts.len() {
            let flow = self.detector_counts[i] as f64 * 3600.0 / window;
            let density = self.detector_density[i];
            self.detector_samples.push(DensityFlowSample {
                window_start: start,
                detector: Some(i),
                density,
                flow,
            });
            group_flow[self.detector_group[i]] += flow;
            group_size[self.detector_group[i]] += 1;
            density_sum += density;
            self.detector_counts[i] = 0;
        }
        let total_flow = group_flow
            .iter()
            .zip(&group_size)
            .filter(|(_, n)| **n > 0)
            .map(|(f, n)| f / *n as f64)
            .sum();
        self.density_flow.push(DensityFlowSample {
            window_start: start,
            detector: None,
            density: density_sum / self.detector_counts.len() as f64,
            flow: total_flow,
        });
    }

    pub fn max_throughput(&self) -> f64 {
        self.density_flow.iter().map(|s| s.flow).fold(0.0, f64::max)
    }

    pub fn mean_absolute_acceleration(&self) -> f64 {
        if self.acc_samples == 0 {
            0.0
        } else {
            self.abs_acc_sum / self.acc_samples as f64
        }
    }
}
