use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DEFAULT_EMERGENCY_DECEL;
use crate::network::CloverleafGeometry;

/// Total network inflow over time, in vehicles per hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InflowSchedule {
    Constant { vph: f64 },
    /// Linear ramp from `start_vph` at t = 0 to `end_vph` at the end of the run.
    Ramp { start_vph: f64, end_vph: f64 },
}

impl InflowSchedule {
    pub fn rate_at(&self, t: f64, duration: f64) -> f64 {
        match *self {
            InflowSchedule::Constant { vph } => vph,
            InflowSchedule::Ramp { start_vph, end_vph } => {
                let f = (t / duration).clamp(0.0, 1.0);
                start_vph + f * (end_vph - start_vph)
            }
        }
    }

    pub fn is_ramp(&self) -> bool {
        matches!(self, InflowSchedule::Ramp { .. })
    }
}

/// Probability of each turn movement at the interchange.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnFractions {
    pub straight: f64,
    pub right: f64,
    pub left: f64,
}

impl Default for TurnFractions {
    fn default() -> Self {
        Self {
            straight: 0.6,
            right: 0.2,
            left: 0.2,
        }
    }
}

/// How the lane-change rate is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LcpsNormalization {
    /// Network-wide lane changes per simulated second.
    #[default]
    NetworkTotal,
    /// Divided additionally by the mean number of vehicles on the network.
    PerVehicle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Integration step (s).
    pub timestep: f64,
    /// Simulated time (s).
    pub duration: f64,
    pub inflow: InflowSchedule,
    pub seed: u64,
    pub geometry: CloverleafGeometry,
    pub turns: TurnFractions,
    /// Braking floor applied to every commanded acceleration (m/s², positive).
    pub emergency_decel: f64,
    /// Minimum time between two lane changes of one vehicle (s).
    pub lane_change_cooldown: f64,
    /// Distance before a lane's end where route lane changes become mandatory (m).
    pub mandatory_zone: f64,
    pub lcps_normalization: LcpsNormalization,
    /// Keep the per-vehicle event log.
    pub record_events: bool,
}

impl SimulationConfig {
    /// Two minutes at 20 Hz with 4,400 veh/h spread over the entries.
    pub fn constant_inflow() -> Self {
        Self {
            timestep: 0.05,
            duration: 120.0,
            inflow: InflowSchedule::Constant { vph: 4400.0 },
            seed: 0,
            geometry: CloverleafGeometry::default(),
            turns: TurnFractions::default(),
            emergency_decel: DEFAULT_EMERGENCY_DECEL,
            lane_change_cooldown: 0.0,
            mandatory_zone: 500.0,
            lcps_normalization: LcpsNormalization::NetworkTotal,
            record_events: false,
        }
    }

    /// Throughput run: inflow ramps from 2,000 to 12,000 veh/h.
    pub fn ramped_inflow() -> Self {
        Self {
            inflow: InflowSchedule::Ramp {
                start_vph: 2000.0,
                end_vph: 12000.0,
            },
            ..Self::constant_inflow()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.timestep).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if !(self.timestep > 0.0 && self.timestep.is_finite()) {
            return bad("timestep must be > 0");
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration must be > 0");
        }
        let rates = match self.inflow {
            InflowSchedule::Constant { vph } => [vph, vph],
            InflowSchedule::Ramp { start_vph, end_vph } => [start_vph, end_vph],
        };
        if rates.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return bad("inflow must be >= 0");
        }
        let t = self.turns;
        if [t.straight, t.right, t.left].iter().any(|f| !(*f >= 0.0)) || t.straight + t.right + t.left <= 0.0 {
            return bad("turn fractions must be non-negative and not all zero");
        }
        if !(self.emergency_decel > 0.0) {
            return bad("emergency_decel must be > 0");
        }
        if !(self.lane_change_cooldown >= 0.0) || !(self.mandatory_zone >= 0.0) {
            return bad("lane_change_cooldown and mandatory_zone must be >= 0");
        }
        self.geometry.validate()
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self::constant_inflow()
    }
}
