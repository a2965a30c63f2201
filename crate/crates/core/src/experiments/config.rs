//! Experiment configuration files.
//!
//! Every physical quantity carries its unit in the key name (`duration_s`,
//! `arm_length_m`, `v0_mph` or `v0_mps`, ...). Two presets are bundled:
//! `paper` runs the full-size protocol and `desk` is a reduced
//! version that runs on a laptop.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{InflowSchedule, LcpsNormalization, SimulationConfig, TurnFractions};
use crate::error::{Error, Result};
use crate::model::{mph_to_mps, mps_to_mph, Param, DEFAULT_EMERGENCY_DECEL};
use crate::network::CloverleafGeometry;
use crate::sampler::{is_sampled, ParamBounds, SAMPLED_PARAMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// All sampled parameters share one σ swept over the grid.
    HetSweep,
    /// Each factor's σ swept alone.
    Ofat,
    /// Sobol analysis over per-parameter heterogeneities.
    SobolHet,
    /// Sobol analysis over per-parameter means at fixed heterogeneity.
    SobolMean,
    /// Like `het-sweep` but only the ramped-inflow runs.
    Throughput,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::HetSweep,
        ExperimentKind::Ofat,
        ExperimentKind::SobolHet,
        ExperimentKind::SobolMean,
        ExperimentKind::Throughput,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::HetSweep => "het-sweep",
            ExperimentKind::Ofat => "ofat",
            ExperimentKind::SobolHet => "sobol-het",
            ExperimentKind::SobolMean => "sobol-mean",
            ExperimentKind::Throughput => "throughput",
        }
    }

    pub fn is_sobol(self) -> bool {
        matches!(self, ExperimentKind::SobolHet | ExperimentKind::SobolMean)
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Paper,
    Desk,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Scale::Paper),
            "desk" => Ok(Scale::Desk),
            _ => Err(Error::InvalidConfig(format!("unknown scale '{s}' (expected paper or desk)"))),
        }
    }
}

/// σ grid and replication of the sweep experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub points: usize,
    /// Fleet mean vectors sampled per grid (het-sweep and throughput only).
    pub means: usize,
    pub seeds: usize,
}

impl SweepSection {
    /// Evenly spaced values from `sigma_min` to `sigma_max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.sigma_max],
            n => (0..n)
                .map(|i| self.sigma_min + (self.sigma_max - self.sigma_min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.points == 0 {
            return Err(Error::InvalidConfig(format!("{what}: σ grid is empty")));
        }
        if !(self.sigma_min > 0.0 && self.sigma_min <= self.sigma_max && self.sigma_max < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "{what}: σ grid must satisfy 0 < sigma_min <= sigma_max < 1, got [{}, {}]",
                self.sigma_min, self.sigma_max
            )));
        }
        if self.seeds == 0 || self.means == 0 {
            return Err(Error::InvalidConfig(format!("{what}: seeds and means must be >= 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfatSection {
    /// Factor names; empty means every sampled parameter.
    pub factors: Vec<String>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub points: usize,
    pub seeds: usize,
}

impl OfatSection {
    pub fn sweep(&self) -> SweepSection {
        SweepSection {
            sigma_min: self.sigma_min,
            sigma_max: self.sigma_max,
            points: self.points,
            means: 1,
            seeds: self.seeds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolSection {
    pub base_samples: usize,
    pub second_order: bool,
    pub seeds: usize,
    /// Upper end of each σ factor in heterogeneity mode (lower end is 0).
    pub sigma_max: f64,
    /// Common σ in mean mode.
    pub sigma_fixed: f64,
    pub bootstrap_resamples: usize,
    pub confidence: f64,
    /// All design rows share one seed per replicate (common random numbers)
    /// instead of drawing independent arrivals and fleets.
    pub common_seed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub timestep_s: f64,
    pub duration_s: f64,
    pub inflow_vph: f64,
    pub ramp_start_vph: f64,
    pub ramp_end_vph: f64,
    pub emergency_decel_mps2: f64,
    pub lane_change_cooldown_s: f64,
    pub mandatory_zone_m: f64,
    pub lcps_normalization: LcpsNormalization,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let sim = SimulationConfig::constant_inflow();
        let (ramp_start_vph, ramp_end_vph) = match SimulationConfig::ramped_inflow().inflow {
            InflowSchedule::Ramp { start_vph, end_vph } => (start_vph, end_vph),
            InflowSchedule::Constant { vph } => (vph, vph),
        };
        Self {
            timestep_s: sim.timestep,
            duration_s: sim.duration,
            inflow_vph: sim.inflow.rate_at(0.0, sim.duration),
            ramp_start_vph,
            ramp_end_vph,
            emergency_decel_mps2: DEFAULT_EMERGENCY_DECEL,
            lane_change_cooldown_s: sim.lane_change_cooldown,
            mandatory_zone_m: sim.mandatory_zone,
            lcps_normalization: sim.lcps_normalization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub arm_length_m: f64,
    pub lanes: usize,
    pub ramp_length_m: f64,
    pub loop_length_m: f64,
    pub section_length_m: f64,
    pub bridge_length_m: f64,
    pub detector_spacing_m: f64,
    pub detector_window_s: f64,
    pub speed_context_mps: f64,
}

impl From<CloverleafGeometry> for GeometrySection {
    fn from(g: CloverleafGeometry) -> Self {
        Self {
            arm_length_m: g.arm_length,
            lanes: g.lanes,
            ramp_length_m: g.ramp_length,
            loop_length_m: g.loop_length,
            section_length_m: g.section_length,
            bridge_length_m: g.bridge_length,
            detector_spacing_m: g.detector_spacing,
            detector_window_s: g.detector_window,
            speed_context_mps: g.speed_context,
        }
    }
}

impl From<&GeometrySection> for CloverleafGeometry {
    fn from(g: &GeometrySection) -> Self {
        Self {
            arm_length: g.arm_length_m,
            lanes: g.lanes,
            ramp_length: g.ramp_length_m,
            loop_length: g.loop_length_m,
            section_length: g.section_length_m,
            bridge_length: g.bridge_length_m,
            detector_spacing: g.detector_spacing_m,
            detector_window: g.detector_window_s,
            speed_context: g.speed_context_mps,
        }
    }
}

fn merge_tables(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(dst)), toml::Value::Table(src)) if key != "bounds" => merge_tables(dst, src),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

/// Everything needed to run one campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub scale: Scale,
    pub master_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
    pub output_dir: Option<PathBuf>,
    /// Factors whose heterogeneity is held at `pinned_sigma` (sweeps and
    /// heterogeneity-mode Sobol) or whose mean stays at mid-range (mean mode).
    pub pinned: Vec<String>,
    pub pinned_sigma: f64,
    pub sweep: SweepSection,
    pub ofat: OfatSection,
    pub sobol: SobolSection,
    pub simulation: SimulationSection,
    pub geometry: GeometrySection,
    pub turns: TurnFractions,
    /// Parameter bounds overrides, e.g. `v0_mph = [40.0, 100.0]`.
    pub bounds: BTreeMap<String, [f64; 2]>,
}

impl ExperimentConfig {
    pub fn preset(kind: ExperimentKind, scale: Scale) -> Self {
        let paper = scale == Scale::Paper;
        Self {
            kind,
            scale,
            master_seed: 1,
            jobs: 0,
            output_dir: None,
            pinned: Vec::new(),
            pinned_sigma: 0.0,
            sweep: SweepSection {
                sigma_min: if paper { 0.008 } else { 0.04 },
                sigma_max: 0.4,
                points: if paper { 50 } else { 10 },
                means: if paper { 10 } else { 3 },
                seeds: if paper { 4 } else { 2 },
            },
            ofat: OfatSection {
                factors: Vec::new(),
                sigma_min: if paper { 0.008 } else { 0.04 },
                sigma_max: 0.4,
                points: if paper { 50 } else { 10 },
                seeds: 1,
            },
            sobol: SobolSection {
                base_samples: if paper { 2769 } else { 256 },
                second_order: false,
                seeds: 1,
                sigma_max: 0.4,
                sigma_fixed: 0.2,
                bootstrap_resamples: 1000,
                confidence: 0.95,
                common_seed: true,
            },
            simulation: SimulationSection::default(),
            geometry: CloverleafGeometry::default().into(),
            turns: TurnFractions::default(),
            bounds: BTreeMap::new(),
        }
    }

    /// Parses a configuration file. Keys it leaves out take the values of the
    /// preset named by its `kind` and `scale` (default `het-sweep`, `desk`).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let user: toml::Table = toml::from_str(text)?;
        let kind = match user.get("kind") {
            Some(v) => v.as_str().ok_or_else(|| Error::InvalidConfig("`kind` must be a string".into()))?.parse()?,
            None => ExperimentKind::HetSweep,
        };
        let scale = match user.get("scale") {
            Some(v) => v.as_str().ok_or_else(|| Error::InvalidConfig("`scale` must be a string".into()))?.parse()?,
            None => Scale::Desk,
        };
        let mut merged = toml::Table::try_from(Self::preset(kind, scale)).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        merge_tables(&mut merged, user);
        let config: Self = merged.try_into()?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::ConfigPath {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.validate("sweep")?;
        self.ofat.sweep().validate("ofat")?;
        for name in self.pinned.iter().chain(&self.ofat.factors) {
            factor_param(name)?;
        }
        if !(0.0..1.0).contains(&self.pinned_sigma) {
            return Err(Error::InvalidConfig("pinned_sigma must lie in [0, 1)".into()));
        }
        let s = &self.sobol;
        if s.base_samples < 2 || s.seeds == 0 {
            return Err(Error::InvalidConfig("sobol: base_samples >= 2 and seeds >= 1 required".into()));
        }
        if !(s.sigma_max > 0.0 && s.sigma_max < 1.0) || !(s.sigma_fixed >= 0.0 && s.sigma_fixed < 1.0) {
            return Err(Error::InvalidConfig("sobol: sigma_max and sigma_fixed must lie in [0, 1)".into()));
        }
        if self.kind.is_sobol() && self.factors().is_empty() {
            return Err(Error::InvalidConfig("sobol: every factor is pinned".into()));
        }
        self.bounds()?.validate()?;
        self.simulation_config(0, false).validate()
    }

    /// Sampled parameters that are not pinned, in sampling order.
    pub fn factors(&self) -> Vec<Param> {
        SAMPLED_PARAMS
            .into_iter()
            .filter(|p| !self.pinned.iter().any(|n| factor_param(n).ok() == Some(*p)))
            .collect()
    }

    pub fn pinned_params(&self) -> Vec<Param> {
        self.pinned.iter().filter_map(|n| factor_param(n).ok()).collect()
    }

    pub fn ofat_factors(&self) -> Result<Vec<Param>> {
        if self.ofat.factors.is_empty() {
            return Ok(SAMPLED_PARAMS.to_vec());
        }
        self.ofat.factors.iter().map(|n| factor_param(n)).collect()
    }

    /// Default bounds with the overrides of the `[bounds]` table applied.
    pub fn bounds(&self) -> Result<ParamBounds> {
        let mut bounds = ParamBounds::default();
        let mut seen = Vec::new();
        for (key, &[lo, hi]) in &self.bounds {
            let (param, to_si) = parse_bound_key(key)?;
            if seen.contains(&param) {
                return Err(Error::InvalidConfig(format!("bounds for {param} given twice")));
            }
            seen.push(param);
            bounds.min[param] = to_si(lo);
            bounds.max[param] = to_si(hi);
        }
        Ok(bounds)
    }

    /// Engine configuration for one run.
    pub fn simulation_config(&self, seed: u64, ramped: bool) -> SimulationConfig {
        let s = &self.simulation;
        SimulationConfig {
            timestep: s.timestep_s,
            duration: s.duration_s,
            inflow: if ramped {
                InflowSchedule::Ramp {
                    start_vph: s.ramp_start_vph,
                    end_vph: s.ramp_end_vph,
                }
            } else {
                InflowSchedule::Constant { vph: s.inflow_vph }
            },
            seed,
            geometry: (&self.geometry).into(),
            turns: self.turns,
            emergency_decel: s.emergency_decel_mps2,
            lane_change_cooldown: s.lane_change_cooldown_s,
            mandatory_zone: s.mandatory_zone_m,
            lcps_normalization: s.lcps_normalization,
            record_events: false,
        }
    }
}

/// Parses a factor name such as `v0` or `a_bias`; only sampled parameters qualify.
pub fn factor_param(name: &str) -> Result<Param> {
    match Param::from_name(name) {
        Some(p) if is_sampled(p) => Ok(p),
        _ => Err(Error::InvalidConfig(format!("'{name}' is not a sampled parameter"))),
    }
}

fn key_stem(param: Param) -> &'static str {
    match param {
        Param::T => "t",
        Param::Length => "length",
        p => p.name(),
    }
}

type ToSi = fn(f64) -> f64;

fn parse_bound_key(key: &str) -> Result<(Param, ToSi)> {
    let identity: ToSi = |x| x;
    for param in Param::ALL {
        let stem = key_stem(param);
        let Some(unit) = key.strip_prefix(stem) else {
            continue;
        };
        let convert: Option<ToSi> = match (param, unit) {
            (Param::V0 | Param::VCrit | Param::VMax, "_mph") => Some(mph_to_mps),
            (Param::V0 | Param::VCrit | Param::VMax, "_mps") => Some(identity),
            (Param::A | Param::B | Param::ADelta | Param::ABias | Param::BSafe, "_mps2") => Some(identity),
            (Param::S0 | Param::Length, "_m") => Some(identity),
            (Param::T, "_s") => Some(identity),
            (Param::P | Param::Delta | Param::C, "") => Some(identity),
            _ => None,
        };
        if let Some(convert) = convert {
            return Ok((param, convert));
        }
    }
    Err(Error::InvalidConfig(format!(
        "unknown bounds key '{key}' (expected e.g. v0_mph, v0_mps, a_mps2, s0_m, length_m, t_s, p, delta)"
    )))
}

/// Bounds written in their configuration units, for presets.
pub fn bounds_table(bounds: &ParamBounds) -> BTreeMap<String, [f64; 2]> {
    Param::ALL
        .into_iter()
        .map(|p| {
            let (lo, hi) = (bounds.min[p], bounds.max[p]);
            let key = bound_key(p);
            if p.is_velocity() {
                (key, [mps_to_mph(lo), mps_to_mph(hi)])
            } else {
                (key, [lo, hi])
            }
        })
        .collect()
}

fn bound_key(param: Param) -> String {
    let unit = match param {
        Param::V0 | Param::VCrit | Param::VMax => "_mph",
        Param::A | Param::B | Param::ADelta | Param::ABias | Param::BSafe => "_mps2",
        Param::S0 | Param::Length => "_m",
        Param::T => "_s",
        Param::P | Param::Delta | Param::C => "",
    };
    format!("{}{unit}", key_stem(param))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for kind in ExperimentKind::ALL {
            for scale in [Scale::Paper, Scale::Desk] {
                let config = ExperimentConfig::preset(kind, scale);
                config.validate().unwrap();
                let text = config.to_toml_string().unwrap();
                assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), config);
            }
        }
    }

    #[test]
    fn bounds_keys_carry_units() {
        let mut config = ExperimentConfig::preset(ExperimentKind::HetSweep, Scale::Desk);
        config.bounds.insert("v0_mph".into(), [50.0, 60.0]);
        config.bounds.insert("s0_m".into(), [2.0, 3.0]);
        let b = config.bounds().unwrap();
        assert!((b.min[Param::V0] - 50.0 * 0.44704).abs() < 1e-12);
        assert_eq!(b.max[Param::S0], 3.0);

        config.bounds.insert("v0_mps".into(), [20.0, 30.0]);
        assert!(config.bounds().is_err());
        config.bounds.clear();
        config.bounds.insert("v0".into(), [20.0, 30.0]);
        assert!(config.bounds().is_err());
    }

    #[test]
    fn bounds_table_round_trips_through_keys() {
        let table = bounds_table(&ParamBounds::default());
        let mut config = ExperimentConfig::preset(ExperimentKind::HetSweep, Scale::Desk);
        config.bounds = table;
        let b = config.bounds().unwrap();
        for p in Param::ALL {
            assert!((b.min[p] - ParamBounds::default().min[p]).abs() < 1e-12);
            assert!((b.max[p] - ParamBounds::default().max[p]).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_grid_is_rejected() {
        let mut config = ExperimentConfig::preset(ExperimentKind::HetSweep, Scale::Desk);
        config.sweep.points = 0;
        assert!(matches!(config.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn grid_values_are_evenly_spaced() {
        let config = ExperimentConfig::preset(ExperimentKind::HetSweep, Scale::Desk);
        let v = config.sweep.values();
        assert_eq!(v.len(), 10);
        assert!((v[0] - 0.04).abs() < 1e-15 && (v[9] - 0.4).abs() < 1e-15);
    }
}
