//! Campaign orchestration: job construction, parallel execution, aggregation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::engine::{run_simulation, MetricsRecord};
use crate::error::{Error, Result};
use crate::model::{ControllerParams, Param};
use crate::sampler::{derive_seed, label_hash, sample_mean_vector, stream_rng, FleetSpec, MarginRule, ParamBounds};
use crate::sensitivity::{
    saltelli_design, sobol_indices, BootstrapConfig, FactorBox, OfatResult, SensitivityResult, SobolDesign,
};

const MEAN_STREAM_TAG: u64 = 0x3EA7;
const BOOTSTRAP_TAG: u64 = 0xB007;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Lcps,
    MeanAbsAcc,
    MaxThroughputVph,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Lcps, Metric::MeanAbsAcc, Metric::MaxThroughputVph];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Lcps => "lcps",
            Metric::MeanAbsAcc => "mean_abs_acc",
            Metric::MaxThroughputVph => "max_throughput_vph",
        }
    }

    pub fn of(self, row: &RunRow) -> f64 {
        match self {
            Metric::Lcps => row.lcps,
            Metric::MeanAbsAcc => row.mean_abs_acc,
            Metric::MaxThroughputVph => row.max_throughput_vph,
        }
    }
}

/// One campaign run: the constant-inflow simulation provides the lane-change
/// and acceleration metrics, the ramped one the throughput.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    /// Grid point (sweeps) or design row (Sobol).
    pub point: usize,
    /// Swept factor (OFAT only).
    pub factor: Option<String>,
    pub sigma: f64,
    pub mean_id: usize,
    pub replicate: usize,
    pub seed: u64,
    /// Factor values of the design row (Sobol only).
    pub design: Vec<f64>,
    pub lcps: f64,
    pub mean_abs_acc: f64,
    pub max_throughput_vph: f64,
    pub crashed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub point: usize,
    pub factor: Option<String>,
    pub mean_id: usize,
    pub replicate: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub mean: f64,
    /// Sample standard deviation (0 for a single value).
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub metric: Metric,
    pub factor: Option<String>,
    pub points: Vec<SeriesPoint>,
}

/// Correlation of one metric's series with σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendTest {
    pub metric: Metric,
    pub factor: Option<String>,
    pub r: f64,
    pub p_value: f64,
    pub significant: bool,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSensitivity {
    pub metric: Metric,
    pub result: SensitivityResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub config: ExperimentConfig,
    pub simulations: usize,
    pub rows: Vec<RunRow>,
    pub failures: Vec<RunFailure>,
    pub mean_vectors: Vec<ControllerParams>,
    pub series: Vec<Series>,
    pub trends: Vec<TrendTest>,
    pub sensitivity: Vec<MetricSensitivity>,
}

impl CampaignResult {
    pub fn series_for(&self, metric: Metric, factor: Option<&str>) -> Option<&Series> {
        self.series.iter().find(|s| s.metric == metric && s.factor.as_deref() == factor)
    }

    pub fn trend_for(&self, metric: Metric, factor: Option<&str>) -> Option<&TrendTest> {
        self.trends.iter().find(|t| t.metric == metric && t.factor.as_deref() == factor)
    }

    pub fn sensitivity_for(&self, metric: Metric) -> Option<&SensitivityResult> {
        self.sensitivity.iter().find(|s| s.metric == metric).map(|s| &s.result)
    }
}

struct Job {
    point: usize,
    factor: Option<String>,
    sigma: f64,
    mean_id: usize,
    replicate: usize,
    seed: u64,
    design: Vec<f64>,
    fleet: FleetSpec,
}

/// Which simulations a campaign kind needs per run.
fn modes(kind: ExperimentKind) -> (bool, bool) {
    match kind {
        ExperimentKind::Throughput => (false, true),
        _ => (true, true),
    }
}

fn run_job(config: &ExperimentConfig, job: &Job) -> std::result::Result<RunRow, RunFailure> {
    let fail = |e: Error| RunFailure {
        point: job.point,
        factor: job.factor.clone(),
        mean_id: job.mean_id,
        replicate: job.replicate,
        message: e.to_string(),
    };
    let (constant, ramped) = modes(config.kind);
    let run = |ramp: bool| -> std::result::Result<MetricsRecord, RunFailure> {
        run_simulation(&config.simulation_config(job.seed, ramp), &job.fleet).map_err(fail)
    };
    let ramp_record = if ramped { Some(run(true)?) } else { None };
    let constant_record = if constant { Some(run(false)?) } else { None };
    let primary = constant_record.as_ref().or(ramp_record.as_ref()).expect("at least one mode");
    Ok(RunRow {
        point: job.point,
        factor: job.factor.clone(),
        sigma: job.sigma,
        mean_id: job.mean_id,
        replicate: job.replicate,
        seed: job.seed,
        design: job.design.clone(),
        lcps: primary.lane_changes_per_second,
        mean_abs_acc: primary.mean_absolute_acceleration,
        max_throughput_vph: ramp_record.as_ref().map_or(0.0, |r| r.max_throughput),
        crashed: constant_record.iter().chain(&ramp_record).any(MetricsRecord::crashed),
    })
}

fn execute(config: &ExperimentConfig, jobs: &[Job]) -> Result<(Vec<RunRow>, Vec<RunFailure>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| jobs.par_iter().map(|job| run_job(config, job)).collect());
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(f) => failures.push(f),
        }
    }
    Ok((rows, failures))
}

fn kind_tag(config: &ExperimentConfig) -> u64 {
    label_hash(config.kind.name())
}

/// Seed shared by every run with the same mean vector and replicate, so that
/// grid points differ only through σ (common random numbers).
pub fn run_seed(config: &ExperimentConfig, mean_id: usize, replicate: usize) -> u64 {
    derive_seed(&[config.master_seed, kind_tag(config), mean_id as u64, replicate as u64])
}

/// Seed of one Saltelli design row and replicate; every row draws its own
/// arrivals and fleet.
pub fn design_seed(config: &ExperimentConfig, point: usize, replicate: usize) -> u64 {
    derive_seed(&[config.master_seed, kind_tag(config), point as u64, 0, replicate as u64])
}

/// Fleet mean vectors of a sweep: drawn once with the margin of the largest σ
/// on the grid, then shared by every grid point.
pub fn sweep_mean_vectors(config: &ExperimentConfig, bounds: &ParamBounds) -> Result<Vec<ControllerParams>> {
    let seed = derive_seed(&[config.master_seed, kind_tag(config), MEAN_STREAM_TAG]);
    (0..config.sweep.means)
        .map(|m| {
            let mut rng = stream_rng(seed, m as u64);
            sample_mean_vector(bounds, config.sweep.sigma_max, MarginRule::default(), &mut rng)
        })
        .collect()
}

fn fleet_with_pins(config: &ExperimentConfig, bounds: ParamBounds, mean: ControllerParams, sigma: f64) -> FleetSpec {
    let mut fleet = FleetSpec::new(bounds, mean, sigma);
    for p in config.pinned_params() {
        fleet = fleet.with_sigma(p, config.pinned_sigma);
    }
    fleet
}

fn sample_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn build_series(rows: &[&RunRow], grid: &[f64], metric: Metric, factor: Option<String>) -> Series {
    let points = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let values: Vec<f64> = rows.iter().filter(|r| r.point == i && !r.crashed).map(|r| metric.of(r)).collect();
            let (mean, std) = sample_std(&values);
            SeriesPoint {
                x,
                mean,
                std,
                n: values.len(),
            }
        })
        .collect();
    Series { metric, factor, points }
}

fn trend(series: &Series) -> Result<Option<TrendTest>> {
    let pts: Vec<&SeriesPoint> = series.points.iter().filter(|p| p.n > 0).collect();
    if pts.len() < 3 {
        return Ok(None);
    }
    let name = series.factor.clone().unwrap_or_else(|| "sigma".into());
    let result = OfatResult::from_samples(name, pts.iter().map(|p| p.x).collect(), pts.iter().map(|p| p.mean).collect())?;
    Ok(Some(TrendTest {
        metric: series.metric,
        factor: series.factor.clone(),
        r: result.r,
        p_value: result.p_value,
        significant: result.is_significant(),
        degenerate: result.degenerate,
    }))
}

fn metrics_for(kind: ExperimentKind) -> &'static [Metric] {
    match kind {
        ExperimentKind::Throughput => &[Metric::MaxThroughputVph],
        _ => &Metric::ALL,
    }
}

/// σ sweep shared by all sampled parameters (`het-sweep`, `throughput`).
pub fn run_het_sweep(config: &ExperimentConfig) -> Result<CampaignResult> {
    config.validate()?;
    let bounds = config.bounds()?;
    let means = sweep_mean_vectors(config, &bounds)?;
    let grid = config.sweep.values();
    let mut jobs = Vec::new();
    for (point, &sigma) in grid.iter().enumerate() {
        for (mean_id, mean) in means.iter().enumerate() {
            for replicate in 0..config.sweep.seeds {
                jobs.push(Job {
                    point,
                    factor: None,
                    sigma,
                    mean_id,
                    replicate,
                    seed: run_seed(config, mean_id, replicate),
                    design: Vec::new(),
                    fleet: fleet_with_pins(config, bounds, *mean, sigma),
                });
            }
        }
    }
    let (rows, failures) = execute(config, &jobs)?;
    let all: Vec<&RunRow> = rows.iter().collect();
    let mut series = Vec::new();
    let mut trends = Vec::new();
    for &metric in metrics_for(config.kind) {
        let s = build_series(&all, &grid, metric, None);
        trends.extend(trend(&s)?);
        series.push(s);
    }
    Ok(CampaignResult {
        config: config.clone(),
        simulations: jobs.len() * simulations_per_run(config.kind),
        rows,
        failures,
        mean_vectors: means,
        series,
        trends,
        sensitivity: Vec::new(),
    })
}

fn simulations_per_run(kind: ExperimentKind) -> usize {
    let (c, r) = modes(kind);
    c as usize + r as usize
}

/// Sweeps each factor's σ alone with every other σ at 0 and the fleet mean at mid-range.
pub fn run_ofat_campaign(config: &ExperimentConfig) -> Result<CampaignResult> {
    config.validate()?;
    let bounds = config.bounds()?;
    let factors = config.ofat_factors()?;
    let sweep = config.ofat.sweep();
    let grid = sweep.values();
    let mean = bounds.midpoint();
    let mut jobs = Vec::new();
    for &factor in &factors {
        for (point, &sigma) in grid.iter().enumerate() {
            for replicate in 0..sweep.seeds {
                jobs.push(Job {
                    point,
                    factor: Some(factor.name().to_string()),
                    sigma,
                    mean_id: 0,
                    replicate,
                    seed: run_seed(config, 0, replicate),
                    design: Vec::new(),
                    fleet: FleetSpec::new(bounds, mean, 0.0).with_sigma(factor, sigma),
                });
            }
        }
    }
    let (rows, failures) = execute(config, &jobs)?;
    let mut series = Vec::new();
    let mut trends = Vec::new();
    for &factor in &factors {
        let of_factor: Vec<&RunRow> = rows.iter().filter(|r| r.factor.as_deref() == Some(factor.name())).collect();
        for metric in Metric::ALL {
            let s = build_series(&of_factor, &grid, metric, Some(factor.name().to_string()));
            trends.extend(trend(&s)?);
            series.push(s);
        }
    }
    Ok(CampaignResult {
        config: config.clone(),
        simulations: jobs.len() * simulations_per_run(config.kind),
        rows,
        failures,
        mean_vectors: vec![mean],
        series,
        trends,
        sensitivity: Vec::new(),
    })
}

/// Factor box of a Sobol campaign.
pub fn sobol_factor_box(config: &ExperimentConfig, bounds: &ParamBounds) -> Result<FactorBox> {
    let factors = config.factors();
    let names = factors.iter().map(|p| p.name().to_string()).collect();
    match config.kind {
        ExperimentKind::SobolMean => {
            let rule = MarginRule::default();
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            for &p in &factors {
                let margin = rule.margin(bounds, p, config.sobol.sigma_fixed);
                let half = 0.5 * bounds.range(p);
                if margin > 0.0 && margin >= half {
                    return Err(Error::EmptyInterval {
                        name: p.name(),
                        margin,
                        half_range: half,
                    });
                }
                lower.push(bounds.min[p] + margin);
                upper.push(bounds.max[p] - margin);
            }
            FactorBox::new(names, lower, upper)
        }
        _ => FactorBox::new(names, vec![0.0; factors.len()], vec![config.sobol.sigma_max; factors.len()]),
    }
}

fn design_fleet(config: &ExperimentConfig, bounds: ParamBounds, factors: &[Param], values: &[f64]) -> FleetSpec {
    match config.kind {
        ExperimentKind::SobolMean => {
            let mut mean = bounds.midpoint();
            for (&p, &v) in factors.iter().zip(values) {
                mean.set(p, v);
            }
            FleetSpec::new(bounds, mean, config.sobol.sigma_fixed)
        }
        _ => {
            let mut fleet = FleetSpec::new(bounds, bounds.midpoint(), 0.0);
            for p in config.pinned_params() {
                fleet = fleet.with_sigma(p, config.pinned_sigma);
            }
            for (&p, &v) in factors.iter().zip(values) {
                fleet = fleet.with_sigma(p, v);
            }
            fleet
        }
    }
}

/// Saltelli design over the campaign's factor space.
pub fn sobol_campaign_design(config: &ExperimentConfig) -> Result<SobolDesign> {
    let bounds = config.bounds()?;
    saltelli_design(sobol_factor_box(config, &bounds)?, config.sobol.base_samples, config.sobol.second_order)
}

/// Variance-based analysis of the three metrics (`sobol-het`, `sobol-mean`).
pub fn run_sobol_campaign(config: &ExperimentConfig) -> Result<CampaignResult> {
    config.validate()?;
    if !config.kind.is_sobol() {
        return Err(Error::InvalidConfig(format!("{} is not a Sobol campaign", config.kind.name())));
    }
    let bounds = config.bounds()?;
    let factors = config.factors();
    let design = sobol_campaign_design(config)?;
    let mut jobs = Vec::with_capacity(design.evaluations() * config.sobol.seeds);
    for (point, values) in design.rows().into_iter().enumerate() {
        for replicate in 0..config.sobol.seeds {
            jobs.push(Job {
                point,
                factor: None,
                sigma: if config.kind == ExperimentKind::SobolMean { config.sobol.sigma_fixed } else { 0.0 },
                mean_id: 0,
                replicate,
                seed: if config.sobol.common_seed {
                    run_seed(config, 0, replicate)
                } else {
                    design_seed(config, point, replicate)
                },
                fleet: design_fleet(config, bounds, &factors, &values),
                design: values.clone(),
            });
        }
    }
    let (rows, failures) = execute(config, &jobs)?;
    if let Some(f) = failures.first() {
        return Err(Error::InvalidConfig(format!("design row {} failed: {}", f.point, f.message)));
    }
    let mut sensitivity = Vec::new();
    for (i, metric) in Metric::ALL.into_iter().enumerate() {
        let mut outputs = vec![0.0; design.evaluations()];
        for row in &rows {
            outputs[row.point] += metric.of(row) / config.sobol.seeds as f64;
        }
        let bootstrap = BootstrapConfig {
            resamples: config.sobol.bootstrap_resamples,
            confidence: config.sobol.confidence,
            seed: derive_seed(&[config.master_seed, kind_tag(config), BOOTSTRAP_TAG, i as u64]),
        };
        sensitivity.push(MetricSensitivity {
            metric,
            result: sobol_indices(&design, &outputs, &bootstrap)?,
        });
    }
    Ok(CampaignResult {
        config: config.clone(),
        simulations: jobs.len() * simulations_per_run(config.kind),
        rows,
        failures,
        mean_vectors: vec![bounds.midpoint()],
        series: Vec::new(),
        trends: Vec::new(),
        sensitivity,
    })
}

/// Runs whichever campaign `config.kind` selects.
pub fn run_campaign(config: &ExperimentConfig) -> Result<CampaignResult> {
    match config.kind {
        ExperimentKind::HetSweep | ExperimentKind::Throughput => run_het_sweep(config),
        ExperimentKind::Ofat => run_ofat_campaign(config),
        ExperimentKind::SobolHet | ExperimentKind::SobolMean => run_sobol_campaign(config),
    }
}
