//! Campaign orchestration: heterogeneity sweeps, OFAT and Sobol analyses,
//! configuration files, seeding, parallel execution and output files.

mod campaign;
mod config;
mod output;

pub use campaign::{
    design_seed, run_campaign, run_het_sweep, run_ofat_campaign, run_seed, run_sobol_campaign, sobol_campaign_design,
    sobol_factor_box, sweep_mean_vectors, CampaignResult, Metric, MetricSensitivity, RunFailure, RunRow, Series,
    SeriesPoint, TrendTest,
};
pub use config::{
    bounds_table, factor_param, ExperimentConfig, ExperimentKind, GeometrySection, OfatSection, Scale,
    SimulationSection, SobolSection, SweepSection,
};
pub use output::{
    emit_outputs, prepare_output_dir, read_summary, write_runs_csv, write_sensitivity_csv, write_series_csv,
    write_trends_csv,
};
