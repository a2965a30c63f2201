use std::fs;

use hetflow::experiments::{
    emit_outputs, prepare_output_dir, read_summary, run_campaign, run_het_sweep, run_ofat_campaign, run_sobol_campaign,
    sobol_campaign_design, write_runs_csv, write_sensitivity_csv, write_series_csv, ExperimentConfig, ExperimentKind,
    Metric, Scale,
};
use hetflow::Error;

fn quick(kind: ExperimentKind) -> ExperimentConfig {
    let mut config = ExperimentConfig::preset(kind, Scale::Desk);
    config.simulation.duration_s = 30.0;
    config
}

#[test]
fn two_point_sweep_has_two_rows() {
    let mut config = quick(ExperimentKind::HetSweep);
    config.sweep.sigma_min = 0.01;
    config.sweep.sigma_max = 0.4;
    config.sweep.points = 2;
    config.sweep.means = 1;
    config.sweep.seeds = 1;
    let result = run_het_sweep(&config).unwrap();
    assert_eq!(result.rows.len(), 2);
    assert_eq!(result.simulations, 4, "constant and ramped run per row");
    assert_eq!(result.series.len(), 3);
    assert!(result.trends.is_empty(), "two points are too few for a trend test");

    config.kind = ExperimentKind::Throughput;
    let result = run_het_sweep(&config).unwrap();
    assert_eq!((result.rows.len(), result.simulations), (2, 2));
    assert_eq!(result.series.len(), 1);
}

#[test]
fn desk_ofat_and_sobol_counts() {
    let config = quick(ExperimentKind::Ofat);
    assert_eq!(config.ofat_factors().unwrap().len() * config.ofat.points * config.ofat.seeds, 110);
    let config = quick(ExperimentKind::SobolHet);
    assert_eq!(sobol_campaign_design(&config).unwrap().evaluations(), 3328);
    let paper = ExperimentConfig::preset(ExperimentKind::HetSweep, Scale::Paper);
    assert_eq!(paper.sweep.points * paper.sweep.means * paper.sweep.seeds, 2000);
    let paper = ExperimentConfig::preset(ExperimentKind::Ofat, Scale::Paper);
    assert_eq!(paper.ofat_factors().unwrap().len() * paper.ofat.points * paper.ofat.seeds, 550);
}

#[test]
fn empty_grid_fails_validation() {
    let mut config = quick(ExperimentKind::HetSweep);
    config.sweep.points = 0;
    assert!(matches!(run_het_sweep(&config), Err(Error::InvalidConfig(_))));
}

#[test]
fn v0_ofat_raises_lane_changes() {
    let mut config = ExperimentConfig::preset(ExperimentKind::Ofat, Scale::Paper);
    config.ofat.factors = vec!["v0".into()];
    let result = run_ofat_campaign(&config).unwrap();
    assert_eq!(result.rows.len(), 50);
    let trend = result.trend_for(Metric::Lcps, Some("v0")).unwrap();
    assert!(trend.significant && trend.r > 0.0, "{trend:?}");
}

#[test]
fn series_are_recomputable_from_rows() {
    let mut config = quick(ExperimentKind::HetSweep);
    config.sweep.points = 3;
    config.sweep.means = 2;
    let result = run_het_sweep(&config).unwrap();
    for metric in Metric::ALL {
        let series = result.series_for(metric, None).unwrap();
        for (i, p) in series.points.iter().enumerate() {
            let values: Vec<f64> = result.rows.iter().filter(|r| r.point == i && !r.crashed).map(|r| metric.of(r)).collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            assert_eq!(p.n, values.len());
            assert!((p.mean - mean).abs() <= 1e-12 * mean.abs().max(1.0));
            assert!((p.std - std).abs() <= 1e-12 * std.abs().max(1.0));
        }
    }
}

#[test]
fn summary_json_round_trips() {
    let mut config = quick(ExperimentKind::SobolHet);
    config.sobol.base_samples = 4;
    config.sobol.bootstrap_resamples = 50;
    let result = run_sobol_campaign(&config).unwrap();
    assert_eq!(result.sensitivity.len(), 3);
    let dir = tempfile::tempdir().unwrap();
    let written = emit_outputs(&result, dir.path()).unwrap();
    let names: Vec<String> = written.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    for name in ["runs.csv", "sensitivity_lcps.csv", "sensitivity_mean_abs_acc.csv", "sensitivity_max_throughput_vph.csv", "summary.json"] {
        assert!(names.iter().any(|n| n == name), "{name} missing");
    }
    assert_eq!(read_summary(&dir.path().join("summary.json")).unwrap(), result);
    let sens = fs::read_to_string(dir.path().join("sensitivity_lcps.csv")).unwrap();
    assert_eq!(sens.lines().next().unwrap(), "factor,order,estimate,ci_low,ci_high");
    assert_eq!(sens.lines().count(), 1 + 2 * 11);
}

#[test]
fn sweep_emits_one_series_file_per_metric() {
    let mut config = quick(ExperimentKind::HetSweep);
    config.sweep.points = 3;
    config.sweep.means = 1;
    config.sweep.seeds = 1;
    let result = run_het_sweep(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_outputs(&result, dir.path()).unwrap();
    for metric in Metric::ALL {
        let text = fs::read_to_string(dir.path().join(format!("series_{}.csv", metric.name()))).unwrap();
        assert_eq!(text.lines().next().unwrap(), "x,mean,std,n");
        assert_eq!(text.lines().count(), 4);
    }
    let runs = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    assert_eq!(runs.lines().next().unwrap(), "sigma,mean_id,seed,lcps,mean_abs_acc,max_throughput_vph,crashed");
}

#[test]
fn empty_results_give_header_only_files() {
    let mut out = Vec::new();
    write_runs_csv(&mut out, ExperimentKind::HetSweep, &[], &[]).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "sigma,mean_id,seed,lcps,mean_abs_acc,max_throughput_vph,crashed\n");
    let mut out = Vec::new();
    write_series_csv(&mut out, [], false).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "x,mean,std,n\n");
    let mut config = quick(ExperimentKind::SobolHet);
    config.sobol.base_samples = 2;
    config.sobol.bootstrap_resamples = 10;
    let mut result = run_sobol_campaign(&config).unwrap();
    result.sensitivity[0].result.first.clear();
    result.sensitivity[0].result.total.clear();
    let mut out = Vec::new();
    write_sensitivity_csv(&mut out, &result.sensitivity[0].result).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "factor,order,estimate,ci_low,ci_high\n");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let mut config = quick(ExperimentKind::Ofat);
    config.ofat.factors = vec!["v0".into(), "a".into()];
    config.ofat.points = 3;
    let mut texts = Vec::new();
    for jobs in [1, 3, 1] {
        config.jobs = jobs;
        let dir = tempfile::tempdir().unwrap();
        emit_outputs(&run_campaign(&config).unwrap(), dir.path()).unwrap();
        texts.push(fs::read(dir.path().join("runs.csv")).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
    config.master_seed += 1;
    let dir = tempfile::tempdir().unwrap();
    emit_outputs(&run_campaign(&config).unwrap(), dir.path()).unwrap();
    assert_ne!(texts[0], fs::read(dir.path().join("runs.csv")).unwrap());
}

#[test]
fn unwritable_output_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    assert!(matches!(prepare_output_dir(&file.join("sub")), Err(Error::OutputPath { .. })));
}

#[test]
fn toml_file_with_unit_suffixed_keys() {
    let text = r#"
kind = "het-sweep"
scale = "desk"
master_seed = 7
jobs = 1

[sweep]
sigma_min = 0.05
sigma_max = 0.3
points = 4
means = 2
seeds = 1

[simulation]
duration_s = 45.0
inflow_vph = 3000.0

[bounds]
v0_mph = [50.0, 100.0]
length_m = [4.0, 12.0]
"#;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    fs::write(&path, text).unwrap();
    let config = ExperimentConfig::load(&path).unwrap();
    assert_eq!(config.master_seed, 7);
    assert_eq!(config.sweep.values().len(), 4);
    let bounds = config.bounds().unwrap();
    assert!((bounds.max[hetflow::model::Param::V0] - 100.0 * 0.44704).abs() < 1e-12);
    assert_eq!(bounds.min[hetflow::model::Param::Length], 4.0);
    let sim = config.simulation_config(1, false);
    assert_eq!(sim.duration, 45.0);

    assert!(ExperimentConfig::from_toml_str(&text.replace("duration_s", "duration")).is_err());
    assert!(ExperimentConfig::from_toml_str(&text.replace("v0_mph", "v0")).is_err());
}

#[test]
fn sobol_rows_share_or_split_seeds() {
    let mut config = quick(ExperimentKind::SobolHet);
    config.sobol.base_samples = 2;
    config.sobol.bootstrap_resamples = 10;
    let shared = run_sobol_campaign(&config).unwrap();
    assert!(shared.rows.iter().all(|r| r.seed == shared.rows[0].seed));

    config.sobol.common_seed = false;
    let split = run_sobol_campaign(&config).unwrap();
    let mut seeds: Vec<u64> = split.rows.iter().map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), split.rows.len());
}
