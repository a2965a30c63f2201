use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use hetflow::experiments::{ExperimentConfig, ExperimentKind, Scale};
use hetflow::sampler::ParamBounds;

fn hetflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetflow")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn presets_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

#[test]
fn validate_config_reports_campaign_sizes() {
    for (scale, kind, runs) in [
        ("paper", "het-sweep", 2000),
        ("paper", "ofat", 550),
        ("paper", "sobol-het", 2769 * 13),
        ("desk", "het-sweep", 60),
        ("desk", "ofat", 110),
        ("desk", "sobol-het", 3328),
    ] {
        let out = hetflow(&["--scale", scale, "validate-config", "--kind", kind]);
        assert!(out.status.success());
        assert!(stdout(&out).contains(&format!(": {runs} runs")), "{scale} {kind}: {}", stdout(&out));
    }
}

#[test]
fn bundled_presets_match_builtin_presets() {
    for scale in [Scale::Paper, Scale::Desk] {
        for kind in ExperimentKind::ALL {
            let name = format!("{}-{}.toml", if scale == Scale::Paper { "paper" } else { "desk" }, kind.name());
            let mut loaded = ExperimentConfig::load(&presets_dir().join(&name)).unwrap();
            let bounds = loaded.bounds().unwrap();
            let table = ParamBounds::default();
            for p in hetflow::model::Param::ALL {
                assert!((bounds.min[p] - table.min[p]).abs() < 1e-9 && (bounds.max[p] - table.max[p]).abs() < 1e-9);
            }
            loaded.bounds.clear();
            assert_eq!(loaded, ExperimentConfig::preset(kind, scale), "{name}");

            let out = hetflow(&["--config", presets_dir().join(&name).to_str().unwrap(), "validate-config"]);
            assert!(out.status.success(), "{name}");
        }
    }
}

#[test]
fn simulate_writes_metrics_and_logs() {
    let dir = tempfile::tempdir().unwrap();
    let out = hetflow(&["--out", dir.path().to_str().unwrap(), "--seed", "4", "simulate", "--sigma", "0.3", "--events"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["lane_changes_per_second"].as_f64().unwrap() > 0.0);
    let df = fs::read_to_string(dir.path().join("density_flow.csv")).unwrap();
    assert_eq!(df.lines().next().unwrap(), "window_start,detector,density,flow");
    let events = fs::read_to_string(dir.path().join("events.csv")).unwrap();
    assert!(events.lines().count() > 100);
}

#[test]
fn unwritable_output_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let target = blocker.join("out");
    let out = hetflow(&["--scale", "paper", "--out", target.to_str().unwrap(), "sobol"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not writable"));
    assert!(stdout(&out).is_empty(), "no campaign output expected");
}

#[test]
fn config_file_drives_a_campaign() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.toml");
    fs::write(
        &config,
        "kind = \"het-sweep\"\njobs = 1\n[sweep]\npoints = 3\nmeans = 1\nseeds = 1\n[simulation]\nduration_s = 20.0\n",
    )
    .unwrap();
    let run = |seed: &str, sub: &str| {
        let out_dir = dir.path().join(format!("{sub}-{seed}"));
        let out = hetflow(&["--config", config.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--seed", seed, sub]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(out_dir.join("runs.csv")).unwrap()
    };
    let a = run("5", "het-sweep");
    assert_eq!(String::from_utf8_lossy(&a).lines().count(), 4);
    assert_eq!(a, run("5", "het-sweep"));
    assert_ne!(a, run("6", "het-sweep"));
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "[sweep]\npoints = 0\n").unwrap();
    let out = hetflow(&["--config", config.to_str().unwrap(), "validate-config"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid is empty"));
    let out = hetflow(&["--config", "/nonexistent/config.toml", "validate-config"]);
    assert!(!out.status.success());
}
