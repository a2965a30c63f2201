use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hetflow::engine::{write_events_csv, Simulation};
use hetflow::experiments::{
    bounds_table, emit_outputs, prepare_output_dir, run_campaign, sobol_campaign_design, CampaignResult, ExperimentConfig,
    ExperimentKind, Scale,
};
use hetflow::sampler::FleetSpec;

#[derive(Parser)]
#[command(name = "hetflow", version, about = "Heterogeneous traffic simulation and sensitivity campaigns")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; defaults to the preset chosen by --scale.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = ScaleArg::Desk)]
    scale: ScaleArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Paper,
    Desk,
}

#[derive(Clone, Copy, ValueEnum)]
enum SobolMode {
    /// Factors are per-parameter heterogeneities.
    Het,
    /// Factors are per-parameter means at fixed heterogeneity.
    Mean,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its metrics.
    Simulate {
        /// Heterogeneity shared by every sampled parameter.
        #[arg(long, default_value_t = 0.2)]
        sigma: f64,
        /// Use the ramped inflow schedule.
        #[arg(long)]
        ramped: bool,
        /// Also write the per-vehicle event log.
        #[arg(long)]
        events: bool,
    },
    /// Sweep a common σ over the grid.
    HetSweep {
        /// Pin the heterogeneity of these factors (e.g. --pin v0).
        #[arg(long, value_delimiter = ',')]
        pin: Vec<String>,
        /// Only run the ramped-inflow throughput simulations.
        #[arg(long)]
        throughput_only: bool,
    },
    /// Sweep each factor's σ alone.
    Ofat {
        /// Restrict the sweep to these factors.
        #[arg(long, value_delimiter = ',')]
        factors: Vec<String>,
    },
    /// Variance-based sensitivity campaign.
    Sobol {
        #[arg(long, value_enum, default_value_t = SobolMode::Het)]
        mode: SobolMode,
        #[arg(long, value_delimiter = ',')]
        pin: Vec<String>,
    },
    /// Check a configuration and report the campaign size.
    ValidateConfig {
        /// Experiment kind of the preset to check when no --config is given.
        #[arg(long)]
        kind: Option<ExperimentKind>,
        /// Print the resolved configuration as TOML.
        #[arg(long)]
        print: bool,
    },
}

fn load_config(common: &Common, kind: Option<ExperimentKind>) -> hetflow::Result<ExperimentConfig> {
    let scale = match common.scale {
        ScaleArg::Paper => Scale::Paper,
        ScaleArg::Desk => Scale::Desk,
    };
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::preset(kind.unwrap_or(ExperimentKind::HetSweep), scale),
    };
    if let Some(kind) = kind {
        config.kind = kind;
    }
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    if let Some(jobs) = common.jobs {
        config.jobs = jobs;
    }
    if let Some(out) = &common.out {
        config.output_dir = Some(out.clone());
    }
    Ok(config)
}

fn output_dir(config: &ExperimentConfig) -> PathBuf {
    config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(config.kind.name()))
}

fn campaign(config: ExperimentConfig) -> hetflow::Result<()> {
    config.validate()?;
    let dir = output_dir(&config);
    prepare_output_dir(&dir)?;
    let result = run_campaign(&config)?;
    report(&result);
    for path in emit_outputs(&result, &dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn report(result: &CampaignResult) {
    println!(
        "{}: {} simulations, {} runs, {} failed, {} crashed",
        result.config.kind.name(),
        result.simulations,
        result.rows.len(),
        result.failures.len(),
        result.rows.iter().filter(|r| r.crashed).count()
    );
    for t in &result.trends {
        println!(
            "  {:<20} {:<8} r = {:+.3}  p = {:.3e}{}",
            t.metric.name(),
            t.factor.as_deref().unwrap_or("sigma"),
            t.r,
            t.p_value,
            if t.significant { "  *" } else { "" }
        );
    }
    for s in &result.sensitivity {
        println!("  {}", s.metric.name());
        for (name, idx) in s.result.factors.iter().zip(&s.result.first) {
            println!("    S[{name:<7}] = {:+.3}  [{:+.3}, {:+.3}]", idx.estimate, idx.ci_low, idx.ci_high);
        }
    }
}

fn simulate(config: ExperimentConfig, sigma: f64, ramped: bool, events: bool) -> hetflow::Result<()> {
    let dir = output_dir(&config);
    prepare_output_dir(&dir)?;
    let bounds = config.bounds()?;
    let mut sim_config = config.simulation_config(config.master_seed, ramped);
    sim_config.record_events = events;
    let fleet = FleetSpec::new(bounds, bounds.midpoint(), sigma);
    let mut sim = Simulation::new(sim_config, fleet)?;
    let mut crash = None;
    while sim.time() < sim.config().duration - 0.5 * sim.config().timestep {
        if let Err(e) = sim.step() {
            crash = Some(e);
            break;
        }
    }
    let record = sim.metrics();
    println!(
        "lcps = {:.4}  mean |acc| = {:.4} m/s²  max throughput = {:.0} veh/h  inserted = {}  exited = {}",
        record.lane_changes_per_second, record.mean_absolute_acceleration, record.max_throughput, record.inserted, record.exited
    );
    if let Some(e) = &crash {
        println!("run aborted: {e}");
    }
    let path = dir.join("metrics.json");
    let file = File::create(&path).map_err(|source| hetflow::Error::OutputPath { path: path.clone(), source })?;
    serde_json::to_writer_pretty(BufWriter::new(file), &record)?;
    println!("wrote {}", path.display());
    let path = dir.join("density_flow.csv");
    let file = File::create(&path).map_err(|source| hetflow::Error::OutputPath { path: path.clone(), source })?;
    let mut out = BufWriter::new(file);
    writeln!(out, "window_start,detector,density,flow")
        .and_then(|_| {
            for s in record.density_flow.iter().chain(&record.detector_samples) {
                let detector = s.detector.map_or_else(|| "network".to_string(), |d| d.to_string());
                writeln!(out, "{},{detector},{},{}", s.window_start, s.density, s.flow)?;
            }
            out.flush()
        })
        .map_err(|source| hetflow::Error::OutputPath { path: path.clone(), source })?;
    println!("wrote {}", path.display());
    if events {
        let path = dir.join("events.csv");
        let file = File::create(&path).map_err(|source| hetflow::Error::OutputPath { path: path.clone(), source })?;
        write_events_csv(BufWriter::new(file), sim.events())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn validate(config: &ExperimentConfig, print: bool) -> hetflow::Result<()> {
    config.validate()?;
    let runs = match config.kind {
        ExperimentKind::HetSweep | ExperimentKind::Throughput => {
            config.sweep.points * config.sweep.means * config.sweep.seeds
        }
        ExperimentKind::Ofat => config.ofat_factors()?.len() * config.ofat.points * config.ofat.seeds,
        ExperimentKind::SobolHet | ExperimentKind::SobolMean => {
            sobol_campaign_design(config)?.evaluations() * config.sobol.seeds
        }
    };
    println!("{} configuration is valid: {runs} runs", config.kind.name());
    if print {
        let mut shown = config.clone();
        if shown.bounds.is_empty() {
            shown.bounds = bounds_table(&config.bounds()?);
        }
        print!("{}", shown.to_toml_string()?);
    }
    Ok(())
}

fn run(cli: Cli) -> hetflow::Result<()> {
    match cli.command {
        Command::Simulate { sigma, ramped, events } => simulate(load_config(&cli.common, None)?, sigma, ramped, events),
        Command::HetSweep { pin, throughput_only } => {
            let kind = if throughput_only { ExperimentKind::Throughput } else { ExperimentKind::HetSweep };
            let mut config = load_config(&cli.common, Some(kind))?;
            config.pinned.extend(pin);
            campaign(config)
        }
        Command::Ofat { factors } => {
            let mut config = load_config(&cli.common, Some(ExperimentKind::Ofat))?;
            if !factors.is_empty() {
                config.ofat.factors = factors;
            }
            campaign(config)
        }
        Command::Sobol { mode, pin } => {
            let kind = match mode {
                SobolMode::Het => ExperimentKind::SobolHet,
                SobolMode::Mean => ExperimentKind::SobolMean,
            };
            let mut config = load_config(&cli.common, Some(kind))?;
            config.pinned.extend(pin);
            campaign(config)
        }
        Command::ValidateConfig { kind, print } => validate(&load_config(&cli.common, kind)?, print),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
