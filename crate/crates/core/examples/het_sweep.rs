//! A reduced common-σ sweep: three grid points, two fleet means, one seed.
//!
//! Pass an output directory as the first argument to also write the CSV and
//! JSON files.

use std::path::PathBuf;

use hetflow::experiments::{emit_outputs, run_het_sweep, ExperimentConfig, ExperimentKind, Metric, Scale};

fn main() -> hetflow::Result<()> {
    let mut config = ExperimentConfig::preset(ExperimentKind::HetSweep, Scale::Desk);
    config.sweep.sigma_min = 0.01;
    config.sweep.points = 3;
    config.sweep.means = 2;
    config.sweep.seeds = 1;

    let result = run_het_sweep(&config)?;
    println!("{} simulations", result.simulations);
    for metric in Metric::ALL {
        let series = result.series_for(metric, None).expect("every metric has a series");
        let cells: Vec<String> = series.points.iter().map(|p| format!("σ={:.2}: {:.3}±{:.3}", p.x, p.mean, p.std)).collect();
        let trend = result.trend_for(metric, None).expect("every metric has a trend test");
        println!("{:<20} {}  (r = {:+.2})", metric.name(), cells.join("  "), trend.r);
    }

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        for path in emit_outputs(&result, &dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
