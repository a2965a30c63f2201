//! Sweeps the heterogeneity of two parameters one at a time and reports the
//! correlation test for each metric.

use hetflow::experiments::{run_ofat_campaign, ExperimentConfig, ExperimentKind, Metric, Scale};

fn main() -> hetflow::Result<()> {
    let mut config = ExperimentConfig::preset(ExperimentKind::Ofat, Scale::Desk);
    config.ofat.factors = vec!["v0".into(), "s0".into()];
    config.ofat.points = 5;
    config.simulation.duration_s = 60.0;

    let result = run_ofat_campaign(&config)?;
    println!("{} simulations", result.simulations);
    for factor in &config.ofat.factors {
        for metric in Metric::ALL {
            if let Some(t) = result.trend_for(metric, Some(factor)) {
                println!(
                    "σ({factor:<3}) vs {:<20} r = {:+.3}  p = {:.3}{}",
                    metric.name(),
                    t.r,
                    t.p_value,
                    if t.significant { "  significant" } else { "" }
                );
            }
        }
    }
    Ok(())
}
