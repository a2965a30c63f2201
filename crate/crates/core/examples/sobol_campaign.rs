//! A small variance-based campaign over the heterogeneity of every sampled
//! parameter. The desk preset uses 256 base samples; this one uses 16 so it
//! finishes in under a minute, which leaves the confidence intervals wide.

use hetflow::experiments::{run_sobol_campaign, sobol_campaign_design, ExperimentConfig, ExperimentKind, Scale};

fn main() -> hetflow::Result<()> {
    let mut config = ExperimentConfig::preset(ExperimentKind::SobolHet, Scale::Desk);
    config.sobol.base_samples = 16;
    config.simulation.duration_s = 60.0;

    let design = sobol_campaign_design(&config)?;
    println!("{} factors, {} design rows", design.dimension(), design.evaluations());

    let result = run_sobol_campaign(&config)?;
    for s in &result.sensitivity {
        println!("{}", s.metric.name());
        let mut ranked: Vec<_> = s.result.factors.iter().zip(s.result.first.iter().zip(&s.result.total)).collect();
        ranked.sort_by(|a, b| b.1 .1.estimate.total_cmp(&a.1 .1.estimate));
        for (name, (first, total)) in ranked.into_iter().take(4) {
            println!(
                "  {name:<8} S1 = {:+.2} [{:+.2}, {:+.2}]   ST = {:+.2}",
                first.estimate, first.ci_low, first.ci_high, total.estimate
            );
        }
    }
    Ok(())
}
