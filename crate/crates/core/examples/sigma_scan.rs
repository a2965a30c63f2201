use std::time::Instant;

use hetflow::engine::{run_simulation, SimulationConfig};
use hetflow::sampler::{FleetSpec, ParamBounds};

fn main() -> hetflow::Result<()> {
    let bounds = ParamBounds::default();
    for ramp in [false, true] {
        for sigma in [0.0, 0.1, 0.2, 0.3, 0.4] {
            let mut config = if ramp { SimulationConfig::ramped_inflow() } else { SimulationConfig::constant_inflow() };
            config.seed = 7;
            let fleet = FleetSpec::new(bounds, bounds.midpoint(), sigma);
            let t0 = Instant::now();
            let m = run_simulation(&config, &fleet)?;
            println!(
                "ramp={ramp} sigma={sigma:.1} lcps={:.3} acc={:.4} maxq={:.0} ins={} exit={} queued={} crash={} ({:.2?})",
                m.lane_changes_per_second, m.mean_absolute_acceleration, m.max_throughput, m.inserted, m.exited, m.queued, m.crashed(), t0.elapsed()
            );
        }
    }
    Ok(())
}
