//! Draws heterogeneous fleets and compares sample spread with the target.

use hetflow::model::Param;
use hetflow::sampler::{sample_fleet, sample_mean_vector, stream_rng, FleetSpec, MarginRule, ParamBounds, SAMPLED_PARAMS};

fn main() -> hetflow::Result<()> {
    let bounds = ParamBounds::default();
    let mut rng = stream_rng(2024, 0);
    let sigma = 0.2;
    let mean = sample_mean_vector(&bounds, sigma, MarginRule::default(), &mut rng)?;
    let spec = FleetSpec::new(bounds, mean, sigma);
    let fleet = sample_fleet(&spec, 20_000, &mut rng);

    println!("sigma = {sigma}, {} vehicles", fleet.len());
    println!("{:<8} {:>10} {:>10} {:>10} {:>10}", "param", "mean", "target sd", "sample sd", "in bounds");
    for param in SAMPLED_PARAMS {
        let values: Vec<f64> = fleet.iter().map(|c| c.get(param)).collect();
        let n = values.len() as f64;
        let m = values.iter().sum::<f64>() / n;
        let sd = (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let inside = values.iter().all(|&v| v >= bounds.min[param] && v <= bounds.max[param]);
        println!(
            "{:<8} {:>10.3} {:>10.3} {:>10.3} {:>10}",
            param.name(),
            mean.get(param),
            spec.std_dev(param),
            sd,
            inside
        );
    }
    let t = fleet[0].get(Param::T);
    println!("headway is fixed at {t} s for every vehicle");
    Ok(())
}
