// OGD, OMGD and the greedy strategy tracking a drifting quadratic.

use dynregret::algorithms::{omgd_default_params, run, AlgorithmConfig};
use dynregret::regularity::dynamic_regret;
use dynregret::scenarios::{drifting_quadratic, DriftingQuadratic};
use dynregret::Result;

pub fn run_example() -> Result<()> {
    let scenario = drifting_quadratic(DriftingQuadratic {
        dim: 3,
        horizon: 500,
        lambda: 1.0,
        smoothness: 4.0,
        drift: 0.01,
        seed: 42,
    })?;
    let cert = scenario.certificate();
    let (eta, k) = omgd_default_params(cert.lambda, cert.smoothness)?;
    let algorithms = [
        AlgorithmConfig::ogd(eta),
        AlgorithmConfig::omgd(eta, k),
        AlgorithmConfig::greedy(),
    ];
    println!("{}", scenario.label());
    for config in &algorithms {
        let traj = run(config, &scenario)?;
        println!(
            "  {:<6} regret = {:.6}",
            config.method.name(),
            dynamic_regret(&traj)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
