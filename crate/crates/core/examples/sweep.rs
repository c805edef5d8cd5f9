// Regret against regularity as the drift of a quadratic sequence grows.

use dynregret::harness::{run_sweep, AlgorithmSpec, ExperimentConfig, ScenarioSource, SweepParam};
use dynregret::scenarios::{DriftingQuadratic, GeneratorSpec};
use dynregret::Result;

pub fn run_example() -> Result<()> {
    let config = ExperimentConfig::single(
        ScenarioSource::Generate(GeneratorSpec::DriftingQuadratic(DriftingQuadratic {
            dim: 3,
            horizon: 300,
            lambda: 1.0,
            smoothness: 3.0,
            drift: 0.0,
            seed: 8,
        })),
        vec![AlgorithmSpec::omgd_default()],
    );
    let rows = run_sweep(&config, SweepParam::Drift, &[0.0, 0.001, 0.01, 0.05])?;
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12}",
        "drift", "regret", "P_T", "S_T", "V_T"
    );
    for r in &rows {
        println!(
            "{:>8} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            r.value, r.realized_regret, r.path_length, r.squared_path_length, r.function_variation
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
