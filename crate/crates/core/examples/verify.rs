// Building an experiment config in code, verifying every inequality and
// writing the JSON and CSV reports.

use dynregret::harness::{
    emit_report, verdict_table, verify_all, AlgorithmSpec, ExitCode, ExperimentConfig, ReportFormat,
    ScenarioSource,
};
use dynregret::scenarios::{DriftingQuadratic, GeneratorSpec};
use dynregret::Result;

pub fn run_example() -> Result<()> {
    let config = ExperimentConfig::single(
        ScenarioSource::Generate(GeneratorSpec::DriftingQuadratic(DriftingQuadratic {
            dim: 4,
            horizon: 200,
            lambda: 1.0,
            smoothness: 2.0,
            drift: 0.01,
            seed: 1,
        })),
        vec![AlgorithmSpec::omgd_default(), AlgorithmSpec::greedy()],
    );
    let (report, code) = verify_all(&config)?;
    print!("{}", verdict_table(&report));
    assert_eq!(code, ExitCode::Pass);

    let dir = std::env::temp_dir().join(format!("dynregret-example-{}", std::process::id()));
    for format in [ReportFormat::Json, ReportFormat::Csv] {
        for path in emit_report(&report, &dir, format)? {
            println!("wrote {}", path.display());
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
