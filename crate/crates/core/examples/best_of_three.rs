// All regret bounds of a default-tuned OMGD run on a scenario whose
// minimizers move a lot while the losses barely change.

use dynregret::algorithms::{omgd_default_params, run, AlgorithmConfig};
use dynregret::bounds::{omgd_bounds, AlphaGrid, BranchKind};
use dynregret::regularity::regularity_report;
use dynregret::scenarios::{low_variation_high_path, LowVariationHighPath};
use dynregret::Result;

pub fn run_example() -> Result<()> {
    let scenario = low_variation_high_path(LowVariationHighPath {
        dim: 5,
        horizon: 1000,
        seed: 2024,
    })?;
    let cert = scenario.certificate();
    let (eta, k) = omgd_default_params(cert.lambda, cert.smoothness)?;
    let traj = run(&AlgorithmConfig::omgd(eta, k), &scenario)?;
    let reg = regularity_report(&scenario, &traj)?;
    let report = omgd_bounds(&traj, &reg, cert, &AlphaGrid::default())?;

    println!("realized regret {:.6}", report.realized_regret);
    for b in &report.branches {
        println!(
            "  {:<28} {:>12.6} margin {:>10.6}{}",
            b.kind.name(),
            b.value,
            b.margin,
            if b.informational { " (info)" } else { "" }
        );
    }
    let variation = report.value(BranchKind::FunctionVariation).unwrap_or(f64::NAN);
    assert_eq!(report.min_bound, variation);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
