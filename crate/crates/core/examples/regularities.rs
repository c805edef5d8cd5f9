// Path-length, squared path-length and function variation of the two
// linear instances, which sit at opposite ends of the three measures.

use dynregret::algorithms::{run, AlgorithmConfig};
use dynregret::regularity::regularity_report;
use dynregret::scenarios::{instance1, instance2};
use dynregret::Result;

pub fn run_example() -> Result<()> {
    for scenario in [instance1(3, 100)?, instance2(100)?] {
        let traj = run(&AlgorithmConfig::greedy(), &scenario)?;
        let r = regularity_report(&scenario, &traj)?;
        println!(
            "{:<22} P_T={:<10.6} S_T={:<8} V_T={:<6} exact={}",
            scenario.label(),
            r.path_length,
            r.squared_path_length,
            r.function_variation,
            r.variation_exact
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
