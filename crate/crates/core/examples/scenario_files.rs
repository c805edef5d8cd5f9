// Writing a generated scenario to its file format and loading it back.

use dynregret::geometry::FeasibleSet;
use dynregret::scenarios::{jittered_quadratic, load_scenario, JitteredQuadratic};
use dynregret::Result;

pub fn run_example() -> Result<()> {
    let scenario = jittered_quadratic(JitteredQuadratic {
        set: FeasibleSet::boxed(vec![-1.0; 3], vec![1.0; 3])?,
        horizon: 5,
        lambda: 0.5,
        smoothness: 2.0,
        spread: 0.3,
        seed: 9,
    })?;
    let text = scenario.to_config_text();
    let back = load_scenario(&text)?;
    assert_eq!(back, scenario);
    println!("{} bytes, round-trips exactly", text.len());
    println!("{}", text.lines().take(12).collect::<Vec<_>>().join("\n"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
