// Euclidean projection onto the three feasible-set families.

use dynregret::geometry::FeasibleSet;
use dynregret::rng::SeededRng;
use dynregret::Result;

pub fn run_example() -> Result<()> {
    let sets = [
        FeasibleSet::unit_ball(2)?,
        FeasibleSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0])?,
        FeasibleSet::simplex(3)?,
    ];
    let mut rng = SeededRng::new(5);
    for set in &sets {
        let y: Vec<f64> = (0..set.dim()).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let p = set.project(&y)?;
        // projecting twice changes nothing
        assert_eq!(set.project(&p)?, p);
        assert!(set.contains(&p, 1e-12)?);
        println!("{:<8} {:?} -> {:?}", set.kind(), y, p);
    }
    let simplex = FeasibleSet::simplex(3)?;
    println!(
        "simplex([0.5, 0.5, 0.5]) = {:?}",
        simplex.project(&[0.5, 0.5, 0.5])?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
