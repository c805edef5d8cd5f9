// Loss families, curvature certificates, minimizers and exact sup-differences.

use dynregret::geometry::FeasibleSet;
use dynregret::{LossFunction, Result};

pub fn run_example() -> Result<()> {
    let ball = FeasibleSet::unit_ball(2)?;
    let f = LossFunction::diagonal(vec![1.0, 4.0], vec![2.0, 0.0], vec![0.0, 0.0])?;
    let g = LossFunction::diagonal(vec![1.0, 4.0], vec![1.5, 0.5], vec![0.0, 0.0])?;
    let cert = f.certify(&ball)?;
    println!(
        "lambda={} L={} G={:.6}",
        cert.lambda, cert.smoothness, cert.gradient_bound
    );

    let m = f.minimizer(&ball)?;
    println!("minimizer over the unit ball: {m:?}, f* = {:.6}", f.value(&m)?);

    // equal Hessians: the difference is affine and the sup is exact
    let d = f.sup_abs_diff(&g, &ball)?;
    println!("sup |f - g| = {:.6} (exact: {})", d.value, d.exact);
    assert!(d.exact);

    let simplex = FeasibleSet::simplex(3)?;
    let lin = LossFunction::linear(vec![0.01, 0.0, -0.01])?;
    println!(
        "linear minimizer over the simplex: {:?}",
        lin.minimizer(&simplex)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
