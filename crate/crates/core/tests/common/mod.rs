#![allow(dead_code)]

use dynregret::geometry::FeasibleSet;
use dynregret::rng::SeededRng;
use dynregret::LossFunction;

/// A random ball, box or simplex of dimension 2..=5, chosen by `variant % 3`.
pub fn random_set(rng: &mut SeededRng, variant: u64) -> FeasibleSet {
    let dim = rng.int_in(2, 5) as usize;
    match variant % 3 {
        0 => {
            let center = (0..dim).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            FeasibleSet::ball(center, rng.uniform_in(0.2, 2.0)).unwrap()
        }
        1 => {
            let lower: Vec<f64> = (0..dim).map(|_| rng.uniform_in(-2.0, 0.5)).collect();
            let upper = lower.iter().map(|l| l + rng.uniform_in(0.1, 2.0)).collect();
            FeasibleSet::boxed(lower, upper).unwrap()
        }
        _ => FeasibleSet::simplex(dim).unwrap(),
    }
}

pub fn random_point(rng: &mut SeededRng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| scale * rng.standard_normal()).collect()
}

/// Diagonal quadratic with curvatures in `[lambda, L]`, both endpoints attained.
pub fn random_diagonal(rng: &mut SeededRng, dim: usize, lambda: f64, smoothness: f64) -> LossFunction {
    let mut diag: Vec<f64> = (0..dim).map(|_| rng.uniform_in(lambda, smoothness)).collect();
    diag[0] = lambda;
    if dim > 1 {
        diag[1] = smoothness;
    }
    let center = random_point(rng, dim, 1.5);
    let linear = random_point(rng, dim, 0.5);
    LossFunction::diagonal(diag, center, linear).unwrap()
}

/// Any of the three loss families.
pub fn random_loss(rng: &mut SeededRng, dim: usize) -> LossFunction {
    match rng.int_in(0, 2) {
        0 => LossFunction::linear(random_point(rng, dim, 1.0)).unwrap(),
        1 => LossFunction::isotropic(rng.uniform_in(0.1, 5.0), random_point(rng, dim, 1.5)).unwrap(),
        _ => {
            let lambda = rng.uniform_in(0.1, 5.0);
            let smoothness = lambda * rng.uniform_in(1.0, 10.0);
            random_diagonal(rng, dim, lambda, smoothness)
        }
    }
}
