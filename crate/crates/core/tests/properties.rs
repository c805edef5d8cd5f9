mod common;

use dynregret::algorithms::{run, AlgorithmConfig};
use dynregret::geometry::FeasibleSet;
use dynregret::linalg;
use dynregret::regularity::{dynamic_regret, path_length, regularity_report, squared_path_length};
use dynregret::rng::SeededRng;
use dynregret::scenarios::{
    jittered_quadratic, load_scenario, random_linear, JitteredQuadratic, RandomLinear,
};
use dynregret::LossFunction;
use proptest::prelude::*;

use common::{random_loss, random_point, random_set};

fn random_scenario(seed: u64) -> dynregret::scenarios::Scenario {
    let mut rng = SeededRng::new(seed);
    let set = random_set(&mut rng, seed);
    let horizon = rng.int_in(1, 30) as usize;
    if seed.is_multiple_of(4) {
        random_linear(RandomLinear {
            set,
            horizon,
            scale: rng.uniform_in(0.1, 2.0),
            seed,
        })
        .unwrap()
    } else {
        let lambda = rng.uniform_in(0.1, 3.0);
        jittered_quadratic(JitteredQuadratic {
            set,
            horizon,
            lambda,
            smoothness: lambda * rng.uniform_in(1.0, 5.0),
            spread: rng.uniform_in(0.0, 1.0),
            seed,
        })
        .unwrap()
    }
}

proptest! {
    #[test]
    fn projection_is_nonexpansive_idempotent_and_optimal(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let set = random_set(&mut rng, seed);
        let d = set.dim();
        let x = random_point(&mut rng, d, 2.0);
        let y = random_point(&mut rng, d, 2.0);
        let (px, py) = (set.project(&x).unwrap(), set.project(&y).unwrap());
        prop_assert!(linalg::dist(&px, &py) <= linalg::dist(&x, &y) + 1e-12);
        prop_assert!(linalg::dist(&set.project(&px).unwrap(), &px) <= 1e-12);
        prop_assert!(set.contains(&px, 1e-12).unwrap());
        let z = set.sample(&mut rng);
        // variational inequality of the nearest point
        let vi = linalg::dot(&linalg::sub(&x, &px), &linalg::sub(&z, &px));
        prop_assert!(vi <= 1e-10, "vi = {vi}");
        prop_assert!(linalg::dist(&x, &px) <= linalg::dist(&x, &z) + 1e-12);
    }

    #[test]
    fn curvature_sandwiches_hold(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let set = random_set(&mut rng, seed);
        let f = random_loss(&mut rng, set.dim());
        let cert = f.certify(&set).unwrap();
        let x = set.sample(&mut rng);
        let y = set.sample(&mut rng);
        let lin = f.value(&x).unwrap() + linalg::dot(&f.gradient(&x).unwrap(), &linalg::sub(&y, &x));
        let sq = linalg::dist_sq(&x, &y);
        let fy = f.value(&y).unwrap();
        prop_assert!(fy >= lin + 0.5 * cert.lambda * sq - 1e-9);
        prop_assert!(fy <= lin + 0.5 * cert.smoothness * sq + 1e-9);
        prop_assert!(linalg::norm(&f.gradient(&x).unwrap()) <= cert.gradient_bound * (1.0 + 1e-12));
    }

    #[test]
    fn gradients_match_central_differences(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let d = rng.int_in(1, 6) as usize;
        let f = random_loss(&mut rng, d);
        let x = random_point(&mut rng, d, 1.0);
        let g = f.gradient(&x).unwrap();
        let h = 1e-5;
        let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (f.value(&xp).unwrap() - f.value(&xm).unwrap()) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-6 * scale, "coordinate {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn minimizer_beats_sampled_points(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let set = random_set(&mut rng, seed);
        let f = random_loss(&mut rng, set.dim());
        let m = f.minimizer(&set).unwrap();
        prop_assert!(set.contains(&m, 1e-12).unwrap());
        let fm = f.value(&m).unwrap();
        for _ in 0..200 {
            let y = set.sample(&mut rng);
            prop_assert!(fm <= f.value(&y).unwrap() + 1e-9);
        }
    }

    #[test]
    fn exact_sup_difference_dominates_samples(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let set = random_set(&mut rng, seed);
        let f = random_loss(&mut rng, set.dim());
        let g = match &f {
            LossFunction::Linear { .. } => LossFunction::linear(random_point(&mut rng, set.dim(), 1.0)).unwrap(),
            LossFunction::IsotropicQuadratic { curvature, .. } => {
                LossFunction::isotropic(*curvature, random_point(&mut rng, set.dim(), 1.5)).unwrap()
            }
            LossFunction::DiagonalQuadratic { diag, .. } => LossFunction::diagonal(
                diag.clone(),
                random_point(&mut rng, set.dim(), 1.5),
                random_point(&mut rng, set.dim(), 0.5),
            )
            .unwrap(),
        };
        let sup = f.sup_abs_diff(&g, &set).unwrap();
        prop_assert!(sup.exact);
        for _ in 0..200 {
            let x = set.sample(&mut rng);
            let gap = (f.value(&x).unwrap() - g.value(&x).unwrap()).abs();
            prop_assert!(gap <= sup.value + 1e-9 * (1.0 + sup.value));
        }
    }

    #[test]
    fn decisions_never_look_ahead(seed in any::<u64>(), cut in 1usize..30) {
        let scenario = random_scenario(seed);
        let t = cut.min(scenario.horizon());
        let cert = scenario.certificate();
        let eta = 1.0 / cert.smoothness.max(1.0);
        let replacement = LossFunction::linear(vec![1.0; scenario.dim()]).unwrap();
        let altered = scenario.with_losses_replaced(t, &replacement).unwrap();
        for config in [AlgorithmConfig::ogd(eta), AlgorithmConfig::omgd(eta, 5), AlgorithmConfig::greedy()] {
            let a = run(&config, &scenario).unwrap();
            let b = run(&config, &altered).unwrap();
            for s in 0..t {
                prop_assert_eq!(&a.rounds[s].decision, &b.rounds[s].decision);
            }
        }
    }

    #[test]
    fn omgd_with_one_inner_step_is_ogd(seed in any::<u64>(), eta in 0.01f64..2.0) {
        let scenario = random_scenario(seed);
        let a = run(&AlgorithmConfig::ogd(eta), &scenario).unwrap();
        let b = run(&AlgorithmConfig::omgd(eta, 1), &scenario).unwrap();
        prop_assert_eq!(a.rounds, b.rounds);
        prop_assert_eq!(a.next_decision, b.next_decision);
    }

    #[test]
    fn trajectories_are_feasible_and_regret_nonnegative(seed in any::<u64>()) {
        let scenario = random_scenario(seed);
        let eta = 1.0 / scenario.certificate().smoothness.max(1.0);
        for config in [AlgorithmConfig::ogd(eta), AlgorithmConfig::omgd(eta, 4), AlgorithmConfig::greedy()] {
            let traj = run(&config, &scenario).unwrap();
            for r in &traj.rounds {
                prop_assert!(scenario.set().contains(&r.decision, 1e-12).unwrap());
                prop_assert!(r.loss >= r.opt_loss - 1e-9);
            }
            prop_assert!(dynamic_regret(&traj) >= -1e-9);
        }
    }

    #[test]
    fn path_length_cauchy_schwarz(seed in any::<u64>()) {
        let scenario = random_scenario(seed);
        let traj = run(&AlgorithmConfig::greedy(), &scenario).unwrap();
        let m = traj.minimizers();
        let (p, s) = (path_length(&m).unwrap(), squared_path_length(&m).unwrap());
        prop_assert!(p * p <= (m.len() - 1) as f64 * s + 1e-9);
        let reg = regularity_report(&scenario, &traj).unwrap();
        prop_assert!(reg.path_length >= 0.0 && reg.squared_path_length >= 0.0);
        prop_assert!(reg.function_variation >= 0.0 && reg.grad_energy >= 0.0);
        prop_assert!(reg.max_path_length >= reg.path_length - 1e-12);
    }

    #[test]
    fn scenario_files_round_trip(seed in any::<u64>()) {
        let scenario = random_scenario(seed);
        let text = scenario.to_config_text();
        let back = load_scenario(&text).unwrap();
        prop_assert_eq!(&back, &scenario);
        prop_assert_eq!(back.to_config_text(), text);
    }

    #[test]
    fn simplex_projection_sums_to_one(y in proptest::collection::vec(-10.0f64..10.0, 2..8)) {
        let set = FeasibleSet::simplex(y.len()).unwrap();
        let p = set.project(&y).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.iter().all(|v| *v >= 0.0));
    }
}
