//! Online decision procedures: OGD, OMGD and the greedy strategy, plus the
//! runner that plays them against a scenario under the online protocol.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{FeasibleSet, MEMBERSHIP_TOL};
use crate::linalg;
use crate::losses::LossFunction;
use crate::scenarios::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    /// One projected gradient step per round.
    Ogd { eta: f64 },
    /// `inner_iterations` projected gradient steps per round on the revealed loss.
    Omgd { eta: f64, inner_iterations: usize },
    /// Play a minimizer of the previous loss.
    Greedy,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ogd { .. } => "ogd",
            Method::Omgd { .. } => "omgd",
            Method::Greedy => "greedy",
        }
    }

    /// `(eta, K)` for gradient methods; OGD reports `K = 1`.
    pub fn step_params(&self) -> Option<(f64, usize)> {
        match *self {
            Method::Ogd { eta } => Some((eta, 1)),
            Method::Omgd {
                eta,
                inner_iterations,
            } => Some((eta, inner_iterations)),
            Method::Greedy => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    #[serde(flatten)]
    pub method: Method,
    /// Defaults to the set's barycenter, midpoint or center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_point: Option<Vec<f64>>,
}

impl AlgorithmConfig {
    pub fn ogd(eta: f64) -> Self {
        Self::from(Method::Ogd { eta })
    }

    pub fn omgd(eta: f64, inner_iterations: usize) -> Self {
        Self::from(Method::Omgd {
            eta,
            inner_iterations,
        })
    }

    pub fn greedy() -> Self {
        Self::from(Method::Greedy)
    }

    pub fn with_initial_point(mut self, x: Vec<f64>) -> Self {
        self.initial_point = Some(x);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((eta, k)) = self.method.step_params() {
            check_eta(eta)?;
            if k == 0 {
                return Err(Error::invalid("OMGD needs at least one inner iteration"));
            }
        }
        Ok(())
    }
}

impl From<Method> for AlgorithmConfig {
    fn from(method: Method) -> Self {
        Self {
            method,
            initial_point: None,
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("step size must be positive, got {eta}")))
    }
}

/// `Π_X[x − η ∇f(x)]`
pub fn ogd_step(x: &[f64], f: &LossFunction, eta: f64, set: &FeasibleSet) -> Result<Vec<f64>> {
    check_eta(eta)?;
    check_dim(set.dim(), x.len())?;
    let g = f.gradient(x)?;
    set.project(&linalg::axpy(x, -eta, &g))
}

/// `K` inner projected gradient steps on the same loss, warm-started at `x`.
pub fn omgd_step(
    x: &[f64],
    f: &LossFunction,
    eta: f64,
    inner_iterations: usize,
    set: &FeasibleSet,
) -> Result<Vec<f64>> {
    if inner_iterations == 0 {
        return Err(Error::invalid("OMGD needs at least one inner iteration"));
    }
    let mut z = ogd_step(x, f, eta, set)?;
    for _ in 1..inner_iterations {
        z = ogd_step(&z, f, eta, set)?;
    }
    Ok(z)
}

/// Step size `1/L` and `K = ⌈4(L + λ)/λ · ln 4⌉`, the setting under which
/// OMGD enjoys the function-variation bound (and the path-length bounds).
pub fn omgd_default_params(lambda: f64, smoothness: f64) -> Result<(f64, usize)> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid(format!(
            "OMGD defaults need strong convexity, got lambda = {lambda}"
        )));
    }
    if !(smoothness.is_finite() && smoothness >= lambda) {
        return Err(Error::invalid(format!(
            "need lambda <= L, got lambda = {lambda}, L = {smoothness}"
        )));
    }
    let k = (4.0 * (smoothness + lambda) / lambda * 4f64.ln()).ceil();
    Ok((1.0 / smoothness, k as usize))
}

/// `K = ⌈(1/η + λ)/(2λ) · ln 4⌉`, the inner-iteration count for the
/// path-length bounds at step size `η ≤ 1/L`.
pub fn thm1_inner_iterations(eta: f64, lambda: f64) -> Result<usize> {
    check_eta(eta)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    Ok(((1.0 / eta + lambda) / (2.0 * lambda) * 4f64.ln()).ceil() as usize)
}

pub fn greedy_step(f: &LossFunction, set: &FeasibleSet) -> Result<Vec<f64>> {
    f.minimizer(set)
}

/// One round of play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    /// 1-based round index.
    pub t: usize,
    pub decision: Vec<f64>,
    pub minimizer: Vec<f64>,
    /// `f_t(x_t)`
    pub loss: f64,
    /// `f_t(x_t*)`
    pub opt_loss: f64,
    /// `f_t(x_{t+1})`, the revealed loss at the decision played next.
    pub loss_at_next: f64,
    pub inner_iterations: usize,
}

impl Round {
    pub fn instantaneous_regret(&self) -> f64 {
        self.loss - self.opt_loss
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub method: Method,
    pub rounds: Vec<Round>,
    /// `x_{T+1}`, never played.
    pub next_decision: Vec<f64>,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn minimizers(&self) -> Vec<Vec<f64>> {
        self.rounds.iter().map(|r| r.minimizer.clone()).collect()
    }

    pub fn initial_decision(&self) -> &[f64] {
        &self.rounds[0].decision
    }

    /// `f_1(x_1)`
    pub fn first_loss(&self) -> f64 {
        self.rounds[0].loss
    }

    /// `f_T(x_{T+1})`
    pub fn final_loss_at_next(&self) -> f64 {
        self.rounds[self.rounds.len() - 1].loss_at_next
    }

    /// `‖x_1 − x_1*‖`
    pub fn initial_distance(&self) -> f64 {
        let r = &self.rounds[0];
        linalg::dist(&r.decision, &r.minimizer)
    }

    /// Columns `t, x_t, x_t_star, loss, opt_loss, inst_regret`; vector
    /// entries are joined with `;`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x_t", "x_t_star", "loss", "opt_loss", "inst_regret"])?;
        for r in &self.rounds {
            w.write_record([
                r.t.to_string(),
                join_vec(&r.decision),
                join_vec(&r.minimizer),
                r.loss.to_string(),
                r.opt_loss.to_string(),
                r.instantaneous_regret().to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

pub(crate) fn join_vec(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Plays `config` for every round of `scenario`. `x_t` is fixed before
/// `f_t` is consulted; the minimizer oracle is queried only for accounting.
pub fn run(config: &AlgorithmConfig, scenario: &Scenario) -> Result<Trajectory> {
    config.validate()?;
    let set = scenario.set();
    if scenario.losses().is_empty() {
        return Err(Error::invalid("scenario has no rounds"));
    }
    let mut x = match &config.initial_point {
        Some(p) => {
            check_dim(set.dim(), p.len())?;
            if !set.contains(p, MEMBERSHIP_TOL)? {
                return Err(Error::invalid("initial point lies outside the feasible set"));
            }
            p.clone()
        }
        None => set.default_point(),
    };

    let mut rounds = Vec::with_capacity(scenario.horizon());
    for (i, f) in scenario.losses().iter().enumerate() {
        let t = i + 1;
        let mut step = || -> Result<Round> {
            let minimizer = f.minimizer(set)?;
            let (next, inner) = match config.method {
                Method::Ogd { eta } => (ogd_step(&x, f, eta, set)?, 1),
                Method::Omgd {
                    eta,
                    inner_iterations,
                } => (omgd_step(&x, f, eta, inner_iterations, set)?, inner_iterations),
                Method::Greedy => (greedy_step(f, set)?, 0),
            };
            Ok(Round {
                t,
                loss: f.value(&x)?,
                opt_loss: f.value(&minimizer)?,
                loss_at_next: f.value(&next)?,
                decision: std::mem::replace(&mut x, next),
                minimizer,
                inner_iterations: inner,
            })
        };
        rounds.push(step().map_err(|e| e.at_round(t))?);
    }
    Ok(Trajectory {
        method: config.method.clone(),
        rounds,
        next_decision: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    #[test]
    fn ogd_step_examples() {
        let ball = FeasibleSet::unit_ball(2).unwrap();
        let f = LossFunction::isotropic(1.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(ogd_step(&[1.0, 0.0], &f, 1.0, &ball).unwrap(), vec![0.0, 0.0]);
        assert_eq!(ogd_step(&[0.0, 0.0], &f, 0.3, &ball).unwrap(), vec![0.0, 0.0]);

        let bx = FeasibleSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let f = LossFunction::linear(vec![1.0, 0.0]).unwrap();
        assert_eq!(ogd_step(&[0.5, 0.5], &f, 1.0, &bx).unwrap(), vec![0.0, 0.5]);
    }

    #[test]
    fn step_errors() {
        let bx = FeasibleSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let f = LossFunction::linear(vec![1.0, 0.0]).unwrap();
        assert!(ogd_step(&[0.5, 0.5], &f, 0.0, &bx).is_err());
        assert!(ogd_step(&[0.5, 0.5], &f, -1.0, &bx).is_err());
        assert!(ogd_step(&[0.5], &f, 1.0, &bx).is_err());
        assert!(omgd_step(&[0.5, 0.5], &f, 1.0, 0, &bx).is_err());
    }

    #[test]
    fn omgd_step_examples() {
        let bx = FeasibleSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let f = LossFunction::isotropic(1.0, vec![0.5, 0.5]).unwrap();
        assert_eq!(omgd_step(&[0.0, 0.0], &f, 1.0, 3, &bx).unwrap(), vec![0.5, 0.5]);

        let g = LossFunction::linear(vec![0.3, -0.1]).unwrap();
        let x = [0.2, 0.9];
        assert_eq!(
            omgd_step(&x, &g, 0.7, 1, &bx).unwrap(),
            ogd_step(&x, &g, 0.7, &bx).unwrap()
        );

        let h = LossFunction::diagonal(vec![1.0, 4.0], vec![0.3, 0.6], vec![0.0, 0.0]).unwrap();
        let z = omgd_step(&[1.0, 0.0], &h, 0.25, 500, &bx).unwrap();
        assert!(linalg::dist(&z, &[0.3, 0.6]) < 1e-6);
    }

    #[test]
    fn default_params() {
        assert_eq!(omgd_default_params(1.0, 1.0).unwrap(), (1.0, 12));
        assert_eq!(omgd_default_params(1.0, 2.0).unwrap(), (0.5, 17));
        assert_eq!(omgd_default_params(2.0, 2.0).unwrap(), (0.5, 12));
        assert!(omgd_default_params(0.0, 1.0).is_err());
        assert!(omgd_default_params(2.0, 1.0).is_err());
    }

    #[test]
    fn thm1_k() {
        assert_eq!(thm1_inner_iterations(1.0, 1.0).unwrap(), 2);
        assert_eq!(thm1_inner_iterations(0.5, 1.0).unwrap(), 3);
        assert_eq!(thm1_inner_iterations(0.5, 2.0).unwrap(), 2);
        assert!(thm1_inner_iterations(0.0, 1.0).is_err());
        assert!(thm1_inner_iterations(1.0, 0.0).is_err());
        // the default OMGD setting also satisfies the path-length requirement
        for (l, big_l) in [(1.0, 1.0), (0.3, 4.0), (1.0, 10.0)] {
            let (eta, k) = omgd_default_params(l, big_l).unwrap();
            assert!(k >= thm1_inner_iterations(eta, l).unwrap());
        }
    }

    #[test]
    fn greedy_step_examples() {
        let s2 = FeasibleSet::simplex(2).unwrap();
        let f = LossFunction::linear(vec![-0.5, 0.0]).unwrap();
        assert_eq!(greedy_step(&f, &s2).unwrap(), vec![1.0, 0.0]);
        let ball = FeasibleSet::unit_ball(2).unwrap();
        let f = LossFunction::isotropic(1.0, vec![0.2, -0.3]).unwrap();
        assert_eq!(greedy_step(&f, &ball).unwrap(), vec![0.2, -0.3]);
        let s3 = FeasibleSet::simplex(3).unwrap();
        let f = LossFunction::linear(vec![0.01, 0.0, -0.01]).unwrap();
        assert_eq!(greedy_step(&f, &s3).unwrap(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn greedy_on_instance2() {
        let traj = run(&AlgorithmConfig::greedy(), &scenarios::instance2(4).unwrap()).unwrap();
        let decisions: Vec<_> = traj.rounds.iter().map(|r| r.decision.clone()).collect();
        assert_eq!(
            decisions,
            vec![vec![0.5, 0.5], vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]]
        );
        let regret: f64 = traj.rounds.iter().map(Round::instantaneous_regret).sum();
        assert_eq!(regret, 0.25);
        assert_eq!(traj.next_decision, vec![1.0, 0.0]);
    }

    #[test]
    fn omgd_from_optimum_has_zero_regret() {
        let ball = FeasibleSet::unit_ball(2).unwrap();
        let m = vec![0.3, -0.2];
        let f = LossFunction::diagonal(vec![1.0, 2.0], m.clone(), vec![0.0, 0.0]).unwrap();
        let scenario = Scenario::new(ball, vec![f; 20], "constant").unwrap();
        let (eta, k) = omgd_default_params(1.0, 2.0).unwrap();
        let traj = run(&AlgorithmConfig::omgd(eta, k).with_initial_point(m), &scenario).unwrap();
        assert!(traj.rounds.iter().all(|r| r.instantaneous_regret() == 0.0));
    }

    #[test]
    fn run_rejects_infeasible_start() {
        let err = run(
            &AlgorithmConfig::ogd(1.0).with_initial_point(vec![2.0, 2.0]),
            &scenarios::instance2(3).unwrap(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn csv_export() {
        let traj = run(&AlgorithmConfig::greedy(), &scenarios::instance2(3).unwrap()).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,x_t,x_t_star,loss,opt_loss,inst_regret");
        assert_eq!(lines[1], "1,0.5;0.5,1;0,-0.25,-0.5,0.25");
    }
}
