//! Right-hand sides of the dynamic-regret bounds and the inequalities used
//! in their proofs, evaluated against realized runs.

use serde::{Deserialize, Serialize};

use crate::algorithms::{omgd_default_params, thm1_inner_iterations, Method, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg;
use crate::losses::{CurvatureCertificate, LossFunction};
use crate::regularity::{dynamic_regret, RegularityReport};
use crate::scenarios::Scenario;

/// A bound counts as satisfied when `bound − realized ≥ −SATISFACTION_TOL`.
pub const SATISFACTION_TOL: f64 = 1e-6;
/// Additive slack for the per-round and `S_T ≤ 2V_T/λ` inequalities.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// Function-value contraction factor of one projected gradient step with
/// step size `1/L`: `½` if `3λ ≥ 2L`, else `1 − λ/(4(L − λ))`.
pub fn lemma1_gamma(lambda: f64, smoothness: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= smoothness && smoothness.is_finite()) {
        return Err(Error::invalid(format!(
            "need 0 < lambda <= L, got lambda = {lambda}, L = {smoothness}"
        )));
    }
    Ok(if 3.0 * lambda >= 2.0 * smoothness {
        0.5
    } else {
        1.0 - lambda / (4.0 * (smoothness - lambda))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contraction {
    /// `f(v) − f(x*)` with `v = Π[u − ∇f(u)/L]`
    pub lhs: f64,
    /// `γ (f(u) − f(x*))`
    pub rhs: f64,
    pub gamma: f64,
    pub ok: bool,
}

/// One projected gradient step from `u` and both sides of the contraction
/// inequality `f(v) − f(x*) ≤ γ (f(u) − f(x*))`.
pub fn check_contraction(f: &LossFunction, set: &FeasibleSet, u: &[f64]) -> Result<Contraction> {
    let cert = f.certify(set)?;
    if !cert.is_strongly_convex() {
        return Err(Error::Inapplicable(
            "contraction needs a strongly convex loss".into(),
        ));
    }
    let gamma = lemma1_gamma(cert.lambda, cert.smoothness)?;
    let v = set.project(&linalg::axpy(u, -1.0 / cert.smoothness, &f.gradient(u)?))?;
    let opt = f.value(&f.minimizer(set)?)?;
    let lhs = f.value(&v)? - opt;
    let rhs = gamma * (f.value(u)? - opt);
    Ok(Contraction {
        lhs,
        rhs,
        gamma,
        ok: lhs <= rhs * (1.0 + 1e-9) + 1e-12,
    })
}

/// `2G P_T + 2G ‖x_1 − x_1*‖`
pub fn thm1_path_bound(gradient_bound: f64, path_length: f64, init_dist: f64) -> f64 {
    2.0 * gradient_bound * path_length + 2.0 * gradient_bound * init_dist
}

/// `Σ‖∇f_t(x_t*)‖²/(2α) + 2(L + α) S_T + (L + α) ‖x_1 − x_1*‖²`
pub fn thm1_squared_bound(
    alpha: f64,
    smoothness: f64,
    squared_path_length: f64,
    grad_energy: f64,
    init_sq_dist: f64,
) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    Ok(grad_energy / (2.0 * alpha)
        + 2.0 * (smoothness + alpha) * squared_path_length
        + (smoothness + alpha) * init_sq_dist)
}

/// The `α → 0` limit of [`thm1_squared_bound`] when every minimizer is
/// interior: `2L S_T + L ‖x_1 − x_1*‖²`.
pub fn thm1_squared_limit(smoothness: f64, squared_path_length: f64, init_sq_dist: f64) -> f64 {
    2.0 * smoothness * squared_path_length + smoothness * init_sq_dist
}

/// `2V_T + 2(f_1(x_1) − f_T(x_{T+1}))`, reported as is even when negative.
pub fn thm2_variation_bound(variation: f64, first_loss: f64, final_loss_at_next: f64) -> f64 {
    2.0 * variation + 2.0 * (first_loss - final_loss_at_next)
}

/// `(4/3)(V_T + f_1(x_1) − f_T(x_{T+1}))`: what the quarter-decay argument
/// yields before it is rounded up to the factor 2.
pub fn thm2_tight_variation_bound(variation: f64, first_loss: f64, final_loss_at_next: f64) -> f64 {
    4.0 / 3.0 * (variation + first_loss - final_loss_at_next)
}

/// `S_T ≤ 2V_T/λ` (within [`INEQUALITY_TOL`]).
pub fn check_st_vt_inequality(lambda: f64, squared_path_length: f64, variation: f64) -> Result<bool> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::Inapplicable("S_T <= 2V_T/lambda needs lambda > 0".into()));
    }
    Ok(squared_path_length <= 2.0 * variation / lambda + INEQUALITY_TOL)
}

/// Log-spaced grid of α values for the squared-path-length bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self {
            lo: 1e-3,
            hi: 1e3,
            points: 13,
        }
    }
}

impl AlphaGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.hi.is_finite() && self.points >= 1) {
            return Err(Error::config(format!("invalid alpha grid {self:?}")));
        }
        if self.points == 1 && self.lo != self.hi {
            return Err(Error::config("a one-point alpha grid needs lo == hi"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.log10(), self.hi.log10());
        (0..self.points)
            .map(|i| 10f64.powf(a + (b - a) * i as f64 / (self.points - 1) as f64))
            .collect()
    }

    /// Parses `lo:hi:points`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::config(format!("alpha grid must look like lo:hi:points, got {text:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let grid = Self {
            lo: parts[0].trim().parse().map_err(|_| bad())?,
            hi: parts[1].trim().parse().map_err(|_| bad())?,
            points: parts[2].trim().parse().map_err(|_| bad())?,
        };
        grid.validate()?;
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    /// `2G P_T + 2G‖x_1 − x_1*‖`
    PathLength,
    /// squared-path-length bound at the best grid α
    SquaredPathLength,
    /// `2L S_T + L‖x_1 − x_1*‖²`, interior minimizers only
    SquaredPathLengthLimit,
    /// `2V_T + 2(f_1(x_1) − f_T(x_{T+1}))`
    FunctionVariation,
    /// `(4/3)(V_T + f_1(x_1) − f_T(x_{T+1}))`, informational
    FunctionVariationTight,
    /// `f_1(x_1) − f_1(x_1*) + G P̄_T`
    GreedyPathLength,
    /// `f_1(x_1) − f_1(x_1*) + ½Σ_{t≥2}‖∇f_t(x_t*)‖² + (L+1)/2 S̄_T`
    GreedySquaredPathLength,
    /// `f_1(x_1) − f_1(x_1*) + V_T`
    GreedyFunctionVariation,
}

impl BranchKind {
    pub fn name(&self) -> &'static str {
        match self {
            BranchKind::PathLength => "path_length",
            BranchKind::SquaredPathLength => "squared_path_length",
            BranchKind::SquaredPathLengthLimit => "squared_path_length_limit",
            BranchKind::FunctionVariation => "function_variation",
            BranchKind::FunctionVariationTight => "function_variation_tight",
            BranchKind::GreedyPathLength => "greedy_path_length",
            BranchKind::GreedySquaredPathLength => "greedy_squared_path_length",
            BranchKind::GreedyFunctionVariation => "greedy_function_variation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub kind: BranchKind,
    pub value: f64,
    /// `value − realized_regret`
    pub margin: f64,
    pub applicable: bool,
    /// Informational branches never enter `min_bound` or `all_satisfied`.
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub realized_regret: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_used: Option<f64>,
    pub branches: Vec<Branch>,
    pub min_bound: f64,
    pub all_satisfied: bool,
    /// Whether the run's step size and inner iterations meet the
    /// requirements of the path-length bounds (`η ≤ 1/L`, `K ≥ ⌈(1/η+λ)/(2λ) ln 4⌉`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_hypotheses_met: Option<bool>,
    /// Whether `η = 1/L` and `K ≥ ⌈4(L+λ)/λ ln 4⌉`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variation_hypotheses_met: Option<bool>,
}

impl BoundReport {
    fn assemble(
        realized_regret: f64,
        alpha_used: Option<f64>,
        raw: Vec<(BranchKind, f64, bool, bool)>,
    ) -> Self {
        let branches: Vec<Branch> = raw
            .into_iter()
            .map(|(kind, value, applicable, informational)| Branch {
                kind,
                value,
                margin: value - realized_regret,
                applicable,
                informational,
            })
            .collect();
        let gated = || branches.iter().filter(|b| b.applicable && !b.informational);
        let min_bound = gated().map(|b| b.value).fold(f64::INFINITY, f64::min);
        let all_satisfied = gated().all(|b| b.margin >= -SATISFACTION_TOL);
        Self {
            realized_regret,
            alpha_used,
            branches,
            min_bound,
            all_satisfied,
            path_hypotheses_met: None,
            variation_hypotheses_met: None,
        }
    }

    pub fn branch(&self, kind: BranchKind) -> Option<&Branch> {
        self.branches.iter().find(|b| b.kind == kind)
    }

    pub fn value(&self, kind: BranchKind) -> Option<f64> {
        self.branch(kind).map(|b| b.value)
    }

    pub fn margin(&self, kind: BranchKind) -> Option<f64> {
        self.branch(kind).map(|b| b.margin)
    }
}

fn approx_le(a: f64, b: f64) -> bool {
    a <= b * (1.0 + 1e-12)
}

/// Path-length, squared-path-length and function-variation bounds for an
/// OGD/OMGD trajectory on a strongly convex scenario.
pub fn omgd_bounds(
    traj: &Trajectory,
    reg: &RegularityReport,
    cert: &CurvatureCertificate,
    grid: &AlphaGrid,
) -> Result<BoundReport> {
    let Some((eta, k)) = traj.method.step_params() else {
        return Err(Error::Inapplicable(
            "gradient bounds need an OGD/OMGD trajectory".into(),
        ));
    };
    if !cert.is_strongly_convex() {
        return Err(Error::Inapplicable("gradient bounds need lambda > 0".into()));
    }
    grid.validate()?;
    let realized = dynamic_regret(traj);
    let (g, l) = (cert.gradient_bound, cert.smoothness);
    let init = traj.initial_distance();
    let init_sq = init * init;

    let mut best_alpha = (f64::INFINITY, grid.lo);
    for alpha in grid.values() {
        let b = thm1_squared_bound(alpha, l, reg.squared_path_length, reg.grad_energy, init_sq)?;
        if b < best_alpha.0 {
            best_alpha = (b, alpha);
        }
    }
    let first = traj.first_loss();
    let last = traj.final_loss_at_next();
    let mut raw = vec![
        (
            BranchKind::PathLength,
            thm1_path_bound(g, reg.path_length, init),
            true,
            false,
        ),
        (BranchKind::SquaredPathLength, best_alpha.0, true, false),
    ];
    if reg.grad_energy == 0.0 {
        raw.push((
            BranchKind::SquaredPathLengthLimit,
            thm1_squared_limit(l, reg.squared_path_length, init_sq),
            true,
            false,
        ));
    }
    raw.push((
        BranchKind::FunctionVariation,
        thm2_variation_bound(reg.function_variation, first, last),
        reg.variation_exact,
        false,
    ));
    raw.push((
        BranchKind::FunctionVariationTight,
        thm2_tight_variation_bound(reg.function_variation, first, last),
        reg.variation_exact,
        true,
    ));
    let mut report = BoundReport::assemble(realized, Some(best_alpha.1), raw);

    let path_ok = approx_le(eta, 1.0 / l) && k >= thm1_inner_iterations(eta, cert.lambda)?;
    let (eta_star, k_star) = omgd_default_params(cert.lambda, l)?;
    let variation_ok = (eta - eta_star).abs() <= 1e-12 * eta_star && k >= k_star;
    report.path_hypotheses_met = Some(path_ok);
    report.variation_hypotheses_met = Some(variation_ok);
    Ok(report)
}

/// The three bounds for the greedy strategy; λ = 0 is allowed.
pub fn thm3_bounds(traj: &Trajectory, scenario: &Scenario, reg: &RegularityReport) -> Result<BoundReport> {
    if traj.method != Method::Greedy {
        return Err(Error::Inapplicable(
            "greedy bounds need a greedy trajectory".into(),
        ));
    }
    let cert = scenario.certificate();
    let realized = dynamic_regret(traj);
    let head = traj.rounds[0].instantaneous_regret();
    let mut tail_energy = 0.0;
    for (f, r) in scenario.losses().iter().zip(&traj.rounds).skip(1) {
        tail_energy += linalg::norm_sq(&f.gradient(&r.minimizer)?);
    }
    let raw = vec![
        (
            BranchKind::GreedyPathLength,
            head + cert.gradient_bound * reg.max_path_length,
            true,
            false,
        ),
        (
            BranchKind::GreedySquaredPathLength,
            head + 0.5 * tail_energy + 0.5 * (cert.smoothness + 1.0) * reg.max_squared_path_length,
            true,
            false,
        ),
        (
            BranchKind::GreedyFunctionVariation,
            head + reg.function_variation,
            reg.variation_exact,
            false,
        ),
    ];
    Ok(BoundReport::assemble(realized, None, raw))
}

/// Worst per-round slack of `f_t(x_{t+1}) − f_t(x_t*) ≤ ¼(f_t(x_t) − f_t(x_t*))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarterDecay {
    /// Round with the smallest margin `¼(f_t(x_t) − f_t*) + tol − (f_t(x_{t+1}) − f_t*)`.
    pub worst_round: usize,
    pub worst_lhs: f64,
    pub worst_rhs: f64,
    pub worst_margin: f64,
    pub all_ok: bool,
}

pub fn check_quarter_decay(traj: &Trajectory) -> QuarterDecay {
    let mut worst = QuarterDecay {
        worst_round: 0,
        worst_lhs: 0.0,
        worst_rhs: 0.0,
        worst_margin: f64::INFINITY,
        all_ok: true,
    };
    for r in &traj.rounds {
        let lhs = r.loss_at_next - r.opt_loss;
        let rhs = 0.25 * (r.loss - r.opt_loss);
        let margin = rhs + INEQUALITY_TOL - lhs;
        if margin < worst.worst_margin {
            worst = QuarterDecay {
                worst_round: r.t,
                worst_lhs: lhs,
                worst_rhs: rhs,
                worst_margin: margin,
                all_ok: worst.all_ok,
            };
        }
        worst.all_ok &= margin >= 0.0;
    }
    worst
}

/// Contraction check at every played decision `u = x_t` of a trajectory,
/// summarized by the worst `rhs − lhs`.
pub fn check_trajectory_contraction(traj: &Trajectory, scenario: &Scenario) -> Result<(usize, Contraction)> {
    let mut worst: Option<(usize, Contraction)> = None;
    for (f, r) in scenario.losses().iter().zip(&traj.rounds) {
        let c = check_contraction(f, scenario.set(), &r.decision).map_err(|e| e.at_round(r.t))?;
        if worst.as_ref().is_none_or(|(_, w)| c.rhs - c.lhs < w.rhs - w.lhs) {
            worst = Some((r.t, c));
        }
    }
    worst.ok_or_else(|| Error::invalid("empty trajectory"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{run, AlgorithmConfig};
    use crate::regularity::regularity_report;
    use crate::scenarios::{instance1, instance2};

    #[test]
    fn gamma_examples() {
        assert_eq!(lemma1_gamma(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(lemma1_gamma(1.0, 5.0).unwrap(), 0.9375);
        assert_eq!(lemma1_gamma(2.0, 3.0).unwrap(), 0.5);
        assert!(lemma1_gamma(0.0, 1.0).is_err());
        assert!(lemma1_gamma(2.0, 1.0).is_err());
    }

    #[test]
    fn contraction_examples() {
        let ball = FeasibleSet::unit_ball(2).unwrap();
        let f = LossFunction::isotropic(1.0, vec![0.0, 0.0]).unwrap();
        let c = check_contraction(&f, &ball, &[0.0, 0.0]).unwrap();
        assert_eq!((c.lhs, c.rhs, c.ok), (0.0, 0.0, true));
        let c = check_contraction(&f, &ball, &[1.0, 0.0]).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert_eq!(c.rhs, 0.25);
        assert!(c.ok);
        let lin = LossFunction::linear(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            check_contraction(&lin, &ball, &[0.0, 0.0]),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn path_bound_examples() {
        assert_eq!(thm1_path_bound(1.0, 0.0, 0.0), 0.0);
        assert!((thm1_path_bound(0.5, 4.2426, 0.7071) - 4.9497).abs() < 1e-12);
        assert_eq!(thm1_path_bound(1.0, 10.0, 1.0), 22.0);
    }

    #[test]
    fn squared_bound_examples() {
        assert_eq!(thm1_squared_limit(1.0, 2.0, 1.0), 5.0);
        assert_eq!(thm1_squared_bound(1.0, 1.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(thm1_squared_bound(0.5, 2.0, 1.0, 1.0, 0.0).unwrap(), 6.0);
        assert!(thm1_squared_bound(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        // the limit is the infimum over alpha when the gradient energy vanishes
        let lim = thm1_squared_limit(2.0, 3.0, 0.5);
        for alpha in AlphaGrid::default().values() {
            assert!(thm1_squared_bound(alpha, 2.0, 3.0, 0.0, 0.5).unwrap() > lim);
        }
    }

    #[test]
    fn variation_bound_examples() {
        assert_eq!(thm2_variation_bound(0.0, 0.3, 0.3), 0.0);
        assert!((thm2_variation_bound(0.99, 0.02, 0.0) - 2.02).abs() < 1e-15);
        assert_eq!(thm2_variation_bound(1.5, -0.25, -0.5), 3.5);
        assert!((thm2_tight_variation_bound(1.5, -0.25, -0.5) - 7.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn st_vt_examples() {
        assert!(check_st_vt_inequality(1.0, 0.0, 0.0).unwrap());
        assert!(check_st_vt_inequality(2.0, 1.0, 1.0).unwrap());
        assert!(!check_st_vt_inequality(2.0, 1.1, 1.0).unwrap());
        assert!(check_st_vt_inequality(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn alpha_grid() {
        let v = AlphaGrid::default().values();
        assert_eq!(v.len(), 13);
        assert!((v[0] - 1e-3).abs() < 1e-18 && (v[12] - 1e3).abs() < 1e-9 && (v[6] - 1.0).abs() < 1e-15);
        assert_eq!(AlphaGrid::parse("0.01:100:5").unwrap().values().len(), 5);
        assert!(AlphaGrid::parse("1:2").is_err());
        assert!(AlphaGrid::parse("-1:2:3").is_err());
    }

    #[test]
    fn greedy_instance2_path_branch_is_tight() {
        let s = instance2(4).unwrap();
        let traj = run(&AlgorithmConfig::greedy(), &s).unwrap();
        let reg = regularity_report(&s, &traj).unwrap();
        let report = thm3_bounds(&traj, &s, &reg).unwrap();
        assert_eq!(report.realized_regret, 0.25);
        assert_eq!(report.value(BranchKind::GreedyPathLength), Some(0.25));
        assert_eq!(report.margin(BranchKind::GreedyPathLength), Some(0.0));
        assert!(report.all_satisfied);
    }

    #[test]
    fn greedy_instance1_variation_branch() {
        let s = instance1(3, 100).unwrap();
        let traj = run(&AlgorithmConfig::greedy(), &s).unwrap();
        let reg = regularity_report(&s, &traj).unwrap();
        let report = thm3_bounds(&traj, &s, &reg).unwrap();
        let head = traj.rounds[0].instantaneous_regret();
        let v = report.value(BranchKind::GreedyFunctionVariation).unwrap();
        assert!((v - (head + 0.99)).abs() < 1e-12);
        assert!(report.all_satisfied, "{report:?}");
    }

    #[test]
    fn thm3_rejects_gradient_trajectories() {
        let s = instance2(4).unwrap();
        let traj = run(&AlgorithmConfig::ogd(0.1), &s).unwrap();
        let reg = regularity_report(&s, &traj).unwrap();
        assert!(matches!(
            thm3_bounds(&traj, &s, &reg),
            Err(Error::Inapplicable(_))
        ));
        let cert = *s.certificate();
        assert!(matches!(
            omgd_bounds(&traj, &reg, &cert, &AlphaGrid::default()),
            Err(Error::Inapplicable(_))
        ));
    }
}
