use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{AlgorithmSpec, ExperimentCase, ExperimentConfig, VerifyToggles};
use super::ExitCode;
use crate::algorithms::{run, Method, Trajectory};
use crate::bounds::{
    check_quarter_decay, check_st_vt_inequality, check_trajectory_contraction, lemma1_gamma, omgd_bounds,
    thm3_bounds, AlphaGrid, BoundReport, Contraction, QuarterDecay, INEQUALITY_TOL, SATISFACTION_TOL,
};
use crate::error::{Error, Result};
use crate::losses::CurvatureCertificate;
use crate::regularity::{regularity_report, RegularityReport};
use crate::scenarios::Scenario;

/// Step parameters of a run, with the one-step contraction factor γ when λ > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    pub eta: f64,
    #[serde(rename = "K")]
    pub inner_iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstContraction {
    pub round: usize,
    #[serde(flatten)]
    pub contraction: Contraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmReport {
    pub name: String,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<StepParams>,
    pub initial_decision: Vec<f64>,
    pub final_decision: Vec<f64>,
    pub initial_distance: f64,
    pub first_loss: f64,
    pub final_loss_at_next: f64,
    pub realized_regret: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quarter_decay: Option<QuarterDecay>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction: Option<WorstContraction>,
    #[serde(skip)]
    pub trajectory: Option<Trajectory>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub label: String,
    pub set: String,
    pub dim: usize,
    pub horizon: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub certificate: CurvatureCertificate,
    pub regularity: RegularityReport,
    pub algorithms: Vec<AlgorithmReport>,
    #[serde(skip)]
    pub scenario: Option<Arc<Scenario>>,
}

/// One evaluated inequality `lhs ≤ rhs` (up to `tolerance`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub scenario: String,
    /// Empty for scenario-level checks.
    pub algorithm: String,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// False when the run's step size or inner iterations fall short of
    /// what the inequality assumes; the check is still evaluated.
    pub hypotheses_met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub alpha_grid: AlphaGrid,
    pub verify: VerifyToggles,
    pub scenarios: Vec<ScenarioReport>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    /// The only field that varies between identical runs.
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.pass)
    }

    pub fn exit_code(&self) -> ExitCode {
        if self.passed {
            ExitCode::Pass
        } else {
            ExitCode::VerificationFailure
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

fn verdict(scenario: &str, algorithm: &str, check: &str, lhs: f64, rhs: f64, tolerance: f64) -> Verdict {
    let margin = rhs - lhs;
    Verdict {
        scenario: scenario.to_string(),
        algorithm: algorithm.to_string(),
        check: check.to_string(),
        lhs,
        rhs,
        margin,
        tolerance,
        pass: margin >= -tolerance,
        hypotheses_met: true,
    }
}

fn run_algorithm(
    spec: &AlgorithmSpec,
    scenario: &Scenario,
    grid: &AlphaGrid,
    toggles: &VerifyToggles,
) -> Result<(AlgorithmReport, RegularityReport)> {
    let cert = scenario.certificate();
    let config = spec.resolve(cert)?;
    let traj = run(&config, scenario)?;
    let reg = regularity_report(scenario, &traj)?;
    let strongly_convex = cert.is_strongly_convex();
    let gamma = if strongly_convex {
        Some(lemma1_gamma(cert.lambda, cert.smoothness)?)
    } else {
        None
    };
    let params = traj.method.step_params().map(|(eta, k)| StepParams {
        eta,
        inner_iterations: k,
        gamma,
    });
    let bounds = match traj.method {
        Method::Greedy => Some(thm3_bounds(&traj, scenario, &reg)?),
        _ if strongly_convex => Some(omgd_bounds(&traj, &reg, cert, grid)?),
        _ => None,
    };
    let quarter_decay = match &bounds {
        Some(b) if b.variation_hypotheses_met == Some(true) => Some(check_quarter_decay(&traj)),
        _ => None,
    };
    let contraction = if strongly_convex && toggles.contraction {
        let (round, contraction) = check_trajectory_contraction(&traj, scenario)?;
        Some(WorstContraction { round, contraction })
    } else {
        None
    };
    let report = AlgorithmReport {
        name: spec.name(),
        method: traj.method.clone(),
        params,
        initial_decision: traj.initial_decision().to_vec(),
        final_decision: traj.next_decision.clone(),
        initial_distance: traj.initial_distance(),
        first_loss: traj.first_loss(),
        final_loss_at_next: traj.final_loss_at_next(),
        realized_regret: crate::regularity::dynamic_regret(&traj),
        bounds,
        quarter_decay,
        contraction,
        trajectory: Some(traj),
    };
    Ok((report, reg))
}

fn run_case(case: &ExperimentCase, config: &ExperimentConfig, grid: &AlphaGrid) -> Result<ScenarioReport> {
    let scenario = Arc::new(case.scenario.load(config.base_dir.as_deref())?);
    let label = scenario.label().to_string();
    let mut algorithms = Vec::with_capacity(case.algorithms.len());
    let mut regularity = None;
    for spec in &case.algorithms {
        let (report, reg) = run_algorithm(spec, &scenario, grid, &config.verify)
            .map_err(|e| e.context(format!("scenario {label:?}, algorithm {}", spec.name())))?;
        regularity.get_or_insert(reg);
        algorithms.push(report);
    }
    Ok(ScenarioReport {
        label,
        set: scenario.set().kind().to_string(),
        dim: scenario.dim(),
        horizon: scenario.horizon(),
        seed: scenario.seed(),
        certificate: *scenario.certificate(),
        regularity: regularity.expect("validated configs list at least one algorithm"),
        algorithms,
        scenario: Some(scenario),
    })
}

fn case_verdicts(s: &ScenarioReport, toggles: &VerifyToggles, out: &mut Vec<Verdict>) -> Result<()> {
    use crate::bounds::BranchKind as K;
    let cert = &s.certificate;
    if toggles.st_vt && cert.is_strongly_convex() && s.regularity.variation_exact {
        let reg = &s.regularity;
        check_st_vt_inequality(cert.lambda, reg.squared_path_length, reg.function_variation)?;
        out.push(verdict(
            &s.label,
            "",
            "st_vt",
            reg.squared_path_length,
            2.0 * reg.function_variation / cert.lambda,
            INEQUALITY_TOL,
        ));
    }
    for a in &s.algorithms {
        if let Some(b) = &a.bounds {
            for br in b.branches.iter().filter(|br| br.applicable && !br.informational) {
                let enabled = match br.kind {
                    K::PathLength | K::SquaredPathLength | K::SquaredPathLengthLimit => toggles.path_bounds,
                    K::FunctionVariation | K::FunctionVariationTight => toggles.variation_bound,
                    K::GreedyPathLength | K::GreedySquaredPathLength | K::GreedyFunctionVariation => {
                        toggles.greedy_bounds
                    }
                };
                if enabled {
                    let mut v = verdict(
                        &s.label,
                        &a.name,
                        br.kind.name(),
                        b.realized_regret,
                        br.value,
                        SATISFACTION_TOL,
                    );
                    v.hypotheses_met = match br.kind {
                        K::PathLength | K::SquaredPathLength | K::SquaredPathLengthLimit => {
                            b.path_hypotheses_met
                        }
                        K::FunctionVariation | K::FunctionVariationTight => b.variation_hypotheses_met,
                        _ => None,
                    }
                    .unwrap_or(true);
                    out.push(v);
                }
            }
        }
        if toggles.contraction {
            if let Some(c) = &a.contraction {
                let mut v = verdict(
                    &s.label,
                    &a.name,
                    "contraction",
                    c.contraction.lhs,
                    c.contraction.rhs,
                    INEQUALITY_TOL,
                );
                v.pass = c.contraction.ok;
                out.push(v);
            }
            if let Some(q) = &a.quarter_decay {
                out.push(verdict(
                    &s.label,
                    &a.name,
                    "quarter_decay",
                    q.worst_lhs,
                    q.worst_rhs,
                    INEQUALITY_TOL,
                ));
            }
        }
    }
    Ok(())
}

/// Runs every case (scenarios in parallel, assembled in config order) and
/// evaluates the enabled checks.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let grid = config.alpha_grid();
    let results: Vec<Result<ScenarioReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .experiments
            .iter()
            .map(|case| scope.spawn(|| run_case(case, config, &grid)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::invalid("experiment worker panicked")))
            })
            .collect()
    });
    let scenarios = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut verdicts = Vec::new();
    for s in &scenarios {
        case_verdicts(s, &config.verify, &mut verdicts)?;
    }
    let passed = verdicts.iter().all(|v| v.pass);
    Ok(RunReport {
        label: config.label.clone(),
        alpha_grid: grid,
        verify: config.verify,
        scenarios,
        verdicts,
        passed,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Aligned table of every verdict, failing rows marked.
pub fn verdict_table(report: &RunReport) -> String {
    let algorithm = |v: &Verdict| {
        if v.algorithm.is_empty() {
            "-".to_string()
        } else {
            v.algorithm.clone()
        }
    };
    let sw = report
        .verdicts
        .iter()
        .map(|v| v.scenario.len())
        .max()
        .unwrap_or(0)
        .max(8);
    let aw = report
        .verdicts
        .iter()
        .map(|v| algorithm(v).len())
        .max()
        .unwrap_or(0)
        .max(9);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} {:<sw$} {:<aw$} {:<26} {:>14} {:>14} {:>12} {:>4}",
        "status", "scenario", "algorithm", "check", "lhs", "rhs", "margin", "hyp"
    );
    for v in &report.verdicts {
        let _ = writeln!(
            out,
            "{:<6} {:<sw$} {:<aw$} {:<26} {:>14.6e} {:>14.6e} {:>12.3e} {:>4}",
            if v.pass { "pass" } else { "FAIL" },
            v.scenario,
            algorithm(v),
            v.check,
            v.lhs,
            v.rhs,
            v.margin,
            if v.hypotheses_met { "yes" } else { "no" }
        );
    }
    let failed = report.failures().count();
    let _ = writeln!(
        out,
        "{} of {} checks passed{}",
        report.verdicts.len() - failed,
        report.verdicts.len(),
        if failed > 0 {
            format!(", {failed} FAILED")
        } else {
            String::new()
        }
    );
    out
}

/// Runs the config and returns the report with its exit status.
pub fn verify_all(config: &ExperimentConfig) -> Result<(RunReport, ExitCode)> {
    let report = run_experiment(config)?;
    let code = report.exit_code();
    Ok((report, code))
}
