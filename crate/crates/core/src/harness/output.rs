use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::ReportFormat;
use super::report::{AlgorithmReport, RunReport, ScenarioReport};
use crate::bounds::BranchKind;
use crate::error::{Error, Result};
use crate::linalg;
use crate::regularity::max_selection_prefixes;

/// Per-round series of one run: regret and the cumulative bound values
/// evaluated on each prefix `1..t` of the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct PerRoundTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Builds the per-round table for `alg`, which must come from `scenario`'s
/// report with its trajectory attached.
pub fn per_round_table(scenario: &ScenarioReport, alg: &AlgorithmReport) -> Result<PerRoundTable> {
    let traj = alg
        .trajectory
        .as_ref()
        .ok_or_else(|| Error::invalid("algorithm report carries no trajectory"))?;
    let sc = scenario
        .scenario
        .as_ref()
        .ok_or_else(|| Error::invalid("scenario report carries no scenario"))?;
    let losses = sc.losses();
    let cert = &scenario.certificate;
    let (g, l) = (cert.gradient_bound, cert.smoothness);
    let init = traj.initial_distance();
    let init_sq = init * init;
    let head = traj.rounds[0].instantaneous_regret();
    let first = traj.first_loss();

    let minimizers = traj.minimizers();
    let greedy_prefixes = match &alg.bounds {
        Some(b) if b.branch(BranchKind::GreedyPathLength).is_some() => {
            let (p, s, _) = max_selection_prefixes(losses, sc.set(), &minimizers)?;
            Some((p, s))
        }
        _ => None,
    };
    let branches: Vec<(BranchKind, Option<f64>)> = alg
        .bounds
        .iter()
        .flat_map(|b| {
            b.branches
                .iter()
                .filter(|br| br.applicable && !br.informational)
                .map(|br| (br.kind, b.alpha_used))
        })
        .collect();

    let mut header = vec!["t".to_string(), "inst_regret".into(), "cum_regret".into()];
    header.extend(branches.iter().map(|(k, _)| format!("bound_{}", k.name())));

    let (mut cum, mut p, mut s, mut v, mut energy, mut tail_energy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let mut rows = Vec::with_capacity(traj.rounds.len());
    for (i, r) in traj.rounds.iter().enumerate() {
        let inst = r.instantaneous_regret();
        cum += inst;
        let grad_sq = linalg::norm_sq(&losses[i].gradient(&r.minimizer)?);
        energy += grad_sq;
        if i > 0 {
            let prev = &traj.rounds[i - 1].minimizer;
            p += linalg::dist(prev, &r.minimizer);
            s += linalg::dist_sq(prev, &r.minimizer);
            v += losses[i - 1].sup_abs_diff(&losses[i], sc.set())?.value;
            tail_energy += grad_sq;
        }
        let mut row = vec![r.t as f64, inst, cum];
        for (kind, alpha) in &branches {
            let alpha = alpha.unwrap_or(1.0);
            row.push(match kind {
                BranchKind::PathLength => 2.0 * g * (p + init),
                BranchKind::SquaredPathLength => {
                    energy / (2.0 * alpha) + 2.0 * (l + alpha) * s + (l + alpha) * init_sq
                }
                BranchKind::SquaredPathLengthLimit => 2.0 * l * s + l * init_sq,
                BranchKind::FunctionVariation => 2.0 * v + 2.0 * (first - r.loss_at_next),
                BranchKind::FunctionVariationTight => 4.0 / 3.0 * (v + first - r.loss_at_next),
                BranchKind::GreedyPathLength => {
                    head + g * greedy_prefixes.as_ref().map_or(p, |(pp, _)| pp[i])
                }
                BranchKind::GreedySquaredPathLength => {
                    head + 0.5 * tail_energy
                        + 0.5 * (l + 1.0) * greedy_prefixes.as_ref().map_or(s, |(_, ss)| ss[i])
                }
                BranchKind::GreedyFunctionVariation => head + v,
            });
        }
        rows.push(row);
    }
    Ok(PerRoundTable { header, rows })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_at(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_report_csv(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let summary_path = dir.join("summary.csv");
    let mut summary = csv::Writer::from_writer(create(&summary_path)?);
    summary.write_record([
        "scenario",
        "algorithm",
        "horizon",
        "realized_regret",
        "min_bound",
        "P_T",
        "S_T",
        "V_T",
        "grad_energy",
        "eta",
        "K",
        "gamma",
    ])?;
    for (i, s) in report.scenarios.iter().enumerate() {
        for (j, a) in s.algorithms.iter().enumerate() {
            let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
            summary.write_record([
                s.label.clone(),
                a.name.clone(),
                s.horizon.to_string(),
                a.realized_regret.to_string(),
                opt(a.bounds.as_ref().map(|b| b.min_bound)),
                s.regularity.path_length.to_string(),
                s.regularity.squared_path_length.to_string(),
                s.regularity.function_variation.to_string(),
                s.regularity.grad_energy.to_string(),
                opt(a.params.map(|p| p.eta)),
                a.params.map_or(String::new(), |p| p.inner_iterations.to_string()),
                opt(a.params.and_then(|p| p.gamma)),
            ])?;

            let table = per_round_table(s, a)?;
            let rounds_path = dir.join(format!("s{i:02}_a{j:02}_rounds.csv"));
            let mut w = csv::Writer::from_writer(create(&rounds_path)?);
            w.write_record(&table.header)?;
            for row in &table.rows {
                let mut rec: Vec<String> = row.iter().map(f64::to_string).collect();
                rec[0] = (row[0] as usize).to_string();
                w.write_record(&rec)?;
            }
            w.flush().map_err(io_at(&rounds_path))?;
            written.push(rounds_path);

            if let Some(traj) = &a.trajectory {
                let traj_path = dir.join(format!("s{i:02}_a{j:02}_trajectory.csv"));
                traj.write_csv(create(&traj_path)?)?;
                written.push(traj_path);
            }
        }
    }
    summary.flush().map_err(io_at(&summary_path))?;
    written.push(summary_path);

    let verdict_path = dir.join("verdicts.csv");
    let mut w = csv::Writer::from_writer(create(&verdict_path)?);
    for v in &report.verdicts {
        w.serialize(v)?;
    }
    if report.verdicts.is_empty() {
        w.write_record([
            "scenario",
            "algorithm",
            "check",
            "lhs",
            "rhs",
            "margin",
            "tolerance",
            "pass",
            "hypotheses_met",
        ])?;
    }
    w.flush().map_err(io_at(&verdict_path))?;
    written.push(verdict_path);
    Ok(written)
}

/// Writes `report.json`, or the CSV family (`summary.csv`, `verdicts.csv`,
/// per-run `sNN_aNN_rounds.csv` and `sNN_aNN_trajectory.csv`) into `dir`.
pub fn emit_report(report: &RunReport, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_at(dir))?;
    match format {
        ReportFormat::Json => {
            let path = dir.join("report.json");
            let mut f = create(&path)?;
            f.write_all(report.to_json()?.as_bytes()).map_err(io_at(&path))?;
            Ok(vec![path])
        }
        ReportFormat::Csv => write_report_csv(report, dir),
    }
}
