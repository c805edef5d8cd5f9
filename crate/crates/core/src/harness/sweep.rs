use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ScenarioSource};
use super::report::run_experiment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Horizon,
    Drift,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "horizon" | "T" => Ok(SweepParam::Horizon),
            "drift" => Ok(SweepParam::Drift),
            other => Err(Error::config(format!(
                "cannot sweep {other:?}, expected horizon or drift"
            ))),
        }
    }
}

/// One (scenario, algorithm, parameter value) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scenario: String,
    pub algorithm: String,
    pub param: SweepParam,
    pub value: f64,
    pub horizon: usize,
    pub realized_regret: f64,
    #[serde(rename = "P_T")]
    pub path_length: f64,
    #[serde(rename = "S_T")]
    pub squared_path_length: f64,
    #[serde(rename = "V_T")]
    pub function_variation: f64,
    pub min_bound: Option<f64>,
    pub all_satisfied: Option<bool>,
}

/// Re-runs every generated scenario of `config` once per value; cases
/// loaded from files or inline documents cannot be swept.
pub fn run_sweep(config: &ExperimentConfig, param: SweepParam, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::config("sweep needs at least one value"));
    }
    let mut rows = Vec::new();
    for &value in values {
        let mut cfg = config.clone();
        for case in &mut cfg.experiments {
            let ScenarioSource::Generate(g) = &mut case.scenario else {
                return Err(Error::config("sweep requires generated scenarios"));
            };
            match param {
                SweepParam::Horizon => {
                    if value < 1.0 || value.fract() != 0.0 {
                        return Err(Error::config(format!(
                            "horizon must be a positive integer, got {value}"
                        )));
                    }
                    g.set_horizon(value as usize);
                }
                SweepParam::Drift => g.set_drift(value)?,
            }
        }
        let report = run_experiment(&cfg)?;
        for s in &report.scenarios {
            for a in &s.algorithms {
                rows.push(SweepRow {
                    scenario: s.label.clone(),
                    algorithm: a.name.clone(),
                    param,
                    value,
                    horizon: s.horizon,
                    realized_regret: a.realized_regret,
                    path_length: s.regularity.path_length,
                    squared_path_length: s.regularity.squared_path_length,
                    function_variation: s.regularity.function_variation,
                    min_bound: a.bounds.as_ref().map(|b| b.min_bound),
                    all_satisfied: a.bounds.as_ref().map(|b| b.all_satisfied),
                });
            }
        }
    }
    Ok(rows)
}
