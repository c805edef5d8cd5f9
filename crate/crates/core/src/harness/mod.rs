//! Experiment orchestration: configs, runs, verdicts and report output.
//!
//! Exit codes used by the binary: 0 pass, 1 verification failure, 2 config
//! error, 3 runtime error (see [`ExitCode`]).

mod config;
mod output;
mod report;
mod sweep;

pub use config::{
    load_config, AlgorithmSpec, ExperimentCase, ExperimentConfig, OutputConfig, ReportFormat, ScenarioSource,
    VerifyToggles, CONFIG_SCHEMA_VERSION,
};
pub use output::{emit_report, per_round_table, write_report_csv, PerRoundTable};
pub use report::{
    run_experiment, verdict_table, verify_all, AlgorithmReport, RunReport, ScenarioReport, StepParams,
    Verdict,
};
pub use sweep::{run_sweep, SweepParam, SweepRow};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Pass = 0,
    VerificationFailure = 1,
    ConfigError = 2,
    RuntimeError = 3,
}

impl ExitCode {
    pub fn for_error(e: &Error) -> Self {
        if e.is_config_error() {
            ExitCode::ConfigError
        } else {
            ExitCode::RuntimeError
        }
    }
}
