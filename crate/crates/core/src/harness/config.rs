use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{omgd_default_params, AlgorithmConfig, Method};
use crate::bounds::AlphaGrid;
use crate::error::{Error, Result};
use crate::losses::CurvatureCertificate;
use crate::scenarios::{load_scenario, parse_error, GeneratorSpec, Scenario, ScenarioFile};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Top-level experiment document (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub experiments: Vec<ExperimentCase>,
    #[serde(default)]
    pub verify: VerifyToggles,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<AlphaGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    /// Directory that relative scenario paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// One scenario and the algorithms played on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentCase {
    pub scenario: ScenarioSource,
    pub algorithms: Vec<AlgorithmSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioSource {
    /// `{"generate": {"generator": "instance1", "dim": 3, "horizon": 100}}`
    Generate(GeneratorSpec),
    /// `{"file": "scenarios/foo.json"}`
    File(PathBuf),
    /// `{"inline": { ...scenario document... }}`
    Inline(ScenarioFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    /// OMGD with `η = 1/L` and `K = ⌈4(L+λ)/λ ln 4⌉` from the scenario certificate.
    OmgdDefault {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial_point: Option<Vec<f64>>,
    },
    /// `eta` defaults to `1/L`.
    Ogd {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial_point: Option<Vec<f64>>,
    },
    /// `eta` defaults to `1/L`.
    Omgd {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
        inner_iterations: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial_point: Option<Vec<f64>>,
    },
    Greedy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial_point: Option<Vec<f64>>,
    },
}

impl AlgorithmSpec {
    pub fn omgd_default() -> Self {
        AlgorithmSpec::OmgdDefault { initial_point: None }
    }

    pub fn greedy() -> Self {
        AlgorithmSpec::Greedy { initial_point: None }
    }

    pub fn name(&self) -> String {
        match self {
            AlgorithmSpec::OmgdDefault { .. } => "omgd_default".into(),
            AlgorithmSpec::Ogd { eta: Some(e), .. } => format!("ogd(eta={e})"),
            AlgorithmSpec::Ogd { eta: None, .. } => "ogd".into(),
            AlgorithmSpec::Omgd {
                eta: Some(e),
                inner_iterations,
                ..
            } => format!("omgd(eta={e},K={inner_iterations})"),
            AlgorithmSpec::Omgd {
                eta: None,
                inner_iterations,
                ..
            } => format!("omgd(K={inner_iterations})"),
            AlgorithmSpec::Greedy { .. } => "greedy".into(),
        }
    }

    /// Concrete algorithm for a scenario with certificate `cert`.
    pub fn resolve(&self, cert: &CurvatureCertificate) -> Result<AlgorithmConfig> {
        let default_eta = || -> Result<f64> {
            if cert.smoothness > 0.0 {
                Ok(1.0 / cert.smoothness)
            } else {
                Err(Error::config(
                    "step size defaults to 1/L, but the scenario has L = 0; set eta explicitly",
                ))
            }
        };
        let (method, init) = match self {
            AlgorithmSpec::OmgdDefault { initial_point } => {
                if !cert.is_strongly_convex() {
                    return Err(Error::config(
                        "omgd_default needs a strongly convex scenario (lambda > 0)",
                    ));
                }
                let (eta, k) = omgd_default_params(cert.lambda, cert.smoothness)?;
                (
                    Method::Omgd {
                        eta,
                        inner_iterations: k,
                    },
                    initial_point,
                )
            }
            AlgorithmSpec::Ogd { eta, initial_point } => (
                Method::Ogd {
                    eta: eta.map_or_else(default_eta, Ok)?,
                },
                initial_point,
            ),
            AlgorithmSpec::Omgd {
                eta,
                inner_iterations,
                initial_point,
            } => (
                Method::Omgd {
                    eta: eta.map_or_else(default_eta, Ok)?,
                    inner_iterations: *inner_iterations,
                },
                initial_point,
            ),
            AlgorithmSpec::Greedy { initial_point } => (Method::Greedy, initial_point),
        };
        let config = AlgorithmConfig {
            method,
            initial_point: init.clone(),
        };
        config.validate().map_err(|e| Error::config(e.to_string()))?;
        Ok(config)
    }
}

/// Which inequalities `verify` evaluates. All on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyToggles {
    /// Path-length and squared path-length bounds for OGD/OMGD.
    pub path_bounds: bool,
    /// Function-variation bound for OGD/OMGD.
    pub variation_bound: bool,
    /// Path, squared-path and variation bounds for the greedy strategy.
    pub greedy_bounds: bool,
    /// One-step contraction at every decision, and the per-round quarter decay.
    pub contraction: bool,
    /// `S_T ≤ 2V_T/λ` on strongly convex scenarios.
    pub st_vt: bool,
}

impl Default for VerifyToggles {
    fn default() -> Self {
        Self::all(true)
    }
}

impl VerifyToggles {
    pub fn all(on: bool) -> Self {
        Self {
            path_bounds: on,
            variation_bound: on,
            greedy_bounds: on,
            contraction: on,
            st_vt: on,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::config(format!(
                "unknown format {other:?}, expected json or csv"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default)]
    pub format: ReportFormat,
}

impl ExperimentConfig {
    /// A single-case config with default toggles.
    pub fn single(scenario: ScenarioSource, algorithms: Vec<AlgorithmSpec>) -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            label: None,
            experiments: vec![ExperimentCase { scenario, algorithms }],
            verify: VerifyToggles::default(),
            alpha_grid: None,
            output: None,
            base_dir: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::config(format!(
                "unsupported schema_version {}, expected {CONFIG_SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if self.experiments.is_empty() {
            return Err(Error::config("config lists no experiments"));
        }
        for (i, case) in self.experiments.iter().enumerate() {
            if case.algorithms.is_empty() {
                return Err(Error::config(format!("experiments[{i}] lists no algorithms")));
            }
        }
        if let Some(grid) = &self.alpha_grid {
            grid.validate()?;
        }
        Ok(())
    }

    pub fn alpha_grid(&self) -> AlphaGrid {
        self.alpha_grid.unwrap_or_default()
    }

    /// Overrides the seed of every seeded generator.
    pub fn override_seed(&mut self, seed: u64) {
        for case in &mut self.experiments {
            if let ScenarioSource::Generate(g) = &mut case.scenario {
                g.set_seed(seed);
            }
        }
    }
}

impl ScenarioSource {
    /// Every failure here is attributed to the inputs, so it is reported
    /// as a config error.
    pub fn load(&self, base_dir: Option<&Path>) -> Result<Scenario> {
        let as_config = |e: Error| {
            if e.is_config_error() {
                e
            } else {
                Error::config(e.to_string())
            }
        };
        match self {
            ScenarioSource::Generate(g) => g.generate().map_err(as_config),
            ScenarioSource::Inline(file) => file.clone().into_scenario().map_err(as_config),
            ScenarioSource::File(path) => {
                let full = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                let text = read_input(&full)?;
                load_scenario(&text)
                    .map_err(as_config)
                    .map_err(|e| e.context(full.display().to_string()))
            }
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))
}

/// Reads and validates a config file; relative scenario paths resolve
/// against the file's directory.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = read_input(path)?;
    let mut config = ExperimentConfig::parse(&text).map_err(|e| e.context(path.display().to_string()))?;
    config.base_dir = path.parent().map(Path::to_path_buf);
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let text = r#"{
            "schema_version": 1,
            "experiments": [{
                "scenario": {"generate": {"generator": "instance2", "horizon": 4}},
                "algorithms": [{"kind": "greedy"}]
            }]
        }"#;
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.verify, VerifyToggles::all(true));
        assert_eq!(c.experiments[0].algorithms, vec![AlgorithmSpec::greedy()]);
    }

    #[test]
    fn rejects_empty_algorithm_list() {
        let text = r#"{"schema_version": 1, "experiments": [{
            "scenario": {"generate": {"generator": "instance2", "horizon": 4}}, "algorithms": []}]}"#;
        assert!(matches!(
            ExperimentConfig::parse(text),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn omgd_default_requires_strong_convexity() {
        let cert = CurvatureCertificate {
            lambda: 0.0,
            smoothness: 0.0,
            gradient_bound: 1.0,
        };
        assert!(matches!(
            AlgorithmSpec::omgd_default().resolve(&cert),
            Err(Error::InvalidConfig(_))
        ));
        let cert = CurvatureCertificate {
            lambda: 1.0,
            smoothness: 2.0,
            gradient_bound: 1.0,
        };
        assert_eq!(
            AlgorithmSpec::omgd_default().resolve(&cert).unwrap(),
            AlgorithmConfig::omgd(0.5, 17)
        );
        let ogd = AlgorithmSpec::Ogd {
            eta: None,
            initial_point: None,
        };
        assert_eq!(ogd.resolve(&cert).unwrap(), AlgorithmConfig::ogd(0.5));
    }

    #[test]
    fn unknown_fields_are_reported_with_position() {
        let text = "{\n \"schema_version\": 1,\n \"experiments\": [],\n \"bogus\": 3\n}";
        assert!(matches!(
            ExperimentConfig::parse(text),
            Err(Error::Parse { line: 4, .. })
        ));
    }
}
