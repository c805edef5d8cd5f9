//! Loss-sequence generators and the scenario file format.
//!
//! Scenario files are JSON documents:
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "label": "instance2(T=4)",
//!   "seed": null,
//!   "horizon": 4,
//!   "set": {"kind": "simplex", "dimension": 2},
//!   "certificate": {"lambda": 0.0, "L": 0.0, "G": 0.5},
//!   "losses": [{"kind": "linear", "w": [-0.5, 0.0]}, ...]
//! }
//! ```
//!
//! Numbers are written with the shortest representation that parses back to
//! the same `f64`, so files round-trip exactly. `certificate` is optional on
//! input; when present it must be a valid, conservative certificate for the
//! losses and is then used in place of the computed one.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg;
use crate::losses::{CurvatureCertificate, LossFunction};
use crate::rng::SeededRng;

pub const SCHEMA_VERSION: u32 = 1;

/// Centers of [`drifting_quadratic`] stay inside this fraction of the unit ball.
pub const DRIFT_INTERIOR_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    set: FeasibleSet,
    losses: Vec<LossFunction>,
    label: String,
    seed: Option<u64>,
    certificate: CurvatureCertificate,
}

impl Scenario {
    /// Validates every loss against `set` and certifies the sequence with
    /// the conservative aggregate (min λ, max L, max G).
    pub fn new(set: FeasibleSet, losses: Vec<LossFunction>, label: impl Into<String>) -> Result<Self> {
        set.validate()?;
        if losses.is_empty() {
            return Err(Error::invalid("a scenario needs at least one round"));
        }
        let mut certs = Vec::with_capacity(losses.len());
        for (i, f) in losses.iter().enumerate() {
            let per_round = || -> Result<CurvatureCertificate> {
                f.validate()?;
                check_dim(set.dim(), f.dim())?;
                f.certify(&set)
            };
            certs.push(per_round().map_err(|e| e.at_round(i + 1))?);
        }
        let certificate = CurvatureCertificate::aggregate(&certs).expect("non-empty");
        Ok(Self {
            set,
            losses,
            label: label.into(),
            seed: None,
            certificate,
        })
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    pub fn losses(&self) -> &[LossFunction] {
        &self.losses
    }

    pub fn horizon(&self) -> usize {
        self.losses.len()
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn certificate(&self) -> &CurvatureCertificate {
        &self.certificate
    }

    /// Same scenario with the losses from round `from` (1-based) onward
    /// replaced. Used to check that decisions never look ahead.
    pub fn with_losses_replaced(&self, from: usize, replacement: &LossFunction) -> Result<Self> {
        let losses = self
            .losses
            .iter()
            .enumerate()
            .map(|(i, f)| {
                if i + 1 >= from {
                    replacement.clone()
                } else {
                    f.clone()
                }
            })
            .collect();
        Ok(Scenario::new(self.set.clone(), losses, self.label.clone())?.with_seed(self.seed))
    }

    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            label: self.label.clone(),
            seed: self.seed,
            horizon: self.horizon(),
            set: self.set.clone(),
            certificate: Some(self.certificate),
            losses: self.losses.clone(),
        }
    }

    pub fn to_config_text(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scenario serializes") + "\n"
    }
}

/// On-disk representation of a [`Scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub label: String,
    #[serde(default)]
    pub seed: Option<u64>,
    pub horizon: usize,
    pub set: FeasibleSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CurvatureCertificate>,
    pub losses: Vec<LossFunction>,
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if self.horizon != self.losses.len() {
            return Err(Error::config(format!(
                "horizon is {} but {} losses are listed",
                self.horizon,
                self.losses.len()
            )));
        }
        self.set
            .validate()
            .map_err(|e| Error::config(format!("set: {e}")))?;
        for (i, f) in self.losses.iter().enumerate() {
            f.validate()
                .map_err(|e| Error::config(format!("losses[{i}]: {e}")))?;
            if f.dim() != self.set.dim() {
                return Err(Error::config(format!(
                    "losses[{i}]: dimension {} does not match the {}-dimensional set",
                    f.dim(),
                    self.set.dim()
                )));
            }
        }
        let mut scenario = Scenario::new(self.set, self.losses, self.label)
            .map_err(|e| Error::config(e.to_string()))?
            .with_seed(self.seed);
        if let Some(declared) = self.certificate {
            declared.validate()?;
            let computed = scenario.certificate;
            let slack = |x: f64| 1e-9 * (1.0 + x.abs());
            if declared.lambda > computed.lambda + slack(computed.lambda)
                || declared.smoothness < computed.smoothness - slack(computed.smoothness)
                || declared.gradient_bound < computed.gradient_bound - slack(computed.gradient_bound)
            {
                return Err(Error::config(format!(
                    "declared certificate {declared:?} is not valid for the losses (computed {computed:?})"
                )));
            }
            scenario.certificate = declared;
        }
        Ok(scenario)
    }
}

pub(crate) fn parse_error(text: &str, e: serde_json::Error) -> Error {
    if e.is_data() || e.is_syntax() || e.is_eof() {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    } else {
        let _ = text;
        Error::Json(e)
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    file.into_scenario()
}

/// Linear losses over `simplex(d)` alternating weight `1/T` between the
/// first two coordinates. Path-lengths grow like `T`, variation stays `O(1)`.
pub fn instance1(dim: usize, horizon: usize) -> Result<Scenario> {
    if dim < 2 {
        return Err(Error::invalid("instance1 needs dimension >= 2"));
    }
    check_horizon(horizon)?;
    let weight = 1.0 / horizon as f64;
    let losses = (1..=horizon)
        .map(|t| {
            let mut w = vec![0.0; dim];
            w[if t % 2 == 1 { 0 } else { 1 }] = weight;
            LossFunction::Linear { w }
        })
        .collect();
    Scenario::new(
        FeasibleSet::simplex(dim)?,
        losses,
        format!("instance1(d={dim},T={horizon})"),
    )
}

/// Two-expert linear losses `[−½, 0]` / `[0, ½]`: the minimizer never moves
/// while the variation grows like `T`.
pub fn instance2(horizon: usize) -> Result<Scenario> {
    check_horizon(horizon)?;
    let losses = (1..=horizon)
        .map(|t| LossFunction::Linear {
            w: if t % 2 == 1 {
                vec![-0.5, 0.0]
            } else {
                vec![0.0, 0.5]
            },
        })
        .collect();
    Scenario::new(
        FeasibleSet::simplex(2)?,
        losses,
        format!("instance2(T={horizon})"),
    )
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        Err(Error::invalid("horizon must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_curvature(lambda: f64, smoothness: f64, dim: usize) -> Result<Vec<f64>> {
    if !(lambda.is_finite() && lambda > 0.0 && smoothness.is_finite() && smoothness >= lambda) {
        return Err(Error::config(format!(
            "need 0 < lambda <= L, got lambda = {lambda}, L = {smoothness}"
        )));
    }
    if dim == 0 {
        return Err(Error::config("dimension must be positive"));
    }
    if lambda == smoothness {
        return Ok(vec![lambda; dim]);
    }
    if dim < 2 {
        return Err(Error::config("lambda < L needs dimension >= 2"));
    }
    Ok((0..dim)
        .map(|i| lambda + (smoothness - lambda) * i as f64 / (dim - 1) as f64)
        .collect())
}

fn quadratic(diag: &[f64], center: Vec<f64>) -> LossFunction {
    if diag.iter().all(|d| *d == diag[0]) {
        LossFunction::IsotropicQuadratic {
            curvature: diag[0],
            center,
        }
    } else {
        let dim = diag.len();
        LossFunction::DiagonalQuadratic {
            diag: diag.to_vec(),
            center,
            linear: vec![0.0; dim],
        }
    }
}

/// Parameters of [`drifting_quadratic`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftingQuadratic {
    pub dim: usize,
    pub horizon: usize,
    pub lambda: f64,
    #[serde(rename = "L")]
    pub smoothness: f64,
    pub drift: f64,
    pub seed: u64,
}

/// Quadratics over the unit ball whose centers take a seeded random walk
/// with steps of length exactly `drift`, confined to the ball of radius
/// [`DRIFT_INTERIOR_RADIUS`] so every minimizer is interior.
///
/// Curvatures are spread linearly from `lambda` to `L` across coordinates
/// (isotropic when they coincide).
pub fn drifting_quadratic(p: DriftingQuadratic) -> Result<Scenario> {
    let diag = check_curvature(p.lambda, p.smoothness, p.dim)?;
    check_horizon(p.horizon)?;
    if !(p.drift.is_finite() && p.drift >= 0.0) {
        return Err(Error::config(format!("drift must be >= 0, got {}", p.drift)));
    }
    if p.drift > DRIFT_INTERIOR_RADIUS {
        return Err(Error::config(format!(
            "drift {} exceeds the interior radius {DRIFT_INTERIOR_RADIUS}; centers cannot stay interior",
            p.drift
        )));
    }
    let mut rng = SeededRng::new(p.seed);
    let inner = FeasibleSet::ball(vec![0.0; p.dim], DRIFT_INTERIOR_RADIUS)?;
    let mut center = inner.sample(&mut rng);
    let mut losses = Vec::with_capacity(p.horizon);
    for t in 0..p.horizon {
        if t > 0 && p.drift > 0.0 {
            center = walk_step(&center, p.drift, &mut rng);
        }
        losses.push(quadratic(&diag, center.clone()));
    }
    let label = format!(
        "drifting_quadratic(d={},T={},lambda={},L={},drift={},seed={})",
        p.dim, p.horizon, p.lambda, p.smoothness, p.drift, p.seed
    );
    Ok(Scenario::new(FeasibleSet::unit_ball(p.dim)?, losses, label)?.with_seed(Some(p.seed)))
}

fn walk_step(center: &[f64], step: f64, rng: &mut SeededRng) -> Vec<f64> {
    for _ in 0..64 {
        let cand = linalg::axpy(center, step, &rng.unit_vector(center.len()));
        if linalg::norm(&cand) <= DRIFT_INTERIOR_RADIUS {
            return cand;
        }
    }
    // head for the origin; lands within `step` of it
    let n = linalg::norm(center);
    linalg::axpy(center, -step / n, center)
}

/// Parameters of [`low_variation_high_path`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowVariationHighPath {
    pub dim: usize,
    pub horizon: usize,
    pub seed: u64,
}

/// Radius of the ball used by [`low_variation_high_path`].
pub const HOP_BALL_RADIUS: f64 = 0.6;

/// Isotropic quadratics with curvature `1/T` whose centers hop between
/// `±½u` (a seeded unit direction) inside the ball of radius
/// [`HOP_BALL_RADIUS`]. Each hop has length 1, so `P_T = S_T = T − 1`, while
/// each variation term is `0.6/T`.
pub fn low_variation_high_path(p: LowVariationHighPath) -> Result<Scenario> {
    if p.dim < 2 {
        return Err(Error::config("low_variation_high_path needs dimension >= 2"));
    }
    check_horizon(p.horizon)?;
    let mut rng = SeededRng::new(p.seed);
    let u = rng.unit_vector(p.dim);
    let curvature = 1.0 / p.horizon as f64;
    let losses = (1..=p.horizon)
        .map(|t| LossFunction::IsotropicQuadratic {
            curvature,
            center: linalg::scale(&u, if t % 2 == 1 { 0.5 } else { -0.5 }),
        })
        .collect();
    let label = format!(
        "low_variation_high_path(d={},T={},seed={})",
        p.dim, p.horizon, p.seed
    );
    Ok(Scenario::new(
        FeasibleSet::ball(vec![0.0; p.dim], HOP_BALL_RADIUS)?,
        losses,
        label,
    )?
    .with_seed(Some(p.seed)))
}

/// Parameters of [`jittered_quadratic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JitteredQuadratic {
    pub set: FeasibleSet,
    pub horizon: usize,
    pub lambda: f64,
    #[serde(rename = "L")]
    pub smoothness: f64,
    /// Standard deviation of the per-round center noise.
    pub spread: f64,
    pub seed: u64,
}

/// Quadratics sharing one Hessian whose centers are drawn independently
/// around the set's default point. Large `spread` puts many minimizers on
/// the boundary.
pub fn jittered_quadratic(p: JitteredQuadratic) -> Result<Scenario> {
    p.set.validate()?;
    let diag = check_curvature(p.lambda, p.smoothness, p.set.dim())?;
    check_horizon(p.horizon)?;
    if !(p.spread.is_finite() && p.spread >= 0.0) {
        return Err(Error::config("spread must be >= 0"));
    }
    let mut rng = SeededRng::new(p.seed);
    let base = p.set.default_point();
    let losses = (0..p.horizon)
        .map(|_| {
            let c = base
                .iter()
                .map(|b| b + p.spread * rng.standard_normal())
                .collect();
            quadratic(&diag, c)
        })
        .collect();
    let label = format!(
        "jittered_quadratic({},d={},T={},lambda={},L={},spread={},seed={})",
        p.set.kind(),
        p.set.dim(),
        p.horizon,
        p.lambda,
        p.smoothness,
        p.spread,
        p.seed
    );
    Ok(Scenario::new(p.set, losses, label)?.with_seed(Some(p.seed)))
}

/// Parameters of [`random_linear`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomLinear {
    pub set: FeasibleSet,
    pub horizon: usize,
    pub scale: f64,
    pub seed: u64,
}

/// Linear losses with independent Gaussian weights: convex and smooth but
/// not strongly convex.
pub fn random_linear(p: RandomLinear) -> Result<Scenario> {
    p.set.validate()?;
    check_horizon(p.horizon)?;
    if !(p.scale.is_finite() && p.scale >= 0.0) {
        return Err(Error::config("scale must be >= 0"));
    }
    let mut rng = SeededRng::new(p.seed);
    let dim = p.set.dim();
    let losses = (0..p.horizon)
        .map(|_| LossFunction::Linear {
            w: (0..dim).map(|_| p.scale * rng.standard_normal()).collect(),
        })
        .collect();
    let label = format!(
        "random_linear({},d={},T={},scale={},seed={})",
        p.set.kind(),
        dim,
        p.horizon,
        p.scale,
        p.seed
    );
    Ok(Scenario::new(p.set, losses, label)?.with_seed(Some(p.seed)))
}

/// A named generator with its parameters, as it appears in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Instance1 { dim: usize, horizon: usize },
    Instance2 { horizon: usize },
    DriftingQuadratic(DriftingQuadratic),
    LowVariationHighPath(LowVariationHighPath),
    JitteredQuadratic(JitteredQuadratic),
    RandomLinear(RandomLinear),
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Scenario> {
        match self {
            GeneratorSpec::Instance1 { dim, horizon } => instance1(*dim, *horizon),
            GeneratorSpec::Instance2 { horizon } => instance2(*horizon),
            GeneratorSpec::DriftingQuadratic(p) => drifting_quadratic(*p),
            GeneratorSpec::LowVariationHighPath(p) => low_variation_high_path(*p),
            GeneratorSpec::JitteredQuadratic(p) => jittered_quadratic(p.clone()),
            GeneratorSpec::RandomLinear(p) => random_linear(p.clone()),
        }
    }

    /// Replaces the seed of seeded generators; no-op for the fixed instances.
    pub fn set_seed(&mut self, seed: u64) {
        match self {
            GeneratorSpec::Instance1 { .. } | GeneratorSpec::Instance2 { .. } => {}
            GeneratorSpec::DriftingQuadratic(p) => p.seed = seed,
            GeneratorSpec::LowVariationHighPath(p) => p.seed = seed,
            GeneratorSpec::JitteredQuadratic(p) => p.seed = seed,
            GeneratorSpec::RandomLinear(p) => p.seed = seed,
        }
    }

    pub fn set_horizon(&mut self, horizon: usize) {
        match self {
            GeneratorSpec::Instance1 { horizon: h, .. } | GeneratorSpec::Instance2 { horizon: h } => {
                *h = horizon
            }
            GeneratorSpec::DriftingQuadratic(p) => p.horizon = horizon,
            GeneratorSpec::LowVariationHighPath(p) => p.horizon = horizon,
            GeneratorSpec::JitteredQuadratic(p) => p.horizon = horizon,
            GeneratorSpec::RandomLinear(p) => p.horizon = horizon,
        }
    }

    pub fn set_drift(&mut self, drift: f64) -> Result<()> {
        match self {
            GeneratorSpec::DriftingQuadratic(p) => {
                p.drift = drift;
                Ok(())
            }
            _ => Err(Error::config("only drifting_quadratic has a drift parameter")),
        }
    }
}
