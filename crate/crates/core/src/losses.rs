//! Loss families with exact values, gradients, curvature certificates,
//! minimizers and pairwise variation.
//!
//! Every family is a separable quadratic `½ Σ h_i x_i² + qᵀx + c` with a
//! diagonal Hessian `h ≥ 0`; this shared canonical form is what makes the
//! difference of two losses with equal Hessians exactly affine.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg;
use crate::rng::SeededRng;

/// Stopping threshold on iterate movement for the projected-gradient
/// minimizer fallback.
pub const FALLBACK_MINIMIZER_TOL: f64 = 1e-12;
const FALLBACK_MAX_ITERS: usize = 5_000_000;

/// Samples drawn by the approximate `sup |f − g|` estimator.
pub const GRID_SAMPLES: usize = 100_000;
const GRID_SEED: u64 = 0x5e_ed0f_da7a;

/// One round's objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossFunction {
    /// `⟨w, x⟩`
    Linear { w: Vec<f64> },
    /// `(a/2) ‖x − center‖²`, `a ≥ 0`
    IsotropicQuadratic { curvature: f64, center: Vec<f64> },
    /// `½ Σ d_i (x_i − c_i)² + ⟨b, x⟩`, all `d_i > 0`
    DiagonalQuadratic {
        diag: Vec<f64>,
        center: Vec<f64>,
        linear: Vec<f64>,
    },
}

/// Strong convexity `lambda`, smoothness `smoothness` (L) and gradient bound
/// `gradient_bound` (G) over a feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureCertificate {
    pub lambda: f64,
    #[serde(rename = "L")]
    pub smoothness: f64,
    #[serde(rename = "G")]
    pub gradient_bound: f64,
}

impl CurvatureCertificate {
    pub fn validate(&self) -> Result<()> {
        let CurvatureCertificate {
            lambda,
            smoothness,
            gradient_bound,
        } = *self;
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::config(format!(
                "certificate lambda must be >= 0, got {lambda}"
            )));
        }
        if !(smoothness.is_finite() && smoothness >= lambda) {
            return Err(Error::config(format!(
                "certificate requires lambda <= L, got lambda = {lambda}, L = {smoothness}"
            )));
        }
        if !(gradient_bound.is_finite() && gradient_bound >= 0.0) {
            return Err(Error::config(format!(
                "certificate G must be >= 0, got {gradient_bound}"
            )));
        }
        Ok(())
    }

    /// Conservative aggregate over rounds: (min λ, max L, max G).
    pub fn aggregate<'a>(certs: impl IntoIterator<Item = &'a CurvatureCertificate>) -> Option<Self> {
        certs.into_iter().fold(None, |acc, c| {
            Some(match acc {
                None => *c,
                Some(a) => CurvatureCertificate {
                    lambda: a.lambda.min(c.lambda),
                    smoothness: a.smoothness.max(c.smoothness),
                    gradient_bound: a.gradient_bound.max(c.gradient_bound),
                },
            })
        })
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.lambda > 0.0
    }
}

/// `sup_{x ∈ X} |f(x) − g(x)|`. `exact` is false when the value came from
/// the sampling estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupDiff {
    pub value: f64,
    pub exact: bool,
}

/// `½ Σ hess_i x_i² + linᵀx + constant`
#[derive(Debug, Clone, PartialEq)]
struct Canonical {
    hess: Vec<f64>,
    lin: Vec<f64>,
    constant: f64,
}

impl LossFunction {
    pub fn linear(w: Vec<f64>) -> Result<Self> {
        let f = LossFunction::Linear { w };
        f.validate()?;
        Ok(f)
    }

    pub fn isotropic(curvature: f64, center: Vec<f64>) -> Result<Self> {
        let f = LossFunction::IsotropicQuadratic { curvature, center };
        f.validate()?;
        Ok(f)
    }

    pub fn diagonal(diag: Vec<f64>, center: Vec<f64>, linear: Vec<f64>) -> Result<Self> {
        let f = LossFunction::DiagonalQuadratic { diag, center, linear };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LossFunction::Linear { w } => {
                if w.is_empty() || !linalg::all_finite(w) {
                    return Err(Error::invalid("linear weights must be finite and non-empty"));
                }
            }
            LossFunction::IsotropicQuadratic { curvature, center } => {
                if center.is_empty() || !linalg::all_finite(center) {
                    return Err(Error::invalid("quadratic center must be finite and non-empty"));
                }
                if !(curvature.is_finite() && *curvature >= 0.0) {
                    return Err(Error::invalid(format!(
                        "isotropic curvature must be >= 0, got {curvature}"
                    )));
                }
            }
            LossFunction::DiagonalQuadratic { diag, center, linear } => {
                if diag.is_empty() {
                    return Err(Error::invalid("diagonal quadratic must be non-empty"));
                }
                check_dim(diag.len(), center.len())?;
                check_dim(diag.len(), linear.len())?;
                if !linalg::all_finite(center) || !linalg::all_finite(linear) {
                    return Err(Error::invalid("diagonal quadratic parameters must be finite"));
                }
                if let Some(d) = diag.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
                    return Err(Error::invalid(format!(
                        "diagonal curvatures must be positive, got {d}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            LossFunction::Linear { w } => w.len(),
            LossFunction::IsotropicQuadratic { center, .. } => center.len(),
            LossFunction::DiagonalQuadratic { diag, .. } => diag.len(),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            LossFunction::Linear { w } => linalg::dot(w, x),
            LossFunction::IsotropicQuadratic { curvature, center } => {
                0.5 * curvature * linalg::dist_sq(x, center)
            }
            LossFunction::DiagonalQuadratic { diag, center, linear } => {
                let quad: f64 = diag
                    .iter()
                    .zip(x.iter().zip(center))
                    .map(|(d, (xi, ci))| d * (xi - ci) * (xi - ci))
                    .sum();
                0.5 * quad + linalg::dot(linear, x)
            }
        })
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            LossFunction::Linear { w } => w.clone(),
            LossFunction::IsotropicQuadratic { curvature, center } => x
                .iter()
                .zip(center)
                .map(|(xi, ci)| curvature * (xi - ci))
                .collect(),
            LossFunction::DiagonalQuadratic { diag, center, linear } => diag
                .iter()
                .zip(x.iter().zip(center))
                .zip(linear)
                .map(|((d, (xi, ci)), bi)| d * (xi - ci) + bi)
                .collect(),
        })
    }

    /// Smallest and largest Hessian eigenvalue.
    pub fn curvature_range(&self) -> (f64, f64) {
        match self {
            LossFunction::Linear { .. } => (0.0, 0.0),
            LossFunction::IsotropicQuadratic { curvature, .. } => (*curvature, *curvature),
            LossFunction::DiagonalQuadratic { diag, .. } => (
                diag.iter().copied().fold(f64::INFINITY, f64::min),
                diag.iter().copied().fold(0.0, f64::max),
            ),
        }
    }

    /// λ and L from the Hessian spectrum; G is the exact supremum of the
    /// gradient norm over `set` (an upper estimate accurate to ~1e-12 for
    /// diagonal quadratics over a ball, solved through the secular equation).
    pub fn certify(&self, set: &FeasibleSet) -> Result<CurvatureCertificate> {
        check_dim(set.dim(), self.dim())?;
        let (lambda, smoothness) = self.curvature_range();
        let canon = self.canonical();
        Ok(CurvatureCertificate {
            lambda,
            smoothness,
            gradient_bound: max_affine_norm(&canon.hess, &canon.lin, set),
        })
    }

    /// An exact minimizer over `set`. Ties among the minimizers of a linear
    /// loss go to the lowest-index simplex vertex, or the lower bound of
    /// each zero-weight box coordinate.
    pub fn minimizer(&self, set: &FeasibleSet) -> Result<Vec<f64>> {
        check_dim(set.dim(), self.dim())?;
        let x = match self {
            LossFunction::Linear { w } => linear_minimizer(w, set),
            LossFunction::IsotropicQuadratic { center, .. } => set.project(center)?,
            LossFunction::DiagonalQuadratic { diag, center, linear } => {
                let unconstrained: Vec<f64> = center
                    .iter()
                    .zip(diag.iter().zip(linear))
                    .map(|(c, (d, b))| c - b / d)
                    .collect();
                match set {
                    FeasibleSet::Box { .. } => set.project(&unconstrained)?,
                    _ => self.projected_gradient_minimizer(set, set.project(&unconstrained)?)?,
                }
            }
        };
        if !linalg::all_finite(&x) {
            return Err(Error::Unbounded(format!(
                "{} loss has no finite minimizer over the {}",
                self.kind(),
                set.kind()
            )));
        }
        Ok(x)
    }

    fn projected_gradient_minimizer(&self, set: &FeasibleSet, start: Vec<f64>) -> Result<Vec<f64>> {
        let (_, smoothness) = self.curvature_range();
        let step = 1.0 / smoothness;
        let mut z = start;
        for _ in 0..FALLBACK_MAX_ITERS {
            let g = self.gradient(&z)?;
            let next = set.project(&linalg::axpy(&z, -step, &g))?;
            let moved = linalg::dist(&next, &z);
            z = next;
            if moved < FALLBACK_MINIMIZER_TOL {
                return Ok(z);
            }
        }
        Err(Error::invalid(format!(
            "projected-gradient minimizer did not converge in {FALLBACK_MAX_ITERS} iterations"
        )))
    }

    /// `sup_{x ∈ set} |self(x) − other(x)|`. Exact whenever the two Hessians
    /// coincide (the difference is then affine); otherwise estimated from
    /// [`GRID_SAMPLES`] seeded samples plus the set's vertices.
    pub fn sup_abs_diff(&self, other: &LossFunction, set: &FeasibleSet) -> Result<SupDiff> {
        check_dim(set.dim(), self.dim())?;
        check_dim(set.dim(), other.dim())?;
        if self == other {
            return Ok(SupDiff {
                value: 0.0,
                exact: true,
            });
        }
        let (a, b) = (self.canonical(), other.canonical());
        if a.hess == b.hess {
            let w = linalg::sub(&a.lin, &b.lin);
            let value = set.sup_abs_affine(&w, a.constant - b.constant)?;
            return Ok(SupDiff { value, exact: true });
        }

        let mut rng = SeededRng::new(GRID_SEED);
        let mut best: f64 = 0.0;
        let mut probe = |x: &[f64]| -> Result<()> {
            best = best.max((self.value(x)? - other.value(x)?).abs());
            Ok(())
        };
        for v in set.vertices().unwrap_or_default() {
            probe(&v)?;
        }
        for _ in 0..GRID_SAMPLES {
            probe(&set.sample(&mut rng))?;
        }
        Ok(SupDiff {
            value: best,
            exact: false,
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LossFunction::Linear { .. } => "linear",
            LossFunction::IsotropicQuadratic { .. } => "isotropic_quadratic",
            LossFunction::DiagonalQuadratic { .. } => "diagonal_quadratic",
        }
    }

    fn canonical(&self) -> Canonical {
        match self {
            LossFunction::Linear { w } => Canonical {
                hess: vec![0.0; w.len()],
                lin: w.clone(),
                constant: 0.0,
            },
            LossFunction::IsotropicQuadratic { curvature, center } => Canonical {
                hess: vec![*curvature; center.len()],
                lin: linalg::scale(center, -curvature),
                constant: 0.5 * curvature * linalg::norm_sq(center),
            },
            LossFunction::DiagonalQuadratic { diag, center, linear } => Canonical {
                hess: diag.clone(),
                lin: linear
                    .iter()
                    .zip(diag.iter().zip(center))
                    .map(|(b, (d, c))| b - d * c)
                    .collect(),
                constant: 0.5 * diag.iter().zip(center).map(|(d, c)| d * c * c).sum::<f64>(),
            },
        }
    }
}

fn linear_minimizer(w: &[f64], set: &FeasibleSet) -> Vec<f64> {
    match set {
        FeasibleSet::Simplex { dimension } => {
            let mut best = 0;
            for i in 1..w.len() {
                if w[i] < w[best] {
                    best = i;
                }
            }
            crate::geometry::basis(*dimension, best)
        }
        FeasibleSet::Box { lower, upper } => w
            .iter()
            .zip(lower.iter().zip(upper))
            .map(|(wi, (l, u))| if *wi < 0.0 { *u } else { *l })
            .collect(),
        FeasibleSet::Ball { center, radius } => {
            let n = linalg::norm(w);
            if n > 0.0 {
                linalg::axpy(center, -radius / n, w)
            } else {
                let mut x = center.clone();
                x[0] -= radius;
                x
            }
        }
    }
}

/// `sup_{x ∈ set} ‖hess ⊙ x + lin‖` for `hess ≥ 0`.
fn max_affine_norm(hess: &[f64], lin: &[f64], set: &FeasibleSet) -> f64 {
    if hess.iter().all(|h| *h == 0.0) {
        return linalg::norm(lin);
    }
    match set {
        FeasibleSet::Box { lower, upper } => (0..hess.len())
            .map(|i| {
                let a = hess[i] * lower[i] + lin[i];
                let b = hess[i] * upper[i] + lin[i];
                (a * a).max(b * b)
            })
            .sum::<f64>()
            .sqrt(),
        FeasibleSet::Simplex { .. } => {
            // convex in x, so the maximum sits at a vertex e_i
            let base = linalg::norm_sq(lin);
            (0..hess.len())
                .map(|i| base - lin[i] * lin[i] + (hess[i] + lin[i]) * (hess[i] + lin[i]))
                .fold(0.0, f64::max)
                .sqrt()
        }
        FeasibleSet::Ball { center, radius } => {
            let e: Vec<f64> = (0..hess.len()).map(|i| hess[i] * center[i] + lin[i]).collect();
            let first = hess[0];
            if hess.iter().all(|h| *h == first) {
                return linalg::norm(&e) + first * radius;
            }
            max_diag_affine_norm_on_ball(hess, &e, *radius)
        }
    }
}

/// `max_{‖y‖ ≤ r} ‖h ⊙ y + e‖` through the secular equation
/// `Σ (h_i e_i)² / (μ − h_i²)² = r²` on `μ ≥ max h_i²`.
fn max_diag_affine_norm_on_ball(h: &[f64], e: &[f64], r: f64) -> f64 {
    let h2: Vec<f64> = h.iter().map(|x| x * x).collect();
    let m = h2.iter().copied().fold(0.0, f64::max);
    let he: Vec<f64> = h.iter().zip(e).map(|(a, b)| a * b).collect();
    let top: Vec<usize> = (0..h.len()).filter(|&i| h2[i] == m).collect();
    let value_at = |y: &[f64]| -> f64 {
        (0..h.len())
            .map(|i| (h[i] * y[i] + e[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    };

    let hard_case = top.iter().all(|&i| he[i] == 0.0);
    if hard_case {
        let mut y = vec![0.0; h.len()];
        let mut used = 0.0;
        for i in 0..h.len() {
            if h2[i] < m {
                y[i] = he[i] / (m - h2[i]);
                used += y[i] * y[i];
            }
        }
        if used <= r * r {
            y[top[0]] = (r * r - used).max(0.0).sqrt();
            return value_at(&y) * (1.0 + 1e-12);
        }
    }

    let phi = |mu: f64| -> f64 { (0..h.len()).map(|i| (he[i] / (mu - h2[i])).powi(2)).sum() };
    let mut lo = m;
    let mut hi = m + linalg::norm(&he) / r;
    while phi(hi) > r * r {
        hi = m + 2.0 * (hi - m);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) > r * r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y: Vec<f64> = (0..h.len()).map(|i| he[i] / (hi - h2[i])).collect();
    let n = linalg::norm(&y);
    let y = if n > 0.0 { linalg::scale(&y, r / n) } else { y };
    value_at(&y) * (1.0 + 1e-12)
}
