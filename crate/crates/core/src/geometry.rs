//! Convex feasible sets with exact Euclidean projection.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::rng::SeededRng;

/// Absolute membership tolerance used for feasibility checks on iterates.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Largest box dimension for which [`FeasibleSet::vertices`] enumerates corners.
pub const MAX_BOX_VERTEX_DIM: usize = 16;

/// The decision domain shared by every round of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibleSet {
    /// Euclidean ball `{x : ‖x − center‖ ≤ radius}`.
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned box `{x : lower ≤ x ≤ upper}`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Probability simplex `{x ≥ 0 : Σ x_i = 1}`.
    Simplex { dimension: usize },
}

impl FeasibleSet {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let set = FeasibleSet::Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::ball(vec![0.0; dim], 1.0)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let set = FeasibleSet::Box { lower, upper };
        set.validate()?;
        Ok(set)
    }

    pub fn simplex(dimension: usize) -> Result<Self> {
        let set = FeasibleSet::Simplex { dimension };
        set.validate()?;
        Ok(set)
    }

    /// Checks the structural invariants. Deserialized sets must pass this
    /// before use.
    pub fn validate(&self) -> Result<()> {
        match self {
            FeasibleSet::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::invalid("ball dimension must be positive"));
                }
                if !linalg::all_finite(center) {
                    return Err(Error::invalid("ball center must be finite"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::invalid(format!(
                        "ball radius must be positive and finite, got {radius}"
                    )));
                }
            }
            FeasibleSet::Box { lower, upper } => {
                if lower.is_empty() {
                    return Err(Error::invalid("box dimension must be positive"));
                }
                check_dim(lower.len(), upper.len())?;
                if !linalg::all_finite(lower) || !linalg::all_finite(upper) {
                    return Err(Error::invalid("box bounds must be finite"));
                }
                if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
                    return Err(Error::invalid(format!(
                        "box lower bound exceeds upper bound at coordinate {i}"
                    )));
                }
            }
            FeasibleSet::Simplex { dimension } => {
                if *dimension < 2 {
                    return Err(Error::invalid("simplex dimension must be at least 2"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::Simplex { dimension } => *dimension,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FeasibleSet::Ball { .. } => "ball",
            FeasibleSet::Box { .. } => "box",
            FeasibleSet::Simplex { .. } => "simplex",
        }
    }

    /// Barycenter of the simplex, midpoint of the box, center of the ball.
    pub fn default_point(&self) -> Vec<f64> {
        match self {
            FeasibleSet::Ball { center, .. } => center.clone(),
            FeasibleSet::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect()
            }
            FeasibleSet::Simplex { dimension } => vec![1.0 / *dimension as f64; *dimension],
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, point: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), point.len())?;
        Ok(match self {
            FeasibleSet::Ball { center, radius } => {
                let offset = linalg::sub(point, center);
                let n = linalg::norm(&offset);
                if n <= *radius {
                    point.to_vec()
                } else {
                    linalg::axpy(center, radius / n, &offset)
                }
            }
            FeasibleSet::Box { lower, upper } => point
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(x, (l, u))| x.clamp(*l, *u))
                .collect(),
            FeasibleSet::Simplex { .. } => project_simplex(point),
        })
    }

    /// True iff no membership constraint is violated by more than `tol`.
    pub fn contains(&self, point: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim(), point.len())?;
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::invalid("tolerance must be nonnegative"));
        }
        Ok(match self {
            FeasibleSet::Ball { center, radius } => linalg::dist(point, center) <= radius + tol,
            FeasibleSet::Box { lower, upper } => point
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(x, (l, u))| *x >= l - tol && *x <= u + tol),
            FeasibleSet::Simplex { .. } => {
                point.iter().all(|x| *x >= -tol) && (point.iter().sum::<f64>() - 1.0).abs() <= tol
            }
        })
    }

    /// `sup_{x ∈ set} |wᵀx + b|`, exact.
    pub fn sup_abs_affine(&self, w: &[f64], b: f64) -> Result<f64> {
        check_dim(self.dim(), w.len())?;
        Ok(match self {
            FeasibleSet::Ball { center, radius } => {
                (linalg::dot(w, center) + b).abs() + radius * linalg::norm(w)
            }
            FeasibleSet::Box { lower, upper } => {
                let (mut lo, mut hi) = (b, b);
                for ((wi, l), u) in w.iter().zip(lower).zip(upper) {
                    let (a, c) = (wi * l, wi * u);
                    lo += a.min(c);
                    hi += a.max(c);
                }
                lo.abs().max(hi.abs())
            }
            FeasibleSet::Simplex { .. } => w.iter().map(|wi| (wi + b).abs()).fold(0.0, f64::max),
        })
    }

    /// Extreme points for polytopes (simplex, and boxes up to
    /// [`MAX_BOX_VERTEX_DIM`] coordinates). `None` for balls.
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            FeasibleSet::Ball { .. } => None,
            FeasibleSet::Simplex { dimension } => {
                Some((0..*dimension).map(|i| basis(*dimension, i)).collect())
            }
            FeasibleSet::Box { lower, upper } => {
                let d = lower.len();
                if d > MAX_BOX_VERTEX_DIM {
                    return None;
                }
                Some(
                    (0..1usize << d)
                        .map(|mask| {
                            (0..d)
                                .map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] })
                                .collect()
                        })
                        .collect(),
                )
            }
        }
    }

    /// A uniformly distributed member of the set.
    pub fn sample(&self, rng: &mut SeededRng) -> Vec<f64> {
        match self {
            FeasibleSet::Ball { center, radius } => {
                let d = center.len();
                let dir = rng.unit_vector(d);
                let r = radius * rng.uniform().powf(1.0 / d as f64);
                linalg::axpy(center, r, &dir)
            }
            FeasibleSet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| rng.uniform_in(*l, *u))
                .collect(),
            FeasibleSet::Simplex { dimension } => {
                let e: Vec<f64> = (0..*dimension).map(|_| -(1.0 - rng.uniform()).ln()).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|x| x / s).collect()
            }
        }
    }
}

pub(crate) fn basis(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

/// Sort-and-threshold projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}
