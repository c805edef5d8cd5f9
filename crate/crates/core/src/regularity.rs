//! Non-stationarity measures of a loss sequence and the realized dynamic
//! regret of a trajectory.

use serde::{Deserialize, Serialize};

use crate::algorithms::Trajectory;
use crate::error::{check_dim, Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg;
use crate::losses::LossFunction;
use crate::scenarios::Scenario;

/// Cap on the number of minimizing vertices enumerated per round when
/// maximizing path-lengths over minimizer selections.
pub const MAX_SELECTION_VERTICES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    #[serde(rename = "P_T")]
    pub path_length: f64,
    #[serde(rename = "S_T")]
    pub squared_path_length: f64,
    #[serde(rename = "V_T")]
    pub function_variation: f64,
    /// `Σ_t ‖∇f_t(x_t*)‖²`
    pub grad_energy: f64,
    #[serde(rename = "v_t_exact")]
    pub variation_exact: bool,
    /// Path-length maximized over all minimizer selections.
    #[serde(rename = "P_bar_T")]
    pub max_path_length: f64,
    #[serde(rename = "S_bar_T")]
    pub max_squared_path_length: f64,
    /// False when some round's minimizer set could not be enumerated; the
    /// maxima are then lower estimates.
    pub selection_exact: bool,
}

fn check_sequence(points: &[Vec<f64>]) -> Result<()> {
    let first = points
        .first()
        .ok_or_else(|| Error::invalid("empty minimizer sequence"))?;
    for p in points {
        check_dim(first.len(), p.len())?;
    }
    Ok(())
}

/// `P_T = Σ_{t≥2} ‖x*_{t−1} − x*_t‖`
pub fn path_length(minimizers: &[Vec<f64>]) -> Result<f64> {
    check_sequence(minimizers)?;
    Ok(minimizers.windows(2).map(|w| linalg::dist(&w[0], &w[1])).sum())
}

/// `S_T = Σ_{t≥2} ‖x*_{t−1} − x*_t‖²`
pub fn squared_path_length(minimizers: &[Vec<f64>]) -> Result<f64> {
    check_sequence(minimizers)?;
    Ok(minimizers.windows(2).map(|w| linalg::dist_sq(&w[0], &w[1])).sum())
}

/// `V_T = Σ_{t≥2} sup_x |f_{t−1}(x) − f_t(x)|`, with a flag that is false
/// if any term was estimated by sampling.
pub fn function_variation(losses: &[LossFunction], set: &FeasibleSet) -> Result<(f64, bool)> {
    let mut total = 0.0;
    let mut exact = true;
    for w in losses.windows(2) {
        let d = w[0].sup_abs_diff(&w[1], set)?;
        total += d.value;
        exact &= d.exact;
    }
    if let Some(f) = losses.first() {
        check_dim(set.dim(), f.dim())?;
    }
    Ok((total, exact))
}

/// `Σ_t ‖∇f_t(x_t*)‖²`
pub fn gradient_energy(losses: &[LossFunction], minimizers: &[Vec<f64>]) -> Result<f64> {
    check_dim(losses.len(), minimizers.len())?;
    let mut total = 0.0;
    for (f, m) in losses.iter().zip(minimizers) {
        total += linalg::norm_sq(&f.gradient(m)?);
    }
    Ok(total)
}

/// `Σ_t f_t(x_t) − f_t(x_t*)`
pub fn dynamic_regret(traj: &Trajectory) -> f64 {
    traj.rounds.iter().map(|r| r.instantaneous_regret()).sum()
}

/// Every minimizer of `f` over `set` when that set of minimizers is a face
/// we can enumerate by its vertices (or a single point); `None` otherwise.
pub fn minimizer_candidates(f: &LossFunction, set: &FeasibleSet) -> Result<Option<Vec<Vec<f64>>>> {
    let (lambda, _) = f.curvature_range();
    if lambda > 0.0 {
        return Ok(Some(vec![f.minimizer(set)?]));
    }
    let LossFunction::Linear { w } = f else {
        // zero-curvature quadratic: constant, every point minimizes
        return Ok(None);
    };
    check_dim(set.dim(), w.len())?;
    Ok(match set {
        FeasibleSet::Simplex { dimension } => {
            let min = w.iter().copied().fold(f64::INFINITY, f64::min);
            Some(
                (0..*dimension)
                    .filter(|&i| w[i] == min)
                    .map(|i| crate::geometry::basis(*dimension, i))
                    .collect(),
            )
        }
        FeasibleSet::Box { lower, upper } => {
            let base = f.minimizer(set)?;
            let free: Vec<usize> = (0..w.len())
                .filter(|&i| w[i] == 0.0 && lower[i] < upper[i])
                .collect();
            if free.len() >= usize::BITS as usize || 1usize << free.len() > MAX_SELECTION_VERTICES {
                return Ok(None);
            }
            Some(
                (0..1usize << free.len())
                    .map(|mask| {
                        let mut v = base.clone();
                        for (j, &i) in free.iter().enumerate() {
                            v[i] = if mask >> j & 1 == 1 { upper[i] } else { lower[i] };
                        }
                        v
                    })
                    .collect(),
            )
        }
        FeasibleSet::Ball { .. } => {
            if linalg::norm(w) > 0.0 {
                Some(vec![f.minimizer(set)?])
            } else {
                None
            }
        }
    })
}

/// Running maximum over minimizer selections of `Σ_{s≤t} cost(x*_{s−1}, x*_s)`
/// for every prefix `t`, by dynamic programming over each round's candidate
/// vertices.
fn max_over_selections(candidates: &[Vec<Vec<f64>>], cost: impl Fn(&[f64], &[f64]) -> f64) -> Vec<f64> {
    let mut best = vec![0.0; candidates[0].len()];
    let mut prefix = Vec::with_capacity(candidates.len());
    prefix.push(0.0);
    for t in 1..candidates.len() {
        best = candidates[t]
            .iter()
            .map(|v| {
                candidates[t - 1]
                    .iter()
                    .zip(&best)
                    .map(|(u, b)| b + cost(u, v))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        prefix.push(best.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    prefix
}

/// Per-prefix `(P̄_t, S̄_t)` series with the exactness flag of
/// [`max_selection_path_lengths`].
pub fn max_selection_prefixes(
    losses: &[LossFunction],
    set: &FeasibleSet,
    recorded: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<f64>, bool)> {
    check_dim(losses.len(), recorded.len())?;
    check_sequence(recorded)?;
    let mut exact = true;
    let mut candidates = Vec::with_capacity(losses.len());
    for (f, m) in losses.iter().zip(recorded) {
        match minimizer_candidates(f, set)? {
            Some(c) => candidates.push(c),
            None => {
                exact = false;
                candidates.push(vec![m.clone()]);
            }
        }
    }
    Ok((
        max_over_selections(&candidates, linalg::dist),
        max_over_selections(&candidates, linalg::dist_sq),
        exact,
    ))
}

/// `(P̄_T, S̄_T, exact)`. Convex path costs over a product of faces peak at
/// vertices, so the enumeration is exact when every round's minimizer set
/// is enumerable; otherwise the recorded minimizer stands in for that round.
pub fn max_selection_path_lengths(
    losses: &[LossFunction],
    set: &FeasibleSet,
    recorded: &[Vec<f64>],
) -> Result<(f64, f64, bool)> {
    let (p, s, exact) = max_selection_prefixes(losses, set, recorded)?;
    Ok((p[p.len() - 1], s[s.len() - 1], exact))
}

/// All measures for a scenario, using the minimizers recorded in `traj`.
pub fn regularity_report(scenario: &Scenario, traj: &Trajectory) -> Result<RegularityReport> {
    check_dim(scenario.horizon(), traj.horizon())?;
    let minimizers = traj.minimizers();
    let (function_variation, variation_exact) = function_variation(scenario.losses(), scenario.set())?;
    let (max_path_length, max_squared_path_length, selection_exact) =
        max_selection_path_lengths(scenario.losses(), scenario.set(), &minimizers)?;
    Ok(RegularityReport {
        path_length: path_length(&minimizers)?,
        squared_path_length: squared_path_length(&minimizers)?,
        function_variation,
        grad_energy: gradient_energy(scenario.losses(), &minimizers)?,
        variation_exact,
        max_path_length,
        max_squared_path_length,
        selection_exact,
    })
}
