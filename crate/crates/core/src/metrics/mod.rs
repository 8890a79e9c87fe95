//! Pareto fronts, hypervolume and convergence statistics over run histories.
//!
//! Indicators are computed on the minimisation-form relative objective
//! vectors the optimisers compare, optionally projected onto a subset of
//! objectives. Only feasible points enter fronts.

mod hypervolume;
mod pareto;

use serde::{Deserialize, Serialize};

use crate::evolution::{ArchiveHistory, Individual};
use crate::objectives::ObjectiveVector;

pub use hypervolume::{hypervolume, hypervolume_checked, CheckedHypervolume};
pub(crate) use pareto::cmp_lex;
pub use pareto::{dominates, nondominated, nondominated_indices, nondominated_unique};

/// Cumulative nondominated set after one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontSnapshot {
    pub generation: usize,
    pub model_runs: usize,
    pub points: Vec<Vec<f64>>,
    pub hypervolume: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quartiles {
    /// Linear-interpolation quantiles (R type 7). `None` for no values.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            min: v[0],
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
        })
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub model_runs: usize,
    pub hypervolume: Quartiles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Hypervolume quartiles across runs, for the generations every run
    /// reached.
    pub generations: Vec<GenerationStats>,
    /// Per-run snapshot trajectories, in input order.
    pub runs: Vec<Vec<FrontSnapshot>>,
    /// Nondominated set of all runs' final fronts.
    pub union_front: Vec<Vec<f64>>,
}

/// Keeps the listed objective indices, or everything for `None`.
pub fn project(point: &[f64], objectives: Option<&[usize]>) -> Vec<f64> {
    match objectives {
        Some(idx) => idx.iter().map(|&i| point[i]).collect(),
        None => point.to_vec(),
    }
}

fn feasible_points<'a, I>(
    individuals: I,
    objectives: Option<&'a [usize]>,
) -> impl Iterator<Item = Vec<f64>> + 'a
where
    I: IntoIterator<Item = &'a Individual>,
    I::IntoIter: 'a,
{
    individuals
        .into_iter()
        .filter(|i| i.is_feasible())
        .map(move |i| project(i.objective_space(), objectives))
}

/// Shared reference point: the nadir of `points` pushed outwards by 10% of
/// each objective's range (or by 10% of its magnitude, at least 0.1, when
/// the range is zero). `None` for an empty set.
pub fn reference_point<P: AsRef<[f64]>>(points: &[P]) -> Option<Vec<f64>> {
    let d = points.first()?.as_ref().len();
    (0..d)
        .map(|k| {
            let (lo, hi) = points
                .iter()
                .map(|p| p.as_ref()[k])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            let range = hi - lo;
            let margin = if range > 0.0 {
                0.1 * range
            } else {
                0.1 * hi.abs().max(1.0)
            };
            Some(hi + margin)
        })
        .collect()
}

/// Reference point over every feasible point evaluated in `histories`.
pub fn reference_point_for(
    histories: &[&ArchiveHistory],
    objectives: Option<&[usize]>,
) -> Option<Vec<f64>> {
    let points: Vec<Vec<f64>> = histories
        .iter()
        .flat_map(|h| feasible_points(h.evaluated(), objectives))
        .collect();
    reference_point(&points)
}

/// Raw cost and mean wave height of each vector, for two-dimensional plots.
pub fn reduce_to_2d(objectives: &[ObjectiveVector]) -> Vec<[f64; 2]> {
    objectives
        .iter()
        .map(|o| [o.cost, o.mean_wave_height()])
        .collect()
}

/// Per-generation snapshots of the nondominated set of all feasible points
/// evaluated so far.
pub fn front_snapshots(
    history: &ArchiveHistory,
    reference: &[f64],
    objectives: Option<&[usize]>,
) -> Vec<FrontSnapshot> {
    let mut front: Vec<Vec<f64>> = Vec::new();
    let mut hv = 0.0;
    let mut out = Vec::with_capacity(history.records.len());
    for record in &history.records {
        let before = front.clone();
        front.extend(feasible_points(&record.evaluated, objectives));
        front = nondominated_unique(&front);
        if front != before {
            hv = hypervolume_checked(&front, reference).value;
        }
        out.push(FrontSnapshot {
            generation: record.generation,
            model_runs: record.model_runs,
            points: front.clone(),
            hypervolume: hv,
        });
    }
    out
}

/// Feasible individuals of a run that no other evaluated feasible
/// individual dominates, one per distinct objective vector, in evaluation
/// order.
pub fn pareto_set(history: &ArchiveHistory) -> Vec<Individual> {
    let feasible: Vec<&Individual> = history.evaluated().filter(|i| i.is_feasible()).collect();
    let spaces: Vec<&[f64]> = feasible.iter().map(|i| i.objective_space()).collect();
    let mut seen: Vec<&[f64]> = Vec::new();
    let mut out = Vec::new();
    for i in nondominated_indices(&spaces) {
        if !seen.contains(&spaces[i]) {
            seen.push(spaces[i]);
            out.push(feasible[i].clone());
        }
    }
    out
}

pub fn convergence_report(
    histories: &[&ArchiveHistory],
    reference: &[f64],
    objectives: Option<&[usize]>,
) -> ConvergenceReport {
    let runs: Vec<Vec<FrontSnapshot>> = histories
        .iter()
        .map(|h| front_snapshots(h, reference, objectives))
        .collect();
    let reached = runs.iter().map(Vec::len).min().unwrap_or(0);
    let generations = (0..reached)
        .map(|g| {
            let values: Vec<f64> = runs.iter().map(|r| r[g].hypervolume).collect();
            GenerationStats {
                generation: runs[0][g].generation,
                model_runs: runs[0][g].model_runs,
                hypervolume: Quartiles::of(&values).expect("at least one run"),
            }
        })
        .collect();
    let finals: Vec<Vec<f64>> = runs
        .iter()
        .filter_map(|r| r.last())
        .flat_map(|s| s.points.iter().cloned())
        .collect();
    ConvergenceReport {
        generations,
        union_front: nondominated_unique(&finals),
        runs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_type_seven() {
        let q = Quartiles::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(
            (q.min, q.q1, q.median, q.q3, q.max),
            (1.0, 1.75, 2.5, 3.25, 4.0)
        );
        let single = Quartiles::of(&[7.0]).unwrap();
        assert_eq!(single.iqr(), 0.0);
        assert_eq!(single.median, 7.0);
    }

    #[test]
    fn reference_point_margin() {
        let r = reference_point(&[[0.0, 5.0], [10.0, 5.0]]).unwrap();
        assert_eq!(r, vec![11.0, 5.5]);
        assert!(reference_point::<Vec<f64>>(&[]).is_none());
    }

    #[test]
    fn reduce_means_heights() {
        let o = ObjectiveVector {
            cost: 10.0,
            nav_distance: 1.0,
            wave_heights: vec![1.0, 2.0, 3.0],
            self_intersections: 0,
            fairway_intersections: 0,
            land_coverage: 0,
            simulated: true,
        };
        assert_eq!(reduce_to_2d(&[o]), vec![[10.0, 2.0]]);
    }
}
