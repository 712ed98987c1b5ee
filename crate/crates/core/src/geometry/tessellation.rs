//! Sampled view of the tessellation of K(n, s) by central hyperplanes.

use std::collections::HashMap;

use super::{sample_sphere_cap, SignalSetSpec};
use crate::error::Result;
use crate::measurement::{distance, dot, gen_gaussian_ensemble, MeasurementEnsemble, SignalVector};
use crate::rng::derive_seed;

/// Default report margin is delta / 30.
pub const REPORT_MARGIN_DIVISOR: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSeparation {
    pub first: usize,
    pub second: usize,
    pub distance: f64,
    /// rows with <a, first> > margin and <a, second> < -margin
    pub forward: usize,
    /// rows with <a, second> > margin and <a, first> < -margin
    pub backward: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TessellationReport {
    pub m: usize,
    pub delta: f64,
    pub margin: f64,
    pub sampled_points: usize,
    pub nonempty_cells: usize,
    /// Largest distance between two sampled points sharing a sign pattern.
    /// A lower bound on the largest cell diameter.
    pub max_cell_diameter_lb: f64,
    /// Every sampled pair farther apart than `delta`.
    pub separation_stats: Vec<PairSeparation>,
}

impl TessellationReport {
    /// Smallest one-directional separating count over the far pairs.
    pub fn min_separation(&self) -> Option<usize> {
        self.separation_stats.iter().map(|p| p.forward.min(p.backward)).min()
    }

    pub fn unseparated_pairs(&self) -> usize {
        self.separation_stats
            .iter()
            .filter(|p| p.forward == 0 || p.backward == 0)
            .count()
    }
}

/// Cell index of every point, numbered by first appearance. Points share a
/// cell iff their sign patterns under `a` agree.
pub fn cell_assignment(points: &[SignalVector], a: &MeasurementEnsemble) -> Vec<usize> {
    let mut ids: HashMap<Vec<i8>, usize> = HashMap::new();
    points
        .iter()
        .map(|p| {
            let pattern: Vec<i8> = a
                .iter_rows()
                .map(|row| {
                    let v = dot(row, p.as_slice());
                    if v > 0.0 {
                        1
                    } else if v < 0.0 {
                        -1
                    } else {
                        0
                    }
                })
                .collect();
            let next = ids.len();
            *ids.entry(pattern).or_insert(next)
        })
        .collect()
}

/// True when every cell of `fine` lies inside a single cell of `coarse`.
pub fn partition_refines(fine: &[usize], coarse: &[usize]) -> bool {
    if fine.len() != coarse.len() {
        return false;
    }
    let mut parent: HashMap<usize, usize> = HashMap::new();
    fine.iter()
        .zip(coarse)
        .all(|(f, c)| *parent.entry(*f).or_insert(*c) == *c)
}

/// Buckets `points` by sign pattern under `a` and measures separation of
/// every pair farther apart than `delta` at the given margin.
pub fn tessellate(
    points: &[SignalVector],
    a: &MeasurementEnsemble,
    delta: f64,
    margin: f64,
) -> TessellationReport {
    let cells = cell_assignment(points, a);
    let nonempty_cells = cells.iter().copied().max().map_or(0, |c| c + 1);

    let projections: Vec<Vec<f64>> = points
        .iter()
        .map(|p| a.iter_rows().map(|row| dot(row, p.as_slice())).collect())
        .collect();

    let mut max_cell_diameter_lb: f64 = 0.0;
    let mut separation_stats = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = distance(points[i].as_slice(), points[j].as_slice());
            if cells[i] == cells[j] {
                max_cell_diameter_lb = max_cell_diameter_lb.max(d);
            }
            if d > delta {
                let (pi, pj) = (&projections[i], &projections[j]);
                let forward = pi.iter().zip(pj).filter(|(u, v)| **u > margin && **v < -margin).count();
                let backward = pi.iter().zip(pj).filter(|(u, v)| **v > margin && **u < -margin).count();
                separation_stats.push(PairSeparation { first: i, second: j, distance: d, forward, backward });
            }
        }
    }

    TessellationReport {
        m: a.rows(),
        delta,
        margin,
        sampled_points: points.len(),
        nonempty_cells,
        max_cell_diameter_lb,
        separation_stats,
    }
}

/// Samples `sample_count` points of K(n, s) on the sphere, draws an m x n
/// Gaussian ensemble and reports the sampled tessellation with margin
/// `delta / 30`.
pub fn tessellate_and_report(
    spec: &SignalSetSpec,
    m: usize,
    delta: f64,
    sample_count: usize,
    seed: u64,
) -> Result<TessellationReport> {
    let points = sample_sphere_cap(spec, sample_count, derive_seed(seed, &[0]))?;
    let a = gen_gaussian_ensemble(m, spec.n, derive_seed(seed, &[1]))?;
    Ok(tessellate(&points, &a, delta, delta / REPORT_MARGIN_DIVISOR))
}
