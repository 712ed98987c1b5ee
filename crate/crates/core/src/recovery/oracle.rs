//! Sampling heuristic for l1 minimization over the unit sphere restricted to
//! the sign-consistent cone. Exponential in the worst case and only meant
//! for cross-checking the convex decoder on tiny instances.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measurement::{dot, l1, l2, MeasurementEnsemble, SignPattern, SignalVector};
use crate::rng::{derive_seed, stream_rng, streams};

pub const ORACLE_MAX_DIM: usize = 16;

const PROJECTION_SWEEPS: usize = 5000;
const HYPERPLANE_SLACK: f64 = 1e-9;
const MIN_STEP: f64 = 1e-7;

struct Cone<'a> {
    a: &'a MeasurementEnsemble,
    y: &'a [i8],
    row_norms: Vec<f64>,
}

impl<'a> Cone<'a> {
    fn new(a: &'a MeasurementEnsemble, y: &'a SignPattern) -> Self {
        let row_norms = a.iter_rows().map(l2).collect();
        Self { a, y: y.as_slice(), row_norms }
    }

    fn contains(&self, x: &[f64]) -> bool {
        let norm = l2(x);
        self.a.iter_rows().zip(self.y).zip(&self.row_norms).all(|((row, &s), rn)| {
            let v = dot(row, x);
            if s == 0 {
                v.abs() <= HYPERPLANE_SLACK * rn * norm
            } else {
                f64::from(s) * v >= 0.0
            }
        })
    }

    /// Cyclic projections onto `y_i <a_i, x> >= ||a_i||` and `<a_i, x> = 0`.
    /// The margin keeps the iterates away from the apex; the cone is scale
    /// invariant so any positive margin works.
    fn project(&self, mut x: Vec<f64>) -> Option<Vec<f64>> {
        for _ in 0..PROJECTION_SWEEPS {
            if self.contains(&x) && l2(&x) > 0.0 {
                return Some(x);
            }
            for ((row, &s), &rn) in self.a.iter_rows().zip(self.y).zip(&self.row_norms) {
                if rn == 0.0 {
                    continue;
                }
                let v = dot(row, &x);
                let step = if s == 0 {
                    -v / (rn * rn)
                } else {
                    let sv = f64::from(s) * v;
                    if sv >= rn {
                        continue;
                    }
                    f64::from(s) * (rn - sv) / (rn * rn)
                };
                for (xi, ai) in x.iter_mut().zip(row) {
                    *xi += step * ai;
                }
            }
        }
        (self.contains(&x) && l2(&x) > 0.0).then_some(x)
    }
}

fn ratio(x: &[f64]) -> f64 {
    l1(x) / l2(x)
}

fn normalize(x: &[f64]) -> Vec<f64> {
    let norm = l2(x);
    x.iter().map(|v| v / norm).collect()
}

/// Coordinate descent on ||x||_1 / ||x||_2 inside the cone. Each move either
/// zeroes a coordinate or shifts it by a step; moves leaving the cone are
/// rejected.
fn refine(cone: &Cone<'_>, mut x: Vec<f64>) -> Vec<f64> {
    let n = x.len();
    let mut best = ratio(&x);
    let mut step = 0.5;
    while step >= MIN_STEP {
        let mut improved = false;
        for j in 0..n {
            let current = x[j];
            let candidates = [0.0, current + step, current - step];
            for value in candidates {
                if value == current {
                    continue;
                }
                x[j] = value;
                if l2(&x) > 0.0 && cone.contains(&x) {
                    let r = ratio(&x);
                    if r < best - 1e-15 {
                        best = r;
                        improved = true;
                        x = normalize(&x);
                        break;
                    }
                }
                x[j] = current;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    x
}

/// Approximate minimizer of ||x||_1 over unit vectors with sign(A x) = y.
///
/// Runs `samples` independent attempts. Even attempts start from a random
/// vector supported on `support_budget` coordinates, odd attempts from a dense
/// Gaussian vector. Each start is projected into the consistent cone and then
/// refined; the best unit vector found is returned.
pub fn nonconvex_oracle(
    a: &MeasurementEnsemble,
    y: &SignPattern,
    support_budget: usize,
    samples: usize,
    seed: u64,
) -> Result<SignalVector> {
    let n = a.cols();
    if n > ORACLE_MAX_DIM {
        return Err(Error::OracleGuard(format!(
            "non-convex oracle limited to n <= {ORACLE_MAX_DIM} (got {n})"
        )));
    }
    if a.rows() != y.len() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: y.len() });
    }
    let cone = Cone::new(a, y);
    let budget = support_budget.clamp(1, n);

    let mut best: Option<(f64, Vec<f64>)> = None;
    for attempt in 0..samples {
        let mut rng = stream_rng(derive_seed(seed, &[attempt as u64]), streams::ORACLE);
        let mut start = vec![0.0; n];
        if attempt % 2 == 0 {
            for i in index::sample(&mut rng, n, budget) {
                start[i] = rng.sample(StandardNormal);
            }
        } else {
            for v in &mut start {
                *v = rng.sample(StandardNormal);
            }
        }
        let Some(feasible) = cone.project(start) else {
            continue;
        };
        let refined = refine(&cone, normalize(&feasible));
        let unit = normalize(&refined);
        if !cone.contains(&unit) {
            continue;
        }
        let value = l1(&unit);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, unit));
        }
    }
    let (_, unit) = best.ok_or(Error::EmptyFeasibleConeSample)?;
    SignalVector::new(unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::ToleranceConfig;
    use crate::measurement::gen_gaussian_ensemble;
    use crate::recovery::{recover, recovery_error};

    #[test]
    fn unconstrained_minimizer_is_a_signed_basis_vector() {
        let a = MeasurementEnsemble::from_rows(vec![], 5).unwrap();
        let y = SignPattern::new(vec![]).unwrap();
        let out = nonconvex_oracle(&a, &y, 2, 6, 1).unwrap();
        let nonzero: Vec<f64> = out.as_slice().iter().copied().filter(|v| *v != 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].abs(), 1.0);
    }

    #[test]
    fn agrees_with_convex_decoder_in_the_plane() {
        let a = gen_gaussian_ensemble(50, 2, 11).unwrap();
        let x = SignalVector::basis(2, 0).unwrap();
        let y = a.measure(&x).unwrap();
        let out = nonconvex_oracle(&a, &y, 1, 20, 3).unwrap();
        let convex = recover(&a, &y, &ToleranceConfig::default()).unwrap();
        let gap = recovery_error(&out, &convex.direction).unwrap();
        assert!(gap <= 0.25, "gap {gap}");
        assert!(recovery_error(&out, &x).unwrap() <= 0.25);
    }

    #[test]
    fn output_contract() {
        for seed in 0..5 {
            let a = gen_gaussian_ensemble(30, 8, seed).unwrap();
            let x = crate::measurement::gen_sparse_signal(8, 2, seed, Default::default()).unwrap();
            let y = a.measure(&x).unwrap();
            let out = nonconvex_oracle(&a, &y, 2, 10, seed).unwrap();
            assert!((out.l2() - 1.0).abs() <= 1e-9);
            let min = a
                .iter_rows()
                .zip(y.as_slice())
                .map(|(row, &s)| f64::from(s) * dot(row, out.as_slice()))
                .fold(f64::INFINITY, f64::min);
            assert!(min >= 0.0);
        }
    }

    #[test]
    fn guards_and_empty_cone() {
        let a = gen_gaussian_ensemble(3, 17, 0).unwrap();
        let y = SignPattern::new(vec![1, 1, 1]).unwrap();
        assert!(matches!(nonconvex_oracle(&a, &y, 1, 1, 0), Err(Error::OracleGuard(_))));

        // a and -a with the same sign: the cone is the hyperplane a.x = 0 only
        let a = MeasurementEnsemble::from_rows(vec![vec![1.0, 2.0], vec![-1.0, -2.0]], 2).unwrap();
        let y = SignPattern::new(vec![1, 1]).unwrap();
        assert!(matches!(nonconvex_oracle(&a, &y, 1, 4, 0), Err(Error::EmptyFeasibleConeSample)));
        assert!(nonconvex_oracle(&a, &y, 1, 0, 0).is_err());
    }
}
