//! Vertex enumeration oracle for small programs.

use super::linalg::{dot, kernel_direction, rank, solve};
use super::{LinearProgram, LpSolution, LpStatus};
use crate::error::{Error, Result};

const MAX_VARS: usize = 12;
const MAX_ROWS: usize = 24;
const FEAS_TOL: f64 = 1e-9;
const SINGULAR: f64 = 1e-11;

/// Solves `lp` by enumerating every `d`-subset of constraint rows.
///
/// Each subset is solved as a square system with all its rows active; the
/// feasible solutions are the vertices and the best one is returned. A
/// second pass over `(d-1)`-subsets enumerates the extreme rays of the
/// recession cone to detect unboundedness. The feasible set must be pointed
/// (constraint matrix of full column rank), otherwise vertices do not exist
/// and an error is returned.
pub fn brute_force_vertex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    let d = lp.num_vars();
    let total = lp.num_eq() + lp.num_ineq();
    if d > MAX_VARS || total > MAX_ROWS {
        return Err(Error::OracleGuard(format!(
            "vertex enumeration limited to d <= {MAX_VARS}, p+q <= {MAX_ROWS} (got d={d}, p+q={total})"
        )));
    }

    let rows: Vec<&[f64]> = lp.eq_rows().chain(lp.ineq_rows()).map(|(r, _)| r).collect();
    let rhs: Vec<f64> = lp.eq_rows().chain(lp.ineq_rows()).map(|(_, b)| b).collect();
    if rank(&rows, d, SINGULAR) < d {
        return Err(Error::OracleGuard(
            "constraint matrix is column-rank deficient; feasible set has no vertices".into(),
        ));
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut systems = 0usize;
    for subset in Combinations::new(total, d) {
        systems += 1;
        let sys_rows: Vec<&[f64]> = subset.iter().map(|&i| rows[i]).collect();
        let sys_rhs: Vec<f64> = subset.iter().map(|&i| rhs[i]).collect();
        let Some(z) = solve(&sys_rows, &sys_rhs, SINGULAR) else {
            continue;
        };
        if lp.max_violation(&z) > FEAS_TOL * (1.0 + max_abs(&z)) {
            continue;
        }
        let value = lp.objective_at(&z);
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, z));
        }
    }

    let Some((_, vertex)) = best else {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, systems));
    };

    let eq_count = lp.num_eq();
    for subset in Combinations::new(total, d - 1) {
        systems += 1;
        let sys_rows: Vec<&[f64]> = subset.iter().map(|&i| rows[i]).collect();
        let Some(w) = kernel_direction(&sys_rows, d, SINGULAR) else {
            continue;
        };
        for dir in [w.clone(), w.iter().map(|v| -v).collect()] {
            let recedes = rows.iter().enumerate().all(|(i, row)| {
                let v = dot(row, &dir);
                if i < eq_count {
                    v.abs() <= FEAS_TOL
                } else {
                    v >= -FEAS_TOL
                }
            });
            if recedes && lp.objective_at(&dir) < -FEAS_TOL {
                return Ok(LpSolution::without_point(LpStatus::Unbounded, systems));
            }
        }
    }

    Ok(LpSolution::optimal(lp, vertex, systems))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Lexicographic k-subsets of 0..n.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_counts() {
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(4, 0).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
        assert_eq!(Combinations::new(6, 6).count(), 1);
    }

    #[test]
    fn toy_statuses() {
        let lp = LinearProgram::with_inequalities(vec![1.0], vec![vec![1.0]], vec![3.0]).unwrap();
        let sol = brute_force_vertex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.primal.unwrap(), vec![3.0]);

        let lp = LinearProgram::with_inequalities(vec![1.0], vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0])
            .unwrap();
        assert_eq!(brute_force_vertex_solve(&lp).unwrap().status, LpStatus::Infeasible);

        let lp = LinearProgram::with_inequalities(vec![-1.0], vec![vec![1.0]], vec![0.0]).unwrap();
        assert_eq!(brute_force_vertex_solve(&lp).unwrap().status, LpStatus::Unbounded);

        let lp = LinearProgram::with_inequalities(
            vec![1.0, 1.0],
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            vec![1.0, 1.0, 3.0],
        )
        .unwrap();
        let sol = brute_force_vertex_solve(&lp).unwrap();
        assert!((sol.objective_value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        let lp = LinearProgram::with_inequalities(vec![1.0; 13], vec![], vec![]).unwrap();
        assert!(matches!(brute_force_vertex_solve(&lp), Err(Error::OracleGuard(_))));
        let lp = LinearProgram::with_inequalities(vec![1.0, 0.0], vec![vec![1.0, 0.0]], vec![0.0]).unwrap();
        assert!(matches!(brute_force_vertex_solve(&lp), Err(Error::OracleGuard(_))));
    }
}
