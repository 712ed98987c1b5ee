//! Dense linear programming.
//!
//! Problems are stated over free variables `z` as
//!
//! ```text
//! minimize    c . z
//! subject to  eq_lhs z  = eq_rhs
//!             ineq_lhs z >= ineq_rhs
//! ```
//!
//! [`solve_lp`] runs a two-phase dense revised simplex; [`brute_force_vertex_solve`]
//! enumerates vertices and exists to cross-check the simplex on small
//! instances.

mod brute;
pub(crate) mod linalg;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use brute::brute_force_vertex_solve;
pub use simplex::solve_lp;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Allowed violation of any constraint row at an optimal point.
    pub feasibility: f64,
    /// Reduced-cost threshold for optimality.
    pub optimality: f64,
    /// Smallest pivot magnitude accepted in the ratio test.
    pub pivot: f64,
    /// Iteration cap is `iteration_factor * (rows + cols)` of the standard form.
    pub iteration_factor: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub stall_threshold: usize,
    /// Pivots between refactorizations of the basis inverse.
    pub refactor_interval: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            feasibility: 1e-8,
            optimality: 1e-9,
            pivot: 1e-10,
            iteration_factor: 50,
            stall_threshold: 50,
            refactor_interval: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    eq_lhs: Vec<Vec<f64>>,
    eq_rhs: Vec<f64>,
    ineq_lhs: Vec<Vec<f64>>,
    ineq_rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(
        objective: Vec<f64>,
        eq_lhs: Vec<Vec<f64>>,
        eq_rhs: Vec<f64>,
        ineq_lhs: Vec<Vec<f64>>,
        ineq_rhs: Vec<f64>,
    ) -> Result<Self> {
        let d = objective.len();
        if d == 0 {
            return Err(Error::InvalidArgument("linear program needs at least one variable".into()));
        }
        if eq_lhs.len() != eq_rhs.len() {
            return Err(Error::DimensionMismatch { expected: eq_lhs.len(), got: eq_rhs.len() });
        }
        if ineq_lhs.len() != ineq_rhs.len() {
            return Err(Error::DimensionMismatch { expected: ineq_lhs.len(), got: ineq_rhs.len() });
        }
        for row in eq_lhs.iter().chain(&ineq_lhs) {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: row.len() });
            }
        }
        let all_finite = objective
            .iter()
            .chain(eq_lhs.iter().flatten())
            .chain(&eq_rhs)
            .chain(ineq_lhs.iter().flatten())
            .chain(&ineq_rhs)
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidArgument("linear program entries must be finite".into()));
        }
        Ok(Self { objective, eq_lhs, eq_rhs, ineq_lhs, ineq_rhs })
    }

    /// Inequality-only program `min c.z s.t. G z >= h`.
    pub fn with_inequalities(objective: Vec<f64>, lhs: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        Self::new(objective, Vec::new(), Vec::new(), lhs, rhs)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_eq(&self) -> usize {
        self.eq_rhs.len()
    }

    pub fn num_ineq(&self) -> usize {
        self.ineq_rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn eq_rows(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.eq_lhs.iter().map(Vec::as_slice).zip(self.eq_rhs.iter().copied())
    }

    pub fn ineq_rows(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.ineq_lhs.iter().map(Vec::as_slice).zip(self.ineq_rhs.iter().copied())
    }

    pub fn objective_at(&self, z: &[f64]) -> f64 {
        linalg::dot(&self.objective, z)
    }

    /// Largest violation of any row at `z`, measured in the row's own units.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let eq = self.eq_rows().map(|(row, rhs)| (linalg::dot(row, z) - rhs).abs());
        let ineq = self.ineq_rows().map(|(row, rhs)| (rhs - linalg::dot(row, z)).max(0.0));
        eq.chain(ineq).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub primal: Option<Vec<f64>>,
    /// +inf when infeasible, -inf when unbounded, NaN at the iteration limit.
    pub objective_value: f64,
    pub iterations: usize,
    pub max_constraint_violation: f64,
}

impl LpSolution {
    pub(crate) fn optimal(lp: &LinearProgram, primal: Vec<f64>, iterations: usize) -> Self {
        Self {
            status: LpStatus::Optimal,
            objective_value: lp.objective_at(&primal),
            max_constraint_violation: lp.max_violation(&primal),
            primal: Some(primal),
            iterations,
        }
    }

    pub(crate) fn without_point(status: LpStatus, iterations: usize) -> Self {
        let objective_value = match status {
            LpStatus::Infeasible => f64::INFINITY,
            LpStatus::Unbounded => f64::NEG_INFINITY,
            LpStatus::Optimal | LpStatus::IterationLimit => f64::NAN,
        };
        Self {
            status,
            primal: None,
            objective_value,
            iterations,
            max_constraint_violation: f64::NAN,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inconsistent_shapes() {
        assert!(LinearProgram::new(vec![], vec![], vec![], vec![], vec![]).is_err());
        assert!(LinearProgram::with_inequalities(vec![1.0], vec![vec![1.0, 2.0]], vec![0.0]).is_err());
        assert!(LinearProgram::with_inequalities(vec![1.0], vec![vec![1.0]], vec![]).is_err());
        assert!(LinearProgram::with_inequalities(vec![f64::NAN], vec![], vec![]).is_err());
    }

    #[test]
    fn violation_is_measured_per_row() {
        let lp = LinearProgram::new(
            vec![1.0, 0.0],
            vec![vec![1.0, 1.0]],
            vec![2.0],
            vec![vec![1.0, 0.0]],
            vec![3.0],
        )
        .unwrap();
        assert_eq!(lp.max_violation(&[3.0, -1.0]), 0.0);
        assert_eq!(lp.max_violation(&[1.0, 1.0]), 2.0);
        assert_eq!(lp.max_violation(&[4.0, 0.0]), 2.0);
    }
}
