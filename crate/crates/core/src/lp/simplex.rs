//! Two-phase dense revised simplex.
//!
//! The engine works on standard form `min c.x, A x = b, x >= 0` with an
//! explicit dense basis inverse that is updated by elementary row operations
//! after each pivot and recomputed from scratch every
//! `ToleranceConfig::refactor_interval` pivots. Pricing picks the most
//! negative reduced cost divided by the column norm; after
//! `ToleranceConfig::stall_threshold` consecutive degenerate pivots it falls
//! back to Bland's rule until the objective moves again. Ratio-test ties go
//! to the basic variable with the lowest index.
//!
//! [`solve_lp`] does not hand the caller's program to the engine directly.
//! A program over `d` free variables with `q` inequality rows and `p`
//! equality rows is solved through its dual
//!
//! ```text
//! maximize  h.lambda + e.mu   subject to  G^T lambda + E^T mu = c,  lambda >= 0
//! ```
//!
//! which is already in standard form with only `d` rows (`mu` is split into
//! two nonnegative parts). The recovery programs have far more constraint rows
//! than variables, so this keeps the basis small. At an optimal dual basis the
//! simplex multipliers `pi` give the primal point `z = -pi`: it satisfies the
//! `d` primal rows matching the basic dual columns with equality, so it is a
//! vertex of the primal feasible set whenever that set has one. When the dual
//! is infeasible a phase-1 run on the primal standard form (split free
//! variables, surplus slacks) decides between primal infeasibility and
//! unboundedness.

use super::linalg::{dot, invert};
use super::{LinearProgram, LpSolution, LpStatus, ToleranceConfig};

/// `min cost.x, A x = rhs, x >= 0`, stored column-wise.
#[derive(Debug, Clone)]
struct StandardForm {
    rows: usize,
    columns: Vec<Vec<f64>>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
}

impl StandardForm {
    /// Flips rows with negative right-hand side. Returns the applied signs.
    fn normalize_rhs(&mut self) -> Vec<f64> {
        let signs: Vec<f64> = self.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        for (b, s) in self.rhs.iter_mut().zip(&signs) {
            *b *= s;
        }
        for col in &mut self.columns {
            for (v, s) in col.iter_mut().zip(&signs) {
                *v *= s;
            }
        }
        signs
    }
}

#[derive(Debug)]
enum Outcome {
    Optimal { duals: Vec<f64> },
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, PartialEq)]
enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Engine<'a> {
    sf: &'a StandardForm,
    tol: &'a ToleranceConfig,
    /// structural columns; artificial `k` has index `structural + k`
    structural: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    cap: usize,
    since_refactor: usize,
    /// Euclidean column norms, used to scale reduced costs in pricing
    col_norm: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn new(sf: &'a StandardForm, tol: &'a ToleranceConfig) -> Self {
        let rows = sf.rows;
        let structural = sf.columns.len();
        let mut binv = vec![0.0; rows * rows];
        for i in 0..rows {
            binv[i * rows + i] = 1.0;
        }
        let mut is_basic = vec![false; structural + rows];
        for flag in &mut is_basic[structural..] {
            *flag = true;
        }
        Self {
            sf,
            tol,
            structural,
            basis: (structural..structural + rows).collect(),
            is_basic,
            binv,
            xb: sf.rhs.clone(),
            iterations: 0,
            cap: tol.iteration_factor * (rows + structural),
            since_refactor: 0,
            col_norm: sf
                .columns
                .iter()
                .map(|c| dot(c, c).sqrt().max(f64::MIN_POSITIVE))
                .chain(std::iter::repeat_n(1.0, rows))
                .collect(),
        }
    }

    fn rows(&self) -> usize {
        self.sf.rows
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.structural
    }

    /// B^{-1} a_j
    fn ftran(&self, j: usize) -> Vec<f64> {
        let rows = self.rows();
        if self.is_artificial(j) {
            let k = j - self.structural;
            return (0..rows).map(|r| self.binv[r * rows + k]).collect();
        }
        let col = &self.sf.columns[j];
        (0..rows)
            .map(|r| dot(&self.binv[r * rows..(r + 1) * rows], col))
            .collect()
    }

    /// pi^T = c_B^T B^{-1}
    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let rows = self.rows();
        let mut pi = vec![0.0; rows];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = cost[j];
            if c != 0.0 {
                let row = &self.binv[r * rows..(r + 1) * rows];
                for (p, b) in pi.iter_mut().zip(row) {
                    *p += c * b;
                }
            }
        }
        pi
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], pi: &[f64]) -> f64 {
        if self.is_artificial(j) {
            cost[j] - pi[j - self.structural]
        } else {
            cost[j] - dot(pi, &self.sf.columns[j])
        }
    }

    fn pivot(&mut self, r: usize, entering: usize, alpha: &[f64]) {
        let rows = self.rows();
        let theta = self.xb[r] / alpha[r];
        for (i, x) in self.xb.iter_mut().enumerate() {
            if i != r {
                *x -= theta * alpha[i];
            }
        }
        self.xb[r] = theta;

        let inv_p = 1.0 / alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * rows);
        let (pivot_row, after) = rest.split_at_mut(rows);
        for v in pivot_row.iter_mut() {
            *v *= inv_p;
        }
        let update = |i: usize, row: &mut [f64]| {
            let f = alpha[i];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * p;
                }
            }
        };
        for (i, row) in before.chunks_exact_mut(rows).enumerate() {
            update(i, row);
        }
        for (i, row) in after.chunks_exact_mut(rows).enumerate() {
            update(r + 1 + i, row);
        }

        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[entering] = true;
        self.basis[r] = entering;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= self.tol.refactor_interval.max(1) {
            self.refactor();
        }
    }

    /// Recomputes B^{-1} and x_B from the current basis. Keeps the updated
    /// inverse if the fresh factorization is numerically singular.
    fn refactor(&mut self) {
        let rows = self.rows();
        self.since_refactor = 0;
        if rows == 0 {
            return;
        }
        let mut b = vec![0.0; rows * rows];
        for (k, &j) in self.basis.iter().enumerate() {
            if self.is_artificial(j) {
                b[(j - self.structural) * rows + k] = 1.0;
            } else {
                for (i, v) in self.sf.columns[j].iter().enumerate() {
                    b[i * rows + k] = *v;
                }
            }
        }
        if let Some(inv) = invert(&b, rows, 1e-14) {
            self.binv = inv;
            self.xb = (0..rows)
                .map(|r| dot(&self.binv[r * rows..(r + 1) * rows], &self.sf.rhs))
                .collect();
        }
    }

    /// Runs primal simplex iterations for the given cost vector until
    /// optimality, unboundedness or the iteration cap. Columns with
    /// `allowed[j] == false` never enter.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> PhaseEnd {
        let total = self.structural + self.rows();
        let mut stall = 0usize;
        loop {
            if self.iterations >= self.cap {
                return PhaseEnd::IterationLimit;
            }
            let bland = stall >= self.tol.stall_threshold;
            let pi = self.duals(cost);
            let mut entering = None;
            let mut best = -self.tol.optimality;
            for j in 0..total {
                if self.is_basic[j] || !allowed[j] {
                    continue;
                }
                let mut d = self.reduced_cost(j, cost, &pi);
                if !bland {
                    d /= self.col_norm[j];
                }
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(entering) = entering else {
                return PhaseEnd::Optimal;
            };

            let alpha = self.ftran(entering);
            let mut leave: Option<(usize, f64)> = None;
            for (r, &a) in alpha.iter().enumerate() {
                if a <= self.tol.pivot {
                    continue;
                }
                let ratio = self.xb[r].max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        let tie = (ratio - lratio).abs() <= 1e-12 * (1.0 + lratio.abs());
                        if ratio < lratio && !tie {
                            Some((r, ratio))
                        } else if tie && self.basis[r] < self.basis[lr] {
                            Some((r, ratio.min(lratio)))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return PhaseEnd::Unbounded;
            };
            if self.xb[r] < 0.0 {
                self.xb[r] = 0.0;
            }
            if ratio <= 1e-12 {
                stall += 1;
            } else {
                stall = 0;
            }
            self.pivot(r, entering, &alpha);
        }
    }

    /// Pivots basic artificials out wherever a structural column can replace
    /// them. Artificials left in the basis sit on redundant rows.
    fn drive_out_artificials(&mut self) {
        let rows = self.rows();
        for r in 0..rows {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let binv_row: Vec<f64> = self.binv[r * rows..(r + 1) * rows].to_vec();
            let candidate = (0..self.structural)
                .filter(|&j| !self.is_basic[j])
                .map(|j| (j, dot(&binv_row, &self.sf.columns[j]).abs()))
                .filter(|&(_, v)| v > self.tol.pivot.max(1e-9))
                .fold(None, |best: Option<(usize, f64)>, cur| match best {
                    Some(b) if b.1 >= cur.1 => Some(b),
                    _ => Some(cur),
                });
            if let Some((j, _)) = candidate {
                let alpha = self.ftran(j);
                self.xb[r] = 0.0;
                self.pivot(r, j, &alpha);
            }
        }
    }

    fn run(mut self, phase1_only: bool) -> (Outcome, usize) {
        let rows = self.rows();
        let total = self.structural + rows;
        let scale = self.sf.rhs.iter().fold(1.0_f64, |acc, b| acc.max(b.abs()));

        let mut phase1_cost = vec![0.0; total];
        for c in &mut phase1_cost[self.structural..] {
            *c = 1.0;
        }
        let allowed_all = vec![true; total];
        match self.optimize(&phase1_cost, &allowed_all) {
            PhaseEnd::IterationLimit => return (Outcome::IterationLimit, self.iterations),
            // phase 1 is bounded below by zero
            PhaseEnd::Unbounded | PhaseEnd::Optimal => {}
        }
        self.refactor();
        let infeasibility: f64 = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(j, _)| self.is_artificial(**j))
            .map(|(_, x)| x.abs())
            .sum();
        if infeasibility > self.tol.feasibility * scale {
            return (Outcome::Infeasible, self.iterations);
        }
        if phase1_only {
            return (Outcome::Optimal { duals: Vec::new() }, self.iterations);
        }
        self.drive_out_artificials();

        let mut cost = self.sf.cost.clone();
        cost.resize(total, 0.0);
        let mut allowed = vec![true; total];
        for a in &mut allowed[self.structural..] {
            *a = false;
        }
        let end = self.optimize(&cost, &allowed);
        self.refactor();
        let outcome = match end {
            PhaseEnd::IterationLimit => Outcome::IterationLimit,
            PhaseEnd::Unbounded => Outcome::Unbounded,
            PhaseEnd::Optimal => Outcome::Optimal { duals: self.duals(&cost) },
        };
        (outcome, self.iterations)
    }
}

/// Solves `lp` with the two-phase dense revised simplex.
///
/// Infeasibility and unboundedness are reported through
/// [`LpSolution::status`]; the iteration cap yields
/// [`LpStatus::IterationLimit`].
pub fn solve_lp(lp: &LinearProgram, tol: &ToleranceConfig) -> LpSolution {
    let d = lp.num_vars();

    let mut columns = Vec::with_capacity(lp.num_ineq() + 2 * lp.num_eq());
    let mut cost = Vec::with_capacity(columns.capacity());
    for (row, rhs) in lp.ineq_rows() {
        columns.push(row.to_vec());
        cost.push(-rhs);
    }
    for (row, rhs) in lp.eq_rows() {
        columns.push(row.to_vec());
        cost.push(-rhs);
        columns.push(row.iter().map(|v| -v).collect());
        cost.push(rhs);
    }
    let mut dual = StandardForm { rows: d, columns, cost, rhs: lp.objective().to_vec() };
    let signs = dual.normalize_rhs();

    let (outcome, iterations) = Engine::new(&dual, tol).run(false);
    match outcome {
        Outcome::Optimal { duals } => {
            let primal: Vec<f64> = duals.iter().zip(&signs).map(|(p, s)| -p * s).collect();
            LpSolution::optimal(lp, primal, iterations)
        }
        Outcome::Unbounded => LpSolution::without_point(LpStatus::Infeasible, iterations),
        Outcome::IterationLimit => LpSolution::without_point(LpStatus::IterationLimit, iterations),
        Outcome::Infeasible => {
            let (feasible, extra) = primal_feasible(lp, tol);
            let iterations = iterations + extra;
            match feasible {
                Some(true) => LpSolution::without_point(LpStatus::Unbounded, iterations),
                Some(false) => LpSolution::without_point(LpStatus::Infeasible, iterations),
                None => LpSolution::without_point(LpStatus::IterationLimit, iterations),
            }
        }
    }
}

/// Phase 1 on the primal standard form `z = z+ - z-`, `G z - s = h`, `E z = e`.
/// `None` when the iteration cap is hit.
fn primal_feasible(lp: &LinearProgram, tol: &ToleranceConfig) -> (Option<bool>, usize) {
    let d = lp.num_vars();
    let (q, p) = (lp.num_ineq(), lp.num_eq());
    let rows: Vec<&[f64]> = lp.ineq_rows().chain(lp.eq_rows()).map(|(r, _)| r).collect();
    let rhs: Vec<f64> = lp.ineq_rows().chain(lp.eq_rows()).map(|(_, b)| b).collect();

    let mut columns = Vec::with_capacity(2 * d + q);
    for j in 0..d {
        columns.push(rows.iter().map(|r| r[j]).collect::<Vec<f64>>());
    }
    for j in 0..d {
        columns.push(rows.iter().map(|r| -r[j]).collect::<Vec<f64>>());
    }
    for i in 0..q {
        let mut col = vec![0.0; q + p];
        col[i] = -1.0;
        columns.push(col);
    }
    let cost = vec![0.0; columns.len()];
    let mut sf = StandardForm { rows: q + p, columns, cost, rhs };
    sf.normalize_rhs();
    let (outcome, iterations) = Engine::new(&sf, tol).run(true);
    let feasible = match outcome {
        Outcome::Optimal { .. } => Some(true),
        Outcome::Infeasible => Some(false),
        Outcome::Unbounded => Some(true),
        Outcome::IterationLimit => None,
    };
    (feasible, iterations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn single_lower_bound() {
        let lp = LinearProgram::with_inequalities(vec![1.0], vec![vec![1.0]], vec![3.0]).unwrap();
        let sol = solve_lp(&lp, &tol());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal.unwrap()[0] - 3.0).abs() < 1e-12);
        assert!((sol.objective_value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tight_third_constraint() {
        let lp = LinearProgram::with_inequalities(
            vec![1.0, 1.0],
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            vec![1.0, 1.0, 3.0],
        )
        .unwrap();
        let sol = solve_lp(&lp, &tol());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 3.0).abs() < 1e-12);
        assert!(sol.max_constraint_violation <= 1e-8);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let lp = LinearProgram::with_inequalities(vec![1.0], vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0])
            .unwrap();
        assert_eq!(solve_lp(&lp, &tol()).status, LpStatus::Infeasible);

        let lp = LinearProgram::with_inequalities(vec![-1.0], vec![vec![1.0]], vec![0.0]).unwrap();
        let sol = solve_lp(&lp, &tol());
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert_eq!(sol.objective_value, f64::NEG_INFINITY);
        assert!(sol.primal.is_none());

        // no constraints at all
        let lp = LinearProgram::with_inequalities(vec![1.0, 0.0], vec![], vec![]).unwrap();
        assert_eq!(solve_lp(&lp, &tol()).status, LpStatus::Unbounded);
        let lp = LinearProgram::with_inequalities(vec![0.0, 0.0], vec![], vec![]).unwrap();
        assert_eq!(solve_lp(&lp, &tol()).status, LpStatus::Optimal);
    }

    #[test]
    fn equality_rows() {
        // min z1 + 2 z2 s.t. z1 + z2 = 4, z1 <= 3, z2 >= 0
        let lp = LinearProgram::new(
            vec![1.0, 2.0],
            vec![vec![1.0, 1.0]],
            vec![4.0],
            vec![vec![-1.0, 0.0], vec![0.0, 1.0]],
            vec![-3.0, 0.0],
        )
        .unwrap();
        let sol = solve_lp(&lp, &tol());
        assert_eq!(sol.status, LpStatus::Optimal);
        let z = sol.primal.unwrap();
        assert!((z[0] - 3.0).abs() < 1e-10 && (z[1] - 1.0).abs() < 1e-10);
        assert!((sol.objective_value - 5.0).abs() < 1e-10);

        // inconsistent equalities
        let lp = LinearProgram::new(
            vec![1.0],
            vec![vec![1.0], vec![1.0]],
            vec![1.0, 2.0],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(solve_lp(&lp, &tol()).status, LpStatus::Infeasible);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let lp = LinearProgram::with_inequalities(
            vec![1.0, 1.0],
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            vec![1.0, 1.0, 3.0],
        )
        .unwrap();
        let capped = ToleranceConfig { iteration_factor: 0, ..tol() };
        let sol = solve_lp(&lp, &capped);
        assert_eq!(sol.status, LpStatus::IterationLimit);
        assert!(sol.primal.is_none() && sol.objective_value.is_nan());
    }

    #[test]
    fn deterministic() {
        let lp = LinearProgram::with_inequalities(
            vec![1.0, 2.0, -1.0],
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, -1.0],
                vec![1.0, 1.0, 1.0],
            ],
            vec![0.0, 0.0, -5.0, 1.0],
        )
        .unwrap();
        let a = solve_lp(&lp, &tol());
        let b = solve_lp(&lp, &tol());
        assert_eq!(a, b);
        assert_eq!(a.status, LpStatus::Optimal);
        assert!((a.objective_value - -5.0).abs() < 1e-10);
    }
}
