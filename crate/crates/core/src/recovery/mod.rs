//! Direction recovery from one-bit measurements.
//!
//! The decoder solves
//!
//! ```text
//! minimize    sum_i u_i
//! subject to  -u_i <= x_i <= u_i                       for every coordinate
//!             y_i <a_i, x> >= 0                        for y_i != 0
//!             <a_i, x> = 0                             for y_i == 0
//!             (1/m) sum_i y_i <a_i, x> >= 1
//! ```
//!
//! over `(x, u)` in R^{2n}, i.e. l1 minimization over the sign-consistent
//! cone with a linear normalization that rules out `x = 0`. At the optimum
//! the normalization row is tight, so `(1/m) ||A x||_1 = 1`.

mod certificate;
mod oracle;

pub use certificate::{extract_certificate, CertificateThresholds, VertexCertificate};
pub use oracle::{nonconvex_oracle, ORACLE_MAX_DIM};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, ToleranceConfig};
use crate::measurement::{distance, dot, MeasurementEnsemble, SignPattern, SignalVector};

/// Allowed gap between the normalization row and 1 at an optimum.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub status: LpStatus,
    pub objective_value: f64,
    pub iterations: usize,
    pub max_constraint_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// Raw program solution.
    pub x_hat: SignalVector,
    /// `x_hat / ||x_hat||_2`.
    pub direction: SignalVector,
    pub l1_over_l2: f64,
    pub certificate: VertexCertificate,
    pub solver: SolverSummary,
}

fn check_shapes(a: &MeasurementEnsemble, y: &SignPattern) -> Result<()> {
    if a.rows() != y.len() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: y.len() });
    }
    if y.is_all_zero() {
        return Err(Error::DegenerateSignPattern);
    }
    Ok(())
}

/// Builds the recovery program over `(x, u)`.
///
/// Row layout: the `2n` coupling rows `u_i - x_i >= 0`, `u_i + x_i >= 0`
/// (interleaved per coordinate), then one consistency row per nonzero sign in
/// measurement order, then the normalization row. Zero signs become equality
/// rows.
pub fn build_recovery_lp(a: &MeasurementEnsemble, y: &SignPattern) -> Result<LinearProgram> {
    check_shapes(a, y)?;
    let n = a.cols();
    let m = a.rows() as f64;
    let d = 2 * n;

    let mut objective = vec![0.0; d];
    objective[n..].fill(1.0);

    let mut ineq_lhs = Vec::with_capacity(2 * n + y.len() + 1);
    let mut ineq_rhs = Vec::with_capacity(ineq_lhs.capacity());
    for i in 0..n {
        for sign in [-1.0, 1.0] {
            let mut row = vec![0.0; d];
            row[i] = sign;
            row[n + i] = 1.0;
            ineq_lhs.push(row);
            ineq_rhs.push(0.0);
        }
    }

    let mut eq_lhs = Vec::with_capacity(y.zero_count());
    let mut normalization = vec![0.0; d];
    for (row, &sign) in a.iter_rows().zip(y.as_slice()) {
        let mut lp_row = vec![0.0; d];
        if sign == 0 {
            lp_row[..n].copy_from_slice(row);
            eq_lhs.push(lp_row);
            continue;
        }
        let s = f64::from(sign);
        for (dst, v) in lp_row[..n].iter_mut().zip(row) {
            *dst = s * v;
        }
        for (acc, v) in normalization[..n].iter_mut().zip(&lp_row[..n]) {
            *acc += v / m;
        }
        ineq_lhs.push(lp_row);
        ineq_rhs.push(0.0);
    }
    ineq_lhs.push(normalization);
    ineq_rhs.push(1.0);

    let eq_rhs = vec![0.0; eq_lhs.len()];
    LinearProgram::new(objective, eq_lhs, eq_rhs, ineq_lhs, ineq_rhs)
}

/// (1/m) sum_i y_i <a_i, x>.
pub fn normalization_value(a: &MeasurementEnsemble, y: &SignPattern, x: &[f64]) -> f64 {
    let total: f64 = a
        .iter_rows()
        .zip(y.as_slice())
        .map(|(row, &s)| f64::from(s) * dot(row, x))
        .sum();
    total / a.rows() as f64
}

/// Solves the recovery program for measurements `y` of ensemble `a`.
pub fn recover(
    a: &MeasurementEnsemble,
    y: &SignPattern,
    tol: &ToleranceConfig,
) -> Result<RecoveryResult> {
    let lp = build_recovery_lp(a, y)?;
    let solution = solve_lp(&lp, tol);
    let solver = SolverSummary {
        status: solution.status,
        objective_value: solution.objective_value,
        iterations: solution.iterations,
        max_constraint_violation: solution.max_constraint_violation,
    };
    let Some(z) = solution.primal else {
        return Err(Error::NotOptimal(solution.status));
    };
    let n = a.cols();
    let x_hat = SignalVector::new(z[..n].to_vec())?;

    let residual = (normalization_value(a, y, x_hat.as_slice()) - 1.0).abs();
    if residual > NORMALIZATION_TOLERANCE {
        return Err(Error::NormalizationNotTight { residual });
    }

    let direction = x_hat.normalized()?;
    let l1_over_l2 = x_hat.l1() / x_hat.l2();
    let certificate = extract_certificate(a, y, &x_hat, &CertificateThresholds::default());
    Ok(RecoveryResult { x_hat, direction, l1_over_l2, certificate, solver })
}

/// || direction/||direction|| - x_true/||x_true|| ||_2.
pub fn recovery_error(direction: &SignalVector, x_true: &SignalVector) -> Result<f64> {
    if direction.len() != x_true.len() {
        return Err(Error::DimensionMismatch { expected: x_true.len(), got: direction.len() });
    }
    let u = direction.normalized()?;
    let v = x_true.normalized()?;
    Ok(distance(u.as_slice(), v.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::brute_force_vertex_solve;
    use crate::measurement::gen_gaussian_ensemble;

    #[test]
    fn single_measurement_program() {
        let a = MeasurementEnsemble::from_rows(vec![vec![1.0, 0.0]], 2).unwrap();
        let y = SignPattern::new(vec![1]).unwrap();
        let lp = build_recovery_lp(&a, &y).unwrap();
        let oracle = brute_force_vertex_solve(&lp).unwrap();
        assert_eq!(oracle.status, LpStatus::Optimal);
        assert!((oracle.objective_value - 1.0).abs() < 1e-12);

        let result = recover(&a, &y, &ToleranceConfig::default()).unwrap();
        assert!((result.x_hat.as_slice()[0] - 1.0).abs() < 1e-12);
        assert!(result.x_hat.as_slice()[1].abs() < 1e-12);
        assert!((result.solver.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn row_counts() {
        let a = gen_gaussian_ensemble(5, 3, 1).unwrap();
        let y = SignPattern::new(vec![1, 0, -1, 1, 0]).unwrap();
        let lp = build_recovery_lp(&a, &y).unwrap();
        assert_eq!(lp.num_vars(), 6);
        assert_eq!(lp.num_eq(), 2);
        assert_eq!(lp.num_ineq(), 2 * 3 + 3 + 1);
    }

    #[test]
    fn rejects_degenerate_patterns() {
        let a = gen_gaussian_ensemble(3, 2, 1).unwrap();
        let zero = SignPattern::new(vec![0, 0, 0]).unwrap();
        let err = build_recovery_lp(&a, &zero).unwrap_err();
        assert_eq!(err.to_string(), "degenerate sign pattern");
        let short = SignPattern::new(vec![1, 1]).unwrap();
        assert!(matches!(recover(&a, &short, &ToleranceConfig::default()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn zero_signs_become_hyperplanes() {
        let a = gen_gaussian_ensemble(40, 6, 4).unwrap();
        // project a signal onto the complement of rows 3 and 17 so that a
        // consistent solution exists
        let mut x = vec![1.0, -0.5, 0.0, 0.0, 0.2, 0.3];
        for _ in 0..50 {
            for r in [3, 17] {
                let row = a.row(r);
                let f = dot(row, &x) / dot(row, row);
                x.iter_mut().zip(row).for_each(|(xi, ai)| *xi -= f * ai);
            }
        }
        let x = SignalVector::new(x).unwrap();
        let mut signs = a.measure(&x).unwrap().as_slice().to_vec();
        signs[3] = 0;
        signs[17] = 0;
        let y = SignPattern::new(signs).unwrap();
        let result = recover(&a, &y, &ToleranceConfig::default()).unwrap();
        let xh = result.x_hat.as_slice();
        assert!(dot(a.row(3), xh).abs() <= 1e-8);
        assert!(dot(a.row(17), xh).abs() <= 1e-8);
    }

    #[test]
    fn recovers_basis_direction_in_the_plane() {
        let a = gen_gaussian_ensemble(50, 2, 11).unwrap();
        let x = SignalVector::basis(2, 0).unwrap();
        let y = a.measure(&x).unwrap();
        let result = recover(&a, &y, &ToleranceConfig::default()).unwrap();
        let err = recovery_error(&result.direction, &x).unwrap();
        assert!(err <= 0.2, "error {err}");
        assert!((result.direction.l2() - 1.0).abs() <= 1e-12);
        assert!((result.l1_over_l2 - result.x_hat.l1() / result.x_hat.l2()).abs() < 1e-15);
    }

    #[test]
    fn scale_of_the_signal_is_invisible() {
        let a = gen_gaussian_ensemble(60, 10, 2).unwrap();
        let x = SignalVector::new(vec![0.3, 0.0, -1.2, 0.0, 0.0, 0.7, 0.0, 0.0, 0.0, 0.1]).unwrap();
        let y1 = a.measure(&x).unwrap();
        let y2 = a.measure(&x.scaled(37.5).unwrap()).unwrap();
        assert_eq!(y1, y2);
        let tol = ToleranceConfig::default();
        assert_eq!(build_recovery_lp(&a, &y1).unwrap(), build_recovery_lp(&a, &y2).unwrap());
        assert_eq!(recover(&a, &y1, &tol).unwrap(), recover(&a, &y2, &tol).unwrap());
    }

    #[test]
    fn error_metric_cases() {
        let x = SignalVector::new(vec![3.0, 4.0]).unwrap();
        let d = x.normalized().unwrap();
        assert!(recovery_error(&d, &x).unwrap() < 1e-15);
        let e1 = SignalVector::basis(2, 0).unwrap();
        let e2 = SignalVector::basis(2, 1).unwrap();
        assert!((recovery_error(&e1, &e2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let minus = e1.scaled(-1.0).unwrap();
        assert_eq!(recovery_error(&e1, &minus).unwrap(), 2.0);
        let zero = SignalVector::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(recovery_error(&zero, &e1), Err(Error::ZeroVector)));
    }

    #[test]
    fn feasible_and_tight_by_direct_arithmetic() {
        let tol = ToleranceConfig::default();
        for seed in 0..10 {
            let a = gen_gaussian_ensemble(80, 20, seed).unwrap();
            let x = crate::measurement::gen_sparse_signal(20, 3, seed, Default::default()).unwrap();
            let y = a.measure(&x).unwrap();
            let result = recover(&a, &y, &tol).unwrap();
            let xh = result.x_hat.as_slice();
            let min_consistency = a
                .iter_rows()
                .zip(y.as_slice())
                .map(|(row, &s)| f64::from(s) * dot(row, xh))
                .fold(f64::INFINITY, f64::min);
            assert!(min_consistency >= -1e-6);
            assert!(result.certificate.normalization_residual <= 1e-6);
            let lp = build_recovery_lp(&a, &y).unwrap();
            let mut z = xh.to_vec();
            z.extend(xh.iter().map(|v| v.abs()));
            assert!(lp.max_violation(&z) <= 1e-6);
            // support never exceeds m + 1
            assert!(result.certificate.support.len() <= a.rows() + 1);
        }
    }
}
