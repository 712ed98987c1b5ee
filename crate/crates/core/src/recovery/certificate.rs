use crate::measurement::{dot, l2, MeasurementEnsemble, SignPattern, SignalVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateThresholds {
    /// Coordinates with |x_i| above this are in the support.
    pub support: f64,
    /// Row i is active when |<a_i, x>| <= active * ||a_i|| * ||x||.
    pub active: f64,
}

impl Default for CertificateThresholds {
    fn default() -> Self {
        Self { support: 1e-7, active: 1e-7 }
    }
}

/// Support/active-set structure of a vertex solution.
///
/// At a vertex of the recovery program in general position the support `T`
/// and the set `Omega` of measurements annihilated by the solution satisfy
/// `|T| = |Omega| + 1` and `A[Omega, T] x_T = 0`, and the normalization holds
/// as `(1/m) sum |<a_i, x>| = 1`. The certificate records how closely a
/// numerical solution matches that description; it never rejects.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCertificate {
    pub support: Vec<usize>,
    pub active_rows: Vec<usize>,
    pub cardinality_ok: bool,
    /// ||A[Omega, T] x_T||_2
    pub kernel_residual: f64,
    /// |(1/m) sum_i |<a_i, x>| - 1|
    pub normalization_residual: f64,
    /// min_i y_i <a_i, x>
    pub min_consistency: f64,
    pub thresholds: CertificateThresholds,
}

pub fn extract_certificate(
    a: &MeasurementEnsemble,
    y: &SignPattern,
    x_hat: &SignalVector,
    thresholds: &CertificateThresholds,
) -> VertexCertificate {
    let x = x_hat.as_slice();
    let x_norm = x_hat.l2();
    let support = x_hat.support(thresholds.support);
    let x_support: Vec<f64> = (0..x.len())
        .map(|i| if support.binary_search(&i).is_ok() { x[i] } else { 0.0 })
        .collect();

    let mut active_rows = Vec::new();
    let mut kernel = Vec::new();
    let mut abs_sum = 0.0;
    let mut min_consistency = f64::INFINITY;
    for (i, (row, &s)) in a.iter_rows().zip(y.as_slice()).enumerate() {
        let value = dot(row, x);
        abs_sum += value.abs();
        min_consistency = min_consistency.min(f64::from(s) * value);
        if value.abs() <= thresholds.active * l2(row) * x_norm {
            active_rows.push(i);
            kernel.push(dot(row, &x_support));
        }
    }
    let m = a.rows().max(1) as f64;

    VertexCertificate {
        cardinality_ok: support.len() == active_rows.len() + 1,
        support,
        active_rows,
        kernel_residual: l2(&kernel),
        normalization_residual: (abs_sum / m - 1.0).abs(),
        min_consistency,
        thresholds: *thresholds,
    }
}
