use std::time::Instant;

use rayon::prelude::*;

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::measurement::{gen_ensemble, gen_sparse_signal};
use crate::recovery::{recover, recovery_error};
use crate::rng::derive_seed;

pub const SWEEP_CSV_HEADER: &str = "n,s,m,trial,seed,error,l1l2_ratio_in,l1l2_ratio_out,\
cert_cardinality_ok,normalization_residual,status";

/// One (m, trial) cell of a sweep. Failed trials carry NaN metrics and the
/// error kind in `status`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub s: usize,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub error: f64,
    pub l1l2_ratio_in: f64,
    pub l1l2_ratio_out: f64,
    pub cert_cardinality_ok: bool,
    pub normalization_residual: f64,
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn to_csv_line(&self) -> String {
        use super::io::fmt_sci;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.s,
            self.m,
            self.trial,
            self.seed,
            fmt_sci(self.error),
            fmt_sci(self.l1l2_ratio_in),
            fmt_sci(self.l1l2_ratio_out),
            self.cert_cardinality_ok,
            fmt_sci(self.normalization_residual),
            self.status
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    /// Sorted by (m, trial).
    pub rows: Vec<SweepRow>,
    /// Wall time per row in milliseconds, same order as `rows`.
    pub wall_time_ms: Vec<f64>,
}

impl SweepOutcome {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv_line());
            out.push('\n');
        }
        out
    }

    pub fn timing_csv(&self) -> String {
        let mut out = String::from("m,trial,wall_time_ms\n");
        for (row, t) in self.rows.iter().zip(&self.wall_time_ms) {
            out.push_str(&format!("{},{},{:.3}\n", row.m, row.trial, t));
        }
        out
    }

    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| !r.is_ok())
    }
}

/// Seed of trial `trial` at `m` measurements. Depends only on its three
/// inputs, so any subset of the plan reproduces the same rows.
pub fn trial_seed(master: u64, m: usize, trial: usize) -> u64 {
    derive_seed(master, &[m as u64, trial as u64])
}

pub(crate) fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::InvalidMeasurement => "invalid_measurement",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::ZeroVector => "zero_vector",
        Error::SparsityOutOfRange { .. } => "sparsity_out_of_range",
        Error::DegenerateSignPattern => "degenerate_sign_pattern",
        Error::NormalizationNotTight { .. } => "normalization_not_tight",
        Error::NotOptimal(_) => "not_optimal",
        Error::SingularBasis => "singular_basis",
        Error::OracleGuard(_) => "oracle_guard",
        Error::NotInK => "not_in_k",
        Error::EmptyFeasibleConeSample => "empty_feasible_cone_sample",
        Error::Parse { .. } => "parse",
        Error::Io(_) => "io",
    }
}

fn run_trial(config: &ExperimentConfig, m: usize, trial: usize) -> (SweepRow, f64) {
    let start = Instant::now();
    let seed = trial_seed(config.seed, m, trial);
    let mut row = SweepRow {
        n: config.n,
        s: config.s,
        m,
        trial,
        seed,
        error: f64::NAN,
        l1l2_ratio_in: f64::NAN,
        l1l2_ratio_out: f64::NAN,
        cert_cardinality_ok: false,
        normalization_residual: f64::NAN,
        status: "ok".into(),
    };
    let outcome = (|| -> Result<()> {
        let x = gen_sparse_signal(config.n, config.s, derive_seed(seed, &[0]), config.magnitude_model)?;
        row.l1l2_ratio_in = x.l1() / x.l2();
        let a = gen_ensemble(m, config.n, derive_seed(seed, &[1]), config.distribution)?;
        let y = a.measure(&x)?;
        let result = recover(&a, &y, &config.tolerances)?;
        row.error = recovery_error(&result.direction, &x)?;
        row.l1l2_ratio_out = result.l1_over_l2;
        row.cert_cardinality_ok = result.certificate.cardinality_ok;
        row.normalization_residual = result.certificate.normalization_residual;
        Ok(())
    })();
    if let Err(err) = outcome {
        row.error = f64::NAN;
        row.l1l2_ratio_out = f64::NAN;
        row.status = error_kind(&err).into();
    }
    (row, start.elapsed().as_secs_f64() * 1e3)
}

/// Runs every (m, trial) pair of the config in parallel. A failing trial
/// produces an error row; it never aborts the sweep.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let plan: Vec<(usize, usize)> = config
        .m_list
        .iter()
        .flat_map(|&m| (0..config.trials).map(move |t| (m, t)))
        .collect();
    let mut results: Vec<(SweepRow, f64)> =
        plan.par_iter().map(|&(m, t)| run_trial(config, m, t)).collect();
    results.sort_by_key(|(row, _)| (row.m, row.trial));
    let (rows, wall_time_ms) = results.into_iter().unzip();
    Ok(SweepOutcome { rows, wall_time_ms })
}
