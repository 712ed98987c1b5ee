//! Named pass/fail checks run by `onebit verify --check <name>`.

use crate::error::Result;
use crate::geometry::{
    block_decompose, hard_threshold, sample_signal_set, separation_probability,
    single_hyperplane_separation_prob, SignalSetSpec, SEPARATION_MARGIN_DIVISOR,
};
use crate::measurement::{distance, SignalVector};
use crate::rng::derive_seed;

use super::concentration::{
    bernoulli_counterexample, verify_concentration, verify_uniform_concentration,
    GAUSSIAN_FIRST_ABSOLUTE_MOMENT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    BernoulliCounterexample,
    Concentration,
    UniformConcentration,
    Separation,
    Net,
    Decomposition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub passed: bool,
    pub lines: Vec<String>,
}

/// Parameters of a check. Unset values fall back to per-check defaults.
#[derive(Debug, Clone, Default)]
pub struct CheckParams {
    pub n: Option<usize>,
    pub s: Option<usize>,
    pub m: Vec<usize>,
    pub trials: Option<usize>,
    pub samples: Option<usize>,
    pub t: Option<f64>,
    pub delta: Option<f64>,
    pub seed: u64,
}

pub fn run_check(check: Check, p: &CheckParams) -> Result<CheckReport> {
    match check {
        Check::BernoulliCounterexample => bernoulli(p),
        Check::Concentration => concentration(p),
        Check::UniformConcentration => uniform(p),
        Check::Separation => separation(p),
        Check::Net => net(p),
        Check::Decomposition => decomposition(p),
    }
}

fn bernoulli(p: &CheckParams) -> Result<CheckReport> {
    let n = p.n.unwrap_or(16);
    let ms = if p.m.is_empty() { vec![1, 10, 100, 1000, 10000] } else { p.m.clone() };
    let seeds: Vec<u64> = (0..p.trials.unwrap_or(20) as u64).map(|k| p.seed.wrapping_add(k)).collect();
    let mut lines = vec![format!("x = e_1, x' = e_1 + e_2 / 2, n = {n}, Bernoulli rows")];
    let mut passed = true;
    for m in ms {
        let report = bernoulli_counterexample(n, m, &seeds)?;
        passed &= report.all_identical();
        lines.push(format!(
            "m = {m}: sign patterns identical for {}/{} seeds",
            report.identical,
            report.seeds.len()
        ));
    }
    Ok(CheckReport { passed, lines })
}

fn concentration(p: &CheckParams) -> Result<CheckReport> {
    let n = p.n.unwrap_or(64);
    let m = p.m.first().copied().unwrap_or(20000);
    let trials = p.trials.unwrap_or(100);
    let t = p.t.unwrap_or(0.02);
    let r = verify_concentration(n, m, trials, t, p.seed)?;
    let mut lines = vec![
        format!("n = {n}, m = {m}, trials = {trials}, t = {t}"),
        format!("exceedance = {:.4}", r.exceedance),
        format!("mean moment = {:.6} (sqrt(2/pi) = {GAUSSIAN_FIRST_ABSOLUTE_MOMENT:.6})", r.mean_moment),
    ];
    if let Some(fit) = r.decay_fit {
        lines.push(format!("decay fit: log C = {:.3}, c = {:.4} over {} points", fit.log_c, fit.c, fit.points));
    }
    Ok(CheckReport { passed: r.exceedance <= 0.01, lines })
}

fn uniform(p: &CheckParams) -> Result<CheckReport> {
    let n = p.n.unwrap_or(64);
    let s = p.s.unwrap_or(4);
    let m = p.m.first().copied().unwrap_or(5000);
    let samples = p.samples.unwrap_or(500);
    let t = p.t.unwrap_or(0.1);
    let r = verify_uniform_concentration(n, s, m, samples, t, p.seed)?;
    Ok(CheckReport {
        passed: !r.exceeds_t,
        lines: vec![
            format!("n = {n}, s = {s}, m = {m}, samples = {samples}, t = {t}"),
            format!("max deviation over samples = {:.5}", r.max_deviation),
        ],
    })
}

fn separation(p: &CheckParams) -> Result<CheckReport> {
    let trials = p.samples.unwrap_or(100_000);
    let x = SignalVector::new(vec![1.0, 0.0])?;
    let orth = SignalVector::new(vec![0.0, 1.0])?;
    let anti = x.scaled(-1.0)?;
    let po = separation_probability(&x, &orth, 0.0, trials, p.seed)?;
    let pa = separation_probability(&x, &anti, 0.0, trials, derive_seed(p.seed, &[1]))?;
    let mut passed = (po.probability - 0.25).abs() <= 0.01 && (pa.probability - 0.5).abs() <= 0.01;
    let mut lines = vec![
        format!("orthogonal pair: {:.4} (expected 0.25)", po.probability),
        format!("antipodal pair: {:.4} (expected 0.5)", pa.probability),
    ];
    let deltas = p.delta.map_or(vec![0.5, 1.0], |d| vec![d]);
    for delta in deltas {
        // unit pair at distance exactly delta
        let theta = 2.0 * (delta / 2.0).asin();
        let y = SignalVector::new(vec![theta.cos(), theta.sin()])?;
        let est = single_hyperplane_separation_prob(&x, &y, delta, trials, derive_seed(p.seed, &[2]))?;
        let floor = delta / SEPARATION_MARGIN_DIVISOR - 3.0 * est.std_error;
        passed &= est.probability >= floor;
        lines.push(format!(
            "delta = {delta}: P(margin {:.4}) = {:.4}, floor {:.4}",
            est.margin, est.probability, floor
        ));
    }
    Ok(CheckReport { passed, lines })
}

fn k_points(p: &CheckParams) -> Result<(usize, usize, Vec<SignalVector>)> {
    let n = p.n.unwrap_or(64);
    let s = p.s.unwrap_or(4);
    let spec = SignalSetSpec::effectively_sparse(n, s as f64)?;
    Ok((n, s, sample_signal_set(&spec, p.samples.unwrap_or(1000), p.seed)?))
}

fn net(p: &CheckParams) -> Result<CheckReport> {
    let (n, s, points) = k_points(p)?;
    let mut lines = vec![format!("{} points of K({n}, {s})", points.len())];
    let mut passed = true;
    let mut t = s;
    while t <= n {
        let bound = (s as f64 / t as f64).sqrt();
        let mut failures = 0;
        let mut worst: f64 = 0.0;
        for x in &points {
            let d = distance(x.as_slice(), hard_threshold(x, t)?.as_slice());
            worst = worst.max(d);
            if d > bound {
                failures += 1;
            }
        }
        passed &= failures == 0;
        lines.push(format!("t = {t}: worst distance {worst:.4}, bound {bound:.4}, failures {failures}"));
        t *= 2;
    }
    Ok(CheckReport { passed, lines })
}

fn decomposition(p: &CheckParams) -> Result<CheckReport> {
    let (n, s, points) = k_points(p)?;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for x in &points {
        let blocks = block_decompose(x, s)?;
        let mut sum = vec![0.0; n];
        for b in &blocks {
            for (acc, v) in sum.iter_mut().zip(b.as_slice()) {
                *acc += v;
            }
        }
        let total: f64 = blocks.iter().map(|b| b.l2()).sum();
        worst = worst.max(total);
        if total > 2.0 || sum.as_slice() != x.as_slice() || blocks.iter().any(|b| b.l0() > s) {
            failures += 1;
        }
    }
    Ok(CheckReport {
        passed: failures == 0,
        lines: vec![
            format!("{} points of K({n}, {s})", points.len()),
            format!("largest sum of block norms {worst:.4} (bound 2), failures {failures}"),
        ],
    })
}
