//! Effectively sparse signal sets, nets, decompositions and hyperplane
//! separation.
//!
//! `K(n, s) = { x : ||x||_2 <= 1, ||x||_1 <= sqrt(s) }` is the convex set of
//! effectively s-sparse signals and `S(n, s)` the exactly s-sparse vectors of
//! the unit ball.

mod tessellation;

pub use tessellation::{
    cell_assignment, partition_refines, tessellate, tessellate_and_report, PairSeparation,
    TessellationReport, REPORT_MARGIN_DIVISOR,
};

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measurement::{dot, l1, l2, MeasurementEnsemble, SignalVector};
use crate::rng::{derive_seed, stream_rng, streams};

/// Relative slack for set-membership tests on computed points.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Margin divisor of the single-hyperplane separation bound: points at
/// distance delta are separated with margin delta / 12 with probability at
/// least delta / 12.
pub const SEPARATION_MARGIN_DIVISOR: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalSetKind {
    /// K(n, s): unit l2 ball intersected with the sqrt(s) l1 ball.
    EffectivelySparse,
    /// S(n, s): unit l2 ball vectors with at most s nonzeros.
    ExactlySparse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSetSpec {
    pub n: usize,
    pub s: f64,
    pub kind: SignalSetKind,
}

impl SignalSetSpec {
    pub fn effectively_sparse(n: usize, s: f64) -> Result<Self> {
        Self::new(n, s, SignalSetKind::EffectivelySparse)
    }

    pub fn new(n: usize, s: f64, kind: SignalSetKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be >= 1".into()));
        }
        if !(s >= 1.0) || !s.is_finite() {
            return Err(Error::SparsityOutOfRange { s, n });
        }
        Ok(Self { n, s, kind })
    }

    pub fn contains(&self, x: &SignalVector) -> bool {
        if x.len() != self.n || x.l2() > 1.0 + MEMBERSHIP_SLACK {
            return false;
        }
        match self.kind {
            SignalSetKind::EffectivelySparse => x.l1() <= self.s.sqrt() * (1.0 + MEMBERSHIP_SLACK),
            SignalSetKind::ExactlySparse => x.l0() as f64 <= self.s,
        }
    }
}

/// Indices sorted by decreasing magnitude, ties by lowest index.
fn magnitude_order(x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    order
}

/// Keeps the `t` largest-magnitude entries of `x` and zeroes the rest.
///
/// For `x` in K(n, s) the result lies within sqrt(s / t) of `x`, so the
/// t-sparse vectors form a sqrt(s / t)-net of K(n, s).
pub fn hard_threshold(x: &SignalVector, t: usize) -> Result<SignalVector> {
    let n = x.len();
    if t == 0 || t > n {
        return Err(Error::InvalidArgument(format!("threshold level {t} outside 1..={n}")));
    }
    let v = x.as_slice();
    let mut out = vec![0.0; n];
    for &i in magnitude_order(v).iter().take(t) {
        out[i] = v[i];
    }
    SignalVector::new(out)
}

/// Splits `x` in K(n, s) into s-sparse blocks with disjoint supports.
///
/// The first block holds the s largest-magnitude entries, the second the
/// next s, and so on. The blocks sum to `x` exactly and every entry of block
/// k+1 is dominated by the average magnitude of block k, which gives
/// `sum_k ||x_k||_2 <= ||x||_2 + ||x||_1 / sqrt(s) <= 2`.
pub fn block_decompose(x: &SignalVector, s: usize) -> Result<Vec<SignalVector>> {
    if s == 0 {
        return Err(Error::InvalidArgument("block size must be >= 1".into()));
    }
    let spec = SignalSetSpec::effectively_sparse(x.len(), s as f64)?;
    if !spec.contains(x) {
        return Err(Error::NotInK);
    }
    let v = x.as_slice();
    let support: Vec<usize> = magnitude_order(v).into_iter().filter(|&i| v[i] != 0.0).collect();
    support
        .chunks(s)
        .map(|chunk| {
            let mut block = vec![0.0; v.len()];
            for &i in chunk {
                block[i] = v[i];
            }
            SignalVector::new(block)
        })
        .collect()
}

fn gaussian_unit_on(rng: &mut impl Rng, n: usize, support: &[usize]) -> Vec<f64> {
    loop {
        let mut v = vec![0.0; n];
        for &i in support {
            v[i] = rng.sample(StandardNormal);
        }
        let norm = l2(&v);
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

const PERTURBATION_TRIES: usize = 40;

/// Unit vectors in K(n, s), i.e. on the sphere with ||x||_1 <= sqrt(s).
///
/// Even-indexed samples are uniformly random floor(s)-sparse unit vectors.
/// Odd-indexed samples perturb such a vector by dense Gaussian noise and
/// renormalize, halving the noise level until the l1 constraint holds (and
/// falling back to the unperturbed vector after a fixed number of halvings).
/// When `s >= n` both halves are uniform on the sphere.
pub fn sample_sphere_cap(spec: &SignalSetSpec, count: usize, seed: u64) -> Result<Vec<SignalVector>> {
    if spec.kind != SignalSetKind::EffectivelySparse {
        return Err(Error::InvalidArgument("sampler expects an effectively sparse set".into()));
    }
    if spec.s < 1.0 {
        return Err(Error::SparsityOutOfRange { s: spec.s, n: spec.n });
    }
    let n = spec.n;
    let t = (spec.s.floor() as usize).min(n);
    let radius = spec.s.sqrt();
    (0..count)
        .map(|k| {
            let mut rng = stream_rng(derive_seed(seed, &[k as u64]), streams::SAMPLER);
            let support = index::sample(&mut rng, n, t).into_vec();
            let base = gaussian_unit_on(&mut rng, n, &support);
            if k % 2 == 0 {
                return SignalVector::new(base);
            }
            let noise: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let mut sigma = 0.5 / (n as f64).sqrt();
            for _ in 0..PERTURBATION_TRIES {
                let candidate: Vec<f64> = base.iter().zip(&noise).map(|(b, z)| b + sigma * z).collect();
                let norm = l2(&candidate);
                if norm > 0.0 {
                    let unit: Vec<f64> = candidate.iter().map(|v| v / norm).collect();
                    if l1(&unit) <= radius {
                        return SignalVector::new(unit);
                    }
                }
                sigma *= 0.5;
            }
            SignalVector::new(base)
        })
        .collect()
}

/// Points of K(n, s) itself: sphere samples from [`sample_sphere_cap`], half
/// of them kept on the sphere and half shrunk by a uniform radius in (0, 1).
pub fn sample_signal_set(spec: &SignalSetSpec, count: usize, seed: u64) -> Result<Vec<SignalVector>> {
    let mut rng = stream_rng(derive_seed(seed, &[u64::MAX]), streams::SAMPLER);
    sample_sphere_cap(spec, count, seed)?
        .into_iter()
        .map(|x| {
            let r: f64 = if rng.random::<bool>() { 1.0 } else { rng.random::<f64>() };
            if r == 0.0 {
                Ok(x)
            } else {
                x.scaled(r)
            }
        })
        .collect()
}

/// Number of rows with `<a_i, x> > margin` and `<a_i, y> < -margin`.
pub fn separation_count(a: &MeasurementEnsemble, x: &SignalVector, y: &SignalVector, margin: f64) -> usize {
    a.iter_rows()
        .filter(|row| dot(row, x.as_slice()) > margin && dot(row, y.as_slice()) < -margin)
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationEstimate {
    pub probability: f64,
    pub margin: f64,
    pub trials: usize,
    /// Binomial standard error sqrt(p (1 - p) / trials).
    pub std_error: f64,
}

/// Monte Carlo estimate of P(<a, x> > margin, <a, y> < -margin) for a
/// standard Gaussian vector `a`. Calls with the same seed share their draws,
/// so estimates at increasing margins are non-increasing.
pub fn separation_probability(
    x: &SignalVector,
    y: &SignalVector,
    margin: f64,
    trials: usize,
    seed: u64,
) -> Result<SeparationEstimate> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let mut rng = stream_rng(seed, streams::PROBE);
    let mut row = vec![0.0; x.len()];
    let mut hits = 0usize;
    for _ in 0..trials {
        for v in &mut row {
            *v = rng.sample(StandardNormal);
        }
        if dot(&row, x.as_slice()) > margin && dot(&row, y.as_slice()) < -margin {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok(SeparationEstimate {
        probability: p,
        margin,
        trials,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
    })
}

/// Separation probability at margin `delta / 12` for unit vectors at
/// distance at least `delta`.
pub fn single_hyperplane_separation_prob(
    x: &SignalVector,
    y: &SignalVector,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<SeparationEstimate> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    separation_probability(x, y, delta / SEPARATION_MARGIN_DIVISOR, trials, seed)
}
