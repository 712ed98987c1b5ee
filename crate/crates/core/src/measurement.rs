//! Signals, measurement ensembles and sign quantization.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams};

/// Dense real vector in R^n with norm accessors.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    entries: Vec<f64>,
}

impl SignalVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("signal must have n >= 1".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("signal entries must be finite".into()));
        }
        Ok(Self { entries })
    }

    /// Standard basis vector e_index in R^n.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidArgument(format!("basis index {index} >= n={n}")));
        }
        let mut entries = vec![0.0; n];
        entries[index] = 1.0;
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn l1(&self) -> f64 {
        l1(&self.entries)
    }

    pub fn l2(&self) -> f64 {
        l2(&self.entries)
    }

    pub fn linf(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Number of exactly nonzero entries.
    pub fn l0(&self) -> usize {
        self.entries.iter().filter(|v| **v != 0.0).count()
    }

    /// Indices whose magnitude exceeds `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > threshold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| *v == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.entries.iter().map(|v| v * factor).collect())
    }

    /// x / ||x||_2.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.l2();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Self::new(self.entries.iter().map(|v| v / norm).collect())
    }
}

pub(crate) fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    // scaled to avoid overflow for large entries
    let scale = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Gaussian,
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeModel {
    #[default]
    #[value(name = "unit_gaussian")]
    UnitGaussian,
    Constant,
}

/// Dense m x n measurement matrix, stored row-major.
///
/// Row `i` of a generated ensemble is drawn from stream `i` of the seed, so a
/// row never depends on how many other rows were generated. In particular the
/// first `k` rows of an `m`-row ensemble equal the `k`-row ensemble with the
/// same seed.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble {
    data: Vec<f64>,
    m: usize,
    n: usize,
    distribution: Option<Distribution>,
    seed: Option<u64>,
}

impl MeasurementEnsemble {
    /// Wraps user-supplied rows. `n` is needed to describe an empty matrix.
    pub fn from_rows(rows: Vec<Vec<f64>>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be >= 1".into()));
        }
        let m = rows.len();
        let mut data = Vec::with_capacity(m * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("matrix entries must be finite".into()));
            }
            data.extend(row);
        }
        Ok(Self { data, m, n, distribution: None, seed: None })
    }

    fn generate(m: usize, n: usize, seed: u64, distribution: Distribution) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be >= 1".into()));
        }
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            let mut rng = stream_rng(seed, i as u64);
            match distribution {
                Distribution::Gaussian => {
                    data.extend((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
                }
                Distribution::Bernoulli => {
                    data.extend((0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }))
                }
            }
        }
        Ok(Self { data, m, n, distribution: Some(distribution), seed: Some(seed) })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn distribution(&self) -> Option<Distribution> {
        self.distribution
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact on an empty slice with n >= 1 yields nothing
        self.data.chunks_exact(self.n)
    }

    /// First `k` rows as a new ensemble.
    pub fn prefix(&self, k: usize) -> Self {
        let k = k.min(self.m);
        Self {
            data: self.data[..k * self.n].to_vec(),
            m: k,
            n: self.n,
            distribution: self.distribution,
            seed: self.seed,
        }
    }

    /// Matrix-vector product A x.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self.iter_rows().map(|row| dot(row, x)).collect())
    }

    /// sign(A x).
    pub fn measure(&self, x: &SignalVector) -> Result<SignPattern> {
        sign_quantize(&self.apply(x.as_slice())?)
    }
}

/// m x n matrix of independent standard normal entries.
pub fn gen_gaussian_ensemble(m: usize, n: usize, seed: u64) -> Result<MeasurementEnsemble> {
    MeasurementEnsemble::generate(m, n, seed, Distribution::Gaussian)
}

/// m x n matrix of independent symmetric +-1 entries.
pub fn gen_bernoulli_ensemble(m: usize, n: usize, seed: u64) -> Result<MeasurementEnsemble> {
    MeasurementEnsemble::generate(m, n, seed, Distribution::Bernoulli)
}

pub fn gen_ensemble(
    m: usize,
    n: usize,
    seed: u64,
    distribution: Distribution,
) -> Result<MeasurementEnsemble> {
    MeasurementEnsemble::generate(m, n, seed, distribution)
}

/// Vector of measurement signs, each in {-1, 0, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignPattern {
    signs: Vec<i8>,
}

impl SignPattern {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|s| !(-1..=1).contains(*s)) {
            return Err(Error::InvalidArgument(format!("sign {bad} not in {{-1,0,1}}")));
        }
        Ok(Self { signs })
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_all_zero(&self) -> bool {
        self.signs.iter().all(|s| *s == 0)
    }

    pub fn zero_count(&self) -> usize {
        self.signs.iter().filter(|s| **s == 0).count()
    }
}

/// Componentwise sign with sign(0) = 0.
pub fn sign_quantize(v: &[f64]) -> Result<SignPattern> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidMeasurement);
    }
    let signs = v
        .iter()
        .map(|&x| {
            if x > 0.0 {
                1
            } else if x < 0.0 {
                -1
            } else {
                0
            }
        })
        .collect();
    Ok(SignPattern { signs })
}

/// Random s-sparse signal with a uniformly chosen support.
///
/// `UnitGaussian` draws the nonzeros from N(0, 1); `Constant` gives every
/// nonzero magnitude 1/sqrt(s) with a random sign.
pub fn gen_sparse_signal(
    n: usize,
    s: usize,
    seed: u64,
    magnitude_model: MagnitudeModel,
) -> Result<SignalVector> {
    if s == 0 || s > n {
        return Err(Error::SparsityOutOfRange { s: s as f64, n });
    }
    let mut rng = stream_rng(seed, streams::SIGNAL);
    let mut support = index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    let mut entries = vec![0.0; n];
    let level = 1.0 / (s as f64).sqrt();
    for i in support {
        entries[i] = match magnitude_model {
            MagnitudeModel::UnitGaussian => loop {
                let v: f64 = rng.sample(StandardNormal);
                if v != 0.0 {
                    break v;
                }
            },
            MagnitudeModel::Constant => {
                if rng.random::<bool>() {
                    level
                } else {
                    -level
                }
            }
        };
    }
    SignalVector::new(entries)
}

/// (||x||_1 / ||x||_2)^2.
pub fn effective_sparsity(x: &SignalVector) -> Result<f64> {
    let norm = x.l2();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((x.l1() / norm).powi(2))
}
