use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{sample_sphere_cap, SignalSetSpec};
use crate::measurement::{dot, gen_bernoulli_ensemble, gen_gaussian_ensemble, MeasurementEnsemble, SignalVector};
use crate::rng::{derive_seed, stream_rng, streams};

/// E|g| for g ~ N(0, 1), i.e. sqrt(2 / pi).
pub const GAUSSIAN_FIRST_ABSOLUTE_MOMENT: f64 = 0.797_884_560_802_865_4;

/// (1/m) sum |<a_i, x>| / ||x||_2 for a non-zero `x`.
fn normalized_moment(a: &MeasurementEnsemble, x: &SignalVector) -> Result<f64> {
    if a.cols() != x.len() {
        return Err(Error::DimensionMismatch { expected: a.cols(), got: x.len() });
    }
    if a.rows() == 0 {
        return Err(Error::InvalidArgument("m must be >= 1".into()));
    }
    let norm = x.l2();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let total: f64 = a.iter_rows().map(|row| dot(row, x.as_slice()).abs()).sum();
    Ok(total / (a.rows() as f64 * norm))
}

/// |(1/m) sum |<a_i, x>| / ||x||_2 - sqrt(2/pi)|. Homogeneous of degree 0 in x.
pub fn first_moment_deviation(a: &MeasurementEnsemble, x: &SignalVector) -> Result<f64> {
    Ok((normalized_moment(a, x)? - GAUSSIAN_FIRST_ABSOLUTE_MOMENT).abs())
}

/// Least-squares fit of log(exceedance) = log C - c * m t^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub log_c: f64,
    pub c: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub n: usize,
    pub m: usize,
    pub t: f64,
    /// Normalized first moment of each trial.
    pub moments: Vec<f64>,
    pub deviations: Vec<f64>,
    pub exceedance: f64,
    pub mean_moment: f64,
    pub decay_fit: Option<DecayFit>,
}

impl ConcentrationReport {
    /// Fraction of trials whose deviation exceeds `t`, on the same draws.
    pub fn exceedance_at(&self, t: f64) -> f64 {
        exceedance(&self.deviations, t)
    }
}

fn exceedance(deviations: &[f64], t: f64) -> f64 {
    if deviations.is_empty() {
        return 0.0;
    }
    deviations.iter().filter(|&&d| d > t).count() as f64 / deviations.len() as f64
}

fn fit_decay(deviations: &[f64], m: usize, t: f64) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = (1..=8)
        .map(|k| t * k as f64 / 4.0)
        .map(|tk| (m as f64 * tk * tk, exceedance(deviations, tk)))
        .filter(|&(_, e)| e > 0.0)
        .map(|(x, e)| (x, e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(DecayFit { log_c: my - slope * mx, c: -slope, points: pts.len() })
}

fn random_unit(n: usize, seed: u64) -> Result<SignalVector> {
    let mut rng = stream_rng(seed, streams::SIGNAL);
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let x = SignalVector::new(v)?;
        if !x.is_zero() {
            return x.normalized();
        }
    }
}

/// Draws a random unit x and a fresh m x n Gaussian ensemble per trial and
/// records the deviation of the normalized first absolute moment.
pub fn verify_concentration(n: usize, m: usize, trials: usize, t: f64, seed: u64) -> Result<ConcentrationReport> {
    if n == 0 || m == 0 || trials == 0 {
        return Err(Error::InvalidArgument("n, m and trials must be >= 1".into()));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let moments = (0..trials)
        .into_par_iter()
        .map(|k| {
            let trial = derive_seed(seed, &[k as u64]);
            let x = random_unit(n, derive_seed(trial, &[0]))?;
            let a = gen_gaussian_ensemble(m, n, derive_seed(trial, &[1]))?;
            normalized_moment(&a, &x)
        })
        .collect::<Result<Vec<f64>>>()?;
    let deviations: Vec<f64> = moments.iter().map(|v| (v - GAUSSIAN_FIRST_ABSOLUTE_MOMENT).abs()).collect();
    Ok(ConcentrationReport {
        n,
        m,
        t,
        mean_moment: moments.iter().sum::<f64>() / trials as f64,
        exceedance: exceedance(&deviations, t),
        decay_fit: fit_decay(&deviations, m, t),
        moments,
        deviations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformConcentrationReport {
    pub n: usize,
    pub s: usize,
    pub m: usize,
    pub t: f64,
    pub deviations: Vec<f64>,
    /// Lower bound on the supremum of the deviation over the set.
    pub max_deviation: f64,
    pub exceeds_t: bool,
}

impl UniformConcentrationReport {
    /// Same statistics for an explicit point set and ensemble.
    pub fn from_points(points: &[SignalVector], a: &MeasurementEnsemble, s: usize, t: f64) -> Result<Self> {
        let deviations = points
            .par_iter()
            .map(|p| first_moment_deviation(a, p))
            .collect::<Result<Vec<f64>>>()?;
        let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            n: a.cols(),
            s,
            m: a.rows(),
            t,
            deviations,
            max_deviation,
            exceeds_t: max_deviation > t,
        })
    }
}

/// Samples `sample_count` unit points of the effectively s-sparse set and
/// reports the largest first-moment deviation under one m x n ensemble.
pub fn verify_uniform_concentration(
    n: usize,
    s: usize,
    m: usize,
    sample_count: usize,
    t: f64,
    seed: u64,
) -> Result<UniformConcentrationReport> {
    if m == 0 || sample_count == 0 {
        return Err(Error::InvalidArgument("m and sample_count must be >= 1".into()));
    }
    let spec = SignalSetSpec::effectively_sparse(n, s as f64)?;
    let points = sample_sphere_cap(&spec, sample_count, derive_seed(seed, &[0]))?;
    let a = gen_gaussian_ensemble(m, n, derive_seed(seed, &[1]))?;
    UniformConcentrationReport::from_points(&points, &a, s, t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliReport {
    pub n: usize,
    pub m: usize,
    pub seeds: Vec<u64>,
    /// Seeds whose two sign patterns agree entrywise.
    pub identical: usize,
}

impl BernoulliReport {
    pub fn all_identical(&self) -> bool {
        self.identical == self.seeds.len()
    }
}

/// Measures x = e_1 and x' = e_1 + e_2 / 2 with symmetric Bernoulli rows.
/// |<a, e_2 / 2>| = 1/2 < 1 = |<a, e_1>|, so the two sign patterns always
/// coincide even though the directions differ.
pub fn bernoulli_counterexample(n: usize, m: usize, seeds: &[u64]) -> Result<BernoulliReport> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be >= 2".into()));
    }
    let x = SignalVector::basis(n, 0)?;
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    v[1] = 0.5;
    let x2 = SignalVector::new(v)?;
    let mut identical = 0;
    for &seed in seeds {
        let a = gen_bernoulli_ensemble(m, n, seed)?;
        if a.measure(&x)? == a.measure(&x2)? {
            identical += 1;
        }
    }
    Ok(BernoulliReport { n, m, seeds: seeds.to_vec(), identical })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_constant() {
        let exact = (2.0 / std::f64::consts::PI).sqrt();
        assert!((GAUSSIAN_FIRST_ABSOLUTE_MOMENT - exact).abs() < 1e-15);
    }

    #[test]
    fn deviation_is_scale_free() {
        let a = gen_gaussian_ensemble(300, 10, 4).unwrap();
        let x = random_unit(10, 8).unwrap();
        let big = x.scaled(5.0).unwrap();
        let d1 = first_moment_deviation(&a, &x).unwrap();
        let d5 = first_moment_deviation(&a, &big).unwrap();
        assert!((d1 - d5).abs() <= 1e-14, "{d1} vs {d5}");
    }

    #[test]
    fn nested_thresholds() {
        let report = verify_concentration(16, 400, 60, 0.02, 3).unwrap();
        assert!(report.exceedance_at(0.01) >= report.exceedance_at(0.02));
        assert_eq!(report.exceedance, report.exceedance_at(0.02));
        assert_eq!(report.deviations.len(), 60);
    }

    #[test]
    fn decay_fit_recovers_a_line() {
        // deviations spread so that exceedance decays with the threshold
        let devs: Vec<f64> = (1..=200).map(|k| 0.0005 * k as f64).collect();
        let fit = fit_decay(&devs, 100, 0.04).unwrap();
        assert!(fit.points >= 2);
        assert!(fit.c > 0.0);
    }

    #[test]
    fn single_sample_matches_pointwise() {
        let report = verify_uniform_concentration(20, 3, 500, 1, 0.1, 6).unwrap();
        let spec = SignalSetSpec::effectively_sparse(20, 3.0).unwrap();
        let p = &sample_sphere_cap(&spec, 1, derive_seed(6, &[0])).unwrap()[0];
        let a = gen_gaussian_ensemble(500, 20, derive_seed(6, &[1])).unwrap();
        assert_eq!(report.max_deviation, first_moment_deviation(&a, p).unwrap());
    }

    #[test]
    fn bernoulli_patterns_coincide() {
        let seeds: Vec<u64> = (0..5).collect();
        let report = bernoulli_counterexample(8, 300, &seeds).unwrap();
        assert!(report.all_identical());
    }

    #[test]
    fn guards() {
        assert!(verify_concentration(4, 0, 1, 0.1, 0).is_err());
        assert!(verify_concentration(4, 5, 1, 0.0, 0).is_err());
        assert!(verify_uniform_concentration(4, 2, 0, 1, 0.1, 0).is_err());
    }
}
