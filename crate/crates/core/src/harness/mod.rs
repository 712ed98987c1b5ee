//! Experiment orchestration, statistical checks and output.

mod checks;
pub mod cli;
mod concentration;
pub mod io;
mod sweep;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::ToleranceConfig;
use crate::measurement::{Distribution, MagnitudeModel};

pub use checks::{run_check, Check, CheckParams, CheckReport};
pub use concentration::{
    bernoulli_counterexample, first_moment_deviation, verify_concentration,
    verify_uniform_concentration, BernoulliReport, ConcentrationReport, DecayFit,
    UniformConcentrationReport, GAUSSIAN_FIRST_ABSOLUTE_MOMENT,
};
pub use sweep::{run_sweep, trial_seed, SweepOutcome, SweepRow, SWEEP_CSV_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Recover,
    Sweep,
    Tessellate,
    Verify,
    Gen,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub task: Task,
    pub n: usize,
    pub s: usize,
    pub m_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub distribution: Distribution,
    pub magnitude_model: MagnitudeModel,
    pub delta: f64,
    pub tolerances: ToleranceConfig,
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn sweep(n: usize, s: usize, m_list: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            task: Task::Sweep,
            n,
            s,
            m_list,
            trials,
            seed,
            distribution: Distribution::Gaussian,
            magnitude_model: MagnitudeModel::UnitGaussian,
            delta: 0.5,
            tolerances: ToleranceConfig::default(),
            output_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be >= 1".into()));
        }
        if self.s == 0 || self.s > self.n {
            return Err(Error::SparsityOutOfRange { s: self.s as f64, n: self.n });
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if self.task == Task::Sweep && self.m_list.is_empty() {
            return Err(Error::InvalidArgument("sweep needs a non-empty m list".into()));
        }
        if self.m_list.contains(&0) && matches!(self.task, Task::Sweep | Task::Recover | Task::Gen) {
            return Err(Error::InvalidArgument("measurement counts must be >= 1".into()));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidArgument("delta must be positive".into()));
        }
        Ok(())
    }
}
