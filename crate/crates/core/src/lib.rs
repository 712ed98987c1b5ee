//! One-bit compressed sensing by linear programming.
//!
//! The crate recovers the direction of an effectively sparse signal from the
//! signs of Gaussian measurements by solving an l1-minimization linear
//! program, and ships the geometric and statistical machinery used to check
//! the behavior of that decoder empirically:
//!
//! * [`measurement`]: seeded signals, measurement ensembles, sign quantization.
//! * [`lp`]: a dense revised simplex solver plus a brute-force vertex oracle.
//! * [`recovery`]: the recovery program, its vertex certificate and a
//!   small-scale non-convex reference decoder.
//! * [`geometry`]: hard-threshold nets, block decompositions, sampling of
//!   effectively sparse unit vectors and hyperplane tessellations.
//! * [`harness`]: Monte Carlo sweeps, concentration checks, CSV output and
//!   the `onebit` command line.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod lp;
pub mod measurement;
pub mod recovery;
pub mod rng;

pub use error::{Error, Result};
pub use lp::{LinearProgram, LpSolution, LpStatus, ToleranceConfig};
pub use measurement::{Distribution, MagnitudeModel, MeasurementEnsemble, SignPattern, SignalVector};
pub use recovery::{RecoveryResult, VertexCertificate};
