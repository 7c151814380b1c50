//! Continuous-time AR(1) (Ornstein-Uhlenbeck) processes observed at random
//! sampling times.
//!
//! The crate covers the whole chain from simulation to design:
//!
//! * [`spacing`]: inter-sample spacing laws and their Laplace transforms,
//!   derivatives and renewal integrals.
//! * [`process`]: exact simulation of the sampled process.
//! * [`estimators`]: the distribution-free moment estimator, the closed-form
//!   MLE for uniform sampling and a profiled numeric MLE for irregular times.
//! * [`asymptotics`]: closed-form large-sample bias and variance constants.
//! * [`design`]: optimal average sampling rates for exponential and shifted
//!   exponential spacing.
//! * [`oracle`]: brute-force finite-sample moments used to cross-check the
//!   asymptotic constants.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the
//! parallel Monte Carlo harness live in the `ousample` crate.

#![no_std]

extern crate alloc;

pub mod asymptotics;
pub mod design;
mod error;
pub mod estimators;
mod math;
pub mod optimize;
pub mod oracle;
pub mod process;
pub mod quadrature;
pub mod rng;
pub mod spacing;
pub mod stats;

pub use asymptotics::AsymptoticSummary;
pub use error::{Error, Result};
pub use estimators::{EstimateReport, EstimateStatus, FailureReason, Method};
pub use process::{ProcessParams, SampledPath};
pub use spacing::SpacingLaw;
