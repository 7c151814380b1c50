//! The stationary Ornstein-Uhlenbeck process and its exact simulation at
//! random sampling times.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::math::{exp, expm1, sqrt};
use crate::rng::path_rng;
use crate::spacing::SpacingLaw;
use crate::{Error, Result};

/// Drift `alpha` and innovation variance `sigma2` of
/// `dX = -alpha X dt + sigma dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessParams {
    pub alpha: f64,
    pub sigma2: f64,
}

impl ProcessParams {
    pub fn new(alpha: f64, sigma2: f64) -> Result<Self> {
        let params = ProcessParams { alpha, sigma2 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::param("alpha", "finite and > 0", self.alpha));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::param("sigma2", "finite and > 0", self.sigma2));
        }
        Ok(())
    }

    /// Stationary variance `sigma2 / (2 alpha)`.
    pub fn eta(&self) -> f64 {
        self.sigma2 / (2.0 * self.alpha)
    }
}

/// Observation times and the process values at those times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl SampledPath {
    /// Builds a path, checking equal lengths, finiteness and strictly
    /// increasing times.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidPath(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::InvalidPath("path is empty".into()));
        }
        if let Some(i) = times.iter().chain(&values).position(|v| !v.is_finite()) {
            return Err(Error::InvalidPath(format!(
                "non-finite entry at position {}",
                i % times.len()
            )));
        }
        if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath(format!(
                "times must be strictly increasing (t[{}] = {} >= t[{}] = {})",
                k,
                times[k],
                k + 1,
                times[k + 1]
            )));
        }
        Ok(SampledPath { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Gaps `t[k] - t[k-1]`, one fewer than the number of observations.
    pub fn spacings(&self) -> impl Iterator<Item = f64> + '_ {
        self.times.windows(2).map(|w| w[1] - w[0])
    }

    /// `t_n - t_1`.
    pub fn span(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    pub(crate) fn require_len(&self, min: usize) -> Result<()> {
        if self.len() < min {
            return Err(Error::InvalidPath(format!(
                "need at least {min} observations, got {}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Exact transition: `x_prev e^{-alpha dt} + sqrt(eta (1 - e^{-2 alpha dt})) z`.
pub fn transition(params: &ProcessParams, x_prev: f64, dt: f64, gaussian_draw: f64) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", "finite and > 0", dt));
    }
    Ok(step(params.alpha, params.eta(), x_prev, dt, gaussian_draw))
}

#[inline]
fn step(alpha: f64, eta: f64, x_prev: f64, dt: f64, z: f64) -> f64 {
    let sd = sqrt(-eta * expm1(-2.0 * alpha * dt));
    x_prev * exp(-alpha * dt) + sd * z
}

/// Simulates `n` observations with `t_1 = 0` and `X_{t_1}` drawn from the
/// stationary law. Driven by `ChaCha8Rng::seed_from_u64(seed)`.
pub fn simulate(params: &ProcessParams, law: &SpacingLaw, n: usize, seed: u64) -> Result<SampledPath> {
    simulate_with_rng(params, law, n, &mut path_rng(seed))
}

/// Same as [`simulate`] with a caller-supplied generator.
///
/// Draw order is fixed: one standard normal for the initial value, then for
/// each step one spacing draw followed by one standard normal.
pub fn simulate_with_rng<R: Rng + ?Sized>(
    params: &ProcessParams,
    law: &SpacingLaw,
    n: usize,
    rng: &mut R,
) -> Result<SampledPath> {
    params.validate()?;
    law.validate()?;
    if n < 2 {
        return Err(Error::param("n", ">= 2", n as f64));
    }
    let (alpha, eta) = (params.alpha, params.eta());

    let mut times = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let z0: f64 = rng.sample(StandardNormal);
    let mut t = 0.0;
    let mut x = sqrt(eta) * z0;
    times.push(t);
    values.push(x);
    for _ in 1..n {
        let dt = law.sample(rng);
        let z: f64 = rng.sample(StandardNormal);
        let next_t = t + dt;
        // A spacing below the resolution of t would break monotonicity.
        assert!(next_t > t, "spacing {dt} vanished at time {t}");
        x = step(alpha, eta, x, next_t - t, z);
        t = next_t;
        times.push(t);
        values.push(x);
    }
    Ok(SampledPath { times, values })
}
