//! Point estimators of `(alpha, sigma2)` from a sampled path.
//!
//! * [`moment_estimate`]: `alpha_hat = g^{-1}(T_n / V_n)`,
//!   `sigma2_hat = 2 alpha_hat V_n`, where `g` is the Laplace transform of the
//!   spacing law. Uses only second moments of the stationary process.
//! * [`mle_uniform`]: closed-form Gaussian MLE for equally spaced times.
//! * [`mle_numeric`]: Gaussian likelihood with `sigma2` profiled out and the
//!   drift found numerically; works for arbitrary spacings.
//!
//! An estimator that cannot produce a number on valid input (for example a
//! negative lag-one moment) returns `Ok` with a failed [`EstimateStatus`], so
//! replicate loops can count failures. Argument errors are `Err`.

use alloc::collections::BTreeMap;
use alloc::string::String;

use serde::{Serialize, Serializer};

use crate::math::{exp, expm1, ln};
use crate::optimize::{golden_section, log_space};
use crate::process::SampledPath;
use crate::spacing::SpacingLaw;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Moment,
    MleUniform,
    MleNumeric,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Moment => "moment",
            Method::MleUniform => "mle_uniform",
            Method::MleNumeric => "mle_numeric",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureReason {
    /// `T_n / V_n` is not a possible value of the Laplace transform.
    RatioOutsideLaplaceRange,
    /// The lag-one regression coefficient is not in `(0, 1)`.
    PhiOutsideUnitInterval,
    /// The profiled likelihood keeps increasing up to the drift cap.
    AlphaUnbounded,
}

impl FailureReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureReason::RatioOutsideLaplaceRange => "ratio outside Laplace range",
            FailureReason::PhiOutsideUnitInterval => "phi outside (0,1)",
            FailureReason::AlphaUnbounded => "alpha unbounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateStatus {
    Ok,
    Failed(FailureReason),
}

impl EstimateStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, EstimateStatus::Ok)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateStatus::Ok => "ok",
            EstimateStatus::Failed(reason) => reason.as_str(),
        }
    }
}

impl core::fmt::Display for EstimateStatus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for EstimateStatus {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Outcome of one estimation. `alpha_hat` and `sigma2_hat` are `None` when
/// the estimator failed; the sample moments are always reported.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub method: Method,
    pub n: usize,
    pub alpha_hat: Option<f64>,
    pub sigma2_hat: Option<f64>,
    /// `(1/n) Σ_{i<n} X_{i+1} X_i`
    pub t_n: f64,
    /// `(1/n) Σ X_i²`
    pub v_n: f64,
    /// `T_n / V_n`
    pub g_hat: f64,
    pub status: EstimateStatus,
    pub diagnostics: BTreeMap<String, f64>,
}

impl EstimateReport {
    fn new(method: Method, path: &SampledPath) -> Self {
        let (t_n, v_n) = lag_moments(path.values());
        EstimateReport {
            method,
            n: path.len(),
            alpha_hat: None,
            sigma2_hat: None,
            t_n,
            v_n,
            g_hat: t_n / v_n,
            status: EstimateStatus::Ok,
            diagnostics: BTreeMap::new(),
        }
    }

    fn fail(mut self, reason: FailureReason) -> Self {
        self.status = EstimateStatus::Failed(reason);
        self.alpha_hat = None;
        self.sigma2_hat = None;
        self
    }

    fn diag(&mut self, key: &str, value: f64) {
        self.diagnostics.insert(key.into(), value);
    }
}

/// `(T_n, V_n)`, both normalized by `n` (so `T_n` has `n - 1` terms over `n`).
pub fn lag_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let t = values.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / n;
    let v = values.iter().map(|x| x * x).sum::<f64>() / n;
    (t, v)
}

/// Moment estimator for a path whose spacings follow `law`.
pub fn moment_estimate(path: &SampledPath, law: &SpacingLaw) -> Result<EstimateReport> {
    path.require_len(2)?;
    law.validate()?;
    let report = EstimateReport::new(Method::Moment, path);
    let ratio = report.g_hat;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Ok(report.fail(FailureReason::RatioOutsideLaplaceRange));
    }
    match law.inverse_laplace(ratio) {
        Ok(alpha) => {
            let mut report = report;
            report.alpha_hat = Some(alpha);
            report.sigma2_hat = Some(2.0 * alpha * report.v_n);
            Ok(report)
        }
        Err(Error::Inversion(_)) => Ok(report.fail(FailureReason::RatioOutsideLaplaceRange)),
        Err(e) => Err(e),
    }
}

/// Relative tolerance for recognising equally spaced times.
const UNIFORM_REL_TOL: f64 = 1e-9;

/// Closed-form MLE for spacing `delta`:
/// `phi_hat = Σ X_{i+1} X_i / Σ_{i<n} X_i²`, `alpha_hat = -ln(phi_hat) / delta`,
/// `sigma2_hat = 2 alpha_hat (1/n) Σ (X_{i+1} - phi_hat X_i)² / (1 - phi_hat²)`.
pub fn mle_uniform(path: &SampledPath, delta: f64) -> Result<EstimateReport> {
    path.require_len(2)?;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::param("delta", "finite and > 0", delta));
    }
    for (index, gap) in path.spacings().enumerate() {
        if (gap - delta).abs() > UNIFORM_REL_TOL * delta {
            return Err(Error::NonUniformTimes {
                index: index + 1,
                expected: delta,
                found: gap,
            });
        }
    }

    let x = path.values();
    let mut report = EstimateReport::new(Method::MleUniform, path);
    let num: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
    let den: f64 = x[..x.len() - 1].iter().map(|v| v * v).sum();
    let phi = num / den;
    report.diag("phi_hat", phi);
    if !(phi > 0.0 && phi < 1.0) {
        return Ok(report.fail(FailureReason::PhiOutsideUnitInterval));
    }
    let alpha = -ln(phi) / delta;
    let rss: f64 = x.windows(2).map(|w| (w[1] - phi * w[0]).powi(2)).sum();
    report.alpha_hat = Some(alpha);
    report.sigma2_hat = Some(2.0 * alpha * (rss / x.len() as f64) / (1.0 - phi * phi));
    Ok(report)
}

const MLE_ALPHA_MIN: f64 = 1e-6;
const MLE_ALPHA_START: f64 = 10.0;
const MLE_ALPHA_CAP: f64 = 1e4;
const MLE_ALPHA_TOL: f64 = 1e-8;
const MLE_GRID: usize = 64;

/// Conditional Gaussian likelihood of the transitions, profiled over the
/// stationary variance.
struct Profile<'a> {
    values: &'a [f64],
    gaps: alloc::vec::Vec<f64>,
}

impl Profile<'_> {
    /// `eta_hat(alpha) = (1/m) Σ r_k² / (1 - e^{-2 alpha Δ_k})` over the
    /// `m = n - 1` transitions, plus `Σ ln(1 - e^{-2 alpha Δ_k})`.
    fn parts(&self, alpha: f64) -> (f64, f64) {
        let mut weighted = 0.0;
        let mut log_det = 0.0;
        for (w, &gap) in self.values.windows(2).zip(&self.gaps) {
            let one_minus = -expm1(-2.0 * alpha * gap);
            let r = w[1] - exp(-alpha * gap) * w[0];
            weighted += r * r / one_minus;
            log_det += ln(one_minus);
        }
        (weighted / self.gaps.len() as f64, log_det)
    }

    /// Profiled log-likelihood, including the Gaussian normalizing constant.
    fn log_likelihood(&self, alpha: f64) -> f64 {
        let m = self.gaps.len() as f64;
        let (eta, log_det) = self.parts(alpha);
        -0.5 * m * (ln(eta) + 1.0 + ln(2.0 * core::f64::consts::PI)) - 0.5 * log_det
    }
}

/// Numeric MLE for irregularly spaced times.
///
/// Maximizes the conditional likelihood of the `n - 1` transitions with the
/// stationary variance profiled out. A log-spaced scan of
/// `[1e-6, alpha_max]` brackets the maximum (doubling `alpha_max` from 10
/// while the best scan point is the upper end, up to 1e4); golden-section
/// search then refines it to `1e-8` in `alpha`. The reported
/// `sigma2_hat = (2 alpha/n) Σ r_k² / (1 - e^{-2 alpha Δ_k})` uses the same
/// `1/n` normalization as [`mle_uniform`].
///
/// For equally spaced times the drift estimate coincides with
/// [`mle_uniform`].
pub fn mle_numeric(path: &SampledPath) -> Result<EstimateReport> {
    path.require_len(3)?;
    let profile = Profile {
        values: path.values(),
        gaps: path.spacings().collect(),
    };
    if let Some(gap) = profile.gaps.iter().find(|g| g.is_nan() || **g <= 0.0) {
        return Err(Error::param("spacing", "> 0", *gap));
    }
    let mut report = EstimateReport::new(Method::MleNumeric, path);
    let objective = |alpha: f64| -profile.log_likelihood(alpha);

    let mut alpha_max = MLE_ALPHA_START;
    let (lo, hi) = loop {
        let grid = log_space(MLE_ALPHA_MIN, alpha_max, MLE_GRID);
        let values: alloc::vec::Vec<f64> = grid
            .iter()
            .map(|&a| {
                let v = objective(a);
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            })
            .collect();
        // Ties go to the larger drift so a flat tail counts as unbounded.
        let best = (0..values.len()).fold(0, |b, i| if values[i] <= values[b] { i } else { b });
        if best + 1 < grid.len() {
            break (grid[best.saturating_sub(1)], grid[best + 1]);
        }
        if alpha_max >= MLE_ALPHA_CAP {
            report.diag("alpha_max", alpha_max);
            return Ok(report.fail(FailureReason::AlphaUnbounded));
        }
        alpha_max = (2.0 * alpha_max).min(MLE_ALPHA_CAP);
    };

    let tol = MLE_ALPHA_TOL.min(1e-9 * hi);
    let best = golden_section(objective, lo, hi, tol);
    let alpha = best.x;
    let (eta_cond, _) = profile.parts(alpha);
    let m = profile.gaps.len() as f64;
    let n = path.len() as f64;
    report.alpha_hat = Some(alpha);
    report.sigma2_hat = Some(2.0 * alpha * eta_cond * m / n);
    report.diag("log_likelihood", -best.value);
    report.diag("iterations", best.iterations as f64);
    report.diag("alpha_max", alpha_max);
    Ok(report)
}

/// Runs `method` on `path`. `law` is required for the moment estimator; the
/// uniform MLE takes its spacing from `law` when it is uniform and from the
/// first gap otherwise.
pub fn estimate(path: &SampledPath, method: Method, law: Option<&SpacingLaw>) -> Result<EstimateReport> {
    match method {
        Method::Moment => {
            let law = law.ok_or_else(|| Error::InvalidPath("moment estimator needs a spacing law".into()))?;
            moment_estimate(path, law)
        }
        Method::MleUniform => {
            path.require_len(2)?;
            let delta = match law {
                Some(SpacingLaw::Uniform { delta }) => *delta,
                _ => path.times()[1] - path.times()[0],
            };
            mle_uniform(path, delta)
        }
        Method::MleNumeric => mle_numeric(path),
    }
}
