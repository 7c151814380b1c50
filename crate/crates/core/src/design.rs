//! Optimal average sampling rates.
//!
//! Spacings are exponential with rate `beta`, optionally shifted by a minimum
//! separation `delta`. For a drift `alpha` (or a range of drifts) the rate is
//! chosen to minimize the large-sample bias or variance constant of the
//! moment estimator of `alpha`.
//!
//! Relative bias means `|n bias(alpha_hat)| / alpha`. Bias is minimized in
//! absolute value; in the unshifted case the constant is positive, so this is
//! the same as minimizing the bias itself.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::asymptotics::theorem1_limits;
use crate::optimize::{log_space, minimize_log_scale};
use crate::process::ProcessParams;
use crate::spacing::SpacingLaw;
use crate::{Error, Result};

/// Points in the bracketing scan over `beta`.
pub const SCAN_POINTS: usize = 200;
/// Relative width at which golden-section refinement in `ln beta` stops.
pub const REL_TOL: f64 = 1e-10;
/// Default search range for `beta`.
pub const DEFAULT_BETA_BOUNDS: (f64, f64) = (1e-2, 1e3);
/// Default number of drifts in the minimax inner grid.
pub const DEFAULT_MINIMAX_GRID: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Exponential,
    ShiftedExponential { delta: f64 },
}

impl Family {
    pub fn delta(&self) -> f64 {
        match *self {
            Family::Exponential => 0.0,
            Family::ShiftedExponential { delta } => delta,
        }
    }

    /// The spacing law at rate `beta`.
    pub fn law(&self, beta: f64) -> SpacingLaw {
        match *self {
            Family::Exponential => SpacingLaw::Exponential { beta },
            Family::ShiftedExponential { delta } => SpacingLaw::ShiftedExponential { delta, beta },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.delta();
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::param("delta", "finite and >= 0", d));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[serde(alias = "bias")]
    AbsBias,
    Variance,
    MinimaxRelativeBias,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::AbsBias => "abs_bias",
            Criterion::Variance => "variance",
            Criterion::MinimaxRelativeBias => "minimax_relative_bias",
        }
    }
}

impl core::fmt::Display for Criterion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where the drift enters the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// A single drift, for the pointwise criteria.
    Alpha(f64),
    /// A drift range and the size of its log-spaced grid, for minimax.
    Interval { lo: f64, hi: f64, grid_size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignProblem {
    pub family: Family,
    pub criterion: Criterion,
    pub target: Target,
    pub beta_bounds: (f64, f64),
}

impl DesignProblem {
    pub fn pointwise(family: Family, criterion: Criterion, alpha: f64) -> Self {
        DesignProblem {
            family,
            criterion,
            target: Target::Alpha(alpha),
            beta_bounds: DEFAULT_BETA_BOUNDS,
        }
    }

    pub fn minimax(family: Family, alpha_lo: f64, alpha_hi: f64, grid_size: usize) -> Self {
        DesignProblem {
            family,
            criterion: Criterion::MinimaxRelativeBias,
            target: Target::Interval {
                lo: alpha_lo,
                hi: alpha_hi,
                grid_size,
            },
            beta_bounds: DEFAULT_BETA_BOUNDS,
        }
    }

    pub fn with_beta_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.beta_bounds = (lo, hi);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        let (lo, hi) = self.beta_bounds;
        if !(lo.is_finite() && lo > 0.0) {
            return Err(Error::param("beta_lo", "finite and > 0", lo));
        }
        if !(hi.is_finite() && lo < hi) {
            return Err(Error::InvalidBounds { name: "beta", lo, hi });
        }
        match (self.criterion, self.target) {
            (Criterion::MinimaxRelativeBias, Target::Interval { lo, hi, grid_size }) => {
                if !(lo.is_finite() && lo > 0.0) {
                    return Err(Error::param("alpha_lo", "finite and > 0", lo));
                }
                if !(hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidBounds { name: "alpha", lo, hi });
                }
                if grid_size < 10 {
                    return Err(Error::param("grid_size", ">= 10", grid_size as f64));
                }
            }
            (Criterion::MinimaxRelativeBias, Target::Alpha(a)) => {
                return Err(Error::param("alpha_interval", "given for the minimax criterion", a));
            }
            (_, Target::Alpha(a)) => {
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::param("alpha", "finite and > 0", a));
                }
            }
            (_, Target::Interval { lo, .. }) => {
                return Err(Error::param("alpha", "a single value for pointwise criteria", lo));
            }
        }
        Ok(())
    }

    /// The objective at rate `beta`; `+inf` where the constants are undefined.
    pub fn objective(&self, beta: f64) -> f64 {
        let law = self.family.law(beta);
        match (self.criterion, self.target) {
            (Criterion::AbsBias, Target::Alpha(a)) => limits(a, &law).map_or(f64::INFINITY, |t| t.0.abs()),
            (Criterion::Variance, Target::Alpha(a)) => limits(a, &law).map_or(f64::INFINITY, |t| t.1),
            (_, Target::Interval { lo, hi, grid_size }) => log_space(lo, hi, grid_size)
                .into_iter()
                .map(|a| limits(a, &law).map_or(f64::INFINITY, |t| t.0.abs() / a))
                .fold(f64::NEG_INFINITY, f64::max),
            _ => f64::INFINITY,
        }
    }
}

/// `(n bias, n Var)` of `alpha_hat`. `sigma2` does not enter either.
fn limits(alpha: f64, law: &SpacingLaw) -> Result<(f64, f64)> {
    let t = theorem1_limits(&ProcessParams::new(alpha, 1.0)?, law)?;
    Ok((t.alpha_bias_n, t.alpha_var_n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignSolution {
    pub beta_star: f64,
    pub objective_value: f64,
    pub criterion: Criterion,
    /// The minimizer lies at one of the `beta` bounds.
    pub at_boundary: bool,
    /// The bracketing scan as `(beta, objective)` pairs.
    pub scan: Vec<(f64, f64)>,
}

/// Minimizes the problem's objective over `beta`: a log-spaced scan of
/// [`SCAN_POINTS`] brackets the minimum, golden-section search in `ln beta`
/// refines it. Minima at a bound are flagged, not rejected.
pub fn optimize_rate(problem: &DesignProblem) -> Result<DesignSolution> {
    problem.validate()?;
    let (lo, hi) = problem.beta_bounds;
    let m = minimize_log_scale(|b| problem.objective(b), lo, hi, SCAN_POINTS, REL_TOL);
    Ok(DesignSolution {
        beta_star: m.x,
        objective_value: m.value,
        criterion: problem.criterion,
        at_boundary: m.at_boundary,
        scan: m.scan,
    })
}

/// Minimax relative bias over `[alpha_lo, alpha_hi]`, with the inner maximum
/// taken over `grid_size` log-spaced drifts.
pub fn minimax_relative_bias(
    family: Family,
    alpha_interval: (f64, f64),
    beta_bounds: (f64, f64),
    grid_size: usize,
) -> Result<DesignSolution> {
    let problem = DesignProblem::minimax(family, alpha_interval.0, alpha_interval.1, grid_size)
        .with_beta_bounds(beta_bounds.0, beta_bounds.1);
    optimize_rate(&problem)
}

/// One row of a rate curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub alpha: f64,
    pub criterion: Criterion,
    pub beta_star: Option<f64>,
    pub objective: Option<f64>,
    /// `ok`, `boundary`, or `error: <message>`.
    pub status: String,
}

/// Optimal rate at each drift of `alpha_grid` for a pointwise criterion.
/// A failing point becomes a row with an error status instead of aborting.
pub fn rate_curve(
    family: Family,
    criterion: Criterion,
    alpha_grid: &[f64],
    beta_bounds: (f64, f64),
) -> Result<Vec<CurvePoint>> {
    if alpha_grid.is_empty() {
        return Err(Error::param("alpha_grid", "non-empty", 0.0));
    }
    if criterion == Criterion::MinimaxRelativeBias {
        return Err(Error::param("criterion", "abs_bias or variance for a curve", f64::NAN));
    }
    family.validate()?;
    Ok(alpha_grid
        .iter()
        .map(|&alpha| {
            let problem = DesignProblem::pointwise(family, criterion, alpha).with_beta_bounds(beta_bounds.0, beta_bounds.1);
            match optimize_rate(&problem) {
                Ok(s) => CurvePoint {
                    alpha,
                    criterion,
                    beta_star: Some(s.beta_star),
                    objective: Some(s.objective_value),
                    status: if s.at_boundary { "boundary" } else { "ok" }.to_string(),
                },
                Err(e) => CurvePoint {
                    alpha,
                    criterion,
                    beta_star: None,
                    objective: None,
                    status: alloc::format!("error: {e}"),
                },
            }
        })
        .collect())
}

/// Outcome of [`audit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Audit {
    pub passed: bool,
    pub grid_min: f64,
    pub grid_argmin: f64,
    pub objective_at_star: f64,
}

/// Scans `grid` log-spaced rates and checks that none beats `beta_star` by
/// more than `1e-6` relative.
pub fn audit(problem: &DesignProblem, beta_star: f64, grid: usize) -> Audit {
    let (lo, hi) = problem.beta_bounds;
    let at_star = problem.objective(beta_star);
    let (grid_argmin, grid_min) = log_space(lo, hi, grid)
        .into_iter()
        .map(|b| (b, problem.objective(b)))
        .fold((f64::NAN, f64::INFINITY), |best, p| if p.1 < best.1 { p } else { best });
    Audit {
        passed: at_star - 1e-6 * at_star.abs() <= grid_min,
        grid_min,
        grid_argmin,
        objective_at_star: at_star,
    }
}
