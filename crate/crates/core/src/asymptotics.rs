//! Large-sample constants for the moment estimator.
//!
//! With `g = g(alpha)`, `g2 = g(2 alpha)`, `g'`, `g''` the transform and its
//! derivatives, `R = R(2 alpha)` the renewal integral and
//! `B = 1 + g2 - 2 g²`:
//!
//! | quantity | limit |
//! |---|---|
//! | `E[T_n]` | `(1 - 1/n) eta g` (exact) |
//! | `E[V_n]` | `eta` (exact) |
//! | `n Var(T_n)` | `eta² [1 + g2 + 4 g² (1 + R)]` |
//! | `n Var(V_n)` | `eta² [2 + 4 R]` |
//! | `n Cov(T_n, V_n)` | `eta² 4 g (1 + R)` |
//! | `n bias(g_hat)` | `-3 g` |
//! | `n Var(g_hat)` | `B` |
//! | `n bias(alpha_hat)` | `-3 g/g' - g'' B / (2 g'³)` |
//! | `n Var(alpha_hat)` | `B / g'²` |
//! | `n bias(sigma2_hat)` | `2 eta [-g/g' - g'' B / (2 g'³)]` |
//! | `n Var(sigma2_hat)` | `4 eta² [2 alpha² + 4 alpha² R + 4 alpha g/g' + B/g'²]` |
//!
//! Only the leading constants are reported; the `o(1)` remainders are zero
//! here, so finite-`n` comparisons need `O(1/n)` slack.
//!
//! Note: `n Var(T_n)` above is the conditional-on-times part only. The
//! lag-zero term `Var(E[T_n | times]) = eta² (g2 - g²) / n` is not included,
//! and the same omission carries into `B`. Simulation shows the difference
//! (see [`conditional_mean_variance`]); the constants are kept as stated so
//! that discrepancies are visible rather than silently adjusted.

use serde::Serialize;

use crate::process::ProcessParams;
use crate::spacing::SpacingLaw;
use crate::Result;

/// All limit constants for one `(params, law)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticSummary {
    /// Sample size used for `e_tn`; `None` means the `n -> inf` limit.
    pub n: Option<usize>,
    pub e_tn: f64,
    pub e_vn: f64,
    pub n_var_tn: f64,
    pub n_var_vn: f64,
    pub n_cov_tv: f64,
    pub g_bias_n: f64,
    pub g_var_n: f64,
    pub alpha_bias_n: f64,
    pub alpha_var_n: f64,
    pub sigma2_bias_n: f64,
    pub sigma2_var_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proposition1 {
    pub e_tn: f64,
    pub e_vn: f64,
    pub n_var_tn: f64,
    pub n_var_vn: f64,
    pub n_cov_tv: f64,
}

/// Moments of `T_n` and `V_n`. `n` only enters `E[T_n]`.
pub fn proposition1(params: &ProcessParams, law: &SpacingLaw, n: usize) -> Result<Proposition1> {
    params.validate()?;
    let eta = params.eta();
    let alpha = params.alpha;
    let g = law.laplace(alpha)?;
    let g2 = law.laplace(2.0 * alpha)?;
    let r = law.renewal_integral(2.0 * alpha)?;
    let eta2 = eta * eta;
    Ok(Proposition1 {
        e_tn: (1.0 - 1.0 / n as f64) * eta * g,
        e_vn: eta,
        n_var_tn: eta2 * (1.0 + g2 + 4.0 * g * g * (1.0 + r)),
        n_var_vn: eta2 * (2.0 + 4.0 * r),
        n_cov_tv: eta2 * 4.0 * g * (1.0 + r),
    })
}

/// `(n bias(g_hat), n Var(g_hat))`.
pub fn proposition2(params: &ProcessParams, law: &SpacingLaw) -> Result<(f64, f64)> {
    params.validate()?;
    let g = law.laplace(params.alpha)?;
    let g2 = law.laplace(2.0 * params.alpha)?;
    Ok((-3.0 * g, 1.0 + g2 - 2.0 * g * g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem1 {
    pub alpha_bias_n: f64,
    pub alpha_var_n: f64,
    pub sigma2_bias_n: f64,
    pub sigma2_var_n: f64,
}

/// Bias and variance constants of `alpha_hat` and `sigma2_hat`.
pub fn theorem1_limits(params: &ProcessParams, law: &SpacingLaw) -> Result<Theorem1> {
    params.validate()?;
    let alpha = params.alpha;
    let eta = params.eta();
    let g = law.laplace(alpha)?;
    let g2 = law.laplace(2.0 * alpha)?;
    let d1 = law.laplace_d1(alpha)?;
    let d2 = law.laplace_d2(alpha)?;
    let r = law.renewal_integral(2.0 * alpha)?;
    let b = 1.0 + g2 - 2.0 * g * g;

    let curvature = d2 * b / (2.0 * d1 * d1 * d1);
    Ok(Theorem1 {
        alpha_bias_n: -3.0 * g / d1 - curvature,
        alpha_var_n: b / (d1 * d1),
        sigma2_bias_n: 2.0 * eta * (-g / d1 - curvature),
        sigma2_var_n: 4.0
            * eta
            * eta
            * (2.0 * alpha * alpha + 4.0 * alpha * alpha * r + 4.0 * alpha * g / d1 + b / (d1 * d1)),
    })
}

/// Every limit, with `e_tn` at sample size `n` when given.
pub fn summary(params: &ProcessParams, law: &SpacingLaw, n: Option<usize>) -> Result<AsymptoticSummary> {
    let p1 = proposition1(params, law, n.unwrap_or(usize::MAX))?;
    let e_tn = match n {
        Some(_) => p1.e_tn,
        None => params.eta() * law.laplace(params.alpha)?,
    };
    let (g_bias_n, g_var_n) = proposition2(params, law)?;
    let t1 = theorem1_limits(params, law)?;
    Ok(AsymptoticSummary {
        n,
        e_tn,
        e_vn: p1.e_vn,
        n_var_tn: p1.n_var_tn,
        n_var_vn: p1.n_var_vn,
        n_cov_tv: p1.n_cov_tv,
        g_bias_n,
        g_var_n,
        alpha_bias_n: t1.alpha_bias_n,
        alpha_var_n: t1.alpha_var_n,
        sigma2_bias_n: t1.sigma2_bias_n,
        sigma2_var_n: t1.sigma2_var_n,
    })
}

/// Full summary in the `n -> inf` limit.
pub fn theorem1(params: &ProcessParams, law: &SpacingLaw) -> Result<AsymptoticSummary> {
    summary(params, law, None)
}

/// `(n bias, n Var)` of `alpha_hat` for exponential spacing with rate `beta`,
/// from the rational closed forms. Independent of the transform code path.
pub fn exponential_case(alpha: f64, beta: f64) -> (f64, f64) {
    let (a, b) = (alpha, beta);
    let denom = b * b * (b + 2.0 * a);
    let bias = (b + a) * (2.0 * a * a * a + 3.0 * b * b * b + 8.0 * a * b * b + 6.0 * a * a * b) / denom;
    let var = 2.0 * a * (b + a) * (b + a) * (b * b + a * a + 3.0 * a * b) / denom;
    (bias, var)
}

/// `eta² (g(2 alpha) - g(alpha)²)`: the variance of the conditional mean of
/// one lag product, which the `n Var(T_n)` constant leaves out.
pub fn conditional_mean_variance(params: &ProcessParams, law: &SpacingLaw) -> Result<f64> {
    let eta = params.eta();
    let g = law.laplace(params.alpha)?;
    let g2 = law.laplace(2.0 * params.alpha)?;
    Ok(eta * eta * (g2 - g * g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> ProcessParams {
        ProcessParams::new(1.0, 2.0).unwrap()
    }

    const EXP1: SpacingLaw = SpacingLaw::Exponential { beta: 1.0 };

    #[test]
    fn proposition1_examples() {
        let p1 = proposition1(&unit(), &EXP1, 100).unwrap();
        assert_relative_eq!(p1.e_tn, 0.495, epsilon = 1e-15);
        assert_eq!(p1.e_vn, 1.0);
        assert_relative_eq!(p1.n_var_vn, 4.0, epsilon = 1e-14);
        assert_relative_eq!(p1.n_var_tn, 1.0 + 1.0 / 3.0 + 4.0 * 0.25 * 1.5, epsilon = 1e-14);
        assert_relative_eq!(p1.n_var_tn, 2.8333, epsilon = 1e-4);
        assert_relative_eq!(p1.n_cov_tv, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn proposition2_examples() {
        let (bias, var) = proposition2(&unit(), &EXP1).unwrap();
        assert_relative_eq!(bias, -1.5, epsilon = 1e-15);
        assert_relative_eq!(var, 5.0 / 6.0, epsilon = 1e-15);

        let fast = ProcessParams::new(50.0, 1.0).unwrap();
        let (_, var) = proposition2(&fast, &EXP1).unwrap();
        assert_relative_eq!(var, 1.0, max_relative = 0.05);
    }

    #[test]
    fn theorem1_examples() {
        let s = theorem1(&unit(), &EXP1).unwrap();
        assert_relative_eq!(s.alpha_bias_n, 38.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(s.alpha_var_n, 40.0 / 3.0, max_relative = 1e-14);
        // -g/g' = 2 and -g'' B / (2 g'^3) = 20/3 with eta = 1
        assert_relative_eq!(s.sigma2_bias_n, 2.0 * (2.0 + 20.0 / 3.0), max_relative = 1e-14);
        assert_relative_eq!(s.sigma2_bias_n, 17.3333, epsilon = 1e-4);
        // 4 [2 + 2 - 8 + 40/3]
        assert_relative_eq!(s.sigma2_var_n, 4.0 * (4.0 - 8.0 + 40.0 / 3.0), max_relative = 1e-14);
        assert_eq!(s.n, None);
        assert_eq!(s.e_tn, 0.5);
    }

    #[test]
    fn exponential_case_examples() {
        let (b, v) = exponential_case(1.0, 1.0);
        assert_relative_eq!(b, 38.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(v, 40.0 / 3.0, max_relative = 1e-14);
        // 3 (16 + 3 + 16 + 24) / 5
        assert_relative_eq!(exponential_case(2.0, 1.0).0, 35.4, max_relative = 1e-14);
        assert_relative_eq!(exponential_case(1.0, 10.0).1, 2.0 * 121.0 * 131.0 / 1200.0, max_relative = 1e-14);
        assert_relative_eq!(exponential_case(1.0, 10.0).1, 26.4183, epsilon = 1e-4);
    }

    #[test]
    fn theorem1_agrees_with_rational_forms_on_grid() {
        for alpha in [0.1, 0.5, 1.0, 2.0, 5.0] {
            for beta in [0.5, 1.0, 2.0, 10.0] {
                let p = ProcessParams::new(alpha, 1.0).unwrap();
                let s = theorem1(&p, &SpacingLaw::Exponential { beta }).unwrap();
                let (bias, var) = exponential_case(alpha, beta);
                assert_relative_eq!(s.alpha_bias_n, bias, max_relative = 1e-10);
                assert_relative_eq!(s.alpha_var_n, var, max_relative = 1e-10);
                assert!(s.alpha_var_n > 0.0 && s.sigma2_var_n > 0.0);
            }
        }
    }

    #[test]
    fn shift_to_zero_is_continuous() {
        let p = ProcessParams::new(0.7, 1.3).unwrap();
        let a = theorem1(&p, &SpacingLaw::ShiftedExponential { delta: 1e-8, beta: 2.0 }).unwrap();
        let b = theorem1(&p, &SpacingLaw::Exponential { beta: 2.0 }).unwrap();
        assert_relative_eq!(a.alpha_bias_n, b.alpha_bias_n, max_relative = 1e-6);
        assert_relative_eq!(a.alpha_var_n, b.alpha_var_n, max_relative = 1e-6);
        assert_relative_eq!(a.sigma2_bias_n, b.sigma2_bias_n, max_relative = 1e-6);
        assert_relative_eq!(a.sigma2_var_n, b.sigma2_var_n, max_relative = 1e-6);
    }

    #[test]
    fn summary_at_sample_size() {
        let s = summary(&unit(), &EXP1, Some(2000)).unwrap();
        assert_relative_eq!(s.e_tn, 0.49975, epsilon = 1e-15);
        assert_eq!(s.n, Some(2000));
    }

    #[test]
    fn truncated_law_is_finite_at_small_drift() {
        let p = ProcessParams::new(0.05, 1.0).unwrap();
        let s = theorem1(&p, &SpacingLaw::ShiftedExponential { delta: 0.5, beta: 1.0 }).unwrap();
        for v in [s.alpha_bias_n, s.alpha_var_n, s.sigma2_bias_n, s.sigma2_var_n, s.n_var_tn] {
            assert!(v.is_finite());
        }
    }

    #[test]
    fn conditional_mean_variance_value() {
        // 1/3 - 1/4
        assert_relative_eq!(conditional_mean_variance(&unit(), &EXP1).unwrap(), 1.0 / 12.0, epsilon = 1e-15);
    }
}
