//! Sample moments and their Monte Carlo standard errors.
//!
//! Variances and covariances use the `n - 1` denominator. Standard errors of
//! a sample variance or covariance are delete-one jackknife estimates, using
//! the closed-form leave-one-out update so the cost stays linear.

use crate::math::sqrt;

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn variance(x: &[f64]) -> f64 {
    covariance(x, x)
}

/// Unbiased sample covariance. Panics if the lengths differ.
pub fn covariance(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "covariance needs paired samples");
    let n = x.len();
    if n < 2 {
        return f64::NAN;
    }
    let (mx, my) = (mean(x), mean(y));
    let s: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    s / (n - 1) as f64
}

/// `sd / sqrt(n)`.
pub fn se_mean(x: &[f64]) -> f64 {
    sqrt(variance(x) / x.len() as f64)
}

/// Jackknife standard error of [`variance`].
pub fn jackknife_se_variance(x: &[f64]) -> f64 {
    jackknife_se_covariance(x, x)
}

/// Jackknife standard error of [`covariance`].
pub fn jackknife_se_covariance(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "covariance needs paired samples");
    let n = x.len();
    if n < 3 {
        return f64::NAN;
    }
    let nf = n as f64;
    let (mx, my) = (mean(x), mean(y));
    let total: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    // Leaving out i changes the centred cross-product sum by n/(n-1) d_i e_i.
    let loo = |i: usize| (total - nf / (nf - 1.0) * (x[i] - mx) * (y[i] - my)) / (nf - 2.0);
    let avg = (0..n).map(loo).sum::<f64>() / nf;
    let ss: f64 = (0..n).map(|i| (loo(i) - avg) * (loo(i) - avg)).sum();
    sqrt((nf - 1.0) / nf * ss)
}
