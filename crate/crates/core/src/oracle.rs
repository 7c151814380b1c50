//! Exact finite-sample moments of `T_n` and `V_n` for very short paths.
//!
//! For a centred Gaussian vector, conditionally on the sampling times,
//! `E[Xa Xb Xc Xd] = eta² (ρac ρbd + ρad ρbc + ρab ρcd)` with
//! `ρab = exp(-alpha |t_a - t_b|)`. Averaging over the times gives
//!
//! `Cov(Xa Xb, Xc Xd) = eta² (E[ρac ρbd] + E[ρad ρbc] + E[ρab ρcd] - E[ρab] E[ρcd])`.
//!
//! A product of two correlations is `exp(-alpha Σ m_k Δ_k)` where `m_k ∈ {0, 1, 2}`
//! counts how many of the two index intervals cover spacing `k`. The spacings
//! are independent, so the `(n - 1)`-dimensional integral over spacing
//! densities is the product of one-dimensional integrals `q(m alpha)`, each
//! computed by Gauss-Legendre quadrature of the spacing density. A
//! tensor-product rule applied to a separable integrand gives exactly this
//! product, so nothing is lost relative to nested quadrature.

use alloc::vec::Vec;
use serde::Serialize;

use crate::math::exp;
use crate::process::ProcessParams;
use crate::quadrature::GaussLegendre;
use crate::spacing::SpacingLaw;
use crate::{Error, Result};

/// Largest path length the oracle accepts.
pub const MAX_N: usize = 6;

/// Default number of quadrature nodes per spacing variable.
pub const DEFAULT_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteMoments {
    pub n: usize,
    pub var_tn: f64,
    pub var_vn: f64,
    pub cov_tn_vn: f64,
}

/// `E[exp(-s Δ)]` by quadrature, tabulated for `s = m alpha`, `m = 0, 1, 2`.
struct SpacingTransform {
    q: [f64; 3],
}

impl SpacingTransform {
    fn new(law: &SpacingLaw, alpha: f64, points: usize) -> Self {
        let mut q = [1.0; 3];
        match *law {
            SpacingLaw::Uniform { delta } => {
                for (m, v) in q.iter_mut().enumerate().skip(1) {
                    *v = exp(-(m as f64) * alpha * delta);
                }
            }
            SpacingLaw::Exponential { beta } | SpacingLaw::ShiftedExponential { beta, .. } => {
                let delta = law.mean() - 1.0 / beta;
                let rule = GaussLegendre::new(points);
                for (m, v) in q.iter_mut().enumerate().skip(1) {
                    let s = m as f64 * alpha;
                    let f = |t: f64| law.density(t).unwrap_or(0.0) * exp(-s * t);
                    *v = rule.integrate_half_line(f, delta, 1.0 / beta, 1e-14, 16);
                }
            }
        }
        SpacingTransform { q }
    }

    /// `E[ρ(a, b) ρ(c, d)]` (pass `c == d` for a single correlation).
    fn pair(&self, a: usize, b: usize, c: usize, d: usize, spacings: usize) -> f64 {
        let cover = |lo: usize, hi: usize, k: usize| (lo.min(hi) <= k && k < lo.max(hi)) as usize;
        (0..spacings)
            .map(|k| self.q[cover(a, b, k) + cover(c, d, k)])
            .product()
    }

    fn cov_products(&self, a: usize, b: usize, c: usize, d: usize, spacings: usize) -> f64 {
        self.pair(a, c, b, d, spacings) + self.pair(a, d, b, c, spacings) + self.pair(a, b, c, d, spacings)
            - self.pair(a, b, a, a, spacings) * self.pair(c, d, c, c, spacings)
    }
}

/// `Var(T_n)`, `Var(V_n)` and `Cov(T_n, V_n)` for `2 <= n <= 6`, with
/// `points` quadrature nodes per spacing variable.
pub fn finite_n_oracle(params: &ProcessParams, law: &SpacingLaw, n: usize, points: usize) -> Result<FiniteMoments> {
    params.validate()?;
    law.validate()?;
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::param("n", "between 2 and 6", n as f64));
    }
    if points == 0 {
        return Err(Error::param("quadrature_points", ">= 1", 0.0));
    }
    let q = SpacingTransform::new(law, params.alpha, points);
    let m = n - 1;
    let lags: Vec<(usize, usize)> = (0..m).map(|i| (i + 1, i)).collect();
    let squares: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();

    let sum = |xs: &[(usize, usize)], ys: &[(usize, usize)]| -> f64 {
        let mut s = 0.0;
        for &(a, b) in xs {
            for &(c, d) in ys {
                s += q.cov_products(a, b, c, d, m);
            }
        }
        s
    };
    let scale = params.eta() * params.eta() / (n * n) as f64;
    Ok(FiniteMoments {
        n,
        var_tn: scale * sum(&lags, &lags),
        var_vn: scale * sum(&squares, &squares),
        cov_tn_vn: scale * sum(&lags, &squares),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> ProcessParams {
        ProcessParams::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn two_point_exponential_by_hand() {
        let m = finite_n_oracle(&unit(), &SpacingLaw::Exponential { beta: 1.0 }, 2, 64).unwrap();
        // Var(X1² + X2²)/4 = (2 + 2 + 4 g(2))/4
        assert_relative_eq!(m.var_vn, 0.5 * (2.0 + 2.0 / 3.0), max_relative = 1e-12);
        assert_relative_eq!(m.var_tn, (1.0 + 2.0 / 3.0 - 0.25) / 4.0, max_relative = 1e-12);
        // Cov(X1 X2, X1² + X2²)/4 = 4 g / 4 with g = 1/2
        assert_relative_eq!(m.cov_tn_vn, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn uniform_two_point_is_closed_form() {
        let d = 0.3;
        let m = finite_n_oracle(&unit(), &SpacingLaw::Uniform { delta: d }, 2, 1).unwrap();
        assert_relative_eq!(m.var_vn, 0.5 * (2.0 + 2.0 * libm::exp(-2.0 * d)), max_relative = 1e-14);
    }

    #[test]
    fn uniform_law_matches_ar1_covariances() {
        // Deterministic times: Cov(XaXb, XcXd) = eta² (ρac ρbd + ρad ρbc).
        let d = 0.4;
        let phi = libm::exp(-d);
        let n = 5;
        let rho = |a: usize, b: usize| phi.powi((a as i32 - b as i32).abs());
        let c4 = |a, b, c, e| rho(a, c) * rho(b, e) + rho(a, e) * rho(b, c);
        let mut var_t = 0.0;
        let mut var_v = 0.0;
        let mut cov = 0.0;
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                var_t += c4(i + 1, i, j + 1, j);
            }
            for j in 0..n {
                cov += c4(i + 1, i, j, j);
            }
        }
        for i in 0..n {
            for j in 0..n {
                var_v += c4(i, i, j, j);
            }
        }
        let nn = (n * n) as f64;
        let m = finite_n_oracle(&unit(), &SpacingLaw::Uniform { delta: d }, n, 8).unwrap();
        assert_relative_eq!(m.var_tn, var_t / nn, max_relative = 1e-13);
        assert_relative_eq!(m.var_vn, var_v / nn, max_relative = 1e-13);
        assert_relative_eq!(m.cov_tn_vn, cov / nn, max_relative = 1e-13);
    }

    #[test]
    fn quadrature_transform_matches_closed_form() {
        let law = SpacingLaw::ShiftedExponential { delta: 0.5, beta: 1.3 };
        let q = SpacingTransform::new(&law, 0.8, 64);
        assert_relative_eq!(q.q[1], law.laplace(0.8).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(q.q[2], law.laplace(1.6).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn rejects_large_n() {
        let law = SpacingLaw::Exponential { beta: 1.0 };
        assert!(finite_n_oracle(&unit(), &law, 7, 64).is_err());
        assert!(finite_n_oracle(&unit(), &law, 1, 64).is_err());
        assert!(finite_n_oracle(&unit(), &law, 4, 0).is_err());
    }
}
