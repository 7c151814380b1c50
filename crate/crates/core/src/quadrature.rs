//! Gauss-Legendre quadrature, plain and on mapped half-lines.

use alloc::vec::Vec;

use crate::math::cos;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on `P_n` from the usual cosine
    /// starting guesses. Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a quadrature rule needs at least one node");
        if n == 1 {
            return GaussLegendre {
                nodes: alloc::vec![0.0],
                weights: alloc::vec![2.0],
            };
        }
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// `∫_offset^∞ f(t) dt` through `t = offset + scale·u/(1 - u)`, `u ∈ [0, 1)`.
    ///
    /// Panels in `u` are bisected until the one-panel and two-half estimates
    /// agree to `tol` (absolute or relative, whichever is looser), or the
    /// panel depth reaches `max_depth`.
    pub fn integrate_half_line<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        offset: f64,
        scale: f64,
        tol: f64,
        max_depth: usize,
    ) -> f64 {
        let mut g = |u: f64| {
            let v = 1.0 - u;
            let t = offset + scale * u / v;
            let jac = scale / (v * v);
            let y = f(t) * jac;
            if y.is_finite() {
                y
            } else {
                0.0
            }
        };
        let whole = self.integrate(&mut g, 0.0, 1.0);
        self.refine(&mut g, 0.0, 1.0, whole, tol, max_depth)
    }

    fn refine<F: FnMut(f64) -> f64>(&self, g: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let left = self.integrate(&mut *g, a, m);
        let right = self.integrate(&mut *g, m, b);
        let split = left + right;
        if depth == 0 || (split - whole).abs() <= tol.max(tol * split.abs()) {
            return split;
        }
        self.refine(g, a, m, left, 0.5 * tol, depth - 1) + self.refine(g, m, b, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::exp;
    use approx::assert_relative_eq;

    #[test]
    fn small_rules_match_tables() {
        let r = GaussLegendre::new(2);
        assert_relative_eq!(r.nodes()[1], 1.0 / libm::sqrt(3.0), epsilon = 1e-15);
        assert_relative_eq!(r.weights()[0], 1.0, epsilon = 1e-15);
        let r = GaussLegendre::new(3);
        assert_relative_eq!(r.nodes()[2], libm::sqrt(0.6), epsilon = 1e-15);
        assert_relative_eq!(r.weights()[1], 8.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(r.weights()[0], 5.0 / 9.0, epsilon = 1e-15);
        assert_eq!(GaussLegendre::new(1).weights(), &[2.0]);
    }

    #[test]
    fn weights_sum_to_two_and_polynomials_are_exact() {
        for n in [4, 17, 64, 128] {
            let r = GaussLegendre::new(n);
            assert_relative_eq!(r.weights().iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            assert!(r.nodes().windows(2).all(|w| w[1] > w[0]));
            // degree 2n - 1 is integrated exactly
            let deg = 2 * n - 2;
            let exact = 2.0 / (deg as f64 + 1.0);
            assert_relative_eq!(r.integrate(|x| x.powi(deg as i32), -1.0, 1.0), exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn half_line_exponential_moments() {
        let r = GaussLegendre::new(32);
        let v = r.integrate_half_line(|t| exp(-2.0 * t), 0.0, 0.5, 1e-14, 20);
        assert_relative_eq!(v, 0.5, max_relative = 1e-12);
        let v = r.integrate_half_line(|t| t * t * exp(-t), 0.0, 1.0, 1e-14, 20);
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
        let v = r.integrate_half_line(|t| exp(-3.0 * (t - 0.5)), 0.5, 1.0, 1e-14, 20);
        assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-12);
    }
}
