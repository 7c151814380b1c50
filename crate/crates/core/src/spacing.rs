//! Inter-sample spacing laws.
//!
//! A [`SpacingLaw`] describes the i.i.d. gaps between consecutive sampling
//! times. Everything the estimator and the asymptotic formulas need from it is
//! exposed here: the Laplace transform `g(s) = E[exp(-s Δ)]`, its first two
//! derivatives, its inverse, and the renewal integral
//! `R(s) = ∫ exp(-s v) H(v) dv` where `H` is the renewal density.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math::{exp, ln};
use crate::{Error, Result};

/// Closed family of spacing distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpacingLaw {
    /// Deterministic spacing `delta` (a point mass).
    Uniform { delta: f64 },
    /// Exponential gaps with rate `beta` (Poisson sampling).
    Exponential { beta: f64 },
    /// `delta + Exp(beta)`: exponential gaps with a hard minimum separation.
    #[serde(alias = "truncated", alias = "truncated_exponential")]
    ShiftedExponential { delta: f64, beta: f64 },
}

const INVERSE_REL_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 200;

impl SpacingLaw {
    pub fn uniform(delta: f64) -> Result<Self> {
        let law = SpacingLaw::Uniform { delta };
        law.validate()?;
        Ok(law)
    }

    pub fn exponential(beta: f64) -> Result<Self> {
        let law = SpacingLaw::Exponential { beta };
        law.validate()?;
        Ok(law)
    }

    pub fn shifted_exponential(delta: f64, beta: f64) -> Result<Self> {
        let law = SpacingLaw::ShiftedExponential { delta, beta };
        law.validate()?;
        Ok(law)
    }

    /// Checks the parameter constraints. Values built through the
    /// constructors are always valid; deserialized values should be checked.
    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, "finite and > 0", v))
            }
        };
        match *self {
            SpacingLaw::Uniform { delta } => positive("delta", delta),
            SpacingLaw::Exponential { beta } => positive("beta", beta),
            SpacingLaw::ShiftedExponential { delta, beta } => {
                if !(delta.is_finite() && delta >= 0.0) {
                    return Err(Error::param("delta", "finite and >= 0", delta));
                }
                positive("beta", beta)
            }
        }
    }

    /// `(delta, Some(beta))` for the exponential laws (`delta = 0` for the
    /// plain one) and `(delta, None)` for the point mass, which is the
    /// `beta -> inf` limit.
    fn shift_and_rate(&self) -> (f64, Option<f64>) {
        match *self {
            SpacingLaw::Uniform { delta } => (delta, None),
            SpacingLaw::Exponential { beta } => (0.0, Some(beta)),
            SpacingLaw::ShiftedExponential { delta, beta } => (delta, Some(beta)),
        }
    }

    /// Mean spacing.
    pub fn mean(&self) -> f64 {
        match self.shift_and_rate() {
            (delta, None) => delta,
            (delta, Some(beta)) => delta + 1.0 / beta,
        }
    }

    /// Density of the spacing at `t`, or `None` for the point mass.
    pub fn density(&self, t: f64) -> Option<f64> {
        match self.shift_and_rate() {
            (_, None) => None,
            (delta, Some(beta)) => Some(if t < delta {
                0.0
            } else {
                beta * exp(-beta * (t - delta))
            }),
        }
    }

    /// Laplace transform `g(s) = E[exp(-s Δ)]`, in `(0, 1)` for `s > 0`.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        check_arg(s)?;
        Ok(match self.shift_and_rate() {
            (delta, None) => exp(-s * delta),
            (delta, Some(beta)) => beta * exp(-s * delta) / (beta + s),
        })
    }

    /// First derivative `g'(s) = -E[Δ exp(-s Δ)] < 0`.
    pub fn laplace_d1(&self, s: f64) -> Result<f64> {
        check_arg(s)?;
        Ok(match self.shift_and_rate() {
            (delta, None) => -delta * exp(-s * delta),
            (delta, Some(beta)) => {
                let bs = beta + s;
                -beta * exp(-s * delta) * (delta * bs + 1.0) / (bs * bs)
            }
        })
    }

    /// Second derivative `g''(s) = E[Δ² exp(-s Δ)] > 0`.
    pub fn laplace_d2(&self, s: f64) -> Result<f64> {
        check_arg(s)?;
        Ok(match self.shift_and_rate() {
            (delta, None) => delta * delta * exp(-s * delta),
            (delta, Some(beta)) => {
                let bs = beta + s;
                let poly = delta * delta * bs * bs + 2.0 * delta * bs + 2.0;
                beta * exp(-s * delta) * poly / (bs * bs * bs)
            }
        })
    }

    /// Renewal integral `R(s) = Σ_{k≥1} g(s)^k = g(s) / (1 - g(s))`.
    ///
    /// The k-fold convolution of the spacing density has transform `g^k`, so
    /// the integral of `exp(-s v)` against the renewal density is a geometric
    /// series.
    pub fn renewal_integral(&self, s: f64) -> Result<f64> {
        let g = self.laplace(s)?;
        // 1 - g computed without cancellation for small s.
        let one_minus_g = match self.shift_and_rate() {
            (delta, None) => -crate::math::expm1(-s * delta),
            (delta, Some(beta)) => {
                // 1 - b e^{-sd}/(b+s) = (s - b expm1(-sd)) / (b+s)
                (s - beta * crate::math::expm1(-s * delta)) / (beta + s)
            }
        };
        Ok(g / one_minus_g)
    }

    /// Solves `g(s) = y` for `s > 0`.
    ///
    /// Brackets the root (doubling the upper end, halving the lower end when
    /// needed) and then runs Newton steps that fall back to bisection whenever
    /// they leave the bracket. Stops once `|g(s) - y| <= 1e-12 y` and the
    /// Newton step is below `1e-14 s`, or after 200 iterations.
    pub fn inverse_laplace(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y < 1.0) {
            return Err(Error::Inversion(y));
        }
        let g = |s: f64| self.laplace(s).expect("bracket stays positive");

        let mut lo = 1e-12;
        while g(lo) <= y {
            lo *= 0.5;
            if lo < f64::MIN_POSITIVE {
                return Err(Error::Inversion(y));
            }
        }
        let mut hi = 1.0;
        while g(hi) >= y {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Inversion(y));
            }
        }

        let mut s = 0.5 * (lo + hi);
        for _ in 0..INVERSE_MAX_ITER {
            let residual = g(s) - y;
            if residual == 0.0 {
                break;
            }
            // g is decreasing: a positive residual means s is too small.
            if residual > 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let step = residual / self.laplace_d1(s).expect("s > 0");
            let newton = s - step;
            let inside = newton > lo && newton < hi;
            s = if inside { newton } else { 0.5 * (lo + hi) };
            if inside && residual.abs() <= INVERSE_REL_TOL * y && step.abs() <= 1e-14 * s {
                break;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        Ok(s)
    }

    /// Draws one spacing. The point mass consumes no randomness; the
    /// exponential part is `-ln(U) / beta` with `U` uniform on `(0, 1)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.shift_and_rate() {
            (delta, None) => delta,
            (delta, Some(beta)) => {
                let u: f64 = rng.sample(Open01);
                delta - ln(u) / beta
            }
        }
    }
}

fn check_arg(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const E_HALF: f64 = 0.606_530_659_712_633_4;

    fn laws() -> [SpacingLaw; 4] {
        [
            SpacingLaw::Uniform { delta: 0.3 },
            SpacingLaw::Exponential { beta: 1.0 },
            SpacingLaw::ShiftedExponential { delta: 0.5, beta: 1.0 },
            SpacingLaw::ShiftedExponential { delta: 0.1, beta: 2.5 },
        ]
    }

    const GRID: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

    #[test]
    fn laplace_examples() {
        let exp1 = SpacingLaw::exponential(1.0).unwrap();
        assert_eq!(exp1.laplace(1.0).unwrap(), 0.5);

        let shifted0 = SpacingLaw::shifted_exponential(0.0, 2.0).unwrap();
        assert_relative_eq!(shifted0.laplace(1.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(
            shifted0.laplace(1.0).unwrap(),
            SpacingLaw::Exponential { beta: 2.0 }.laplace(1.0).unwrap()
        );

        let shifted = SpacingLaw::shifted_exponential(0.5, 1.0).unwrap();
        assert_relative_eq!(shifted.laplace(1.0).unwrap(), E_HALF / 2.0, max_relative = 1e-14);
        assert_relative_eq!(shifted.laplace(1.0).unwrap(), 0.30327, epsilon = 1e-5);

        assert_relative_eq!(
            SpacingLaw::Uniform { delta: 0.3 }.laplace(2.0).unwrap(),
            libm::exp(-0.6)
        );
    }

    #[test]
    fn derivative_examples() {
        let exp1 = SpacingLaw::Exponential { beta: 1.0 };
        assert_relative_eq!(exp1.laplace_d1(1.0).unwrap(), -0.25, epsilon = 1e-15);
        assert_relative_eq!(exp1.laplace_d2(1.0).unwrap(), 0.25, epsilon = 1e-15);

        let shifted0 = SpacingLaw::ShiftedExponential { delta: 0.0, beta: 1.0 };
        assert_relative_eq!(shifted0.laplace_d1(1.0).unwrap(), -0.25, epsilon = 1e-15);

        let shifted = SpacingLaw::ShiftedExponential { delta: 0.5, beta: 1.0 };
        assert_relative_eq!(shifted.laplace_d1(1.0).unwrap(), -E_HALF / 2.0, max_relative = 1e-14);
        assert_relative_eq!(shifted.laplace_d2(1.0).unwrap(), 5.0 * E_HALF / 8.0, max_relative = 1e-14);
        assert_relative_eq!(shifted.laplace_d2(1.0).unwrap(), 0.37909, epsilon = 1e-5);
    }

    #[test]
    fn finite_differences_match_closed_form_derivatives() {
        for law in laws() {
            for s in GRID {
                let h = 1e-5 * s.max(1.0);
                let g = |x| law.laplace(x).unwrap();
                let g1 = |x| law.laplace_d1(x).unwrap();
                let fd1 = (g(s + h) - g(s - h)) / (2.0 * h);
                let fd2 = (g1(s + h) - g1(s - h)) / (2.0 * h);
                assert_relative_eq!(law.laplace_d1(s).unwrap(), fd1, max_relative = 1e-6);
                assert_relative_eq!(law.laplace_d2(s).unwrap(), fd2, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn first_derivative_central_difference_small_step() {
        let law = SpacingLaw::Exponential { beta: 1.0 };
        let h = 1e-5;
        let fd = (law.laplace(1.0 + h).unwrap() - law.laplace(1.0 - h).unwrap()) / (2.0 * h);
        assert!((fd - law.laplace_d1(1.0).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn complete_monotonicity_on_grid() {
        for law in laws() {
            let mut prev = 1.0;
            for s in GRID {
                let g = law.laplace(s).unwrap();
                assert!(g > 0.0 && g < prev);
                assert!(law.laplace_d1(s).unwrap() < 0.0);
                assert!(law.laplace_d2(s).unwrap() > 0.0);
                prev = g;
            }
        }
    }

    #[test]
    fn non_positive_argument_is_a_domain_error() {
        let law = SpacingLaw::Exponential { beta: 2.0 };
        assert_eq!(law.laplace_d2(0.0), Err(Error::Domain(0.0)));
        assert_eq!(law.laplace(-1.0), Err(Error::Domain(-1.0)));
        assert!(law.laplace_d1(f64::NAN).is_err());
        assert!(law.renewal_integral(0.0).is_err());
    }

    #[test]
    fn renewal_integral_examples() {
        let exp1 = SpacingLaw::Exponential { beta: 1.0 };
        assert_relative_eq!(exp1.renewal_integral(2.0).unwrap(), 0.5, epsilon = 1e-15);
        let exp3 = SpacingLaw::Exponential { beta: 3.0 };
        assert_relative_eq!(exp3.renewal_integral(6.0).unwrap(), 0.5, epsilon = 1e-15);

        let shifted = SpacingLaw::ShiftedExponential { delta: 0.5, beta: 1.0 };
        let g = libm::exp(-1.0) / 3.0;
        assert_relative_eq!(shifted.renewal_integral(2.0).unwrap(), g / (1.0 - g), max_relative = 1e-14);
        assert_relative_eq!(shifted.renewal_integral(2.0).unwrap(), 0.13977, epsilon = 1e-5);
    }

    #[test]
    fn poisson_renewal_density_is_constant() {
        // H(v) = beta for a Poisson process, so R(s) = beta / s.
        for beta in [0.5, 1.0, 7.0] {
            let law = SpacingLaw::Exponential { beta };
            for s in GRID {
                assert_relative_eq!(law.renewal_integral(s).unwrap(), beta / s, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let exp1 = SpacingLaw::Exponential { beta: 1.0 };
        assert_relative_eq!(exp1.inverse_laplace(0.5).unwrap(), 1.0, max_relative = 1e-11);
        let exp2 = SpacingLaw::Exponential { beta: 2.0 };
        let s = exp2.inverse_laplace(0.8).unwrap();
        assert_relative_eq!(s, 0.5, max_relative = 1e-11);
        assert_relative_eq!(exp2.laplace(s).unwrap(), 0.8, max_relative = 1e-12);

        let shifted = SpacingLaw::ShiftedExponential { delta: 0.5, beta: 1.0 };
        assert_relative_eq!(shifted.inverse_laplace(0.30327).unwrap(), 1.0, epsilon = 1e-4);
        assert_relative_eq!(
            shifted.inverse_laplace(E_HALF / 2.0).unwrap(),
            1.0,
            max_relative = 1e-10
        );
    }

    #[test]
    fn inverse_round_trip_on_grid() {
        for law in laws() {
            for s in GRID {
                let y = law.laplace(s).unwrap();
                assert_relative_eq!(law.inverse_laplace(y).unwrap(), s, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn inverse_handles_extreme_targets() {
        let law = SpacingLaw::Exponential { beta: 1.0 };
        // Exact inverse is beta (1 - y) / y.
        for y in [1e-9, 1e-3, 0.999_999, 1.0 - 1e-9] {
            let s = law.inverse_laplace(y).unwrap();
            assert_relative_eq!(s, (1.0 - y) / y, max_relative = 1e-6);
        }
    }

    #[test]
    fn inverse_rejects_out_of_range() {
        let law = SpacingLaw::Exponential { beta: 1.0 };
        for y in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(law.inverse_laplace(y), Err(Error::Inversion(_))));
        }
    }

    #[test]
    fn zero_shift_reduces_to_exponential() {
        let a = SpacingLaw::ShiftedExponential { delta: 0.0, beta: 1.7 };
        let b = SpacingLaw::Exponential { beta: 1.7 };
        for s in GRID {
            assert_eq!(a.laplace(s), b.laplace(s));
            assert_eq!(a.laplace_d1(s), b.laplace_d1(s));
            assert_eq!(a.laplace_d2(s), b.laplace_d2(s));
            assert_eq!(a.renewal_integral(s), b.renewal_integral(s));
            let y = b.laplace(s).unwrap();
            assert_eq!(a.inverse_laplace(y), b.inverse_laplace(y));
        }
        assert_eq!(a.mean(), b.mean());
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(a.sample(&mut r1), b.sample(&mut r2));
        }
    }

    #[test]
    fn samplers() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let uniform = SpacingLaw::Uniform { delta: 0.3 };
        for _ in 0..10 {
            assert_eq!(uniform.sample(&mut rng), 0.3);
        }

        let shifted = SpacingLaw::ShiftedExponential { delta: 0.5, beta: 2.0 };
        for _ in 0..10_000 {
            assert!(shifted.sample(&mut rng) >= 0.5);
        }

        let exp2 = SpacingLaw::Exponential { beta: 2.0 };
        let draws = 1_000_000;
        let mean = (0..draws).map(|_| exp2.sample(&mut rng)).sum::<f64>() / draws as f64;
        // sd of Exp(2) is 0.5
        let se = 0.5 / libm::sqrt(draws as f64);
        assert!((mean - 0.5).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn means() {
        assert_eq!(SpacingLaw::Uniform { delta: 0.2 }.mean(), 0.2);
        assert_eq!(SpacingLaw::Exponential { beta: 4.0 }.mean(), 0.25);
        assert_eq!(SpacingLaw::ShiftedExponential { delta: 0.5, beta: 2.0 }.mean(), 1.0);
    }

    #[test]
    fn constructors_validate() {
        assert!(SpacingLaw::uniform(0.0).is_err());
        assert!(SpacingLaw::exponential(0.0).is_err());
        assert!(SpacingLaw::exponential(f64::INFINITY).is_err());
        assert!(SpacingLaw::shifted_exponential(-0.1, 1.0).is_err());
        assert!(SpacingLaw::shifted_exponential(0.0, 1.0).is_ok());
        let err = SpacingLaw::exponential(-2.0).unwrap_err();
        assert_eq!(
            alloc::format!("{err}"),
            "beta must be finite and > 0 (got -2)"
        );
    }
}
