//! Property tests for the spacing laws, asymptotic constants and estimators.

use ousample_core::asymptotics::{exponential_case, theorem1};
use ousample_core::estimators::{lag_moments, moment_estimate};
use ousample_core::{ProcessParams, SampledPath, SpacingLaw};
use proptest::prelude::*;

fn law_strategy() -> impl Strategy<Value = SpacingLaw> {
    prop_oneof![
        (0.01f64..5.0).prop_map(|delta| SpacingLaw::Uniform { delta }),
        (0.05f64..20.0).prop_map(|beta| SpacingLaw::Exponential { beta }),
        (0.0f64..2.0, 0.05f64..20.0).prop_map(|(delta, beta)| SpacingLaw::ShiftedExponential { delta, beta }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn laplace_is_decreasing_into_unit_interval(law in law_strategy(), s in 1e-3f64..50.0, ds in 1e-3f64..5.0) {
        let a = law.laplace(s).unwrap();
        let b = law.laplace(s + ds).unwrap();
        prop_assert!(a > 0.0 && a < 1.0);
        prop_assert!(b < a || b == 0.0);
        prop_assert!(law.laplace_d1(s).unwrap() < 0.0);
        prop_assert!(law.laplace_d2(s).unwrap() > 0.0);
    }

    #[test]
    fn inverse_round_trips(law in law_strategy(), s in 1e-2f64..20.0) {
        let y = law.laplace(s).unwrap();
        prop_assume!(y > 1e-12 && y < 1.0 - 1e-9);
        let back = law.inverse_laplace(y).unwrap();
        prop_assert!((law.laplace(back).unwrap() - y).abs() <= 1e-10 * y);
    }

    #[test]
    fn renewal_integral_is_positive(law in law_strategy(), s in 1e-3f64..50.0) {
        let r = law.renewal_integral(s).unwrap();
        let g = law.laplace(s).unwrap();
        prop_assert!(r > 0.0 && r.is_finite());
        prop_assert!(((1.0 - g) * r - g).abs() <= 1e-9 * (1.0 + r));
    }

    #[test]
    fn theorem_matches_rational_forms(alpha in 0.01f64..20.0, beta in 0.01f64..20.0) {
        let s = theorem1(&ProcessParams::new(alpha, 1.0).unwrap(), &SpacingLaw::Exponential { beta }).unwrap();
        let (bias, var) = exponential_case(alpha, beta);
        prop_assert!((s.alpha_bias_n - bias).abs() <= 1e-9 * bias.abs());
        prop_assert!((s.alpha_var_n - var).abs() <= 1e-9 * var.abs());
    }

    #[test]
    fn variances_are_positive(alpha in 0.01f64..20.0, sigma2 in 0.01f64..10.0, law in law_strategy()) {
        let s = theorem1(&ProcessParams::new(alpha, sigma2).unwrap(), &law).unwrap();
        prop_assert!(s.n_var_tn >= 0.0 && s.n_var_vn >= 0.0 && s.g_var_n >= 0.0);
        prop_assert!(s.alpha_var_n > 0.0);
        prop_assert!(s.sigma2_var_n > 0.0);
    }

    #[test]
    fn exponential_constants_are_homogeneous(alpha in 0.05f64..5.0, beta in 0.05f64..5.0, c in 0.1f64..10.0) {
        let (b1, v1) = exponential_case(alpha, beta);
        let (b2, v2) = exponential_case(c * alpha, c * beta);
        prop_assert!((b2 - c * b1).abs() <= 1e-12 * b2.abs());
        prop_assert!((v2 - c * c * v1).abs() <= 1e-12 * v2.abs());
    }

    #[test]
    fn moment_estimator_is_scale_equivariant(seed in any::<u64>(), c in 0.1f64..10.0) {
        let law = SpacingLaw::Exponential { beta: 1.0 };
        let path = ousample_core::process::simulate(&ProcessParams::new(1.0, 2.0).unwrap(), &law, 200, seed).unwrap();
        let scaled = SampledPath::new(path.times().to_vec(), path.values().iter().map(|v| c * v).collect()).unwrap();
        let a = moment_estimate(&path, &law).unwrap();
        let b = moment_estimate(&scaled, &law).unwrap();
        prop_assert_eq!(a.status.is_ok(), b.status.is_ok());
        if let (Some(x), Some(y)) = (a.alpha_hat, b.alpha_hat) {
            prop_assert!((x - y).abs() <= 1e-9 * x);
            let (s, t) = (a.sigma2_hat.unwrap(), b.sigma2_hat.unwrap());
            prop_assert!((t - c * c * s).abs() <= 1e-9 * t);
        }
    }

    #[test]
    fn moment_report_is_coherent(seed in any::<u64>(), n in 2usize..300, law in law_strategy()) {
        let path = ousample_core::process::simulate(&ProcessParams::new(0.8, 1.5).unwrap(), &law, n, seed).unwrap();
        let r = moment_estimate(&path, &law).unwrap();
        let (t, v) = lag_moments(path.values());
        prop_assert_eq!(r.t_n, t);
        prop_assert_eq!(r.v_n, v);
        prop_assert_eq!(r.g_hat, t / v);
        prop_assert!(r.v_n > 0.0);
        match (r.status.is_ok(), r.alpha_hat, r.sigma2_hat) {
            (true, Some(a), Some(s2)) => {
                prop_assert_eq!(s2, 2.0 * a * r.v_n);
                let g = law.laplace(a).unwrap();
                prop_assert!((g - r.g_hat).abs() <= 1e-10 * r.g_hat);
            }
            (false, None, None) => prop_assert!(!(r.g_hat > 0.0 && r.g_hat < 1.0)),
            _ => prop_assert!(false, "inconsistent report {:?}", r),
        }
    }
}
