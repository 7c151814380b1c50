//! Properties of the replicated experiment harness.

use ousample::montecarlo::{
    aggregate, finite_n_oracle, preset, run_experiment, run_replicates, short_path_moments, ExperimentConfig,
};
use ousample_core::{ProcessParams, SpacingLaw};

fn config(n: usize, replicates: usize) -> ExperimentConfig {
    ExperimentConfig {
        n,
        replicates,
        ..preset("paper-exponential").unwrap()
    }
}

#[test]
fn reports_are_reproducible_across_worker_counts() {
    let c = config(500, 300);
    let serial = run_experiment(&c, Some(1)).unwrap();
    let parallel = run_experiment(&c, Some(4)).unwrap();
    let default = run_experiment(&c, None).unwrap();
    assert_eq!(serial, parallel);
    assert_eq!(serial, default);
    assert_eq!(
        serde_json::to_string(&serial).unwrap(),
        serde_json::to_string(&parallel).unwrap()
    );
}

#[test]
fn replicate_streams_depend_only_on_seed_and_index() {
    // A larger experiment starts with exactly the replicates of a smaller one.
    let small = run_replicates(&config(300, 40), Some(2)).unwrap();
    let large = run_replicates(&config(300, 100), Some(3)).unwrap();
    assert_eq!(small[..], large[..40]);
}

#[test]
fn failure_rate_is_small_at_moderate_n() {
    let r = run_experiment(&config(2000, 1000), None).unwrap();
    assert!(r.failure_rate < 0.01, "failure rate {}", r.failure_rate);
    assert_eq!(r.successes + r.failures, 1000);
    assert!(!r.vacuous);
}

#[test]
fn vacuous_when_everything_fails() {
    let c = config(2, 20);
    let outcomes: Vec<_> = run_replicates(&c, None)
        .unwrap()
        .into_iter()
        .map(|mut o| {
            o.estimate.status = ousample_core::EstimateStatus::Failed(ousample_core::FailureReason::RatioOutsideLaplaceRange);
            o.estimate.alpha_hat = None;
            o.estimate.sigma2_hat = None;
            o
        })
        .collect();
    let r = aggregate(&c, &outcomes).unwrap();
    assert!(r.vacuous);
    assert_eq!(r.failure_rate, 1.0);
    assert!(r.checks.is_empty());
}

#[test]
fn scaled_bias_does_not_drift_with_n() {
    // |n bias - limit| at the largest n should not exceed the value at the
    // smallest n by more than the combined Monte Carlo error.
    let ns = [500, 1000, 2000, 4000];
    let devs: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            let r = run_experiment(&config(n, 1000), None).unwrap();
            let s = r.scaled["alpha_bias_n"];
            ((s.empirical - s.theoretical).abs(), s.mc_se)
        })
        .collect();
    let (first, last) = (devs[0], devs[devs.len() - 1]);
    let slack = 3.0 * (first.1 * first.1 + last.1 * last.1).sqrt();
    assert!(last.0 <= first.0 + slack, "deviations {devs:?}");
}

#[test]
fn oracle_matches_simulation_for_three_points_truncated() {
    let params = ProcessParams::new(0.8, 1.0).unwrap();
    let law = SpacingLaw::ShiftedExponential { delta: 0.3, beta: 2.0 };
    let exact = finite_n_oracle(&params, &law, 3, 64).unwrap();
    let sim = short_path_moments(&params, &law, 3, 200_000, 11, None).unwrap();
    assert!((exact.var_tn - sim.var_tn).abs() <= 3.0 * sim.se_var_tn, "{exact:?} {sim:?}");
    assert!((exact.var_vn - sim.var_vn).abs() <= 3.0 * sim.se_var_vn, "{exact:?} {sim:?}");
    assert!((exact.cov_tn_vn - sim.cov_tn_vn).abs() <= 3.0 * sim.se_cov_tn_vn, "{exact:?} {sim:?}");
}

#[test]
fn raw_outcomes_carry_recorded_seeds() {
    let c = config(100, 5);
    for o in run_replicates(&c, None).unwrap() {
        let path = ousample_core::process::simulate(&c.params, &c.law, c.n, o.seed).unwrap();
        let again = ousample_core::estimators::moment_estimate(&path, &c.law).unwrap();
        assert_eq!(again, o.estimate);
    }
}
