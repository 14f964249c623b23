//! Simulated long-run behaviour against closed-form values.

use coopsim::analysis::{exact_busy_period_moments, expected_frame_length, frame_length_bounds, idle_period_moments};
use coopsim::model::ModelParams;
use coopsim::oracle::{optimal_two_point, simulate_stationary, StationaryPolicy};
use coopsim::sim::{run_episode, sample_pu_periods, PolicySpec, Scenario};

#[test]
fn first_passage_moments_match_simulation() {
    for (lambda, mu) in [(0.5, 0.6), (0.5, 0.8), (0.2, 0.6), (0.55, 0.8)] {
        let s = sample_pu_periods(lambda, mu, 400_000, 31);
        let (e_b, e_b2) = exact_busy_period_moments(lambda, mu).unwrap();
        let (e_i, e_i2) = idle_period_moments(lambda).unwrap();
        let e_t2 = e_i2 + e_b2 + 2.0 * e_i * e_b;
        assert!((s.mean_busy / e_b - 1.0).abs() < 0.02, "{lambda} {mu}: {s:?}");
        assert!(
            (s.mean_busy_sq / e_b2 - 1.0).abs() < 0.04,
            "{lambda} {mu}: {s:?} vs {e_b2}"
        );
        assert!(
            (s.mean_frame_sq / e_t2 - 1.0).abs() < 0.04,
            "{lambda} {mu}: {s:?} vs {e_t2}"
        );
        let t = expected_frame_length(lambda, mu).unwrap();
        assert!((s.mean_frame / t - 1.0).abs() < 0.02);
    }
}

#[test]
fn frame_lengths_lie_between_the_bounds() {
    let params = ModelParams::reference_point();
    let (t_min, t_max) = frame_length_bounds(&params).unwrap();
    for policy in [
        PolicySpec::Fbdpp,
        PolicySpec::NoCoop,
        PolicySpec::AlwaysCoop,
        PolicySpec::CounterBased,
    ] {
        let m = run_episode(&Scenario::new(params.clone(), policy, 200.0, 20_000, 4)).unwrap();
        let n = m.frames.len() as f64;
        let mean = m.mean_frame_len();
        let var = m
            .frames
            .iter()
            .map(|f| (f.frame_len as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        let se = (var / n).sqrt();
        assert!(
            mean >= t_min - 3.0 * se && mean <= t_max + 3.0 * se,
            "{policy:?}: {mean}"
        );
    }
}

#[test]
fn oracle_policy_is_realised_in_simulation() {
    let params = ModelParams::reference_point();
    let policy = optimal_two_point(&params).unwrap();
    let slots = 2_000_000;
    let est = simulate_stationary(&policy, &params, slots, 12);
    // Generous standard errors for correlated slots.
    assert!((est.admitted - policy.upsilon).abs() < 0.005, "{est:?}");
    assert!((est.service_capacity - policy.upsilon).abs() < 0.005, "{est:?}");
    assert!((est.avg_power - policy.power_used).abs() < 0.005, "{est:?}");
    assert!((est.idle_fraction - policy.pi_0).abs() < 0.005, "{est:?}");
}

#[test]
fn no_cooperation_stationary_throughput() {
    let params = ModelParams::reference_point();
    let policy = StationaryPolicy::evaluate(&params, (0.0, 1.0), 0.0, (0.0, 1.0), 1.0).unwrap();
    assert!((policy.upsilon - 1.0 / 6.0).abs() < 1e-12);
    let est = simulate_stationary(&policy, &params, 2_000_000, 13);
    assert!((est.admitted - 1.0 / 6.0).abs() < 0.005, "{est:?}");
    let silent = StationaryPolicy::evaluate(&params, (0.0, 1.0), 0.0, (0.0, 1.0), 0.0).unwrap();
    assert_eq!(simulate_stationary(&silent, &params, 10_000, 1).admitted, 0.0);
}

#[test]
fn fbdpp_served_and_admitted_converge() {
    let m = run_episode(&Scenario::new(
        ModelParams::reference_point(),
        PolicySpec::Fbdpp,
        100.0,
        20_000,
        9,
    ))
    .unwrap();
    let gap = m.throughput_admitted() - m.throughput_served();
    assert!(gap >= 0.0 && gap <= 101.0 / m.total_slots as f64);
    // Within the O(1/V) gap below the optimum, never meaningfully above it.
    let served = m.throughput_served();
    assert!(served > 0.22 && served < 0.255, "{served}");
    assert!(m.avg_power() < 0.5 + 0.01, "{}", m.avg_power());
}

#[test]
fn baselines_respect_the_budget_in_the_long_run() {
    for policy in [PolicySpec::NoCoop, PolicySpec::AlwaysCoop, PolicySpec::CounterBased] {
        let m = run_episode(&Scenario::new(ModelParams::reference_point(), policy, 500.0, 30_000, 2)).unwrap();
        assert!(
            m.avg_power() <= 0.5 + 1.0 / m.total_slots as f64,
            "{policy:?}: {}",
            m.avg_power()
        );
    }
}

#[test]
fn no_primary_traffic_gives_plain_idle_service() {
    let params = ModelParams::reference_point().with_lambda_pu(0.0).with_lambda_su(0.3);
    let m = run_episode(&Scenario::new(params, PolicySpec::Fbdpp, 50.0, 50_000, 21)).unwrap();
    assert_eq!(m.total_coop_power, 0.0);
    assert!((m.throughput_served() - 0.3).abs() < 0.01, "{}", m.throughput_served());
}
