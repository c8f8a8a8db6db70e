// SPDX-License-Identifier: Apache-2.0

//! Statistical checks of the exit-time sampler against closed forms and oracles.

use exitq::reference::interval_survival;
use exitq::{
    empirical_survival, simulate_batch, solve_mean_exit_1d, to_sde, ExitCheck, Preset, SimConfig,
};

/// Two-sided 99.9% normal quantile.
const Z_999: f64 = 3.290_526_731_491_926;

fn interval_sample(seed: u64) -> exitq::ExitTimeSample {
    let problem = Preset::Interval01.problem();
    let config = SimConfig::new(1e-4, 2.0, 10_000, seed, vec![0.5]);
    simulate_batch(&to_sde(&problem), problem.domain(), &config, problem.id()).unwrap()
}

#[test]
fn interval_mean_exit_time_is_one_eighth() {
    let sample = interval_sample(2024);
    assert_eq!(sample.censored_count(), 0);
    let (mean, se) = sample.mean_exit_time();
    assert!((mean - 0.125).abs() <= 0.003, "mean {mean}");
    assert!((mean - 0.125).abs() <= 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn interval_survival_within_binomial_band() {
    let sample = interval_sample(99);
    let n = sample.n_paths() as f64;
    for t in [0.05, 0.1, 0.2] {
        let exact = interval_survival(0.5, t, 1.0, 1.0, 0.0).unwrap();
        let empirical = empirical_survival(&sample, t).unwrap();
        let band = Z_999 * (exact * (1.0 - exact) / n).sqrt();
        assert!(
            (empirical - exact).abs() <= band,
            "t {t}: empirical {empirical}, series {exact}, band {band}"
        );
    }
}

#[test]
fn ou_mean_exit_matches_mean_exit_solve() {
    let problem = Preset::OuInterval.problem();
    let dv = solve_mean_exit_1d(&problem, 1e-3).unwrap();
    let dt: f64 = 1e-4;
    let config = SimConfig::new(dt, 30.0, 4_000, 5, vec![dv.argmax]);
    let sample =
        simulate_batch(&to_sde(&problem), problem.domain(), &config, problem.id()).unwrap();
    let (mean, se) = sample.mean_exit_time();
    let allowance = dt.sqrt();
    assert!(
        (mean - dv.sup_w).abs() <= 3.0 * se + allowance,
        "mean {mean} (se {se}) vs sup w {}",
        dv.sup_w
    );
}

#[test]
fn discrete_check_exits_later_than_bridge_check() {
    let problem = Preset::Interval01.problem();
    let field = to_sde(&problem);
    let bridge = SimConfig::new(1e-3, 2.0, 4_000, 8, vec![0.5]);
    let discrete = bridge.clone().with_exit_check(ExitCheck::Discrete);
    let (m_bridge, _) = simulate_batch(&field, problem.domain(), &bridge, "i")
        .unwrap()
        .mean_exit_time();
    let (m_discrete, _) = simulate_batch(&field, problem.domain(), &discrete, "i")
        .unwrap()
        .mean_exit_time();
    // Discrete monitoring misses excursions; at dt = 1e-3 the shift is about 10%.
    assert!(m_discrete > m_bridge + 0.005, "{m_discrete} vs {m_bridge}");
    assert!((m_bridge - 0.125).abs() < 0.005, "{m_bridge}");
}
