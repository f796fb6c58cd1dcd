use weighted_entropy::distributions::{sample, ParametricDistribution as PD, SeededSampler};
use weighted_entropy::gof::{critical_values, power_study, run_test, CriticalTable, Decision, TestConfig};
use weighted_entropy::Error;

fn small_cfg(seed: u64) -> TestConfig {
    TestConfig { replications: 400, seed, ..TestConfig::default() }
}

#[test]
fn table_is_reproducible_and_round_trips() {
    let cfg = small_cfg(7);
    let a = critical_values(&[6, 10, 20], &[0.01, 0.05, 0.10], &cfg).unwrap();
    let b = critical_values(&[6, 10, 20], &[0.01, 0.05, 0.10], &TestConfig { workers: Some(3), ..cfg }).unwrap();
    assert_eq!(a, b);
    assert_eq!(CriticalTable::from_json(&a.to_json()).unwrap(), a);
    assert_eq!(CriticalTable::from_csv(&a.to_csv()).unwrap(), a);
    for n in [6, 10, 20] {
        let q = [0.01, 0.05, 0.10].map(|l| a.get(n, l).unwrap());
        assert!(q[0] <= q[1] && q[1] <= q[2]);
        assert!(q.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn subset_of_sizes_matches_full_run() {
    let cfg = small_cfg(11);
    let full = critical_values(&[8, 12, 16], &[0.05], &cfg).unwrap();
    let one = critical_values(&[12], &[0.05], &cfg).unwrap();
    assert_eq!(full.get(12, 0.05), one.get(12, 0.05));
}

#[test]
fn test_uses_table_and_reports_decision() {
    let cfg = small_cfg(3);
    let table = critical_values(&[30], &[0.05], &cfg).unwrap();
    let xs = sample(&PD::exponential(2.0).unwrap(), 30, &SeededSampler::new(99, 0)).unwrap();
    let out = run_test(&xs, 0.05, &cfg, Some(&table)).unwrap();
    assert_eq!(out.critical_value, table.get(30, 0.05).unwrap());
    let expected = if out.t < out.critical_value { Decision::Reject } else { Decision::FailToReject };
    assert_eq!(out.decision, expected);
}

#[test]
fn missing_cell_without_simulation_is_an_error() {
    let cfg = TestConfig { simulate_missing: false, ..small_cfg(3) };
    let table = critical_values(&[30], &[0.05], &small_cfg(3)).unwrap();
    let xs = sample(&PD::exponential(1.0).unwrap(), 25, &SeededSampler::new(1, 0)).unwrap();
    let err = run_test(&xs, 0.05, &cfg, Some(&table)).unwrap_err();
    assert!(matches!(err, Error::MissingCriticalValue { .. }));
}

#[test]
fn power_grows_with_n_for_gamma() {
    let cfg = small_cfg(5);
    let table = critical_values(&[10, 60], &[0.05], &cfg).unwrap();
    let res = power_study(&PD::gamma(5.0).unwrap(), &[10, 60], &[0.05], &cfg, Some(&table)).unwrap();
    assert_eq!(res.len(), 2);
    assert!(res[1].power > res[0].power);
    assert!(res[1].power > 0.5);
}

#[test]
fn exponential_rejection_rate_near_level() {
    let cfg = small_cfg(21);
    let table = critical_values(&[20], &[0.10], &cfg).unwrap();
    let res = power_study(&PD::exponential(1.0).unwrap(), &[20], &[0.10], &TestConfig { seed: 22, ..cfg }, Some(&table)).unwrap();
    assert!((res[0].power - 0.10).abs() < 0.06, "{}", res[0].power);
}
