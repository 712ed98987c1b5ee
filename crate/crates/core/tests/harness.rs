use onebit::geometry::{sample_sphere_cap, SignalSetSpec};
use onebit::harness::{
    run_sweep, verify_concentration, verify_uniform_concentration, ExperimentConfig, UniformConcentrationReport,
};
use onebit::measurement::gen_gaussian_ensemble;
use proptest::prelude::*;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

#[test]
fn uniform_deviation_is_small_in_the_good_regime() {
    let r = verify_uniform_concentration(64, 4, 5000, 500, 0.1, 7).unwrap();
    assert_eq!(r.deviations.len(), 500);
    assert!(r.max_deviation <= 0.1, "{}", r.max_deviation);
    assert!(!r.exceeds_t);
}

#[test]
fn doubling_m_shrinks_the_uniform_deviation() {
    let spec = SignalSetSpec::effectively_sparse(32, 3.0).unwrap();
    let (mut small, mut large) = (Vec::new(), Vec::new());
    for seed in 0..20u64 {
        let points = sample_sphere_cap(&spec, 100, seed).unwrap();
        // nested prefixes: the larger ensemble extends the smaller one
        let a = gen_gaussian_ensemble(1000, 32, seed + 500).unwrap();
        small.push(UniformConcentrationReport::from_points(&points, &a.prefix(500), 3, 0.1).unwrap().max_deviation);
        large.push(UniformConcentrationReport::from_points(&points, &a, 3, 0.1).unwrap().max_deviation);
    }
    assert!(median(large.clone()) < median(small.clone()), "{large:?} vs {small:?}");
}

#[test]
fn concentration_mean_is_near_the_gaussian_moment() {
    let r = verify_concentration(32, 4000, 40, 0.05, 1).unwrap();
    assert!((r.mean_moment - (2.0 / std::f64::consts::PI).sqrt()).abs() < 0.01);
    assert!(r.exceedance <= 0.05);
}

#[test]
fn sweep_median_error_does_not_grow() {
    let out = run_sweep(&ExperimentConfig::sweep(48, 3, vec![40, 160], 9, 3)).unwrap();
    let med = |m: usize| median(out.rows.iter().filter(|r| r.m == m).map(|r| r.error).collect());
    assert!(med(160) <= med(40));
    assert!(out.rows.iter().all(|r| r.is_ok() && (0.0..=2.0).contains(&r.error)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rows_survive_plan_deletions(seed in any::<u64>(), keep_m in prop::bool::ANY, keep in 1usize..4) {
        let full = run_sweep(&ExperimentConfig::sweep(10, 2, vec![15, 30], 3, seed)).unwrap();
        let m = if keep_m { 15 } else { 30 };
        let part = run_sweep(&ExperimentConfig::sweep(10, 2, vec![m], keep, seed)).unwrap();
        let expected: Vec<_> = full.rows.iter().filter(|r| r.m == m && r.trial < keep).cloned().collect();
        prop_assert_eq!(part.rows.iter().map(|r| r.to_csv_line()).collect::<Vec<_>>(),
                        expected.iter().map(|r| r.to_csv_line()).collect::<Vec<_>>());
    }

    #[test]
    fn sweep_rows_are_sorted_and_bounded(seed in any::<u64>()) {
        let out = run_sweep(&ExperimentConfig::sweep(8, 2, vec![20, 10], 2, seed)).unwrap();
        let keys: Vec<(usize, usize)> = out.rows.iter().map(|r| (r.m, r.trial)).collect();
        prop_assert_eq!(keys, vec![(10, 0), (10, 1), (20, 0), (20, 1)]);
        for r in &out.rows {
            prop_assert!(!r.is_ok() || (0.0..=2.0).contains(&r.error));
        }
    }
}
