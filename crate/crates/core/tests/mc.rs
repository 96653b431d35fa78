use qfp::mc::{run_simulation, wilson_interval, Adversary, SimConfig, Z95};
use qfp::protocol::{ProtocolKind, RogerStrategy};
use qfp::twophoton::CoincidenceModel;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn intervals_cover_the_analytic_rate() {
    let mut covered = 0;
    for seed in 0..100 {
        let mut config = SimConfig::new(ProtocolKind::QuantumUnentangled, 10_000, seed);
        config.model = CoincidenceModel::with_dip_depth(0.88).unwrap();
        let report = run_simulation(&config).unwrap();
        let [lo, hi] = report.ci95.diff.unwrap();
        let truth = report.analytic.diff.unwrap();
        assert!(lo <= report.empirical.diff.unwrap() && report.empirical.diff.unwrap() <= hi);
        covered += usize::from(lo <= truth && truth <= hi);
    }
    assert!(covered >= 90, "only {covered} of 100 intervals covered the analytic rate");
}

#[test]
fn uniform_pair_matrix_at_full_visibility() {
    let mut config = SimConfig::new(ProtocolKind::QuantumUnentangled, 1_600_000, 21);
    config.adversary = Adversary::Uniform;
    let report = run_simulation(&config).unwrap();
    for x in 0..4 {
        for y in 0..4 {
            let n = report.counts.trials[x * 4 + y];
            assert!(n > 95_000, "cell ({x}, {y}) got {n} trials");
            let e = report.pair_matrix[x][y].unwrap();
            if x == y {
                assert_eq!(e, 0.0);
            } else {
                assert!((e - 2.0 / 3.0).abs() < 0.01, "({x}, {y}): {e}");
            }
        }
    }
    assert_eq!(report.empirical.same, Some(0.0));
}

#[test]
fn mixed_strategy_equalizes_cases() {
    let mut config = SimConfig::new(ProtocolKind::QuantumUnentangled, 1_000_000, 3);
    config.model = CoincidenceModel::with_dip_depth(0.88).unwrap();
    config.strategy = RogerStrategy::mixed(0.371, 0.0).unwrap();
    config.adversary = Adversary::Uniform;
    let report = run_simulation(&config).unwrap();
    for (emp, ana) in [(report.empirical.same, report.analytic.same), (report.empirical.diff, report.analytic.diff)] {
        let (emp, ana) = (emp.unwrap(), ana.unwrap());
        assert!((emp - ana).abs() < 0.002, "{emp} vs {ana}");
        assert!((1.0 - emp - 0.591).abs() < 0.004, "success {}", 1.0 - emp);
    }
}

#[test]
fn entangled_ideal_is_error_free() {
    let report = run_simulation(&SimConfig::new(ProtocolKind::QuantumEntangled, 100_000, 1)).unwrap();
    assert_eq!(report.empirical.wcs, 0.0);
    assert_eq!(report.analytic.wcs, 0.0);
}

#[test]
fn report_is_independent_of_thread_count() {
    let mut config = SimConfig::new(ProtocolKind::QuantumUnentangled, 200_000, 77);
    config.model = CoincidenceModel::with_dip_depth(0.9).unwrap();
    config.strategy = RogerStrategy::mixed(0.3, 0.05).unwrap();
    config.adversary = Adversary::Uniform;
    let one = in_pool(1, || run_simulation(&config).unwrap());
    let four = in_pool(4, || run_simulation(&config).unwrap());
    let seven = in_pool(7, || run_simulation(&config).unwrap());
    assert_eq!(one, four);
    assert_eq!(one.to_json(), seven.to_json());
    assert_eq!(one.pair_matrix_csv(), four.pair_matrix_csv());
}

#[test]
fn fixed_pair_reports_one_case() {
    let mut config = SimConfig::new(ProtocolKind::QuantumUnentangled, 10_000, 0);
    config.adversary = Adversary::FixedPair(2, 2);
    let report = run_simulation(&config).unwrap();
    assert_eq!(report.empirical.diff, None);
    assert_eq!(report.empirical.same, Some(0.0));
    config.adversary = Adversary::FixedPair(4, 0);
    assert!(run_simulation(&config).is_err());
}

#[test]
fn wilson_reference_values() {
    let (lo, hi) = wilson_interval(50, 100, 1.96).unwrap();
    assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
    assert_eq!(wilson_interval(0, 100, Z95).unwrap().0, 0.0);
    assert_eq!(wilson_interval(100, 100, Z95).unwrap().1, 1.0);
    assert!(wilson_interval(0, 0, Z95).is_err());
}
