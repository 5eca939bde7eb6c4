use sskit_core::study::config::Estimators;
use sskit_core::study::report::mu_label;
use sskit_core::study::{run_study, run_study_range, StudyConfig, StudyKind, StudyReport, Table};

fn small() -> StudyConfig {
    let mut cfg = StudyConfig::default();
    cfg.parameter_sets.truncate(1);
    cfg.scheme_pairs = vec![cfg.scheme_pairs[0].clone(), cfg.scheme_pairs[5].clone()];
    cfg.known_mu.mu_values.truncate(1);
    cfg.replications = 20;
    cfg.nboot = 30;
    cfg.gibbs_t = 200;
    cfg
}

fn in_pool(threads: usize, cfg: &StudyConfig) -> StudyReport {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| run_study(cfg, StudyKind::BOTH).unwrap())
}

#[test]
fn worker_count_does_not_change_the_report() {
    let cfg = small();
    let serial = in_pool(1, &cfg);
    let parallel = in_pool(3, &cfg);
    assert_eq!(serial, parallel);
    assert_eq!(
        serde_json::to_string(&serial).unwrap(),
        serde_json::to_string(&in_pool(2, &cfg)).unwrap()
    );
}

#[test]
fn split_runs_merge_to_the_full_run() {
    let cfg = small();
    let full = run_study(&cfg, StudyKind::BOTH).unwrap();
    let mut merged = run_study_range(&cfg, StudyKind::BOTH, 0..7, &|_| {}).unwrap();
    merged.merge(&run_study_range(&cfg, StudyKind::BOTH, 7..20, &|_| {}).unwrap());
    assert_eq!(merged.replications, full.replications);
    assert_eq!(merged.cells.len(), full.cells.len());
    for (key, a) in &full.cells {
        let b = &merged.cells[key];
        assert_eq!((a.count, a.failures, a.covered, a.intervals), (b.count, b.failures, b.covered, b.intervals));
        for (x, y) in [(a.sum_err, b.sum_err), (a.sum_sq_err, b.sum_sq_err), (a.sum_length, b.sum_length)] {
            assert!((x - y).abs() <= 1e-10, "{key:?}: {x} vs {y}");
        }
    }
}

#[test]
fn report_invariants() {
    let report = run_study(&small(), StudyKind::BOTH).unwrap();
    assert!(!report.cells.is_empty());
    for row in report.rows() {
        if let (Some(b), Some(mse)) = (row.bias, row.mse) {
            assert!(mse >= b * b - 1e-12, "{row:?}");
        }
        if let Some(c) = row.coverage {
            assert!((0.0..=1.0).contains(&c));
            let acc = &report.cells[&row.key];
            let hits = c * acc.intervals as f64;
            assert!((hits - hits.round()).abs() < 1e-9);
        }
        assert_eq!(row.replications, 20);
    }
}

#[test]
fn single_replication_mse_is_squared_bias() {
    let mut cfg = small();
    cfg.replications = 1;
    let report = run_study(&cfg, StudyKind::POINTS).unwrap();
    for row in report.rows() {
        if let (Some(b), Some(mse)) = (row.bias, row.mse) {
            assert!((mse - b * b).abs() < 1e-15, "{row:?}");
        }
    }
}

#[test]
fn exact_known_location_interval_at_half_level() {
    let mut cfg = small();
    cfg.estimators = Estimators {
        mle: false,
        bayes: false,
        asymptotic: false,
        boot_p: false,
        boot_t: false,
        credible: false,
        known_mu: true,
    };
    cfg.scheme_pairs.truncate(1);
    cfg.eta = 0.5;
    cfg.replications = 2000;
    let report = run_study(&cfg, StudyKind::INTERVALS).unwrap();
    let label = mu_label(cfg.known_mu.mu_values[0]);
    let cov = report
        .get(Table::KnownMu, &label, &cfg.pair_label(0), "exact")
        .unwrap()
        .coverage()
        .unwrap();
    assert!((cov - 0.5).abs() <= 0.03, "coverage {cov}");
}

#[test]
fn same_seed_same_report_other_seed_differs() {
    let cfg = small();
    let a = run_study(&cfg, StudyKind::POINTS).unwrap();
    assert_eq!(a, run_study(&cfg, StudyKind::POINTS).unwrap());
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(a, run_study(&other, StudyKind::POINTS).unwrap());
}
