use std::sync::OnceLock;

use super::*;
use crate::classify::{NoveltyDetector, Optimizer, ScgSettings};
use crate::decision::point_belief;
use crate::faulttree::HealthState;
use crate::truss::build_four_bay_truss;

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        seed: 11,
        w_max: Some(6925.429373276034),
        repetitions: 10,
        validation_repetitions: 4,
        optimizer: Optimizer::Scg(ScgSettings { max_iterations: 40, ..ScgSettings::default() }),
        ..ExperimentConfig::default()
    }
}

fn small_pipeline() -> &'static Pipeline {
    static P: OnceLock<Pipeline> = OnceLock::new();
    P.get_or_init(|| Pipeline::build(&small_config()).unwrap())
}

fn all_states() -> Vec<HealthState> {
    HealthState::classifier_support().to_vec()
}

#[test]
fn dataset_size_matches_grid() {
    let truss = build_four_bay_truss();
    let damaged: Vec<HealthState> = (1..=8).map(HealthState::single).collect();
    let data = synthesize_dataset(&truss, &damaged, &[10.0, 20.0, 30.0], 100, 1.0, 3).unwrap();
    assert_eq!(data.len(), 19_200);
    assert!(data.iter().all(|s| s.strains.len() == 12 && s.strains.iter().all(|e| e.is_finite())));
    // nesting: state, load, location, repetition
    assert_eq!(data[0].health, HealthState::single(1));
    assert_eq!(data[100].load.location, 2);
    assert_eq!(data[800].load.magnitude, 20.0);
}

#[test]
fn noiseless_repetitions_are_identical() {
    let truss = build_four_bay_truss();
    let data = synthesize_dataset(&truss, &[HealthState::single(3)], &[15.0], 4, 0.0, 9).unwrap();
    for chunk in data.chunks(4) {
        assert!(chunk.iter().all(|s| s.strains == chunk[0].strains));
    }
    assert!(synthesize_dataset(&truss, &[HealthState::UNDAMAGED], &[15.0], 1, -1.0, 9).is_err());
}

#[test]
fn noise_has_the_requested_spread() {
    let truss = build_four_bay_truss();
    let clean = clean_strains(&truss, &[HealthState::UNDAMAGED], &[20.0]).unwrap();
    let noisy = synthesize_dataset(&truss, &[HealthState::UNDAMAGED], &[20.0], 1250, 1.0, 5).unwrap();
    let residuals: Vec<f64> = noisy
        .iter()
        .map(|s| {
            let (_, _, base) = &clean[s.load.location - 1];
            s.strains[0] - base[0]
        })
        .collect();
    assert_eq!(residuals.len(), 10_000);
    let n = residuals.len() as f64;
    let mean = residuals.iter().sum::<f64>() / n;
    let sd = (residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((sd - 1.0).abs() < 0.02, "{sd}");
    assert!(mean.abs() < 0.05);
}

#[test]
fn synthesis_is_seeded() {
    let truss = build_four_bay_truss();
    let a = synthesize_dataset(&truss, &all_states(), &[5.0], 2, 1.0, 77).unwrap();
    let b = synthesize_dataset(&truss, &all_states(), &[5.0], 2, 1.0, 77).unwrap();
    let c = synthesize_dataset(&truss, &all_states(), &[5.0], 2, 1.0, 78).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let seeds: std::collections::BTreeSet<u64> = a.iter().map(|s| s.noise_seed).collect();
    assert_eq!(seeds.len(), a.len());
}

#[test]
fn first_component_does_not_separate_fe_damage() {
    // load variation dominates the undamaged strains, so damage does not
    // move the first principal component
    let truss = build_four_bay_truss();
    let data = synthesize_dataset(&truss, &all_states(), &[10.0, 20.0, 30.0], 20, 1.0, 1).unwrap();
    let undamaged: Vec<Vec<f64>> =
        data.iter().filter(|s| s.health == HealthState::UNDAMAGED).map(|s| s.strains.clone()).collect();
    let det = NoveltyDetector::fit(&undamaged).unwrap();
    assert!(det.pca.variances[0] > 10.0 * det.pca.variances[1]);
    for h in all_states() {
        let zs: Vec<f64> = data.iter().filter(|s| s.health == h).map(|s| det.z(&s.strains).unwrap()).collect();
        let mean = zs.iter().sum::<f64>() / zs.len() as f64;
        assert!(mean.abs() < 0.1, "H={h} mean z {mean}");
    }
}

#[test]
fn config_presets_and_toml() {
    let d = ExperimentConfig::load(DEFAULT_PRESET).unwrap();
    assert_eq!(d, ExperimentConfig::default());
    assert_eq!(d.train_loads, vec![10.0, 20.0, 30.0]);
    assert_eq!(d.validation_loads, vec![5.0, 15.0, 25.0]);
    assert_eq!(d.repetitions, 100);
    assert_eq!(d.noise_rms, 1.0);

    let back = ExperimentConfig::from_toml(&d.to_toml()).unwrap();
    assert_eq!(back, d);

    let c = ExperimentConfig::from_toml("seed = 4\nw_max = 5000.0\n[utilities]\noperational = 15.0\nfailed = -500.0\ndo_nothing = 0.0\nmaintain = -100.0\n").unwrap();
    assert_eq!(c.seed, 4);
    assert_eq!(c.w_max, Some(5000.0));
    assert_eq!(c.utilities.failed, -500.0);

    for bad in ["sede = 4", "repetitions = 0", "train_loads = []", "validation_loads = [-5.0]", "[utilities]\nfailed = 1.0"] {
        assert!(matches!(ExperimentConfig::from_toml(bad), Err(HarnessError::Config(_))), "{bad}");
    }
    assert!(matches!(ExperimentConfig::load("/nonexistent/config.toml"), Err(HarnessError::Io { .. })));
}

#[test]
fn output_dir_can_be_overridden_from_the_environment() {
    // the only test touching this variable
    std::env::set_var(OUTPUT_DIR_ENV, "/tmp/elsewhere");
    let c = ExperimentConfig::default().with_env_overrides();
    std::env::remove_var(OUTPUT_DIR_ENV);
    assert_eq!(c.output_dir(), std::path::Path::new("/tmp/elsewhere"));
    assert_eq!(ExperimentConfig::default().with_env_overrides().output_dir(), std::path::Path::new("out"));
}

#[test]
fn stage_errors_are_tagged() {
    let mut c = small_config();
    c.truss.area = Some(-1.0);
    let err = Pipeline::build(&c).unwrap_err();
    assert!(err.to_string().starts_with("[truss]"), "{err}");
}

#[test]
fn test_set_composition() {
    let p = small_pipeline();
    let undamaged = p.test.iter().filter(|c| c.sample.health == HealthState::UNDAMAGED).count();
    assert_eq!(undamaged, 192);
    assert_eq!(p.test.len() - undamaged, 192);
    for h in (1..=8).map(HealthState::single) {
        assert_eq!(p.test.iter().filter(|c| c.sample.health == h).count(), 24);
    }
    assert!(p.test.iter().all(|c| [5.0, 15.0, 25.0].contains(&c.sample.load.magnitude)));
}

#[test]
fn beliefs_are_distributions_on_the_support() {
    let support: Vec<usize> = all_states().iter().map(|h| h.index()).collect();
    for case in &small_pipeline().test {
        let b = case.belief.as_slice();
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(b.iter().enumerate().all(|(i, p)| *p >= 0.0 && (support.contains(&i) || *p == 0.0)));
    }
}

#[test]
fn report_counts_are_consistent() {
    let r = CaseStudyReport::from_pipeline(small_pipeline()).unwrap();
    assert_eq!(r.n_undamaged(), 192);
    assert_eq!(r.n_damaged(), 192);
    assert_eq!(r.localiser_confusion.iter().flatten().sum::<usize>(), 192);
    let d = &r.decisions;
    assert_eq!(d.overall.total(), 768);
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(d.overall.counts[i][j], d.first.counts[i][j] + d.second.counts[i][j]);
        }
    }
    assert!(r.localiser_validation_accuracy > 0.5);
}

#[test]
fn oracle_beliefs_score_perfectly() {
    let p = small_pipeline();
    let (decided, oracle) = p.decide_with(&p.decision, |c| point_belief(c.sample.health)).unwrap();
    let score = crate::decision::decision_accuracy(&decided, &oracle).unwrap();
    assert_eq!(score.overall.accuracy(), 1.0);
}

#[test]
fn bundle_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = CaseStudyReport::from_pipeline(small_pipeline()).unwrap();
    let r2 = run_case_study(&small_config()).unwrap();
    write_bundle(&r1, &dir.path().join("a")).unwrap();
    write_bundle(&r2, &dir.path().join("b")).unwrap();
    for name in BUNDLE_FILES {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name}");
    }
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a/summary.json")).unwrap()).unwrap();
    assert!(summary["label"].as_str().unwrap().contains("own-pipeline"));
    assert_eq!(summary["decisions"], 768);
    let detector = std::fs::read_to_string(dir.path().join("a/detector_confusion.csv")).unwrap();
    assert_eq!(detector.lines().count(), 3);
    let localiser = std::fs::read_to_string(dir.path().join("a/localiser_confusion.csv")).unwrap();
    assert_eq!(localiser.lines().count(), 9);
    assert!(localiser.lines().all(|l| l.split(',').count() == 9));
}

#[test]
fn timing_sweep_marks_never() {
    let mut c = small_config();
    c.sweep.failure_costs = vec![50.0, 100.0, 285.0, 1000.0];
    c.sweep.maintenance_costs = vec![50.0, 100.0, 300.0];
    let SweepOutput::Timing(rows) = sweep_costs(&c, SweepMode::TimeToMaintenance).unwrap() else {
        panic!("wrong mode")
    };
    assert_eq!(rows.len(), 12);
    for r in &rows {
        if r.maintenance_cost >= r.failure_cost + 15.0 {
            assert_eq!(r.steps, None);
        }
    }
    let csv = SweepOutput::Timing(rows).to_csv();
    assert!(csv.starts_with("failure_cost,maintenance_cost,steps\n"));
    assert!(csv.contains(",never\n"));
    assert_eq!("accuracy-vs-cost".parse::<SweepMode>().unwrap(), SweepMode::AccuracyVsCost);
    assert!("fast".parse::<SweepMode>().is_err());
}

#[test]
fn accuracy_sweep_rows() {
    let p = small_pipeline();
    let rows = accuracy_vs_cost(p, &[100.0, 285.0, 1000.0], 100.0).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.classifier) && (0.0..=1.0).contains(&r.uniform)));
    let b = uniform_support_belief();
    assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    assert_eq!(b.iter().filter(|p| **p > 0.0).count(), 9);
    let csv = SweepOutput::Accuracy(rows).to_csv();
    assert_eq!(csv.lines().count(), 4);
}
