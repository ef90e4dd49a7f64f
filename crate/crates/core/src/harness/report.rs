use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::pipeline::CaseStudyReport;
use super::HarnessError;
use crate::decision::{ActionConfusion, Action};
use crate::faulttree::{HealthState, N_CROSS_MEMBERS};

/// Files written by [`write_bundle`].
pub const BUNDLE_FILES: [&str; 7] = [
    "summary.json",
    "detector_confusion.csv",
    "localiser_confusion.csv",
    "decision_first.csv",
    "decision_second.csv",
    "decision_overall.csv",
    "test_decisions.csv",
];

const LABEL: &str = "own-pipeline benchmark: finite-element strains with synthetic noise; not experimental data";

#[derive(Serialize)]
struct Summary<'a> {
    label: &'a str,
    seed: u64,
    w_max_kg: f64,
    calibrated_probability: Option<f64>,
    test_undamaged: usize,
    test_damaged: usize,
    decisions: usize,
    detector_accuracy: f64,
    localiser_validation_accuracy: f64,
    localiser_test_accuracy: f64,
    training_iterations: usize,
    decision_accuracy_first: f64,
    decision_accuracy_second: f64,
    decision_accuracy_overall: f64,
    type_one_errors: usize,
    type_two_errors: usize,
}

fn member_label(bit: usize) -> String {
    format!("m{}", bit + 8)
}

fn action_csv(c: &ActionConfusion) -> String {
    let mut s = String::from("oracle,decided_do_nothing,decided_maintain\n");
    for a in Action::ALL {
        let row = c.counts[a.index()];
        writeln!(s, "{},{},{}", a.label(), row[0], row[1]).unwrap();
    }
    s
}

fn detector_csv(c: &[[usize; 2]; 2]) -> String {
    let mut s = String::from("actual,predicted_undamaged,predicted_damaged\n");
    for (name, row) in ["undamaged", "damaged"].iter().zip(c) {
        writeln!(s, "{name},{},{}", row[0], row[1]).unwrap();
    }
    s
}

fn localiser_csv(c: &[[usize; N_CROSS_MEMBERS]; N_CROSS_MEMBERS]) -> String {
    let mut s = String::from("actual");
    for bit in 1..=N_CROSS_MEMBERS {
        write!(s, ",predicted_{}", member_label(bit)).unwrap();
    }
    s.push('\n');
    for (i, row) in c.iter().enumerate() {
        s.push_str(&member_label(i + 1));
        for v in row {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    s
}

fn decisions_csv(r: &CaseStudyReport) -> String {
    let mut s = String::from("sample,true_state,location,load_kg,p_undamaged");
    for bit in 1..=N_CROSS_MEMBERS {
        write!(s, ",p_{}", member_label(bit)).unwrap();
    }
    s.push_str(",decided_first,decided_second,oracle_first,oracle_second\n");
    for (i, ((case, d), o)) in r.test.iter().zip(&r.decided).zip(&r.oracle).enumerate() {
        let b = &case.belief;
        write!(s, "{i},{},{},{},{}", case.sample.health, case.sample.load.location, case.sample.load.magnitude, b.get(HealthState::UNDAMAGED))
            .unwrap();
        for bit in 1..=N_CROSS_MEMBERS {
            write!(s, ",{}", b.get(HealthState::single(bit))).unwrap();
        }
        writeln!(s, ",{},{},{},{}", d.first.label(), d.second.label(), o.first.label(), o.second.label()).unwrap();
    }
    s
}

fn summary_json(r: &CaseStudyReport) -> String {
    let d = &r.decisions;
    let summary = Summary {
        label: LABEL,
        seed: r.seed,
        w_max_kg: r.w_max,
        calibrated_probability: r.calibration.as_ref().map(|c| c.probability),
        test_undamaged: r.n_undamaged(),
        test_damaged: r.n_damaged(),
        decisions: d.overall.total(),
        detector_accuracy: r.detector_accuracy(),
        localiser_validation_accuracy: r.localiser_validation_accuracy,
        localiser_test_accuracy: r.localiser_accuracy(),
        training_iterations: r.training_iterations,
        decision_accuracy_first: d.first.accuracy(),
        decision_accuracy_second: d.second.accuracy(),
        decision_accuracy_overall: d.overall.accuracy(),
        type_one_errors: d.overall.type_one(),
        type_two_errors: d.overall.type_two(),
    };
    serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"
}

/// Writes the report files named in [`BUNDLE_FILES`] into `dir`.
pub fn write_bundle(report: &CaseStudyReport, dir: &Path) -> Result<(), HarnessError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| HarnessError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let contents = [
        summary_json(report),
        detector_csv(&report.detector_confusion),
        localiser_csv(&report.localiser_confusion),
        action_csv(&report.decisions.first),
        action_csv(&report.decisions.second),
        action_csv(&report.decisions.overall),
        decisions_csv(report),
    ];
    for (name, text) in BUNDLE_FILES.iter().zip(contents) {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(io(&path))?;
    }
    Ok(())
}
