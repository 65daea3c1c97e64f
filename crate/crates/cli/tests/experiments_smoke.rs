//! Run-level checks of the dispatcher: artifacts land on disk, written bytes
//! match the returned report, and expectation violations surface as pass =
//! false rather than errors.

use shadowlab_cli::config::{ExperimentId, RawConfig};
use shadowlab_cli::experiments::run_experiment;

#[test]
fn lifted_window_experiment_writes_consistent_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let raw = RawConfig::default();
    let report = run_experiment(ExperimentId::E4, &raw, dir.path(), false).unwrap();
    assert!(report.pass);
    assert!(report.artifacts.iter().any(|a| a == "e4_radii.csv"));
    assert!(report.artifacts.iter().any(|a| a == "e4_edges.csv"));
    for name in &report.artifacts {
        assert!(dir.path().join(name).is_file(), "missing artifact {name}");
    }
    let written = std::fs::read_to_string(dir.path().join("e4_report.json")).unwrap();
    assert_eq!(written, report.to_json().unwrap());
    let parsed: serde_json::Value = serde_json::from_str(&written).unwrap();
    let r_star = parsed["verdicts"]["r_star"].as_u64().unwrap();
    assert!(
        (1..=8).contains(&r_star),
        "drift must outrun epsilon within the default sweep"
    );
}

#[test]
fn truncated_sweep_reports_honest_failure() {
    // Radius 3 sits below the counterexample's flip, so the sweep never sees
    // an infeasible verdict and the expectation is not met.
    let dir = tempfile::tempdir().unwrap();
    let raw = RawConfig {
        radius_min: Some(3),
        radius_max: Some(3),
        ..RawConfig::default()
    };
    let report = run_experiment(ExperimentId::E1, &raw, dir.path(), false).unwrap();
    assert!(!report.pass);
    assert!(report.verdicts["r_star"].is_null());
    assert_eq!(report.verdicts["defect_below_d"], serde_json::json!(true));
}

#[test]
fn subgroup_experiment_accepts_a_composite_generator() {
    let dir = tempfile::tempdir().unwrap();
    let raw = RawConfig {
        g: Some("ab".to_string()),
        radius: Some(3),
        pairs: Some(50),
        ..RawConfig::default()
    };
    let report = run_experiment(ExperimentId::E7, &raw, dir.path(), false).unwrap();
    assert!(report.pass);
    assert_eq!(report.verdicts["failures"], serde_json::json!(0));
    assert_eq!(
        report.verdicts["generator_coords"],
        serde_json::json!([1, 1, 0])
    );
}

#[test]
fn timing_flag_controls_report_stability() {
    let dir = tempfile::tempdir().unwrap();
    let raw = RawConfig {
        radius: Some(3),
        pairs: Some(20),
        ..RawConfig::default()
    };
    let quiet = run_experiment(ExperimentId::E7, &raw, dir.path(), false).unwrap();
    assert!(quiet.timing_ms.is_none());
    assert!(!quiet.to_json().unwrap().contains("timing_ms"));
    let timed = run_experiment(ExperimentId::E7, &raw, dir.path(), true).unwrap();
    assert!(timed.timing_ms.is_some());
    let written = std::fs::read_to_string(dir.path().join("e7_report.json")).unwrap();
    assert!(written.contains("timing_ms"));
}
