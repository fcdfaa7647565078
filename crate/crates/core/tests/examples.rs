//! Every runnable example, executed as a test.

#[path = "../examples/asymmetry_features.rs"]
#[allow(dead_code)]
mod asymmetry_features;
#[path = "../examples/band_powers.rs"]
#[allow(dead_code)]
mod band_powers;
#[path = "../examples/evaluate_synthetic.rs"]
#[allow(dead_code)]
mod evaluate_synthetic;
#[path = "../examples/labels_and_folds.rs"]
#[allow(dead_code)]
mod labels_and_folds;
#[path = "../examples/metrics.rs"]
#[allow(dead_code)]
mod metrics;
#[path = "../examples/parse_recording.rs"]
#[allow(dead_code)]
mod parse_recording;
#[path = "../examples/svm_xor.rs"]
#[allow(dead_code)]
mod svm_xor;
#[path = "../examples/synth_session.rs"]
#[allow(dead_code)]
mod synth_session;

#[test]
fn band_powers_runs() {
    let out = band_powers::run_example().unwrap();
    assert!(out.contains("peak 10.0 Hz"));
    assert!(out
        .lines()
        .any(|l| l.starts_with("TP9") && l.contains("8.000")));
}

#[test]
fn asymmetry_features_runs() {
    let out = asymmetry_features::run_example().unwrap();
    assert_eq!(out.lines().count(), 31);
}

#[test]
fn parse_recording_runs() {
    let out = parse_recording::run_example().unwrap();
    assert!(out.contains("512 samples"));
    assert!(out.contains("round trip equal: true"));
    assert!(out.contains("rejected:"));
}

#[test]
fn labels_and_folds_runs() {
    let out = labels_and_folds::run_example().unwrap();
    assert!(out.contains("-> [11, 11, 10, 10]"));
    assert!(out.contains("None / Some(Happy)"));
}

#[test]
fn svm_xor_runs() {
    let out = svm_xor::run_example().unwrap();
    assert!(out.contains("(4, 4) -> Angry"));
}

#[test]
fn metrics_runs() {
    let out = metrics::run_example().unwrap();
    assert!(out.starts_with("accuracy 75.00%"));
}

#[test]
fn synth_session_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = synth_session::run_example(dir.path().to_path_buf()).unwrap();
    assert_eq!(out.lines().count(), 7);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 7);
}

#[test]
fn evaluate_synthetic_runs() {
    let table = evaluate_synthetic::run_example().unwrap();
    let rows: Vec<&str> = table
        .lines()
        .skip(2)
        .map(|l| l.split('|').next().unwrap().trim())
        .collect();
    assert_eq!(rows, ["RASM", "DASM", "Correlation", "All"]);
}
