use std::process::{Command, Output};

fn otbag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otbag")).args(args).output().unwrap()
}

#[test]
fn selftest_passes() {
    let out = otbag(&["selftest"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 7, "{text}");
}

#[test]
fn missing_file_reports_error_name() {
    let out = otbag(&["run", "--source", "/no/such.csv", "--target", "/no/other.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("IoError:"));
}

#[test]
fn bad_flag_values_are_named() {
    let out = otbag(&["synth", "--reps", "1", "--algos", "otbag,bogus"]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("BadConfig:"));
    let out = otbag(&["synth", "--reps", "1", "--n-source", "10", "--n-target", "4", "--segment-length", "500", "--algos", "jdsmv"]);
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("BadSegment:"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"repetitions": 2, "members": 3, "algorithms": ["otbag", "sdmv"]}"#).unwrap();
    let report = dir.path().join("r.csv");
    let out = otbag(&[
        "synth", "--n-source", "100", "--n-test", "50",
        "--config", config.to_str().unwrap(),
        "--reps", "3", "--report", "csv", "--out", report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(report).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("task,algorithm,mean,std,acc_0,acc_1,acc_2"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn saved_models_and_dumped_data_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = |p: &str| dir.path().join(p).to_str().unwrap().to_string();
    let out = otbag(&[
        "synth", "--kind", "flipped", "--n-source", "100", "--n-test", "30", "--reps", "1",
        "--dump", &path("data"), "--save-models", &path("models"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for algo in ["otbag", "sdmv", "jdsmv"] {
        otbag::ensemble::load_model(dir.path().join("models").join(format!("rep0_{algo}.model"))).unwrap();
    }
    let out = otbag(&[
        "run", "--source", &path("data/source.csv"), "--target", &path("data/target_test.csv"),
        "--reps", "2", "--m", "4", "--learner", "logistic", "--lr", "0.5", "--zscore", "--report", "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = otbag::harness::parse_json_report(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert_eq!(table.rows[0].task, "source->target_test");
}
