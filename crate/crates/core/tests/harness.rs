use std::fs;

use krnorm::harness::{run_experiment, ExperimentSpec, REGISTRY};
use serde_json::Value;

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (exp, params) in [
        ("crosscheck", vec![("trials", "12")]),
        ("dilation", vec![("resolution", "256")]),
        ("orlicz-diagnostics", vec![]),
    ] {
        let mut spec = ExperimentSpec::new(exp).seed(11);
        for (k, v) in &params {
            spec = spec.param(k, v);
        }
        let a = run_experiment(&spec)
            .unwrap()
            .write(&dir.path().join(format!("{exp}-a")))
            .unwrap();
        let b = run_experiment(&spec)
            .unwrap()
            .write(&dir.path().join(format!("{exp}-b")))
            .unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.file_name(), y.file_name());
            assert_eq!(
                fs::read(x).unwrap(),
                fs::read(y).unwrap(),
                "{}",
                x.display()
            );
        }
    }
}

#[test]
fn summary_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        run_experiment(&ExperimentSpec::new("crosscheck").param("trials", 5).seed(3)).unwrap();
    assert!(out.summary.all_pass());
    out.write(dir.path()).unwrap();
    let v: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(v["experiment"], "crosscheck");
    assert_eq!(v["seed"], 3);
    assert_eq!(v["params"]["trials"], 5);
    let first = &v["assertions"][0];
    for key in ["name", "measured", "expected", "tol", "pass"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert!(dir.path().join("crosscheck.csv").exists());
}

#[test]
fn seeds_change_random_experiments() {
    let a = run_experiment(&ExperimentSpec::new("crosscheck").param("trials", 4).seed(1)).unwrap();
    let b = run_experiment(&ExperimentSpec::new("crosscheck").param("trials", 4).seed(2)).unwrap();
    let rows = |o: &krnorm::harness::ExperimentOutput| o.tables[0].rows.clone();
    assert_ne!(rows(&a), rows(&b));
}

#[test]
fn bad_specs_are_errors() {
    assert!(run_experiment(&ExperimentSpec::new("nope")).is_err());
    assert!(run_experiment(&ExperimentSpec::new("dilation").param("bogus", 1)).is_err());
    assert!(run_experiment(&ExperimentSpec::new("dilation").param("resolution", "many")).is_err());
}

#[test]
fn registry_names_are_unique_and_outputs_declared() {
    let mut names: Vec<&str> = REGISTRY.iter().map(|e| e.name).collect();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), REGISTRY.len());
    assert!(REGISTRY.iter().all(|e| !e.outputs.is_empty()));
}

#[test]
fn list_parameters_become_json_arrays() {
    let out = run_experiment(
        &ExperimentSpec::new("dilation")
            .param("resolution", 240)
            .param("factors", "1,3"),
    )
    .unwrap();
    let p = serde_json::to_value(&out.summary.params).unwrap();
    assert_eq!(p["factors"], serde_json::json!([1, 3]));
    assert_eq!(p["resolution"], 240);
    assert!(out.summary.all_pass());
}
