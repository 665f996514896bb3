//! The runner end to end: schema errors, exit codes, determinism, reruns.

use std::path::Path;
use std::process::Command;

use gosp::cli::{parse_config, rerun, run, CliError, RunManifest, SUMMARY_HEADER};
use gosp::model::ModelError;
use serde_json::json;

fn setup(config: serde_json::Value) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("op.json"), r#"{"d": 2, "X": [[0, 1], [1, 1]]}"#).unwrap();
    std::fs::write(dir.path().join("diag.json"), r#"{"d": 2, "X": [[-1, 1], [1, 1]]}"#).unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    (dir, cfg)
}

fn gosp(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gosp")).args(args).current_dir(cwd).output().unwrap()
}

fn read(p: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn minimal_survival_config() {
    let (_d, cfg) = setup(json!({"model": "op.json", "estimator": "survival", "p": 0.8, "T": 20, "reps": 10, "seed": 1}));
    let plan = parse_config(&cfg).unwrap();
    assert_eq!(plan.estimator, "survival");
}

#[test]
fn unknown_key_is_a_schema_error_at_its_pointer() {
    let (_d, cfg) =
        setup(json!({"model": "op.json", "estimator": "survival", "p": 0.8, "T": 20, "reps": 10, "seed": 1, "foo": 1}));
    match parse_config(&cfg) {
        Err(CliError::Schema { pointer, .. }) => assert_eq!(pointer, "/foo"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sublattice_model_is_invalid() {
    let (_d, cfg) = setup(json!({"model": "diag.json", "estimator": "survival", "p": 0.8, "T": 20, "reps": 10, "seed": 1}));
    match parse_config(&cfg) {
        Err(CliError::ModelInvalid(ModelError::ProperSublattice(k))) => assert_eq!(k.to_string(), "2"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn full_density_survival_has_mean_one() {
    let (d, cfg) = setup(json!({"model": "op.json", "estimator": "survival", "p": 1.0, "T": 30, "reps": 8, "seed": 4}));
    let art = run(&parse_config(&cfg).unwrap(), 2, d.path().join("out")).unwrap();
    let csv = String::from_utf8(read(&art.summary)).unwrap();
    assert!(!csv.contains('\r'));
    let row = csv.lines().nth(1).unwrap();
    assert_eq!(row.split(',').nth(4), Some("1"));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let (d, cfg) = setup(json!({"model": "op.json", "estimator": "edges", "p": 0.8, "T": 200, "reps": 40, "seed": 9}));
    let plan = parse_config(&cfg).unwrap();
    let one = run(&plan, 1, d.path().join("one")).unwrap();
    let eight = run(&plan, 8, d.path().join("eight")).unwrap();
    assert_eq!(read(&one.summary), read(&eight.summary));
    assert_eq!(read(&one.results), read(&eight.results));
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let (d, cfg) = setup(json!({"model": "op.json", "estimator": "simulate", "p": 0.8, "T": 64, "seed": 1, "reps": 3}));
    let first = run(&parse_config(&cfg).unwrap(), 3, d.path().join("a")).unwrap();
    let again = rerun(&first.manifest, 1, d.path().join("b")).unwrap();
    assert_eq!(read(&first.results), read(&again.results));
    assert_eq!(read(&first.summary), read(&again.summary));
    let m = RunManifest::read(&first.manifest).unwrap();
    assert_eq!(m.mixer, gosp::field::MIXER_ID);
    assert_eq!(m.status, "complete");
    assert!(m.wall_seconds.is_some() && m.per_replica_seconds.is_some());
}

#[test]
fn rerun_refuses_a_changed_model() {
    let (d, cfg) = setup(json!({"model": "op.json", "estimator": "survival", "p": 0.8, "T": 10, "reps": 3, "seed": 1}));
    let first = run(&parse_config(&cfg).unwrap(), 1, d.path().join("a")).unwrap();
    std::fs::write(d.path().join("op.json"), r#"{"d": 2, "X": [[0, 1], [1, 1], [2, 1]]}"#).unwrap();
    assert!(matches!(rerun(&first.manifest, 1, d.path().join("b")), Err(CliError::Manifest(_))));
}

#[test]
fn binary_exit_codes() {
    let (d, _) = setup(json!({}));
    let ok = gosp(&["survival", "--model", "op.json", "--p", "1", "--T", "5", "--reps", "2", "--seed", "1", "--out", "o"], d.path());
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with(SUMMARY_HEADER));

    // shape refuses a parameter at which almost nothing survives
    let refused = gosp(&["shape", "--model", "op.json", "--p", "0.1", "--T", "20", "--reps", "5", "--seed", "1", "--out", "r"], d.path());
    assert_eq!(refused.status.code(), Some(2));
    let m = RunManifest::read(d.path().join("r/manifest.json")).unwrap();
    assert_eq!(m.status, "refused");
    assert!(!d.path().join("r/results.jsonl").exists());

    let bad = gosp(&["validate", "--model", "diag.json"], d.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("proper sublattice"));

    let good = gosp(&["validate", "--model", "diag.json", "--sublattice", "true"], d.path());
    assert_eq!(good.status.code(), Some(0));
}

#[test]
fn every_subcommand_is_listed() {
    let out = gosp(&["--help"], Path::new("."));
    let help = String::from_utf8_lossy(&out.stdout);
    for name in gosp::cli::schema::ESTIMATORS {
        assert!(help.contains(name), "{name}");
    }
}

#[test]
fn run_and_rerun_subcommands() {
    let (d, _) =
        setup(json!({"model": "op.json", "estimator": "crossing", "p": 0.8, "L": 20, "eps": 0.2, "slope": "3/4", "reps": 20, "seed": 5}));
    let a = gosp(&["run", "--config", "cfg.json", "--out", "a", "--threads", "2"], d.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = gosp(&["rerun", "--manifest", "a/manifest.json", "--out", "b", "--threads", "5"], d.path());
    assert_eq!(b.status.code(), Some(0), "{}", String::from_utf8_lossy(&b.stderr));
    assert_eq!(read(d.path().join("a/results.jsonl")), read(d.path().join("b/results.jsonl")));
    let jsonl = String::from_utf8(read(d.path().join("a/results.jsonl"))).unwrap();
    assert!(jsonl.lines().all(|l| !l.ends_with(' ') && serde_json::from_str::<serde_json::Value>(l).is_ok()));
}
