use std::fs;
use std::path::Path;
use std::process::Command;

use fatou::harness::emit::parse_trace_csv;
use fatou::harness::{decide, info, Verdict};
use fatou::measures::trace::{estimate_limit, ClassifierOptions};

fn fatou() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fatou"));
    c.env_remove("FATOU_OUT_DIR");
    c
}

fn run_into(dir: &Path, args: &[&str]) -> std::process::Output {
    fatou().arg("run").args(args).arg("--out").arg(dir).output().unwrap()
}

#[test]
fn nec1_emits_two_csvs_and_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["nec1_counterexample"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sub = dir.path().join("nec1_counterexample");
    let mut names: Vec<String> = fs::read_dir(&sub)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["kernel_convolution.csv", "mean_ratio.csv", "report.json"]);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(sub.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "counterexample-behavior-confirmed");
    assert_eq!(report["config"]["trace_tolerance"], 1e-4);
    assert_eq!(report["traces"][1]["classification"]["kind"], "oscillatory");
}

#[test]
fn reports_are_byte_stable_and_verdicts_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(run_into(d.path(), &["repnikov_counterexample"]).status.success());
    }
    let sub = "repnikov_counterexample";
    for f in ["report.json", "phi_counterexample.csv", "psi_ball.csv"] {
        let x = fs::read(a.path().join(sub).join(f)).unwrap();
        let y = fs::read(b.path().join(sub).join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
    let opts = ClassifierOptions::default();
    let classes: Vec<_> = ["phi_counterexample.csv", "psi_ball.csv"]
        .iter()
        .map(|f| {
            let (p, v) = parse_trace_csv(&fs::read_to_string(a.path().join(sub).join(f)).unwrap()).unwrap();
            estimate_limit(&p, &v, &opts).0
        })
        .collect();
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join(sub).join("report.json")).unwrap()).unwrap();
    let expected = info(sub).unwrap().expected;
    let verdict = decide(expected, Some(&classes[0]), Some(&classes[1]), None, 5e-3);
    assert_eq!(report["verdict"], serde_json::to_value(verdict).unwrap());
    assert_eq!(verdict, Verdict::CounterexampleBehaviorConfirmed);
}

#[test]
fn config_overrides_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"kernel": "gaussian", "measure": "lebesgue"}"#).unwrap();
    let out = run_into(dir.path(), &["rudin_converse", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    assert!(dir.path().join("rudin_converse/report.json").exists());
    assert!(!dir.path().join("rudin_converse/mean_ratio.csv").exists());

    assert_eq!(run_into(dir.path(), &["no_such_scenario"]).status.code(), Some(4));
    fs::write(&cfg, r#"{"grid": {"start": 0.1, "ratio": 1.5, "count": 48}}"#).unwrap();
    assert_eq!(run_into(dir.path(), &["rudin_converse", "--config", cfg.to_str().unwrap()]).status.code(), Some(4));
    fs::write(&cfg, r#"{"measure": "density:unknown"}"#).unwrap();
    assert_eq!(run_into(dir.path(), &["rudin_converse", "--config", cfg.to_str().unwrap()]).status.code(), Some(4));
    // Lebesgue measure with the non-Tauberian kernel: both traces converge, so
    // the expected counterexample behavior is not observed.
    fs::write(&cfg, r#"{"measure": "lebesgue"}"#).unwrap();
    assert_eq!(run_into(dir.path(), &["nec1_counterexample", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = fatou()
        .args(["run", "bounded_harmonic", "--format", "csv"])
        .env("FATOU_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("bounded_harmonic/phi_poisson.csv").exists());
}

#[test]
fn list_mellin_and_check() {
    let out = fatou().arg("list").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.contains("mt2_growth") && text.contains("growth-check-passed"));

    let out = fatou()
        .args(["mellin", "--kernel", "counterexample", "--n", "1", "--ymin", "-4", "--ymax", "4", "--points", "81"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("y,re,im,modulus\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("# zero")).count(), 2);

    let out = fatou().args(["check", "decay", "--kernel", "gaussian", "--n", "2"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let out = fatou().args(["check", "comparison", "--kernel", "ball", "--n", "1"]).output().unwrap();
    assert!(!out.status.success());
    let out = fatou().args(["check", "tauberian", "--kernel", "bogus", "--n", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));

    let help = fatou().args(["run", "--help"]).output().unwrap();
    let help = String::from_utf8(help.stdout).unwrap();
    for needle in ["48 grid points", "ratio 0.75", "ratio 1.5", "1e-4", "5e-3", "FATOU_OUT_DIR"] {
        assert!(help.contains(needle), "help lacks {needle}");
    }
}
