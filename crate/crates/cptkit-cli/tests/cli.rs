//! Black-box tests of the `cptkit` binary: subcommands, output artifacts
//! and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const FLYER: &str = include_str!("../../cptkit/tests/fixtures/thanksgiving.cml");

fn cptkit(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cptkit"));
    cmd.args(args);
    for (key, value) in envs {
        cmd.env(key, value);
    }
    cmd.output().expect("spawn cptkit")
}

fn write_flyer(dir: &Path) -> String {
    let input = dir.join("input.cml");
    fs::write(&input, FLYER).unwrap();
    input.to_string_lossy().into_owned()
}

#[test]
fn generate_offline_run() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_flyer(dir.path());
    let out = dir.path().join("out");
    let output = cptkit(
        &[
            "generate",
            "--input", &input,
            "--classes", "color",
            "--mode", "global",
            "--n", "3",
            "--predictor", "baseline",
            "--seed", "7",
            "--out", out.to_str().unwrap(),
        ],
        &[],
    );
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("variation_0:"), "{stdout}");
    assert!(stdout.contains("manifest at"), "{stdout}");
    for name in [
        "variation_0.cml", "variation_1.cml", "variation_2.cml",
        "variation_0.svg", "masked.cml", "bindings.json", "report.json",
    ] {
        assert!(out.join(name).exists(), "{name} missing");
    }
}

#[test]
fn generate_accepts_config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_flyer(dir.path());
    let out = dir.path().join("out");
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        format!(
            r#"{{"input": "{input}", "classes": ["color"], "mode": "global", "variations": 1, "seed": 3}}"#
        ),
    )
    .unwrap();
    let output = cptkit(
        &[
            "generate",
            "--config", config.to_str().unwrap(),
            "--n", "2",
            "--out", out.to_str().unwrap(),
        ],
        &[],
    );
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["variations"], 2, "flag overrides file");
    assert_eq!(manifest["config"]["seed"], 3, "file value survives");
}

#[test]
fn missing_input_is_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let output = cptkit(
        &[
            "generate",
            "--input", "/nonexistent/x.cml",
            "--out", dir.path().join("out").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("INPUT"));
}

#[test]
fn unknown_class_is_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_flyer(dir.path());
    let output = cptkit(
        &[
            "generate",
            "--input", &input,
            "--classes", "sparkle",
            "--out", dir.path().join("out").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn usage_errors_are_exit_code_2() {
    let output = cptkit(&["generate", "--bogus-flag"], &[]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unreachable_remote_endpoint_is_exit_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_flyer(dir.path());
    let output = cptkit(
        &[
            "generate",
            "--input", &input,
            "--classes", "color",
            "--n", "1",
            "--predictor", "remote",
            "--out", dir.path().join("out").to_str().unwrap(),
        ],
        &[
            ("CPTKIT_ENDPOINT", "http://127.0.0.1:9/complete"),
            ("CPTKIT_RETRIES", "0"),
            ("CPTKIT_TIMEOUT_MS", "300"),
        ],
    );
    assert_eq!(output.status.code(), Some(3), "{}", String::from_utf8_lossy(&output.stderr));
}

#[test]
fn evaluate_prints_table_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::write(corpus.join("a.cml"), FLYER).unwrap();
    let labels = dir.path().join("labels.csv");
    fs::write(&labels, "file,label\na.cml,human\n").unwrap();
    let csv = dir.path().join("rates.csv");

    let output = cptkit(
        &[
            "evaluate",
            "--corpus", corpus.to_str().unwrap(),
            "--labels", labels.to_str().unwrap(),
            "--out", csv.to_str().unwrap(),
        ],
        &[],
    );
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("human"), "{stdout}");
    assert!(stdout.contains("overall"), "{stdout}");
    let csv_text = fs::read_to_string(&csv).unwrap();
    assert!(csv_text.contains("human,1,0.0,100.0,0.0,100.0,100.0,100.0"), "{csv_text}");
}

#[test]
fn judge_eval_prints_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("verdicts.jsonl");
    fs::write(&log, "{\"bucket\":\"clear_pass\"}\n{\"bucket\":\"clear_fail\"}\n").unwrap();
    let human = dir.path().join("thumbs.csv");
    fs::write(&human, "up\ndown\n").unwrap();

    let output = cptkit(
        &[
            "judge-eval",
            "--log", log.to_str().unwrap(),
            "--human", human.to_str().unwrap(),
        ],
        &[],
    );
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("Judge: Fail"), "{stdout}");
    assert!(stdout.contains("1 (50.0%)"), "{stdout}");
    assert!(stdout.contains("thumbs-up rate 50.0%"), "{stdout}");
}
