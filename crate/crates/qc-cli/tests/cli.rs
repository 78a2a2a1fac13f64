//! End-to-end tests of the `qc` binary: exit codes, output shapes, and
//! report determinism.

use std::process::{Command, Output};

fn qc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn qc_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qc"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn parse_prints_canonical_form() {
    let out = qc(&["parse", "A z. ((z in x)) -> E a. a in z"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "A z. z in x -> E a. a in z");
}

#[test]
fn parse_reads_files_and_stdin() {
    let dir = std::env::temp_dir().join("qc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("formula.qc");
    std::fs::write(&path, "x = x & y = y\n").unwrap();
    let out = qc(&["parse", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "x = x & y = y");
}

#[test]
fn parse_error_exits_2() {
    let out = qc(&["parse", "--literal", "x in"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("end of input"), "{}", stderr(&out));
}

#[test]
fn count_quantifiers_of_catalog_names() {
    let out = qc(&["count", "--quantifiers", "AC**"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "5");
    let out = qc(&["count", "C3"]);
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn count_tokens_requires_official_renderings() {
    let long: i64 = stdout(&qc(&["count", "--tokens", "AC**"]))
        .trim()
        .parse()
        .unwrap();
    let short: i64 = stdout(&qc(&["count", "--tokens", "ACbar**"]))
        .trim()
        .parse()
        .unwrap();
    assert_eq!(long - short, 16);
    let out = qc(&["count", "--tokens", "a in z & a in y"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_valid_counterexample_exits_1_with_witness_json() {
    let out = qc(&["check-valid", "A x. A y. x = y", "--nmax", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let json_start = text.find('{').expect("witness json");
    let witness: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
    assert_eq!(witness["domain_size"], 2);
}

#[test]
fn check_valid_free_variables_need_the_flag() {
    let out = qc(&["check-valid", "ACh*", "--nmax", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qc(&["check-valid", "ACh*", "--nmax", "2", "--close-free"]);
    assert_eq!(out.status.code(), Some(1), "AC_h* is falsifiable");
}

#[test]
fn check_equiv_of_the_headline_sentences() {
    let out = qc(&["check-equiv", "AC*", "AC**", "--nmax", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("valid up to size 2"));
}

#[test]
fn size_cap_violations_exit_2_quickly() {
    let out = qc(&["check-valid", "--literal", "x = x", "--nmax", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cap"), "{}", stderr(&out));
    let out = qc_env(
        &["check-valid", "--literal", "x = x", "--nmax", "3"],
        &[("QC_MAX_N", "2")],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prenex_reports_prefix_and_verifies() {
    let out = qc(&["prenex", "C3", "--verify", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("prefix: ∀∃∀"), "{text}");
    assert!(text.contains("all valid up to size 2"), "{text}");
}

#[test]
fn catalog_list_and_show() {
    let out = qc(&["catalog", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("AC**"));
    assert!(text.contains("thm4.1-step2.6"));
    let out = qc(&["catalog", "show", "B"]);
    assert!(stdout(&out).contains("official:"));
    let out = qc(&["catalog", "show", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("valid names"));
}

#[test]
fn hf_operations() {
    let out = qc(&["hf", "phi", "{{},{{}}}", "{{{},{{}}},{{{}}}}"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "{{}}");
    let out = qc(&["hf", "star", "{{{}},{{},{{}}}}"]);
    assert_eq!(stdout(&out).trim(), "{{},{{{}}}}");
    let out = qc(&["hf", "choose", "{{{}}}"]);
    assert_eq!(out.status.code(), Some(0));
    let trace: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(trace["branch"], "pair_with_y_prime");
    assert_eq!(trace["result"]["set"], "{{},{{}}}");
    // Codes are accepted interchangeably with braces.
    let out = qc(&["hf", "check", "3", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "true");
    let out = qc(&["hf", "check", "{{}}", "6"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "false");
    // The construction refuses inputs outside its hypothesis.
    let out = qc(&["hf", "choose", "{{}}"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_paper_writes_deterministic_reports() {
    let dir = std::env::temp_dir().join("qc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path_a = dir.join("report-a.json");
    let path_b = dir.join("report-b.json");
    let args = |path: &std::path::Path| {
        vec![
            "verify-paper".to_owned(),
            "--nmax".to_owned(),
            "2".to_owned(),
            "--rank".to_owned(),
            "3".to_owned(),
            "--count".to_owned(),
            "100".to_owned(),
            "--json".to_owned(),
            path.to_str().unwrap().to_owned(),
        ]
    };
    let run = |path: &std::path::Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_qc"))
            .args(args(path))
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    };
    run(&path_a);
    run(&path_b);
    let strip = |path: &std::path::Path| -> serde_json::Value {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        for item in v.as_array_mut().unwrap() {
            item.as_object_mut().unwrap().remove("millis");
        }
        v
    };
    assert_eq!(strip(&path_a), strip(&path_b));
}

#[test]
fn verify_paper_fault_injection_exits_1() {
    let out = qc(&[
        "verify-paper",
        "--nmax",
        "2",
        "--rank",
        "3",
        "--count",
        "50",
        "--inject-fault",
        "choice-wrong-patch",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL"), "{text}");
    assert!(text.contains("witness"), "{text}");
    let out = qc(&["verify-paper", "--inject-fault", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let out = qc(&["definitely-not-a-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn jobs_flag_does_not_change_the_verdict() {
    let direct = qc(&["check-equiv", "AC*", "ACbar*", "--nmax", "2"]);
    let single = qc(&["--jobs", "1", "check-equiv", "AC*", "ACbar*", "--nmax", "2"]);
    assert_eq!(direct.status.code(), Some(0));
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(stdout(&direct), stdout(&single));
}

#[test]
fn rank_cap_env_is_honored() {
    let out = qc_env(&["hf", "star", "{{{{}}}}"], &[("QC_MAX_RANK", "2")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rank"), "{}", stderr(&out));
    let out = qc_env(&["hf", "star", "{{{{}}}}"], &[("QC_MAX_RANK", "4")]);
    assert_eq!(out.status.code(), Some(0));
}
