use std::path::PathBuf;
use std::process::{Command, Output};

use veritrig::oracle::AlgoResultJson;
use veritrig::verify::SuiteReport;

fn veritrig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_veritrig"))
        .args(args)
        .env_remove("VERITRIG_ITER_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Value of `key` in the aligned key/value table.
fn field(out: &Output, key: &str) -> String {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(key).filter(|rest| rest.starts_with(' ')).map(|rest| rest.trim().to_string()))
        .unwrap_or_else(|| panic!("no {key} in {}", stdout(out)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("veritrig-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn pi_half() {
    let out = veritrig(&["pi", "--eps", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(field(&out, "value"), "304/105");
    assert_eq!(field(&out, "iterations"), "3");
}

#[test]
fn decimal_eps_is_exact() {
    let out = veritrig(&["pi", "--eps", "0.5"]);
    assert_eq!(field(&out, "value"), "304/105");
    assert_eq!(field(&out, "bound"), "1/2");
}

#[test]
fn fixcos_hand_trace() {
    let out = veritrig(&["fixcos", "--format", "1/256:[-8,64]", "--eps", "1/4", "--x", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(field(&out, "value"), "7/8");
    assert_eq!(field(&out, "n"), "2");
    // 1/4 + 3/255
    assert_eq!(field(&out, "bound"), "89/340");
}

#[test]
fn golden_cos_50() {
    let out = veritrig(&["golden", "--x", "50", "--eps", "1/100000000", "--digits", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0.9649660286\n");
}

#[test]
fn json_round_trip_is_idempotent() {
    for args in [
        &["pi", "--eps", "1/10", "--output", "json"][..],
        &["cos", "--x", "-3/4", "--eps", "1/1000", "--zerone", "--output", "json"],
        &["fixsin", "--format", "1/2^16:[-8,1024]", "--eps", "1/1000", "--x", "0.5", "--output", "json"],
    ] {
        let text = stdout(&veritrig(args));
        let parsed: AlgoResultJson = serde_json::from_str(&text).unwrap();
        let rendered = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
        assert_eq!(rendered, text);
        let again: AlgoResultJson = serde_json::from_str(&rendered).unwrap();
        assert_eq!(again, parsed);
    }
}

#[test]
fn unbounded_and_taylor_agree() {
    let unbounded = veritrig(&["cos", "--x", "1", "--eps", "1/1000000000000", "--unbounded"]);
    let taylor = veritrig(&["cos", "--x", "1", "--eps", "1/1000000"]);
    let a: f64 = field(&unbounded, "decimal").parse().unwrap();
    let b: f64 = field(&taylor, "decimal").parse().unwrap();
    assert!((a - b).abs() <= 2e-6);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(veritrig(&["pi"]).status.code(), Some(1));
    assert_eq!(veritrig(&["pi", "--eps", "one"]).status.code(), Some(1));
    assert_eq!(veritrig(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(veritrig(&["fixcos", "--format", "1/1:[0,1]", "--eps", "1/4", "--x", "0"]).status.code(), Some(1));
    assert_eq!(veritrig(&["verify", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(veritrig(&["--help"]).status.code(), Some(0));
}

#[test]
fn precondition_errors_exit_2() {
    assert_eq!(veritrig(&["pi", "--eps", "0"]).status.code(), Some(2));
    assert_eq!(veritrig(&["cos", "--x", "2", "--eps", "1/10", "--zerone"]).status.code(), Some(2));
    let out = veritrig(&["fixcos", "--format", "1/256:[-8,64]", "--eps", "1/4", "--x", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x = 2"));
    // eps below the grid step rounds to zero
    let out = veritrig(&["fixcos", "--format", "1/256:[-8,64]", "--eps", "1/1000", "--x", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repro_table_default_scan() {
    let out = veritrig(&["repro-table1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 601);
    assert_eq!(lines[0], "0.000000e+00  1.000000e+00  ");
    assert_eq!(lines[2], "1.000000e-01  9.950042e-01  ");
    assert!(lines[600].ends_with("-4.537154e+04  "), "{}", lines[600]);
}

#[test]
fn repro_table_csv() {
    let out = veritrig(&["repro-table1", "--max", "0.1", "--output", "csv"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("x,value"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn iteration_cap_from_env_and_flag() {
    let capped = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_veritrig"));
        cmd.args(["repro-table1", "--min", "5", "--max", "5"]).args(extra);
        match env {
            Some(v) => cmd.env("VERITRIG_ITER_CAP", v),
            None => cmd.env_remove("VERITRIG_ITER_CAP"),
        };
        cmd.output().unwrap().status.code()
    };
    assert_eq!(capped(None, &[]), Some(0));
    assert_eq!(capped(Some("3"), &[]), Some(2));
    assert_eq!(capped(Some("3"), &["--iteration-cap", "100"]), Some(0));
    assert_eq!(capped(Some("many"), &[]), Some(1));
}

#[test]
fn config_file_supplies_defaults() {
    let path = scratch("fix.conf");
    std::fs::write(&path, "# hand trace\nformat = 1/256:[-8,64]\neps = 1/4\nx = 1/2\n").unwrap();
    let out = veritrig(&["fixcos", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(field(&out, "value"), "7/8");
    // flags win over the file
    let out = veritrig(&["fixcos", "--config", path.to_str().unwrap(), "--x", "0"]);
    assert_eq!(field(&out, "value"), "1");
    std::fs::write(&path, "colour = blue\n").unwrap();
    assert_eq!(veritrig(&["pi", "--config", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn trace_files() {
    let csv = scratch("trace.csv");
    let out = veritrig(&[
        "fixcos",
        "--format",
        "1/256:[-8,64]",
        "--eps",
        "1/4",
        "--x",
        "1/2",
        "--trace",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text, "k,tc,cs,tcfp,csfp,delta,delta_bound,ep,epfp\n1,-1/8,1,-1/8,1,0,3/1024,-1/2,1/2\n");

    let json = scratch("trace.json");
    let args =
        ["fixsin", "--format", "1/2^16:[-8,1024]", "--eps", "1/100000", "--x", "-1", "--trace", json.to_str().unwrap()];
    assert_eq!(veritrig(&args).status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 3);
    assert!(v["final_delta"].is_string());
}

#[test]
fn verify_reports_seed_and_counts() {
    let out = veritrig(&["verify", "--suite", "identities", "--samples", "4", "--seed", "42", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: SuiteReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.seed, 42);
    assert!(report.checks.iter().all(|c| c.samples == 4 && c.failed == 0));
    let again = veritrig(&["verify", "--suite", "identities", "--samples", "4", "--seed", "42", "--output", "json"]);
    assert_eq!(stdout(&again), stdout(&out));

    let table = veritrig(&["verify", "--suite", "appendix", "--samples", "3"]);
    assert_eq!(table.status.code(), Some(0));
    assert!(stdout(&table).starts_with("suite appendix seed "));
    assert!(stdout(&table).contains("violations 0"));
}
