use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use timed_ni::format::ResultDocument;

fn model(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("models")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_timed-ni"));
    c.args(args).env_remove("TNI_STATE_BUDGET");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn reach_at_fixed_valuations() {
    let f = model("fig1.model");
    let o = run(&["reach", &f, "--target", "l2", "--valuation", "p=1"]);
    assert_eq!((code(&o), stdout(&o).trim()), (1, "unreachable"));
    let o = run(&["reach", &f, "--target", "l2", "--valuation", "p=9/10"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "reachable"));
    let o = run(&["reach", &f, "--target", "l2", "--valuation", "p=0.9"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn check_examples() {
    let f = model("fig1.model");
    let o = run(&["noninterf", "check", &f, "--valuation", "p=11/10", "--n", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("NO"), "{}", stdout(&o));
    let o = run(&["noninterf", "check", &f, "--valuation", "p=11/10", "--n", "2"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "YES"));
}

#[test]
fn bounded_synthesis_reports_incompleteness() {
    let f = model("fig1.model");
    let o = run(&["synth", "ef", &f, "--target", "l2", "--depth-limit", "10"]);
    assert_eq!(code(&o), 2);
    assert_eq!(
        stdout(&o).trim(),
        "1 < p && p < 3/2 || 2 < p && p < 3 || 2/9 < p && p < 1"
    );
    assert!(stderr(&o).contains("incomplete"), "{}", stderr(&o));
    assert!(stderr(&o).contains("under-approximation"));
    let o = run(&["synth", "safety", &f, "--target", "l2", "--depth-limit", "10"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("over-approximation"));
}

#[test]
fn empty_and_universal_constraints_print_canonically() {
    let f = model("fig1.model");
    // depth 0 sees only l0
    let o = run(&["synth", "ef", &f, "--target", "l2", "--depth-limit", "0"]);
    assert_eq!(stdout(&o).trim(), "false");
    let o = run(&["synth", "safety", &f, "--target", "l2", "--depth-limit", "0"]);
    assert_eq!(stdout(&o).trim(), "p >= 0");
}

#[test]
fn error_exit_codes() {
    let f = model("fig1.model");
    let cases: &[(&[&str], i32)] = &[
        (&["frobnicate"], 3),
        (&["reach", &f, "--target", "l2", "--bogus"], 3),
        (&["reach", &f, "--target", "l9", "--valuation", "p=1"], 3),
        (&["reach", &f, "--target", "l2", "--valuation", "q=1"], 3),
        (&["reach", &f, "--target", "l2", "--valuation", "p=x"], 3),
        (&["reach", "/nonexistent/m.model", "--target", "l2"], 7),
    ];
    for (args, want) in cases {
        let o = run(args);
        assert_eq!(code(&o), *want, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    let bad = scratch("bad.model", "clock x;\nautomaton A { loc l0 init { goto } }\n");
    let o = run(&["reach", bad.to_str().unwrap(), "--target", "l0"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("2:34"), "{}", stderr(&o));
    let unknown_clock = scratch("sem.model", "clock x;\nautomaton A { loc l0 init { when (z > 1) goto l0; } }\n");
    let o = run(&["reach", unknown_clock.to_str().unwrap(), "--target", "l0"]);
    assert!(matches!(code(&o), 4 | 5), "{}", stderr(&o));
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn state_budget_from_the_environment() {
    let f = model("fig1.model");
    let args = ["synth", "ef", &f, "--target", "l2", "--depth-limit", "30"];
    let o = run_env(&args, &[("TNI_STATE_BUDGET", "5")]);
    assert_eq!(code(&o), 6, "{}", stderr(&o));
    let o = run_env(&args, &[("TNI_STATE_BUDGET", "lots")]);
    assert_eq!(code(&o), 3);
}

#[test]
fn json_output_is_deterministic() {
    let f = model("fig1.model");
    let commands: Vec<Vec<&str>> = vec![
        vec!["reach", &f, "--target", "l2", "--valuation", "p=9/10"],
        vec!["synth", "ef", &f, "--target", "l2", "--depth-limit", "12"],
        vec!["synth", "safety", &f, "--target", "l2", "--depth-limit", "12"],
        vec!["noninterf", "check", &f, "--valuation", "p=11/10", "--n", "1"],
        vec!["noninterf", "synth", &f, "--mode", "bad", "--bad", "l2", "--depth-limit", "10"],
    ];
    for cmd in commands {
        let mut args = cmd.clone();
        args.extend(["--json", "-"]);
        let a = ResultDocument::from_json(&stdout(&run(&args))).unwrap();
        let b = ResultDocument::from_json(&stdout(&run(&args))).unwrap();
        assert_eq!(a.comparable_json(), b.comparable_json(), "{cmd:?}");
    }
    // SOURCE_DATE_EPOCH pins the timestamp, so the raw bytes agree too
    let args = ["synth", "ef", &f, "--target", "l2", "--depth-limit", "8", "--json", "-"];
    let env = [("SOURCE_DATE_EPOCH", "1700000000")];
    assert_eq!(stdout(&run_env(&args, &env)), stdout(&run_env(&args, &env)));
}

#[test]
fn verify_sample_reads_stored_results() {
    let f = model("fig1.model");
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&out).unwrap();
    let ni = out.join("ni.json");
    let o = run(&[
        "noninterf", "synth", &f, "--mode", "bad", "--bad", "l2", "--depth-limit", "12",
        "--json", ni.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let o = run(&["verify-sample", &f, "--result", ni.to_str().unwrap(), "--grid", "p=0:4:1/2,n=0:4:1/2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("81 agreements"), "{}", stdout(&o));
    let ef = out.join("ef.json");
    run(&["synth", "ef", &f, "--target", "l2", "--depth-limit", "40", "--json", ef.to_str().unwrap()]);
    let o = run(&["verify-sample", &f, "--result", ef.to_str().unwrap(), "--grid", "p=0:4:1/4"]);
    assert!(stdout(&o).contains("17 agreements"), "{}", stdout(&o));
}

#[test]
fn replay_a_run_into_l2() {
    let f = model("fig1.model");
    let loop3 = r#"[{"delay":"9/10","edge":"0.0"},{"delay":"9/10","edge":"0.0"},
        {"delay":"9/10","edge":"0.0"},{"delay":"0","edge":"0.2"}]"#;
    let path = scratch("run.json", loop3);
    let o = run(&["replay", &f, "--run", path.to_str().unwrap(), "--valuation", "p=9/10"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "legal, ends in l2"));
    let o = run(&["replay", &f, "--run", path.to_str().unwrap(), "--valuation", "p=1"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("illegal"));
}

#[test]
fn fischer_check_in_bad_mode() {
    let f = model("fischer.model");
    let o = run(&[
        "noninterf", "check", &f, "--valuation", "a=1,b=7,acc=2,ucs=1", "--n", "3",
        "--bad", "P1.CS&P2.CS",
    ]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "YES"), "{}", stderr(&o));
    let o = run(&[
        "noninterf", "check", &f, "--valuation", "a=1,b=6,acc=1,ucs=6", "--n", "2",
        "--bad", "P1.CS&P2.CS",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("bad and reachable: (CS,CS,"), "{}", stdout(&o));
}
