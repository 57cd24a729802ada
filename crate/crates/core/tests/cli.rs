use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    run_env(args, None)
}

fn run_env(args: &[&str], budget: Option<&str>) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_padic-cf"));
    cmd.args(args).env_remove("PADIC_CF_BUDGET");
    if let Some(b) = budget {
        cmd.env("PADIC_CF_BUDGET", b);
    }
    let out = cmd.output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn expand_ruban_example() {
    let (code, out, _) = run(&["expand", "--p", "7", "--algorithm", "ruban", "--value", "-2/5"]);
    assert_eq!(code, 0);
    assert_eq!(out, "[1, 44/7 | 48/7]\nstatus: periodic(2,1)\n");
}

#[test]
fn expand_browkin2_example() {
    let (code, out, _) = run(&["expand", "--p", "5", "--algorithm", "browkin2", "--value", "22/7"]);
    assert_eq!(code, 0);
    assert_eq!(out, "[1, -1/5, -1, -3/5, 1]\nstatus: finite\n");
}

#[test]
fn expand_json() {
    let (code, out, _) = run(&["expand", "--p", "7", "--algorithm", "browkin1", "--value", "-2/5", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["algorithm"], "browkin1");
    assert_eq!(v["status"]["kind"], "finite");
    assert_eq!(v["quotients"].as_array().unwrap().len(), 2);
}

#[test]
fn input_errors() {
    let (code, _, err) = run(&["expand", "--p", "4", "--algorithm", "ruban", "--value", "1/2"]);
    assert_eq!(code, 1);
    assert!(err.contains("InvalidPrime"));

    let (code, _, err) = run(&["expand", "--p", "7", "--algorithm", "browkin1", "--value", "quad:0,1,3"]);
    assert_eq!(code, 1);
    assert!(err.contains("NonResidue"));

    let (code, _, err) = run(&["expand", "--p", "7", "--algorithm", "euclid", "--value", "1"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());

    let (code, _, _) = run(&["expand", "--p", "7"]);
    assert_eq!(code, 1);
}

#[test]
fn truncation_and_budget_variable() {
    let args = ["expand", "--p", "7", "--algorithm", "schneider", "--value", "quad:0,1,2"];
    let (code, out, _) = run_env(&args, Some("12"));
    assert_eq!(code, 2);
    assert!(out.ends_with("status: truncated(12)\n"), "{out}");

    let mut with_flag = args.to_vec();
    with_flag.extend(["--max-steps", "3"]);
    let (code, out, _) = run_env(&with_flag, Some("12"));
    assert_eq!(code, 2);
    assert!(out.ends_with("status: truncated(3)\n"));

    let (code, _, err) = run_env(&args, Some("lots"));
    assert_eq!(code, 1);
    assert!(err.contains("PADIC_CF_BUDGET"));
}

#[test]
fn classify_examples() {
    let (code, out, _) = run(&["classify", "--p", "7", "--algorithm", "ruban", "--value", "-2/5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "Periodic");
    assert_eq!(v["pre_period"], 2);
    assert_eq!(v["period"], 1);

    let (_, out, _) = run(&["classify", "--p", "5", "--algorithm", "schneider", "--value", "quad:0,1,-1"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "NotPeriodic");
    assert_eq!(v["certificate"], "DeWegerSign");

    let (_, out, _) = run(&["classify", "--p", "5", "--algorithm", "browkin1", "--value", "3/4"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "Finite");
}

#[test]
fn classify_undetermined_exits_two() {
    let (code, out, _) =
        run(&["classify", "--p", "7", "--algorithm", "browkin1", "--value", "quad:0,1,11", "--budget", "3"]);
    assert_eq!(code, 2);
    assert_eq!(out, "{\"steps_used\":3,\"verdict\":\"Undetermined\"}\n");
}

#[test]
fn approx_table() {
    let (code, out, _) = run(&["approx", "--p", "7", "--algorithm", "browkin1", "--value", "quad:0,1,2", "--depth", "20"]);
    assert_eq!(code, 0);
    let rows = out.lines().filter(|l| l.trim_start().starts_with(|c: char| c.is_ascii_digit())).count();
    assert_eq!(rows, 20);
    assert!(out.ends_with("mismatches: 0\n"));
    assert!(!out.contains("MISMATCH"));
}

#[test]
fn redei_square_root_of_two() {
    let (code, out, _) = run(&["redei", "--h", "0", "--d", "2", "--z", "1"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("[1 | 2, 2]"));
    assert!(out.contains("check: PASS"));
}

#[test]
fn redei_match_and_errors() {
    let (code, out, _) = run(&["redei", "--h", "1", "--d", "-5", "--z", "1", "--match-p", "7"]);
    assert_eq!(code, 0);
    assert!(out.contains("browkin2 match: z = "), "{out}");

    let (code, _, err) = run(&["redei", "--h", "1", "--d", "2", "--z", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("DegenerateZ"));
}

#[test]
fn jp_rational_pair() {
    let (code, out, _) = run(&["jp", "--p", "5", "--values", "22/7,3/4"]);
    assert_eq!(code, 0);
    assert!(out.contains("\nfinite\n"));
    assert!(out.contains("convergents at 2: (22/7, 3/4)"));
    assert!(out.contains("inputs recovered: yes"));
}

#[test]
fn jp_json() {
    let (code, out, _) =
        run(&["jp", "--p", "7", "--values", "quad:1,3,23,quad:5,3,23", "--depth", "6", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["profile"].as_array().unwrap().len(), 2);
    padic_cf::MjpExpansion::from_json(&v["expansion"]).unwrap();
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["expand", "--p", "5", "--algorithm", "mr-st", "--value", "quad:1,2,11,conj", "--format", "json"];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    for cmd in ["expand", "classify", "approx", "redei", "jp"] {
        assert!(out.contains(cmd));
    }
}
