use std::io::Write;
use std::process::{Command, Output, Stdio};

fn lcu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcu")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn subtype_omega_arrow() {
    let o = lcu(&["subtype", "Wv", "<=", "Wv -> Wc"]);
    assert_eq!(stdout(&o).trim(), "true");
    assert_eq!(o.status.code(), Some(0));
    let o = lcu(&["subtype", "Wv", "=", "Wv -> Wc"]);
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn subtype_false_exits_one() {
    let o = lcu(&["subtype", "Wc", "<=", "T Wv"]);
    assert_eq!(stdout(&o).trim(), "false");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn subtype_mixed_sorts_is_an_error() {
    let o = lcu(&["subtype", "Wv", "<=", "Wc"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sorts"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lcu(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lcu(&["translate", "unit x"]).status.code(), Some(2));
}

#[test]
fn fmt_round_trips() {
    let o = lcu(&["fmt", "unit x * \\y. unit y"]);
    assert_eq!(stdout(&o).trim(), "unit x * (\\y. unit y)");
}

#[test]
fn syntax_error_is_reported() {
    let o = lcu(&["fmt", "unit (x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn reduce_trace() {
    let o = lcu(&["reduce", "unit (\\x. unit x) * (\\x. unit x * x)"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines,
        [
            "betac@root  unit (\\x. unit x) * (\\x. unit x)",
            "betac@root  unit (\\x. unit x)",
            "normal form: unit (\\x. unit x)",
        ]
    );
}

#[test]
fn reduce_out_of_fuel_exits_three() {
    let o = lcu(&["reduce", "unit (\\x. unit x * x) * (\\x. unit x * x)", "--fuel", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("fuel-exhausted after 3 steps"));
}

#[test]
fn reduce_json() {
    let o = lcu(&["reduce", "unit y * (\\x. unit x)", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcome"], "normal-form");
    assert_eq!(v["steps"], 1);
    assert_eq!(v["term"], "unit y");
}

#[test]
fn etac_warns() {
    let o = lcu(&["reduce", "unit y * (\\x. unit x)", "--rules", "betac,id,ass,etac"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not confluent"));
}

#[test]
fn eval_omega_diverges() {
    let o = lcu(&["eval", "unit (\\x. unit x * x) * (\\x. unit x * x)"]);
    assert_eq!(stdout(&o).trim(), "diverges: cycle detected after 2");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_converges() {
    let o = lcu(&["eval", "unit (\\x. unit x) * (\\x. unit x * x)"]);
    assert_eq!(stdout(&o).trim(), "converges: \\x. unit x");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn eval_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lcu"))
        .args(["eval", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"unit (\\z. unit z)\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o).trim(), "converges: \\z. unit z");
}

#[test]
fn translate_both_ways() {
    let o = lcu(&["translate", "--to-moggi", "unit f * \\x. unit x"]);
    assert_eq!(stdout(&o).trim(), "let x0 = f in (\\x. x) x0");
    let o = lcu(&["translate", "--from-moggi", "f (g h)"]);
    assert_eq!(stdout(&o).trim(), "unit h * g * f");
}

#[test]
fn infer_identity() {
    let o = lcu(&["infer", "unit (\\x. unit x)", "--rank", "1", "--width", "1"]);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "T Wv"));
}

#[test]
fn interp_table_is_dot() {
    let o = lcu(&["interp", "--table", "--rank", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("digraph"));
}

const ID_DERIV: &str = "(rule arrow-i (concl |- \\x. unit x : Wv -> T Wv)
  (premises
    (rule unit-i (concl x:Wv |- unit x : T Wv)
      (premises (rule ax (concl x:Wv |- x : Wv) (premises))))))";

#[test]
fn typecheck_file() {
    let dir = std::env::temp_dir().join(format!("lcu-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("id.deriv");
    std::fs::write(&good, ID_DERIV).unwrap();
    let o = lcu(&["typecheck", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("valid:"));

    // the axiom claims more than the basis gives
    let bad = dir.join("bad.deriv");
    std::fs::write(&bad, ID_DERIV.replace("|- x : Wv)", "|- x : Wv -> T Wv)")).unwrap();
    let o = lcu(&["typecheck", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stdout(&o).is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn prop_json_report() {
    let o = lcu(&["prop", "triangle", "--cases", "10", "--seed", "7", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suite"], "triangle");
    assert_eq!(v["cases"], 10);
}

#[test]
fn prop_unknown_suite() {
    let o = lcu(&["prop", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}
