use std::io::Write;
use std::process::{Command, Output, Stdio};

fn thinlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thinlab"))
        .args(args)
        .env_remove("THINLAB_BUDGET_NODES")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const ESCALATED: &str = "3*geo(2,1,0,0) | (3*geo(2,1,0,0)+1)";

#[test]
fn classify_exit_codes() {
    let o = thinlab(&["classify", "geo(2,1,0,0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: ExactLevel 1"));

    let o = thinlab(&["classify", "ap(2,0)"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o)
        .contains("verdict: NotInTauStar path=() ancestor=0 repeat_shift=2 translation=0"));
    assert!(stdout(&o).contains("replay: verified"));

    let o = thinlab(&["classify", "ap(1,0)"]);
    assert_eq!(o.status.code(), Some(3));

    let o = thinlab(&["classify", "{1,2,3}"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ExactLevel 0"));
}

#[test]
fn classify_json_output() {
    let o = thinlab(&["classify", "--format", "json", ESCALATED]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verdict"]["verdict"], "ExactLevel");
    assert_eq!(v["verdict"]["level"], 2);
    assert_eq!(v["set"], "geo(2,3,0,0) | geo(2,3,1,0)");
    assert_eq!(v["terms"]["geo"][0]["c"], 3);
}

#[test]
fn unknown_under_env_budget() {
    let o = Command::new(env!("CARGO_BIN_EXE_thinlab"))
        .args([
            "classify",
            "9*geo(2,1,0,0) | (9*geo(2,1,0,0)+3) | (9*geo(2,1,0,0)+1) | (9*geo(2,1,0,0)+4)",
        ])
        .env("THINLAB_BUDGET_NODES", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("verdict: Unknown"));
}

#[test]
fn parse_errors_point_at_the_column() {
    let o = thinlab(&["classify", "geo(2,1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("column 10"));
    assert!(err.contains("\n  geo(2,1,0\n           ^"));

    let o = thinlab(&["tree", "{1,2} | ? "]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("        ^"));

    let o = thinlab(&["classify", "geo(3,1,0,0)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn printed_sets_reparse() {
    let o = thinlab(&[
        "classify",
        "2*(geo(4,-3,5,2) | {1,-9}) & ap(3,1) | ap(6,5) + 2",
    ]);
    let first = stdout(&o);
    let printed = first
        .lines()
        .next()
        .unwrap()
        .strip_prefix("set: ")
        .unwrap()
        .to_string();
    let again = thinlab(&["classify", &printed]);
    assert_eq!(stdout(&again), first);
}

#[test]
fn tree_dumps() {
    let o = thinlab(&["tree", ESCALATED, "--depth", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = thinlab(&["tree", ESCALATED, "--depth", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let nodes = v["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 3);
    assert_eq!(nodes[0]["rank"], 2);
    assert!(nodes[1..]
        .iter()
        .all(|n| n["rank"] == 1 && n["path"].as_array().unwrap().len() == 1));

    let o = thinlab(&["tree", ESCALATED, "--depth", "2", "--format", "dot"]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph tau_tree {"));
    assert!(dot.trim_end().ends_with('}'));
    assert_eq!(dot.matches(" -> ").count(), 2);
}

#[test]
fn oracle_tables() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("z5.csv");
    let o = thinlab(&[
        "oracle",
        "--group",
        "z5",
        "--t",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("agreement"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "subset_bitmask,level");
    assert_eq!(lines.len(), 33);
    assert!(lines.contains(&"31,-1"));

    let o = thinlab(&["oracle", "--group", "b3", "--t", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 257);
    assert!(stderr(&o).contains("256 subsets"));

    let json = dir.path().join("b2.json");
    let o = thinlab(&[
        "oracle",
        "--group",
        "b2",
        "--format",
        "json",
        "--out",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v.is_object());

    assert_eq!(
        thinlab(&["oracle", "--group", "z30"]).status.code(),
        Some(2)
    );
    assert_eq!(thinlab(&["oracle", "--group", "q3"]).status.code(), Some(2));
}

#[test]
fn batch_preserves_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("batch.txt");
    let exprs = [
        "ap(2,0)",
        "{1,2,3}",
        "",
        ESCALATED,
        "geo(2,1,0,0)",
        "ap(1,0)",
    ];
    std::fs::write(&path, exprs.join("\n")).unwrap();
    let o = thinlab(&["classify", "--batch", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let lines: Vec<u64> = rows.iter().map(|r| r["line"].as_u64().unwrap()).collect();
    assert_eq!(lines, vec![1, 2, 4, 5, 6]);
    let verdicts: Vec<&str> = rows
        .iter()
        .map(|r| r["verdict"]["verdict"].as_str().unwrap())
        .collect();
    assert_eq!(
        verdicts,
        vec![
            "NotInTauStar",
            "ExactLevel",
            "ExactLevel",
            "ExactLevel",
            "NotInTauStar"
        ]
    );

    let mut child = Command::new(env!("CARGO_BIN_EXE_thinlab"))
        .args(["classify", "--batch", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{1}\ngeo(2,1\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].contains("\"error\""));
}

#[test]
fn selftest_is_deterministic() {
    for criterion in ["5", "7"] {
        let a = thinlab(&[
            "selftest",
            "--seed",
            "42",
            "--criterion",
            criterion,
            "--no-timing",
        ]);
        let b = thinlab(&[
            "selftest",
            "--seed",
            "42",
            "--criterion",
            criterion,
            "--no-timing",
        ]);
        assert_eq!(a.stdout, b.stdout);
        assert!(!stdout(&a).contains("timing:"));
    }
    let o = thinlab(&["selftest", "--criterion", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("criterion 3 [PASS]"));
    assert!(stdout(&o).contains("timing: 3="));
}

#[test]
fn selftest_budget_exhaustion_is_not_failure() {
    let o = thinlab(&[
        "selftest",
        "--criterion",
        "2",
        "--max-nodes",
        "1",
        "--no-timing",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("criterion 2 [INCONCLUSIVE]"));
    assert_eq!(
        thinlab(&["selftest", "--criterion", "9"]).status.code(),
        Some(2)
    );
}

#[test]
fn escalation_chain() {
    let o = thinlab(&["escalate", "geo(2,1,0,0)", "--steps", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let levels: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.split('\t').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(
        levels,
        (1..=5)
            .map(|n| format!("ExactLevel {n}"))
            .collect::<Vec<_>>()
    );
    let last = stdout(&o)
        .lines()
        .last()
        .unwrap()
        .split('\t')
        .nth(2)
        .unwrap()
        .to_string();
    assert_eq!(thinlab(&["classify", &last]).status.code(), Some(0));
}

#[test]
fn ctable_csv() {
    let o = thinlab(&[
        "ctable",
        "--n-max",
        "3",
        "--k-max",
        "2",
        "--entry-bound",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,c_searched,c_exact,c_quadratic_bound\n"));
    assert!(text.contains("\n2,2,16\n"));
}

#[test]
fn help_lists_defaults() {
    let o = thinlab(&["classify", "--help"]);
    let text = stdout(&o);
    assert!(text.contains("[default: 2]"));
    assert!(text.contains("[default: 100000]"));
    assert!(text.contains("THINLAB_BUDGET_NODES"));
}
