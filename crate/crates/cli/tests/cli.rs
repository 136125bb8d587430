use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use spanledger_cli::{run, Outcome};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("spanledger").chain(args.iter().copied()))
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn replay_prints_the_six_states() {
    let out = cli(&[
        "replay",
        &fixture("five_accounts.ledger"),
        &fixture("five_accounts.journal"),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let states: Vec<&str> = out
        .stdout
        .lines()
        .filter(|l| l.starts_with("state "))
        .collect();
    assert_eq!(
        states,
        [
            "state 0: (1000, 0, 0, 0, -1000) total 0",
            "state 1: (1000, -2000, 2000, 0, -1000) total 0",
            "state 2: (2500, -2000, 2000, -1500, -1000) total 0",
            "state 3: (1500, -1000, 2000, -1500, -1000) total 0",
            "state 4: (1500, -1000, 0, -1500, 1000) total 0",
            "state 5: (1500, -1000, 0, 0, -500) total 0",
        ]
    );
}

#[test]
fn replay_json_uses_strings_for_money() {
    let out = cli(&[
        "replay",
        &fixture("five_accounts.ledger"),
        &fixture("five_accounts.journal"),
        "--format",
        "json",
    ]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["states"][5][4], "-500");
    assert_eq!(v["accounts"][0], "asset");
    assert_eq!(v["totals"].as_array().unwrap().len(), 6);
}

#[test]
fn unbalanced_journal_exits_one() {
    let out = cli(&[
        "replay",
        &fixture("five_accounts.ledger"),
        &fixture("unbalanced.journal"),
    ]);
    assert_eq!(out.code, 1);
    assert!(
        out.stderr.contains("step 2: unbalanced transaction"),
        "{}",
        out.stderr
    );
}

#[test]
fn report_shows_equation_and_closed_total() {
    let out = cli(&[
        "report",
        &fixture("five_accounts.ledger"),
        &fixture("five_accounts.journal"),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out
        .stdout
        .contains("Assets = Liabilities + Owner's Equity: 1500 = 1000 + 500 (holds)"));
    assert!(out
        .stdout
        .contains("total value 0 along the replay (5 steps)"));
    let json = cli(&[
        "report",
        &fixture("five_accounts.ledger"),
        &fixture("five_accounts.journal"),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(v["equation"]["owners_equity"], "500");
    assert_eq!(v["closed_system"]["total_value"], "0");
    assert_eq!(v["balance_sheet"]["subtotals"]["Asset"], "1500");
}

#[test]
fn check_axioms_prints_five_pass_lines() {
    let out = cli(&["check-axioms", "--bound", "20", "--max-factors", "2"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 5);
    for (k, l) in lines.iter().enumerate() {
        assert!(
            l.starts_with(&format!("axiom_{}: PASS (checked ", k + 1)),
            "{l}"
        );
    }
}

#[test]
fn check_laws_is_reproducible() {
    let a = cli(&["check-laws", "--seed", "9", "--max-len", "2"]);
    let b = cli(&["check-laws", "--seed", "9", "--max-len", "2"]);
    assert_eq!(a.code, 0, "{}", a.stdout);
    assert_eq!(a, b);
    assert!(a.stdout.lines().all(|l| l.contains(": PASS (")));
}

#[test]
fn simulate_prints_traces_and_total() {
    let out = cli(&["simulate", &fixture("payment.system"), "--max-len", "2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("expression S: I -> I"));
    assert!(
        out.stdout.contains("  step 1: (t,t) | ~0 | ~0"),
        "{}",
        out.stdout
    );
    assert!(out.stdout.contains("closed system: value constant"));
}

#[test]
fn simulate_rejects_invalid_account_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(fixture("payment.system"))
        .unwrap()
        .replace("s1 = 0;", "s1 = 2;");
    let out = cli(&["simulate", &write(&dir, "bad.system", &src)]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("payer"), "{}", out.stderr);
}

#[test]
fn simulate_reports_type_error_path() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(fixture("payment.system")).unwrap()
        + "expr T = payee (x) (payer ; payer)\n";
    let out = cli(&["simulate", &write(&dir, "t.system", &src)]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("root.tensor[1]"), "{}", out.stderr);
}

#[test]
fn parse_errors_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let j = write(&dir, "j", "1; debit asset:ten; credit income:10\n");
    let out = cli(&["replay", &fixture("five_accounts.ledger"), &j]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains(":1:"), "{}", out.stderr);
    let s = write(&dir, "s", "graph G { vertices: a; edges: e: a => a; }\n");
    let out = cli(&["simulate", &s]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains(":1:37:"), "{}", out.stderr);
}

#[test]
fn missing_file_and_bad_flags_exit_two() {
    assert_eq!(cli(&["replay", "/nonexistent/l", "/nonexistent/j"]).code, 2);
    assert_eq!(cli(&["check-axioms", "--bound", "-3"]).code, 2);
    assert_eq!(cli(&["check-laws", "--seeds", "1"]).code, 2);
    assert_eq!(cli(&["replay", "--format", "yaml", "a", "b"]).code, 2);
    assert_eq!(cli(&[]).code, 2);
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn binary_exit_status_matches() {
    let bin = env!("CARGO_BIN_EXE_spanledger");
    let ok = Command::new(bin)
        .args([
            "replay",
            &fixture("five_accounts.ledger"),
            &fixture("five_accounts.journal"),
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(
        String::from_utf8_lossy(&ok.stdout).contains("state 5: (1500, -1000, 0, 0, -500) total 0")
    );
    let bad = Command::new(bin)
        .args([
            "replay",
            &fixture("five_accounts.ledger"),
            &fixture("unbalanced.journal"),
        ])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let missing = Command::new(bin)
        .args(["simulate", "/nonexistent"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

const JOURNAL: &str =
    "1; debit expense:2000; credit liability:2000\n2; debit asset:1500; credit income:1500\n";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arbitrary_journal_text_never_crashes(text in "[ -~\n]{0,80}") {
        let dir = tempfile::tempdir().unwrap();
        let j = write(&dir, "j", &text);
        let out = cli(&["replay", &fixture("five_accounts.ledger"), &j]);
        prop_assert!(matches!(out.code, 0..=2));
        if out.code == 2 {
            prop_assert!(out.stderr.starts_with("error: "));
        }
    }

    #[test]
    fn corrupting_a_journal_token_exits_two(pos in 0..JOURNAL.len(), junk in "[@$%&!?]") {
        let mut text = JOURNAL.to_string();
        if !text.is_char_boundary(pos) { return Ok(()); }
        text.insert_str(pos, &junk);
        let dir = tempfile::tempdir().unwrap();
        let j = write(&dir, "j", &text);
        let out = cli(&["replay", &fixture("five_accounts.ledger"), &j]);
        prop_assert_eq!(out.code, 2, "{}", out.stderr);
    }

    #[test]
    fn arbitrary_system_text_never_crashes(text in "[ -~\n]{0,80}") {
        let dir = tempfile::tempdir().unwrap();
        let s = write(&dir, "s", &text);
        let out = cli(&["simulate", &s]);
        prop_assert!(matches!(out.code, 0..=2));
    }
}
