//! The `spanledger` command line, as a library so tests can drive it
//! without spawning processes.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or the input
//! describes something the algebra rejects, 2 when the input cannot be read
//! or parsed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use spanledger::accounts::total_value;
use spanledger::behaviour::{enumerate_paths, trace_lines};
use spanledger::laws::{check_laws, LawCounts};
use spanledger::ledger::{as_closed_system, replay_ledgers, AccountKind, Ledger, LedgerError};
use spanledger::stdaccount::verify_axioms;
use spanledger::syntax::{parse_journal, parse_ledger, parse_system, SyntaxError};

/// Traces printed by `simulate` before the rest are only counted.
pub const MAX_TRACES: usize = 20;

#[derive(Parser, Debug)]
#[command(
    name = "spanledger",
    version,
    about = "Compositional double-entry accounts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the five axioms of the standard account cells.
    CheckAxioms {
        /// Largest absolute value and flow amount examined.
        #[arg(long, default_value_t = 100)]
        bound: u64,
        /// Largest number of channels in a boundary signature.
        #[arg(long, default_value_t = 3)]
        max_factors: usize,
    },
    /// Run the randomized law suite.
    CheckLaws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Longest path examined by the path-based laws.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Replay a journal and print every state vector.
    Replay { ledger: String, journal: String },
    /// Evaluate the last expression of a system file and print its traces.
    Simulate {
        file: String,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Balance sheet, accounting equation and closed-system total after a replay.
    Report { ledger: String, journal: String },
}

/// Result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String, passed: bool) -> Self {
        Outcome {
            code: if passed { 0 } else { 1 },
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Runs the command line given by `args`, program name first.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let json = cli.format == Format::Json;
    match cli.command {
        Command::CheckAxioms { bound, max_factors } => check_axioms(bound, max_factors, json),
        Command::CheckLaws { seed, max_len } => laws(seed, max_len, json),
        Command::Replay { ledger, journal } => replay_cmd(&ledger, &journal, json),
        Command::Simulate { file, max_len } => simulate(&file, max_len, json),
        Command::Report { ledger, journal } => report(&ledger, &journal, json),
    }
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn money(v: &BigInt) -> Value {
    Value::String(v.to_string())
}

fn check_axioms(bound: u64, max_factors: usize, json: bool) -> Outcome {
    let report = verify_axioms(bound, max_factors);
    let passed = report.all_passed();
    let out = if json {
        pretty(json!({
            "bound": bound,
            "max_factors": max_factors,
            "passed": passed,
            "results": report.results.iter().map(|r| json!({
                "axiom": r.axiom,
                "checked": r.checked,
                "passed": r.passed(),
                "counterexample": r.counterexample,
            })).collect::<Vec<_>>(),
        }))
    } else {
        report.to_string()
    };
    Outcome::ok(out, passed)
}

fn laws(seed: u64, max_len: usize, json: bool) -> Outcome {
    let results = check_laws(seed, max_len, LawCounts::default());
    let passed = results.iter().all(|r| r.passed());
    let out = if json {
        pretty(json!({
            "seed": seed,
            "max_len": max_len,
            "passed": passed,
            "results": results.iter().map(|r| json!({
                "law": r.law,
                "checked": r.checked,
                "failed": r.failed,
                "passed": r.passed(),
                "first_failure": r.first_failure,
            })).collect::<Vec<_>>(),
        }))
    } else {
        results.iter().map(|r| format!("{r}\n")).collect()
    };
    Outcome::ok(out, passed)
}

fn read(path: &str) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| Outcome::fail(2, format!("{path}: {e}")))
}

fn load(ledger: &str, journal: &str) -> Result<(Ledger, spanledger::ledger::Journal), Outcome> {
    let l = parse_ledger(&read(ledger)?).map_err(|e| Outcome::fail(2, format!("{ledger}:{e}")))?;
    let j =
        parse_journal(&read(journal)?).map_err(|e| Outcome::fail(2, format!("{journal}:{e}")))?;
    Ok((l, j))
}

/// A journal naming an account the ledger lacks is malformed input; every
/// other ledger error is a rejected transaction.
fn ledger_failure(e: LedgerError) -> Outcome {
    let code = if matches!(e, LedgerError::UnknownAccount(_)) {
        2
    } else {
        1
    };
    Outcome::fail(code, e)
}

fn replay_cmd(ledger: &str, journal: &str, json: bool) -> Outcome {
    let (l, j) = match load(ledger, journal) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let states = match replay_ledgers(&l, &j) {
        Ok(s) => s,
        Err(e) => return ledger_failure(e),
    };
    let names: Vec<&str> = l.accounts().iter().map(|a| a.name.as_str()).collect();
    let passed = states.iter().all(|s| s.grand_total() == BigInt::from(0));
    let out = if json {
        pretty(json!({
            "accounts": names,
            "states": states.iter().map(|s| s.values().iter().map(money).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "totals": states.iter().map(|s| money(&s.grand_total())).collect::<Vec<_>>(),
        }))
    } else {
        let mut out = format!("accounts: {}\n", names.join(", "));
        for (k, s) in states.iter().enumerate() {
            let vals: Vec<String> = s.values().iter().map(ToString::to_string).collect();
            let _ = writeln!(
                out,
                "state {k}: ({}) total {}",
                vals.join(", "),
                s.grand_total()
            );
        }
        out
    };
    Outcome::ok(out, passed)
}

fn simulate(file: &str, max_len: usize, json: bool) -> Outcome {
    let src = match read(file) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let sys = match parse_system(&src) {
        Ok(s) => s,
        Err(SyntaxError::Parse(e)) => return Outcome::fail(2, format!("{file}:{e}")),
        Err(e) => return Outcome::fail(1, format!("{file}:{e}")),
    };
    let Some((name, expr)) = sys.main_expression() else {
        return Outcome::fail(2, format!("{file}: no expression to simulate"));
    };
    let a = match expr.eval() {
        Ok(a) => a,
        Err(e) => return Outcome::fail(1, format!("{name}: {e}")),
    };
    let head = a.head();
    let paths: Vec<_> = enumerate_paths(head, max_len)
        .into_iter()
        .filter(|p| p.len() == max_len)
        .collect();
    let mut traces = Vec::new();
    for p in paths.iter().take(MAX_TRACES) {
        let lines = trace_lines(a.span(), p).expect("paths come from the head");
        traces.push((head.vertex(p.start()).to_string(), lines));
    }
    let mut total = None;
    if a.is_closed() {
        let mut values = std::collections::BTreeSet::new();
        for p in enumerate_paths(head, max_len) {
            match total_value(&a, &p) {
                Ok(v) => {
                    values.insert(v);
                }
                Err(e) => return Outcome::fail(1, format!("{name}: {e}")),
            }
        }
        total = Some(values);
    }
    let out = if json {
        pretty(json!({
            "expression": name,
            "dom": a.dom().signature().to_string(),
            "cod": a.cod().signature().to_string(),
            "states": head.vertex_count(),
            "transitions": head.non_null_edge_count(),
            "max_len": max_len,
            "paths": paths.len(),
            "traces": traces.iter().map(|(s, l)| json!({"start": s, "steps": l})).collect::<Vec<_>>(),
            "closed": a.is_closed(),
            "total_values": total.as_ref().map(|t| t.iter().map(money).collect::<Vec<_>>()),
        }))
    } else {
        let mut out = format!(
            "expression {name}: {} -> {}\nhead: {} states, {} transitions\n",
            a.dom().signature(),
            a.cod().signature(),
            head.vertex_count(),
            head.non_null_edge_count()
        );
        for (i, (start, lines)) in traces.iter().enumerate() {
            let _ = writeln!(out, "path {} from {start}:", i + 1);
            for l in lines {
                let _ = writeln!(out, "  {l}");
            }
        }
        if paths.len() > traces.len() {
            let _ = writeln!(
                out,
                "... {} more paths of length {max_len}",
                paths.len() - traces.len()
            );
        }
        match &total {
            Some(values) => {
                let vals: Vec<String> = values.iter().map(ToString::to_string).collect();
                let _ = writeln!(
                    out,
                    "closed system: value constant along every path up to length {max_len}; totals seen: {}",
                    vals.join(", ")
                );
            }
            None => out.push_str("open system: no total value\n"),
        }
        out
    };
    Outcome::ok(out, true)
}

fn report(ledger: &str, journal: &str, json: bool) -> Outcome {
    let (l, j) = match load(ledger, journal) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let states = match replay_ledgers(&l, &j) {
        Ok(s) => s,
        Err(e) => return ledger_failure(e),
    };
    let last = states.last().expect("replay keeps the initial state");
    let eq = last.accounting_equation();
    let closed = match as_closed_system(&l, &j) {
        Ok(c) => c,
        Err(e) => return ledger_failure(e),
    };
    let total = match total_value(&closed.system, &closed.replay_path) {
        Ok(v) => v,
        Err(e) => return Outcome::fail(1, e),
    };
    let head = closed.system.head();
    let passed = eq.holds && total == BigInt::from(0);
    let out = if json {
        let subtotals: serde_json::Map<String, Value> = AccountKind::ALL
            .iter()
            .map(|k| {
                let sum: BigInt = last
                    .accounts()
                    .iter()
                    .filter(|a| a.kind == *k)
                    .map(|a| &a.value)
                    .sum();
                (k.to_string(), money(&sum))
            })
            .collect();
        pretty(json!({
            "balance_sheet": {
                "accounts": last.accounts().iter().map(|a| json!({
                    "name": a.name,
                    "kind": a.kind.to_string(),
                    "value": money(&a.value),
                })).collect::<Vec<_>>(),
                "subtotals": subtotals,
                "grand_total": money(&last.grand_total()),
            },
            "equation": {
                "assets": money(&eq.assets),
                "liabilities": money(&eq.liabilities),
                "owners_equity": money(&eq.owners_equity),
                "holds": eq.holds,
            },
            "closed_system": {
                "states": head.vertex_count(),
                "transitions": head.non_null_edge_count(),
                "replay_length": closed.replay_path.len(),
                "total_value": money(&total),
            },
        }))
    } else {
        let mut out = last.balance_sheet();
        if !out.ends_with('\n') {
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "closed system: {} states, {} transitions; total value {total} along the replay ({} steps)",
            head.vertex_count(),
            head.non_null_edge_count(),
            closed.replay_path.len()
        );
        out
    };
    Outcome::ok(out, passed)
}
