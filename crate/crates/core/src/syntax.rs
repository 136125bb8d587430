//! Text formats read by the command-line tool.
//!
//! System files declare graphs, labelled objects, accounts and expressions:
//!
//! ```text
//! graph U { vertices: p; edges: pay: p -> p; }
//! object O { carrier: U; signature: +cash; label: pay = 5; }
//! account A { dom: I; cod: O; head: H; right: t -> pay; value: s0 = 5, s1 = 0; }
//! expr S = A ; eps[O]
//! ```
//!
//! `I` names both the terminal graph and the unit object. In an account,
//! leg entries map head vertices and edges to carrier ones; a vertex may be
//! left out when the carrier has a single vertex, and an edge left out goes
//! to the null loop. In expressions `(x)` binds tighter than `;`; an
//! expression runs until the next declaration and may span lines.
//!
//! Ledger files hold lines `account <name> kind <Kind> initial <int>`;
//! journals hold `step; debit a:amount[, …]; credit b:amount[, …]` and the
//! directives `zeroize expenses` and `zeroize income`. `#` starts a comment
//! everywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::accounts::{AccountError, AccountObject, Expression, GeneralAccount};
use crate::ledger::{
    AccountKind, Journal, JournalEntry, Ledger, LedgerAccount, LedgerError, Posting, Transaction,
};
use crate::rgraph::{GraphMorphism, Id, Polarity, RGraph};
use crate::span::Span;
use crate::stdaccount::{Channel, Signature};
use crate::Money;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Either the text is malformed, or it is well-formed but describes
/// something the algebra rejects.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{line}:{col}: {name}: {source}")]
    Invalid {
        line: usize,
        col: usize,
        name: String,
        source: Box<AccountError>,
    },
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Sym(char),
    Arrow,
    Tensor,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Tensor => f.write_str("`(x)`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'')
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (l, text) in src.lines().enumerate() {
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let (c, line, col) = (chars[i], l + 1, i + 1);
            let next = chars.get(i + 1).copied();
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if c == '-' && next == Some('>') {
                out.push(Token {
                    tok: Tok::Arrow,
                    line,
                    col,
                });
                i += 2;
            } else if c == '(' && next == Some('x') && chars.get(i + 2) == Some(&')') {
                out.push(Token {
                    tok: Tok::Tensor,
                    line,
                    col,
                });
                i += 3;
            } else if is_word_char(c) || (c == '-' && next.is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                i += 1;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    line,
                    col,
                });
            } else if "{}:;,=()[]+-".contains(c) {
                out.push(Token {
                    tok: Tok::Sym(c),
                    line,
                    col,
                });
                i += 1;
            } else {
                return err(line, col, format!("unexpected character {c:?}"));
            }
        }
    }
    Ok(out)
}

/// Everything declared in a system file, in declaration order for
/// expressions.
#[derive(Clone, Debug, Default)]
pub struct System {
    pub graphs: BTreeMap<String, RGraph>,
    pub objects: BTreeMap<String, AccountObject>,
    pub accounts: BTreeMap<String, GeneralAccount>,
    pub exprs: Vec<(String, Expression)>,
}

impl System {
    /// The last expression declared, which is the one to simulate.
    pub fn main_expression(&self) -> Option<&(String, Expression)> {
        self.exprs.last()
    }
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.at)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.end, |t| (t.line, t.col))
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        err(line, col, message)
    }

    fn next(&mut self, what: &str) -> Result<Token, ParseError> {
        match self.toks.get(self.at) {
            Some(t) => {
                self.at += 1;
                Ok(t.clone())
            }
            None => self.fail(format!("expected {what}, found end of input")),
        }
    }

    fn is(&self, tok: &Tok) -> bool {
        self.peek().is_some_and(|t| &t.tok == tok)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        let hit = self.is(tok);
        if hit {
            self.at += 1;
        }
        hit
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        let (line, col) = self.here();
        let t = self.next(&tok.to_string())?;
        if t.tok != tok {
            return err(line, col, format!("expected {tok}, found {}", t.tok));
        }
        Ok(t)
    }

    fn word(&mut self, what: &str) -> Result<Token, ParseError> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Word(_) => Ok(t),
            other => err(t.line, t.col, format!("expected {what}, found {other}")),
        }
    }

    fn name(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        let t = self.word(what)?;
        let Tok::Word(w) = t.tok else { unreachable!() };
        Ok((w, t.line, t.col))
    }

    fn integer(&mut self, what: &str) -> Result<Money, ParseError> {
        let (w, line, col) = self.name(what)?;
        w.parse::<BigInt>().or_else(|_| {
            err(
                line,
                col,
                format!("expected an integer for {what}, found `{w}`"),
            )
        })
    }

    /// `key: item, item, … ;` sections inside `{ … }`, dispatched on `key`.
    fn sections(
        &mut self,
        mut on: impl FnMut(&mut Parser, &str, usize, usize) -> Result<(), ParseError>,
    ) -> Result<(), ParseError> {
        self.expect(Tok::Sym('{'))?;
        while !self.eat(&Tok::Sym('}')) {
            let (key, line, col) = self.name("a section name")?;
            self.expect(Tok::Sym(':'))?;
            on(self, &key, line, col)?;
            if !self.is(&Tok::Sym('}')) {
                self.expect(Tok::Sym(';'))?;
            }
        }
        Ok(())
    }

    /// Comma-separated items up to the closing `;` or `}`.
    fn items(
        &mut self,
        mut item: impl FnMut(&mut Parser) -> Result<(), ParseError>,
    ) -> Result<(), ParseError> {
        if self.is(&Tok::Sym(';')) || self.is(&Tok::Sym('}')) {
            return Ok(());
        }
        loop {
            item(self)?;
            if !self.eat(&Tok::Sym(',')) {
                return Ok(());
            }
        }
    }
}

fn lookup<'a, T>(
    table: &'a BTreeMap<String, T>,
    kind: &str,
    name: &str,
    line: usize,
    col: usize,
) -> Result<&'a T, ParseError> {
    table
        .get(name)
        .map_or_else(|| err(line, col, format!("unknown {kind} `{name}`")), Ok)
}

/// Parses a system file.
pub fn parse_system(src: &str) -> Result<System, SyntaxError> {
    let toks = lex(src)?;
    let end = (
        src.lines().count().max(1),
        src.lines().last().map_or(1, |l| l.chars().count() + 1),
    );
    let mut p = Parser { toks, at: 0, end };
    let mut sys = System::default();
    sys.graphs.insert("I".into(), RGraph::terminal());
    sys.objects.insert("I".into(), AccountObject::unit());

    while p.peek().is_some() {
        let (kw, line, col) = p.name("`graph`, `object`, `account` or `expr`")?;
        let (name, nl, nc) = p.name("a name")?;
        let taken = match kw.as_str() {
            "graph" => sys.graphs.contains_key(&name),
            "object" => sys.objects.contains_key(&name),
            "account" => sys.accounts.contains_key(&name),
            "expr" => sys.exprs.iter().any(|(n, _)| n == &name),
            _ => {
                return err(line, col, format!("expected a declaration, found `{kw}`"))
                    .map_err(Into::into)
            }
        };
        if taken {
            return Err(ParseError {
                line: nl,
                col: nc,
                message: format!("{kw} `{name}` is already defined"),
            }
            .into());
        }
        let invalid = |source: AccountError| SyntaxError::Invalid {
            line,
            col,
            name: name.clone(),
            source: Box::new(source),
        };
        match kw.as_str() {
            "graph" => {
                let g = parse_graph(&mut p).map_err(|(l, c, m)| ParseError {
                    line: l,
                    col: c,
                    message: m,
                })?;
                let g = g.map_err(|e| invalid(e.into()))?;
                sys.graphs.insert(name, g);
            }
            "object" => {
                let o = parse_object(&mut p, &sys)?.map_err(invalid)?;
                sys.objects.insert(name, o);
            }
            "account" => {
                let a = parse_account(&mut p, &sys)?.map_err(invalid)?;
                sys.accounts.insert(name, a);
            }
            _ => {
                p.expect(Tok::Sym('='))?;
                let e = parse_expr(&mut p, &sys, 0)?;
                sys.exprs.push((name, e));
            }
        }
    }
    Ok(sys)
}

type GraphResult = Result<Result<RGraph, crate::rgraph::GraphError>, (usize, usize, String)>;

fn parse_graph(p: &mut Parser) -> GraphResult {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    p.sections(|p, key, line, col| match key {
        "vertices" => p.items(|p| {
            vertices.push(Id::name(p.name("a vertex")?.0));
            Ok(())
        }),
        "edges" => p.items(|p| {
            let id = p.name("an edge")?.0;
            p.expect(Tok::Sym(':'))?;
            let s = p.name("a source vertex")?.0;
            p.expect(Tok::Arrow)?;
            let t = p.name("a target vertex")?.0;
            edges.push((Id::name(id), Id::name(s), Id::name(t)));
            Ok(())
        }),
        other => err(line, col, format!("unknown graph section `{other}`")),
    })
    .map_err(|e| (e.line, e.col, e.message))?;
    Ok(RGraph::new(vertices, edges))
}

fn parse_object(
    p: &mut Parser,
    sys: &System,
) -> Result<Result<AccountObject, AccountError>, ParseError> {
    let mut carrier = None;
    let mut factors = Vec::new();
    let mut labels: Vec<(Id, Vec<Money>)> = Vec::new();
    p.sections(|p, key, line, col| match key {
        "carrier" => {
            let (g, l, c) = p.name("a graph name")?;
            carrier = Some(lookup(&sys.graphs, "graph", &g, l, c)?.clone());
            Ok(())
        }
        "signature" => p.items(|p| {
            let polarity = if p.eat(&Tok::Sym('+')) {
                Polarity::Plus
            } else if p.eat(&Tok::Sym('-')) {
                Polarity::Minus
            } else {
                return p.fail("expected `+` or `-` before a channel");
            };
            factors.push((Channel::new(p.name("a channel")?.0), polarity));
            Ok(())
        }),
        "label" => p.items(|p| {
            let e = p.name("an edge")?.0;
            p.expect(Tok::Sym('='))?;
            let mut flows = Vec::new();
            while matches!(
                p.peek(),
                Some(Token {
                    tok: Tok::Word(_),
                    ..
                })
            ) {
                flows.push(p.integer("a flow")?);
            }
            labels.push((Id::name(e), flows));
            Ok(())
        }),
        other => err(line, col, format!("unknown object section `{other}`")),
    })?;
    let Some(carrier) = carrier else {
        return p.fail("object needs a `carrier` section");
    };
    Ok(AccountObject::new(carrier, Signature::new(factors), labels))
}

type LegEntries = Vec<(String, String, usize, usize)>;

fn parse_account(
    p: &mut Parser,
    sys: &System,
) -> Result<Result<GeneralAccount, AccountError>, ParseError> {
    let (mut dom, mut cod, mut head) = (None, None, None);
    let (mut left, mut right): (LegEntries, LegEntries) = (Vec::new(), Vec::new());
    let mut values: Vec<(String, Money, usize, usize)> = Vec::new();
    let (start_line, start_col) = p.here();
    p.sections(|p, key, line, col| match key {
        "dom" | "cod" => {
            let (o, l, c) = p.name("an object name")?;
            let obj = lookup(&sys.objects, "object", &o, l, c)?.clone();
            if key == "dom" {
                dom = Some(obj);
            } else {
                cod = Some(obj);
            }
            Ok(())
        }
        "head" => {
            let (g, l, c) = p.name("a graph name")?;
            head = Some(lookup(&sys.graphs, "graph", &g, l, c)?.clone());
            Ok(())
        }
        "left" | "right" => {
            let leg = if key == "left" { &mut left } else { &mut right };
            p.items(|p| {
                let (from, l, c) = p.name("a head vertex or edge")?;
                p.expect(Tok::Arrow)?;
                let to = p.name("a carrier vertex or edge")?.0;
                leg.push((from, to, l, c));
                Ok(())
            })
        }
        "value" => p.items(|p| {
            let (v, l, c) = p.name("a head vertex")?;
            p.expect(Tok::Sym('='))?;
            values.push((v, p.integer("a value")?, l, c));
            Ok(())
        }),
        other => err(line, col, format!("unknown account section `{other}`")),
    })?;
    let missing = |what: &str| {
        err(
            start_line,
            start_col,
            format!("account needs a `{what}` section"),
        )
    };
    let Some(dom) = dom else {
        return missing("dom");
    };
    let Some(cod) = cod else {
        return missing("cod");
    };
    let Some(head) = head else {
        return missing("head");
    };

    let mut valuation = vec![None; head.vertex_count()];
    for (v, amount, l, c) in values {
        let Some(i) = head.vertex_index(&Id::name(&v)) else {
            return err(l, c, format!("`{v}` is not a head vertex"));
        };
        valuation[i] = Some(amount);
    }
    if let Some(i) = valuation.iter().position(Option::is_none) {
        return err(
            start_line,
            start_col,
            format!("no value given for head vertex `{}`", head.vertex(i)),
        );
    }
    let valuation = valuation.into_iter().map(Option::unwrap).collect();
    let l = build_leg(&head, dom.carrier(), &left, "left", (start_line, start_col))?;
    let r = build_leg(
        &head,
        cod.carrier(),
        &right,
        "right",
        (start_line, start_col),
    )?;
    let (l, r) = match (l, r) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(e), _) | (_, Err(e)) => return Ok(Err(e.into())),
    };
    Ok(Span::new(l, r)
        .map_err(AccountError::from)
        .and_then(|span| GeneralAccount::new(dom, cod, span, valuation)))
}

fn build_leg(
    head: &RGraph,
    carrier: &RGraph,
    entries: &LegEntries,
    side: &str,
    at: (usize, usize),
) -> Result<Result<GraphMorphism, crate::rgraph::GraphError>, ParseError> {
    let mut vmap = vec![None; head.vertex_count()];
    let mut emap = vec![None; head.edge_count()];
    for (from, to, l, c) in entries {
        let (from_id, to_id) = (Id::name(from), Id::name(to));
        if let Some(v) = head.vertex_index(&from_id) {
            let Some(w) = carrier.vertex_index(&to_id) else {
                return err(
                    *l,
                    *c,
                    format!("`{to}` is not a vertex of the {side} carrier"),
                );
            };
            vmap[v] = Some(w);
        } else if let Some(e) = head.edge_index(&from_id) {
            let Some(w) = carrier.edge_index(&to_id) else {
                return err(
                    *l,
                    *c,
                    format!("`{to}` is not an edge of the {side} carrier"),
                );
            };
            emap[e] = Some(w);
        } else {
            return err(
                *l,
                *c,
                format!("`{from}` is neither a vertex nor an edge of the head"),
            );
        }
    }
    let mut vm = Vec::with_capacity(vmap.len());
    for (i, v) in vmap.into_iter().enumerate() {
        match v {
            Some(w) => vm.push(w),
            None if carrier.vertex_count() == 1 => vm.push(0),
            None => {
                return err(
                    at.0,
                    at.1,
                    format!("{side} leg: head vertex `{}` has no image", head.vertex(i)),
                );
            }
        }
    }
    let em = emap
        .into_iter()
        .enumerate()
        .map(|(e, w)| w.unwrap_or_else(|| carrier.null_loop(vm[head.source(e)])))
        .collect();
    Ok(GraphMorphism::from_indices(
        head.clone(),
        carrier.clone(),
        vm,
        em,
    ))
}

/// `;` at depth 0, `(x)` at depth 1, atoms at depth 2.
fn parse_expr(p: &mut Parser, sys: &System, level: u8) -> Result<Expression, ParseError> {
    if level == 2 {
        return parse_atom(p, sys);
    }
    let op = if level == 0 {
        Tok::Sym(';')
    } else {
        Tok::Tensor
    };
    let mut e = parse_expr(p, sys, level + 1)?;
    while p.is(&op) {
        p.at += 1;
        let rhs = parse_expr(p, sys, level + 1)?;
        e = if level == 0 {
            e.compose(rhs)
        } else {
            e.tensor(rhs)
        };
    }
    Ok(e)
}

fn parse_atom(p: &mut Parser, sys: &System) -> Result<Expression, ParseError> {
    if p.eat(&Tok::Sym('(')) {
        let e = parse_expr(p, sys, 0)?;
        p.expect(Tok::Sym(')'))?;
        return Ok(e);
    }
    let (w, line, col) = p.name("an account, `id[..]`, `eta[..]` or `eps[..]`")?;
    if matches!(w.as_str(), "id" | "eta" | "eps") && p.is(&Tok::Sym('[')) {
        p.at += 1;
        let (o, l, c) = p.name("an object name")?;
        let obj = lookup(&sys.objects, "object", &o, l, c)?.clone();
        p.expect(Tok::Sym(']'))?;
        return Ok(match w.as_str() {
            "id" => Expression::Identity(obj),
            "eta" => Expression::Unit(obj),
            _ => Expression::Counit(obj),
        });
    }
    Ok(Expression::Atom(
        lookup(&sys.accounts, "account", &w, line, col)?.clone(),
    ))
}

/// Splits a line into fields separated by `sep`, keeping 1-based columns
/// and dropping surrounding whitespace.
fn fields(text: &str, sep: char, base: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices().chain([(text.len(), sep)]) {
        if c == sep {
            let raw = &text[start..i];
            let lead = raw.len() - raw.trim_start().len();
            out.push((raw.trim(), base + text[..start + lead].chars().count()));
            start = i + c.len_utf8();
        }
    }
    out
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Parses a ledger file into its initial snapshot.
pub fn parse_ledger(src: &str) -> Result<Ledger, ParseError> {
    let mut accounts = Vec::new();
    for (l, raw) in src.lines().enumerate() {
        let line = l + 1;
        let words: Vec<(&str, usize)> = fields(strip_comment(raw), ' ', 1)
            .into_iter()
            .filter(|(w, _)| !w.is_empty())
            .collect();
        if words.is_empty() {
            continue;
        }
        let shape: Vec<&str> = words.iter().map(|(w, _)| *w).collect();
        let [("account", _), (name, _), ("kind", _), (kind, kc), ("initial", _), (value, vc)] =
            words[..]
        else {
            let col = words.first().map_or(1, |w| w.1);
            return err(
                line,
                col,
                format!(
                    "expected `account <name> kind <Kind> initial <int>`, found `{}`",
                    shape.join(" ")
                ),
            );
        };
        let Ok(kind) = kind.parse::<AccountKind>() else {
            return err(line, kc, format!("unknown account kind `{kind}`"));
        };
        let Ok(value) = value.parse::<BigInt>() else {
            return err(line, vc, format!("expected an integer, found `{value}`"));
        };
        if accounts.iter().any(|a: &LedgerAccount| a.name == name) {
            return err(
                line,
                words[1].1,
                LedgerError::DuplicateAccount(name.to_string()).to_string(),
            );
        }
        if !kind.admits(&value) {
            let e = LedgerError::SignConstraintViolation {
                step: 0,
                account: name.to_string(),
                kind,
                value,
            };
            return err(line, vc, e.to_string());
        }
        accounts.push(LedgerAccount {
            name: name.to_string(),
            kind,
            value,
        });
    }
    Ledger::new(accounts).map_err(|e| ParseError {
        line: 1,
        col: 1,
        message: e.to_string(),
    })
}

fn parse_postings(
    text: &str,
    col: usize,
    line: usize,
    step: u64,
) -> Result<Vec<Posting>, ParseError> {
    let mut out = Vec::new();
    for (item, c) in fields(text, ',', col) {
        let Some((name, amount)) = item.split_once(':') else {
            return err(
                line,
                c,
                format!("step {step}: expected `account:amount`, found `{item}`"),
            );
        };
        let Ok(amount) = amount.trim().parse::<BigInt>() else {
            return err(
                line,
                c,
                format!("step {step}: `{}` is not an amount", amount.trim()),
            );
        };
        out.push(Posting {
            account: name.trim().to_string(),
            amount,
        });
    }
    Ok(out)
}

/// Parses a journal.
pub fn parse_journal(src: &str) -> Result<Journal, ParseError> {
    let mut entries = Vec::new();
    let mut last_step: Option<(u64, usize)> = None;
    for (l, raw) in src.lines().enumerate() {
        let line = l + 1;
        let text = strip_comment(raw);
        let parts = fields(text, ';', 1);
        let (head, hc) = parts[0];
        if parts.len() == 1 {
            let words: Vec<&str> = head.split_whitespace().collect();
            match words[..] {
                [] => continue,
                ["zeroize", "expenses"] => entries.push(JournalEntry::ZeroizeExpenses),
                ["zeroize", "income"] => entries.push(JournalEntry::ZeroizeIncome),
                _ => {
                    return err(
                        line,
                        hc,
                        format!("expected a transaction or a zeroize directive, found `{head}`"),
                    )
                }
            }
            continue;
        }
        let Ok(step) = head.parse::<u64>() else {
            return err(line, hc, format!("expected a step number, found `{head}`"));
        };
        if let Some((prev, _)) = last_step {
            if step <= prev {
                let e = LedgerError::StepOrder {
                    previous: prev,
                    found: step,
                };
                return err(line, hc, e.to_string());
            }
        }
        last_step = Some((step, line));
        let mut t = Transaction {
            step,
            debits: Vec::new(),
            credits: Vec::new(),
        };
        for &(part, pc) in &parts[1..] {
            if part.is_empty() {
                continue;
            }
            let (verb, rest) = part.split_once(char::is_whitespace).unwrap_or((part, ""));
            let rc = pc + verb.chars().count() + (rest.len() - rest.trim_start().len()) + 1;
            let postings = parse_postings(rest.trim(), rc, line, step)?;
            match verb {
                "debit" => t.debits.extend(postings),
                "credit" => t.credits.extend(postings),
                _ => {
                    return err(
                        line,
                        pc,
                        format!("step {step}: expected `debit` or `credit`, found `{verb}`"),
                    )
                }
            }
        }
        entries.push(JournalEntry::Post(t));
    }
    Journal::new(entries).map_err(|e| ParseError {
        line: 1,
        col: 1,
        message: e.to_string(),
    })
}
