//! Conventional double-entry bookkeeping on top of general accounts.
//!
//! Debiting an account adds to its value and crediting subtracts, for every
//! kind alike; kinds only restrict the sign of reachable values. Closing the
//! books moves expense and income balances into equity by ordinary balanced
//! transactions, so every operation preserves the grand total.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::accounts::{AccountError, AccountObject, Expression, GeneralAccount};
use crate::behaviour::Path;
use crate::rgraph::{GraphMorphism, Id, Polarity, RGraph};
use crate::span::Span;
use crate::stdaccount::{Channel, Signature};
use crate::Money;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("step {step}: unbalanced transaction, debits {debits} but credits {credits}")]
    UnbalancedTransaction {
        step: u64,
        debits: Money,
        credits: Money,
    },
    #[error("step {step}: {account} ({kind}) would hold {value}")]
    SignConstraintViolation {
        step: u64,
        account: String,
        kind: AccountKind,
        value: Money,
    },
    #[error("unknown account {0}")]
    UnknownAccount(String),
    #[error("step {step}: negative amount for {account}")]
    NegativeAmount { step: u64, account: String },
    #[error("step {found} does not follow step {previous}")]
    StepOrder { previous: u64, found: u64 },
    #[error("account {0} declared twice")]
    DuplicateAccount(String),
    #[error("no equity account to receive the closing transfer")]
    NoEquityAccount,
    #[error("closed system has {edges} candidate transitions; refusing to build it")]
    SystemTooLarge { edges: u128 },
    #[error(transparent)]
    Account(#[from] AccountError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccountKind {
    Asset,
    Liability,
    Equity,
    Income,
    Expense,
}

impl AccountKind {
    pub const ALL: [AccountKind; 5] = [
        AccountKind::Asset,
        AccountKind::Liability,
        AccountKind::Equity,
        AccountKind::Income,
        AccountKind::Expense,
    ];

    /// Asset and expense hold debits, liability and income hold credits;
    /// equity may swing either way while the books are being closed.
    pub fn admits(self, value: &Money) -> bool {
        match self {
            AccountKind::Asset | AccountKind::Expense => !value.is_negative(),
            AccountKind::Liability | AccountKind::Income => !value.is_positive(),
            AccountKind::Equity => true,
        }
    }
}

impl fmt::Display for AccountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AccountKind::Asset => "Asset",
            AccountKind::Liability => "Liability",
            AccountKind::Equity => "Equity",
            AccountKind::Income => "Income",
            AccountKind::Expense => "Expense",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown account kind {0:?}")]
pub struct ParseKindError(pub String);

impl FromStr for AccountKind {
    type Err = ParseKindError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AccountKind::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| ParseKindError(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerAccount {
    pub name: String,
    pub kind: AccountKind,
    pub value: Money,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Posting {
    pub account: String,
    pub amount: Money,
}

impl Posting {
    pub fn new(account: impl Into<String>, amount: impl Into<Money>) -> Self {
        Posting {
            account: account.into(),
            amount: amount.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    pub step: u64,
    pub debits: Vec<Posting>,
    pub credits: Vec<Posting>,
}

impl Transaction {
    /// A single debit against a single credit of the same amount.
    pub fn simple(step: u64, debit: &str, credit: &str, amount: impl Into<Money>) -> Self {
        let amount = amount.into();
        Transaction {
            step,
            debits: vec![Posting::new(debit, amount.clone())],
            credits: vec![Posting::new(credit, amount)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JournalEntry {
    Post(Transaction),
    ZeroizeExpenses,
    ZeroizeIncome,
}

/// Transactions in step order, interleaved with closing directives.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Journal {
    entries: Vec<JournalEntry>,
}

impl Journal {
    pub fn new(entries: Vec<JournalEntry>) -> Result<Self, LedgerError> {
        let mut previous: Option<u64> = None;
        for entry in &entries {
            if let JournalEntry::Post(t) = entry {
                if let Some(p) = previous {
                    if t.step <= p {
                        return Err(LedgerError::StepOrder {
                            previous: p,
                            found: t.step,
                        });
                    }
                }
                previous = Some(t.step);
            }
        }
        Ok(Journal { entries })
    }

    pub fn entries(&self) -> &[JournalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `Assets = Liabilities + Owner's Equity`, with the right-hand totals
/// negated so that credits read as positive amounts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccountingEquation {
    pub assets: Money,
    pub liabilities: Money,
    pub owners_equity: Money,
    pub holds: bool,
}

impl fmt::Display for AccountingEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Assets = Liabilities + Owner's Equity: {} = {} + {} ({})",
            self.assets,
            self.liabilities,
            self.owners_equity,
            if self.holds { "holds" } else { "FAILS" }
        )
    }
}

/// A snapshot of all account values. Operations return new snapshots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ledger {
    accounts: Vec<LedgerAccount>,
}

impl Ledger {
    pub fn new(accounts: Vec<LedgerAccount>) -> Result<Self, LedgerError> {
        for (i, a) in accounts.iter().enumerate() {
            if accounts[..i].iter().any(|b| b.name == a.name) {
                return Err(LedgerError::DuplicateAccount(a.name.clone()));
            }
            if !a.kind.admits(&a.value) {
                return Err(LedgerError::SignConstraintViolation {
                    step: 0,
                    account: a.name.clone(),
                    kind: a.kind,
                    value: a.value.clone(),
                });
            }
        }
        Ok(Ledger { accounts })
    }

    pub fn accounts(&self) -> &[LedgerAccount] {
        &self.accounts
    }

    pub fn index_of(&self, name: &str) -> Result<usize, LedgerError> {
        self.accounts
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| LedgerError::UnknownAccount(name.to_string()))
    }

    pub fn value(&self, name: &str) -> Result<&Money, LedgerError> {
        Ok(&self.accounts[self.index_of(name)?].value)
    }

    pub fn values(&self) -> Vec<Money> {
        self.accounts.iter().map(|a| a.value.clone()).collect()
    }

    pub fn grand_total(&self) -> Money {
        self.accounts.iter().map(|a| &a.value).sum()
    }

    fn total_of(&self, kind: AccountKind) -> Money {
        self.accounts
            .iter()
            .filter(|a| a.kind == kind)
            .map(|a| &a.value)
            .sum()
    }

    /// Applies a transaction atomically: either every posting lands or the
    /// ledger is left untouched.
    pub fn post(&self, t: &Transaction) -> Result<Ledger, LedgerError> {
        let mut next = self.clone();
        let mut debits = BigInt::zero();
        let mut credits = BigInt::zero();
        for (postings, sign, total) in [(&t.debits, 1, &mut debits), (&t.credits, -1, &mut credits)]
        {
            for p in postings {
                if p.amount.is_negative() {
                    return Err(LedgerError::NegativeAmount {
                        step: t.step,
                        account: p.account.clone(),
                    });
                }
                let i = self.index_of(&p.account)?;
                *total += &p.amount;
                if sign > 0 {
                    next.accounts[i].value += &p.amount;
                } else {
                    next.accounts[i].value -= &p.amount;
                }
            }
        }
        if debits != credits {
            return Err(LedgerError::UnbalancedTransaction {
                step: t.step,
                debits,
                credits,
            });
        }
        if let Some(a) = next.accounts.iter().find(|a| !a.kind.admits(&a.value)) {
            return Err(LedgerError::SignConstraintViolation {
                step: t.step,
                account: a.name.clone(),
                kind: a.kind,
                value: a.value.clone(),
            });
        }
        Ok(next)
    }

    fn first_equity(&self) -> Result<&str, LedgerError> {
        self.accounts
            .iter()
            .find(|a| a.kind == AccountKind::Equity)
            .map(|a| a.name.as_str())
            .ok_or(LedgerError::NoEquityAccount)
    }

    /// The closing transaction moving every expense balance into equity.
    pub fn expense_closing(&self, step: u64) -> Result<Transaction, LedgerError> {
        let credits: Vec<Posting> = self
            .accounts
            .iter()
            .filter(|a| a.kind == AccountKind::Expense && !a.value.is_zero())
            .map(|a| Posting::new(a.name.clone(), a.value.abs()))
            .collect();
        let total: Money = credits.iter().map(|p| &p.amount).sum();
        let debits = if total.is_zero() {
            Vec::new()
        } else {
            vec![Posting::new(self.first_equity()?, total)]
        };
        Ok(Transaction {
            step,
            debits,
            credits,
        })
    }

    /// The closing transaction moving value from equity into every income
    /// account until it reaches zero.
    pub fn income_closing(&self, step: u64) -> Result<Transaction, LedgerError> {
        let debits: Vec<Posting> = self
            .accounts
            .iter()
            .filter(|a| a.kind == AccountKind::Income && !a.value.is_zero())
            .map(|a| Posting::new(a.name.clone(), a.value.abs()))
            .collect();
        let total: Money = debits.iter().map(|p| &p.amount).sum();
        let credits = if total.is_zero() {
            Vec::new()
        } else {
            vec![Posting::new(self.first_equity()?, total)]
        };
        Ok(Transaction {
            step,
            debits,
            credits,
        })
    }

    pub fn zeroize_expenses(&self) -> Result<Ledger, LedgerError> {
        self.post(&self.expense_closing(0)?)
    }

    pub fn zeroize_income(&self) -> Result<Ledger, LedgerError> {
        self.post(&self.income_closing(0)?)
    }

    pub fn accounting_equation(&self) -> AccountingEquation {
        let assets = self.total_of(AccountKind::Asset);
        let liabilities = -self.total_of(AccountKind::Liability);
        let owners_equity = -(self.total_of(AccountKind::Equity)
            + self.total_of(AccountKind::Income)
            + self.total_of(AccountKind::Expense));
        let holds = assets == &liabilities + &owners_equity;
        AccountingEquation {
            assets,
            liabilities,
            owners_equity,
            holds,
        }
    }

    /// Aligned text: accounts grouped by kind with subtotals, then the
    /// accounting equation.
    pub fn balance_sheet(&self) -> String {
        let width = self
            .accounts
            .iter()
            .map(|a| a.name.len() + 4)
            .chain([24])
            .max()
            .unwrap_or(24);
        let amounts: Vec<String> = self.accounts.iter().map(|a| a.value.to_string()).collect();
        let num = amounts
            .iter()
            .map(String::len)
            .chain([12])
            .max()
            .unwrap_or(12);
        let mut out = String::from("Balance sheet\n");
        for kind in AccountKind::ALL {
            let members: Vec<usize> = (0..self.accounts.len())
                .filter(|&i| self.accounts[i].kind == kind)
                .collect();
            if members.is_empty() {
                continue;
            }
            out += &format!("{kind}\n");
            for i in members {
                out += &format!(
                    "    {:<w$}{:>n$}\n",
                    self.accounts[i].name,
                    amounts[i],
                    w = width - 4,
                    n = num
                );
            }
            out += &format!(
                "  {:<w$}{:>n$}\n",
                format!("subtotal {kind}"),
                self.total_of(kind).to_string(),
                w = width - 2,
                n = num
            );
        }
        out += &format!(
            "{:<w$}{:>n$}\n",
            "grand total",
            self.grand_total().to_string(),
            w = width,
            n = num
        );
        out += &format!("{}\n", self.accounting_equation());
        out
    }
}

pub fn post(ledger: &Ledger, t: &Transaction) -> Result<Ledger, LedgerError> {
    ledger.post(t)
}

pub fn zeroize_expenses(ledger: &Ledger) -> Result<Ledger, LedgerError> {
    ledger.zeroize_expenses()
}

pub fn zeroize_income(ledger: &Ledger) -> Result<Ledger, LedgerError> {
    ledger.zeroize_income()
}

pub fn accounting_equation(ledger: &Ledger) -> AccountingEquation {
    ledger.accounting_equation()
}

pub fn balance_sheet(ledger: &Ledger) -> String {
    ledger.balance_sheet()
}

/// Every snapshot of a journal replay, the initial one first.
pub fn replay_ledgers(ledger: &Ledger, journal: &Journal) -> Result<Vec<Ledger>, LedgerError> {
    let mut states = vec![ledger.clone()];
    for (k, entry) in journal.entries().iter().enumerate() {
        let current = states.last().expect("never empty");
        let ordinal = k as u64 + 1;
        let t = match entry {
            JournalEntry::Post(t) => t.clone(),
            JournalEntry::ZeroizeExpenses => current.expense_closing(ordinal)?,
            JournalEntry::ZeroizeIncome => current.income_closing(ordinal)?,
        };
        states.push(current.post(&t)?);
    }
    Ok(states)
}

/// The state vector after each step, the initial state first.
pub fn replay(ledger: &Ledger, journal: &Journal) -> Result<Vec<Vec<Money>>, LedgerError> {
    Ok(replay_ledgers(ledger, journal)?
        .iter()
        .map(Ledger::values)
        .collect())
}

/// A movement of value between two accounts within one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    pub from: usize,
    pub to: usize,
    pub amount: Money,
}

/// Splits the net change of one step into account-to-account flows,
/// matching decreases against increases in account order.
pub fn step_flows(before: &[Money], after: &[Money]) -> Vec<Flow> {
    let delta: Vec<Money> = after.iter().zip(before).map(|(a, b)| a - b).collect();
    let mut sources: Vec<(usize, Money)> = delta
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_negative())
        .map(|(i, d)| (i, -d))
        .collect();
    let mut sinks: Vec<(usize, Money)> = delta
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_positive())
        .map(|(i, d)| (i, d.clone()))
        .collect();
    let mut flows = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < sources.len() && j < sinks.len() {
        let amount = sources[i].1.clone().min(sinks[j].1.clone());
        flows.push(Flow {
            from: sources[i].0,
            to: sinks[j].0,
            amount: amount.clone(),
        });
        sources[i].1 -= &amount;
        sinks[j].1 -= &amount;
        if sources[i].1.is_zero() {
            i += 1;
        }
        if sinks[j].1.is_zero() {
            j += 1;
        }
    }
    flows
}

/// A ledger and its journal realized as a closed system of accounts.
#[derive(Clone, Debug)]
pub struct ClosedLedger {
    pub expression: Expression,
    pub system: GeneralAccount,
    /// State vectors of the replay, the initial one first.
    pub states: Vec<Vec<Money>>,
    /// The behaviour of the system that performs the replay.
    pub replay_path: Path,
}

/// Bracketing of a left-folded tensor of boundary factors.
#[derive(Clone, Debug)]
enum Shape {
    Unit,
    Leaf(usize),
    Pair(Box<Shape>, Box<Shape>),
}

impl Shape {
    fn fold(parts: Vec<Shape>) -> Shape {
        parts
            .into_iter()
            .reduce(|a, b| Shape::Pair(Box::new(a), Box::new(b)))
            .unwrap_or(Shape::Unit)
    }

    fn split(&self, id: &Id, out: &mut BTreeMap<usize, Id>) -> Option<()> {
        match self {
            Shape::Unit => Some(()),
            Shape::Leaf(slot) => {
                out.insert(*slot, id.clone());
                Some(())
            }
            Shape::Pair(a, b) => {
                let (x, y) = id.as_pair()?;
                a.split(x, out)?;
                b.split(y, out)
            }
        }
    }

    fn build(&self, leaves: &BTreeMap<usize, Id>, unit: &Id) -> Option<Id> {
        match self {
            Shape::Unit => Some(unit.clone()),
            Shape::Leaf(slot) => leaves.get(slot).cloned(),
            Shape::Pair(a, b) => Some(Id::pair(a.build(leaves, unit)?, b.build(leaves, unit)?)),
        }
    }
}

fn fold_objects(objects: Vec<AccountObject>) -> AccountObject {
    objects
        .into_iter()
        .reduce(|a, b| a.tensor(&b))
        .unwrap_or_else(AccountObject::unit)
}

fn fold_ids(ids: Vec<Id>) -> Id {
    ids.into_iter()
        .reduce(Id::pair)
        .expect("at least one account")
}

fn fold_exprs(exprs: Vec<Expression>) -> Option<Expression> {
    exprs.into_iter().reduce(Expression::tensor)
}

fn step_id(k: usize) -> Id {
    Id::name(format!("j{k}"))
}

fn value_id(v: &Money) -> Id {
    Id::name(v.to_string())
}

/// Upper bound on the transitions of the tensor of account heads.
const MAX_SYSTEM_EDGES: u128 = 2_000_000;

/// Wires one account per ledger entry into a closed system.
///
/// Every ordered pair of accounts that exchanges value during the replay
/// gets a channel. The paying account sees the channel with positive
/// polarity, the receiving account sees its dual, and the counit of the
/// channel joins the two ends. Each account's head has one state per value
/// it takes and one transition per step it takes part in.
pub fn as_closed_system(ledger: &Ledger, journal: &Journal) -> Result<ClosedLedger, LedgerError> {
    let states = replay(ledger, journal)?;
    let n = ledger.accounts().len();
    if n == 0 {
        return Err(LedgerError::NoEquityAccount);
    }
    let steps = states.len() - 1;
    let flows: Vec<Vec<Flow>> = states
        .windows(2)
        .map(|w| step_flows(&w[0], &w[1]))
        .collect();

    // Channels and, per channel, the amount moved at each active step.
    let mut channels: BTreeMap<(usize, usize), BTreeMap<usize, Money>> = BTreeMap::new();
    for (k, fs) in flows.iter().enumerate() {
        for f in fs {
            channels
                .entry((f.from, f.to))
                .or_default()
                .insert(k + 1, f.amount.clone());
        }
    }
    let point = Id::name("*");
    let channel_list: Vec<(usize, usize)> = channels.keys().copied().collect();
    let mut objects = Vec::new();
    for (&(from, to), amounts) in &channels {
        let name = format!(
            "{}->{}",
            ledger.accounts()[from].name,
            ledger.accounts()[to].name
        );
        let carrier = RGraph::new(
            [point.clone()],
            amounts
                .keys()
                .map(|&k| (step_id(k), point.clone(), point.clone())),
        )
        .map_err(AccountError::from)?;
        let sig = Signature::new(vec![(Channel::new(name), Polarity::Plus)]);
        let labels = amounts.iter().map(|(&k, a)| (step_id(k), vec![a.clone()]));
        objects.push(AccountObject::new(carrier, sig, labels)?);
    }

    // Per account: the channels it touches, as (channel, is_dual).
    let touches: Vec<Vec<(usize, bool)>> = (0..n)
        .map(|a| {
            channel_list
                .iter()
                .enumerate()
                .filter_map(|(c, &(from, to))| {
                    if from == a {
                        Some((c, false))
                    } else if to == a {
                        Some((c, true))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let active = |a: usize, k: usize| flows[k - 1].iter().any(|f| f.from == a || f.to == a);

    let mut estimate: u128 = 1;
    let mut atoms = Vec::new();
    let mut cods = Vec::new();
    for a in 0..n {
        let values: Vec<&Money> = states.iter().map(|s| &s[a]).collect();
        let vertices: BTreeSet<Id> = values.iter().map(|v| value_id(v)).collect();
        let edges: Vec<(Id, Id, Id)> = (1..=steps)
            .filter(|&k| active(a, k))
            .map(|k| (step_id(k), value_id(values[k - 1]), value_id(values[k])))
            .collect();
        estimate = estimate.saturating_mul((edges.len() + vertices.len()) as u128);
        let head = RGraph::new(vertices, edges.clone()).map_err(AccountError::from)?;

        let cod = fold_objects(
            touches[a]
                .iter()
                .map(|&(c, dual)| {
                    if dual {
                        objects[c].dual()
                    } else {
                        objects[c].clone()
                    }
                })
                .collect(),
        );
        let right = if touches[a].is_empty() {
            GraphMorphism::bang(&head)
        } else {
            let on_vertex =
                |_: &Id| Some(fold_ids(touches[a].iter().map(|_| point.clone()).collect()));
            let on_edge = |e: &Id| {
                let k = match e {
                    Id::Name(s) => s.strip_prefix('j')?.parse::<usize>().ok()?,
                    _ => 0,
                };
                Some(fold_ids(
                    touches[a]
                        .iter()
                        .map(|&(c, _)| {
                            if k > 0 && channels[&channel_list[c]].contains_key(&k) {
                                step_id(k)
                            } else {
                                Id::null_of(point.clone())
                            }
                        })
                        .collect(),
                ))
            };
            GraphMorphism::from_id_fns(&head, cod.carrier(), on_vertex, on_edge)
                .map_err(AccountError::from)?
        };
        let span = Span::new(GraphMorphism::bang(&head), right).map_err(AccountError::from)?;
        let valuation = head
            .vertices()
            .iter()
            .map(|v| {
                v.to_string()
                    .parse::<Money>()
                    .expect("vertex ids are values")
            })
            .collect();
        atoms.push(Expression::Atom(GeneralAccount::new(
            AccountObject::unit(),
            cod.clone(),
            span,
            valuation,
        )?));
        cods.push(cod);
    }
    if estimate > MAX_SYSTEM_EDGES {
        return Err(LedgerError::SystemTooLarge { edges: estimate });
    }

    let units = fold_objects(vec![AccountObject::unit(); n]);
    let open = GeneralAccount::from_morphism(
        &AccountObject::unit(),
        &units,
        &GraphMorphism::from_indices(
            RGraph::terminal(),
            units.carrier().clone(),
            vec![0],
            vec![0],
        )
        .map_err(AccountError::from)?,
    )?;

    let source = Shape::fold(
        touches
            .iter()
            .map(|t| {
                Shape::fold(
                    t.iter()
                        .map(|&(c, dual)| Shape::Leaf(2 * c + dual as usize))
                        .collect(),
                )
            })
            .collect(),
    );
    let target = Shape::fold(
        (0..channel_list.len())
            .map(|c| {
                Shape::Pair(
                    Box::new(Shape::Leaf(2 * c)),
                    Box::new(Shape::Leaf(2 * c + 1)),
                )
            })
            .collect(),
    );
    let counits: Vec<Expression> = objects
        .iter()
        .map(|o| Expression::Counit(o.clone()))
        .collect();
    let wired = fold_objects(objects.iter().map(|o| o.tensor(&o.dual())).collect());
    let boundary = fold_objects(cods);
    let unit_vertex = Id::name("0");
    let unit_edge = Id::null_of(unit_vertex.clone());
    let rewire = |unit: &Id| {
        let (source, target) = (&source, &target);
        let unit = unit.clone();
        move |id: &Id| {
            let mut leaves = BTreeMap::new();
            source.split(id, &mut leaves)?;
            target.build(&leaves, &unit)
        }
    };
    let perm = GraphMorphism::from_id_fns(
        boundary.carrier(),
        wired.carrier(),
        rewire(&unit_vertex),
        rewire(&unit_edge),
    )
    .map_err(AccountError::from)?;
    let perm = GeneralAccount::from_morphism(&boundary, &wired, &perm)?;

    let tail = fold_exprs(counits).unwrap_or(Expression::Identity(AccountObject::unit()));
    let tail_cod = fold_objects(vec![AccountObject::unit(); channel_list.len().max(1)]);
    let close = GeneralAccount::from_morphism(
        &tail_cod,
        &AccountObject::unit(),
        &GraphMorphism::bang(tail_cod.carrier()),
    )?;

    let expression = Expression::Atom(open)
        .compose(fold_exprs(atoms).expect("at least one account"))
        .compose(Expression::Atom(perm))
        .compose(tail)
        .compose(Expression::Atom(close));
    let system = expression.eval()?;
    let replay_path = find_replay_path(&system, &states, &flows)?;
    Ok(ClosedLedger {
        expression,
        system,
        states,
        replay_path,
    })
}

/// The component of a system head id that belongs to the tensor of ledger
/// accounts: three steps left through the composites, then one right.
fn account_component(id: &Id) -> Option<&Id> {
    let mut cur = id;
    for _ in 0..3 {
        cur = cur.as_pair()?.0;
    }
    Some(cur.as_pair()?.1)
}

fn find_replay_path(
    system: &GeneralAccount,
    states: &[Vec<Money>],
    flows: &[Vec<Flow>],
) -> Result<Path, LedgerError> {
    let head = system.head();
    let vertices: BTreeMap<&Id, usize> = (0..head.vertex_count())
        .filter_map(|v| Some((account_component(head.vertex(v))?, v)))
        .collect();
    let edges: BTreeMap<&Id, usize> = (0..head.edge_count())
        .filter_map(|e| Some((account_component(&head.edge(e).id)?, e)))
        .collect();
    let missing = || AccountError::Path(crate::behaviour::BehaviourError::OutOfRange);

    let start_id = fold_ids(states[0].iter().map(value_id).collect());
    let start = *vertices.get(&start_id).ok_or_else(missing)?;
    let mut path_edges = Vec::new();
    for (k, fs) in flows.iter().enumerate() {
        let id = fold_ids(
            (0..states[k].len())
                .map(|a| {
                    if fs.iter().any(|f| f.from == a || f.to == a) {
                        step_id(k + 1)
                    } else {
                        Id::null_of(value_id(&states[k][a]))
                    }
                })
                .collect(),
        );
        path_edges.push(*edges.get(&id).ok_or_else(missing)?);
    }
    Ok(Path::new(head, start, path_edges).map_err(AccountError::from)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accounts::total_value;

    fn m(v: i64) -> Money {
        BigInt::from(v)
    }

    fn acct(name: &str, kind: AccountKind, value: i64) -> LedgerAccount {
        LedgerAccount {
            name: name.into(),
            kind,
            value: m(value),
        }
    }

    fn example_ledger() -> Ledger {
        Ledger::new(vec![
            acct("asset", AccountKind::Asset, 1000),
            acct("liability", AccountKind::Liability, 0),
            acct("expense", AccountKind::Expense, 0),
            acct("income", AccountKind::Income, 0),
            acct("equity", AccountKind::Equity, -1000),
        ])
        .unwrap()
    }

    fn example_journal() -> Journal {
        Journal::new(vec![
            JournalEntry::Post(Transaction::simple(1, "expense", "liability", 2000)),
            JournalEntry::Post(Transaction::simple(2, "asset", "income", 1500)),
            JournalEntry::Post(Transaction::simple(3, "liability", "asset", 1000)),
            JournalEntry::ZeroizeExpenses,
            JournalEntry::ZeroizeIncome,
        ])
        .unwrap()
    }

    fn v(xs: [i64; 5]) -> Vec<Money> {
        xs.into_iter().map(m).collect()
    }

    #[test]
    fn purchase_then_income_then_repayment() {
        let l = example_ledger();
        let l = l
            .post(&Transaction::simple(1, "expense", "liability", 2000))
            .unwrap();
        assert_eq!(l.values(), v([1000, -2000, 2000, 0, -1000]));
        let l = l
            .post(&Transaction::simple(2, "asset", "income", 1500))
            .unwrap();
        assert_eq!(l.values(), v([2500, -2000, 2000, -1500, -1000]));
        let l = l
            .post(&Transaction::simple(3, "liability", "asset", 1000))
            .unwrap();
        assert_eq!(l.values(), v([1500, -1000, 2000, -1500, -1000]));
        let l = l.zeroize_expenses().unwrap();
        assert_eq!(l.values(), v([1500, -1000, 0, -1500, 1000]));
        let l = l.zeroize_income().unwrap();
        assert_eq!(l.values(), v([1500, -1000, 0, 0, -500]));
    }

    #[test]
    fn replay_matches_worked_example() {
        let states = replay(&example_ledger(), &example_journal()).unwrap();
        let expected = [
            [1000, 0, 0, 0, -1000],
            [1000, -2000, 2000, 0, -1000],
            [2500, -2000, 2000, -1500, -1000],
            [1500, -1000, 2000, -1500, -1000],
            [1500, -1000, 0, -1500, 1000],
            [1500, -1000, 0, 0, -500],
        ];
        assert_eq!(states, expected.map(v).to_vec());
        assert!(states.iter().all(|s| s.iter().sum::<Money>().is_zero()));
    }

    #[test]
    fn final_equation() {
        let states = replay_ledgers(&example_ledger(), &example_journal()).unwrap();
        let eq = states.last().unwrap().accounting_equation();
        assert_eq!(
            (eq.assets, eq.liabilities, eq.owners_equity, eq.holds),
            (m(1500), m(1000), m(500), true)
        );
    }

    #[test]
    fn empty_ledger_equation() {
        let eq = Ledger::new(vec![]).unwrap().accounting_equation();
        assert!(eq.holds);
        assert!(eq.assets.is_zero());
    }

    #[test]
    fn unbalanced_is_rejected() {
        let t = Transaction {
            step: 7,
            debits: vec![Posting::new("asset", 10)],
            credits: vec![Posting::new("income", 9)],
        };
        assert!(matches!(
            example_ledger().post(&t),
            Err(LedgerError::UnbalancedTransaction { step: 7, .. })
        ));
    }

    #[test]
    fn sign_violation_names_account() {
        let t = Transaction::simple(1, "liability", "asset", 5000);
        match example_ledger().post(&t) {
            Err(LedgerError::SignConstraintViolation { account, .. }) => {
                assert_eq!(account, "asset")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zeroize_on_zero_is_identity() {
        let l = example_ledger();
        assert_eq!(l.zeroize_expenses().unwrap(), l);
        assert_eq!(l.zeroize_income().unwrap(), l);
    }

    #[test]
    fn zeroize_needs_equity() {
        let l = Ledger::new(vec![
            acct("cash", AccountKind::Asset, 0),
            acct("food", AccountKind::Expense, 5),
        ])
        .unwrap();
        assert_eq!(l.zeroize_expenses(), Err(LedgerError::NoEquityAccount));
    }

    #[test]
    fn journal_step_order() {
        let err = Journal::new(vec![
            JournalEntry::Post(Transaction::simple(2, "asset", "income", 1)),
            JournalEntry::Post(Transaction::simple(2, "asset", "income", 1)),
        ])
        .unwrap_err();
        assert_eq!(
            err,
            LedgerError::StepOrder {
                previous: 2,
                found: 2
            }
        );
    }

    #[test]
    fn empty_journal_replays_initial_state() {
        let states = replay(&example_ledger(), &Journal::default()).unwrap();
        assert_eq!(states, vec![example_ledger().values()]);
    }

    #[test]
    fn flows_match_net_changes() {
        let fs = step_flows(&v([0, 0, 0, 0, 0]), &v([5, -3, -2, 0, 0]));
        assert_eq!(
            fs,
            vec![
                Flow {
                    from: 1,
                    to: 0,
                    amount: m(3)
                },
                Flow {
                    from: 2,
                    to: 0,
                    amount: m(2)
                }
            ]
        );
    }

    #[test]
    fn closed_system_conserves_zero() {
        let closed = as_closed_system(&example_ledger(), &example_journal()).unwrap();
        assert!(closed.system.is_closed());
        assert_eq!(closed.replay_path.len(), 5);
        assert_eq!(
            total_value(&closed.system, &closed.replay_path).unwrap(),
            m(0)
        );
    }

    #[test]
    fn closed_system_without_flows() {
        let closed = as_closed_system(&example_ledger(), &Journal::default()).unwrap();
        assert_eq!(
            total_value(&closed.system, &closed.replay_path).unwrap(),
            m(0)
        );
    }

    #[test]
    fn balance_sheet_lists_equation() {
        let states = replay_ledgers(&example_ledger(), &example_journal()).unwrap();
        let sheet = states.last().unwrap().balance_sheet();
        assert!(sheet.contains("Assets = Liabilities + Owner's Equity: 1500 = 1000 + 500 (holds)"));
        assert!(sheet.contains("subtotal Asset"));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "expense".parse::<AccountKind>().unwrap(),
            AccountKind::Expense
        );
        assert!("cash".parse::<AccountKind>().is_err());
    }
}
