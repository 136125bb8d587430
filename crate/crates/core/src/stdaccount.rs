//! Standard accounts: the measuring instruments of value.
//!
//! A standard account between two signatures has the integers as states and,
//! as transitions, every tuple of non-negative flows satisfying the
//! continuity equation
//!
//! ```text
//! to − from = Σ ξᵢ·xᵢ − Σ ζⱼ·yⱼ
//! ```
//!
//! where `x` are the flows on the left channels with polarities `ξ` and `y`
//! the flows on the right channels with polarities `ζ`. These graphs are
//! infinite, so they are never materialized: an account is a membership test
//! for edges, and 2-cells into an account are given by their value on
//! vertices (their action on edges is forced).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rgraph::Polarity;
use crate::Money;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StdAccountError {
    #[error("{side} flows: expected {expected} entries, found {found}")]
    LengthMismatch {
        side: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("negative flow {0} on a channel")]
    NegativeFlow(Money),
    #[error("edges do not meet: right flows of the first differ from left flows of the second")]
    NotComposable,
}

/// A wire carrying non-negative amounts of value. Conceptually a one-vertex
/// graph whose edges are the natural numbers, with `0` as the null loop.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Channel {
    name: Arc<str>,
}

impl Channel {
    pub fn new(name: impl AsRef<str>) -> Self {
        Channel {
            name: Arc::from(name.as_ref()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// A formal product of signed channels. The empty signature is `I`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    factors: Vec<(Channel, Polarity)>,
}

impl Signature {
    pub fn new(factors: Vec<(Channel, Polarity)>) -> Self {
        Signature { factors }
    }

    pub fn unit() -> Self {
        Signature::default()
    }

    pub fn factors(&self) -> &[(Channel, Polarity)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn polarities(&self) -> Vec<Polarity> {
        self.factors.iter().map(|(_, p)| *p).collect()
    }

    /// `(c₁^ξ₁ … c_m^ξm)⁻¹ = c_m^−ξm … c₁^−ξ₁`.
    pub fn reverse(&self) -> Self {
        Signature {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|(c, p)| (c.clone(), p.flip()))
                .collect(),
        }
    }

    pub fn tensor(&self, other: &Signature) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Signature { factors }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("I");
        }
        for (i, (c, p)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}{}", c.name())?;
        }
        Ok(())
    }
}

/// A transition of a standard account.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AccountEdge {
    pub from: Money,
    pub to: Money,
    pub left_flows: Vec<Money>,
    pub right_flows: Vec<Money>,
}

impl fmt::Display for AccountEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Money]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "{}->{} [{} | {}]",
            self.from,
            self.to,
            join(&self.left_flows),
            join(&self.right_flows)
        )
    }
}

fn check_flows(
    side: &'static str,
    polarities: &[Polarity],
    flows: &[Money],
) -> Result<(), StdAccountError> {
    if polarities.len() != flows.len() {
        return Err(StdAccountError::LengthMismatch {
            side,
            expected: polarities.len(),
            found: flows.len(),
        });
    }
    if let Some(x) = flows.iter().find(|x| x.is_negative()) {
        return Err(StdAccountError::NegativeFlow(x.clone()));
    }
    Ok(())
}

fn signed_sum(polarities: &[Polarity], flows: &[Money]) -> Money {
    polarities
        .iter()
        .zip(flows)
        .fold(BigInt::zero(), |acc, (p, x)| match p {
            Polarity::Plus => acc + x,
            Polarity::Minus => acc - x,
        })
}

/// `Σ ξᵢ·xᵢ − Σ ζⱼ·yⱼ`: the change of value forced by the given flows.
pub fn net_flow(
    xi: &[Polarity],
    zeta: &[Polarity],
    left: &[Money],
    right: &[Money],
) -> Result<Money, StdAccountError> {
    check_flows("left", xi, left)?;
    check_flows("right", zeta, right)?;
    Ok(signed_sum(xi, left) - signed_sum(zeta, right))
}

/// Whether `e` satisfies the continuity equation for polarities `ξ`, `ζ`.
pub fn continuity_holds(
    xi: &[Polarity],
    zeta: &[Polarity],
    e: &AccountEdge,
) -> Result<bool, StdAccountError> {
    Ok(&e.to - &e.from == net_flow(xi, zeta, &e.left_flows, &e.right_flows)?)
}

/// The standard account `A_{X,Y}`, held intensionally.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StdAccount {
    pub dom: Signature,
    pub cod: Signature,
}

impl StdAccount {
    pub fn new(dom: Signature, cod: Signature) -> Self {
        StdAccount { dom, cod }
    }

    /// Edge membership.
    pub fn contains(&self, e: &AccountEdge) -> Result<bool, StdAccountError> {
        continuity_holds(&self.dom.polarities(), &self.cod.polarities(), e)
    }

    /// The unique edge leaving `from` with the given flows.
    pub fn edge_from(
        &self,
        from: Money,
        left: Vec<Money>,
        right: Vec<Money>,
    ) -> Result<AccountEdge, StdAccountError> {
        let delta = net_flow(
            &self.dom.polarities(),
            &self.cod.polarities(),
            &left,
            &right,
        )?;
        Ok(AccountEdge {
            to: &from + delta,
            from,
            left_flows: left,
            right_flows: right,
        })
    }
}

/// A 2-cell into a standard account, given by its action on vertices.
#[derive(Clone, Copy)]
pub struct Valuation2Cell {
    pub name: &'static str,
    pub arity: usize,
    op: fn(&[Money]) -> Money,
}

impl fmt::Debug for Valuation2Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Valuation2Cell({}/{})", self.name, self.arity)
    }
}

impl Valuation2Cell {
    pub fn from_fn(name: &'static str, arity: usize, op: fn(&[Money]) -> Money) -> Self {
        Valuation2Cell { name, arity, op }
    }

    /// Value assigned to a vertex given by its components.
    pub fn at(&self, vertex: &[Money]) -> Money {
        assert_eq!(
            vertex.len(),
            self.arity,
            "{} takes {} components",
            self.name,
            self.arity
        );
        (self.op)(vertex)
    }
}

fn zero(_: &[Money]) -> Money {
    BigInt::zero()
}

fn sum(v: &[Money]) -> Money {
    v.iter().sum()
}

/// `θ : 1_X ⇒ A_{X,X}`, the unique vertex to 0.
pub fn theta() -> Valuation2Cell {
    Valuation2Cell::from_fn("theta", 0, zero)
}

/// `α : A_{X,Y} • A_{Y,Z} ⇒ A_{X,Z}`, `(i, j) ↦ i + j`.
pub fn alpha() -> Valuation2Cell {
    Valuation2Cell::from_fn("alpha", 2, sum)
}

/// `τ : A_{W,X} ⊗ A_{Y,Z} ⇒ A_{W⊗Y, X⊗Z}`, `(i, j) ↦ i + j`.
pub fn tau() -> Valuation2Cell {
    Valuation2Cell::from_fn("tau", 2, sum)
}

/// `δ : η_X ⇒ A_{I, X⁻¹⊗X}`, the unique vertex to 0.
pub fn delta() -> Valuation2Cell {
    Valuation2Cell::from_fn("delta", 0, zero)
}

/// `γ : ε_X ⇒ A_{X⊗X⁻¹, I}`, the unique vertex to 0.
pub fn gamma() -> Valuation2Cell {
    Valuation2Cell::from_fn("gamma", 0, zero)
}

/// The five structure cells, with their forced action on edges.
#[derive(Clone, Copy, Debug)]
pub struct AccountCells {
    pub theta: Valuation2Cell,
    pub alpha: Valuation2Cell,
    pub tau: Valuation2Cell,
    pub delta: Valuation2Cell,
    pub gamma: Valuation2Cell,
}

impl Default for AccountCells {
    fn default() -> Self {
        AccountCells {
            theta: theta(),
            alpha: alpha(),
            tau: tau(),
            delta: delta(),
            gamma: gamma(),
        }
    }
}

impl AccountCells {
    /// Image under θ of the edge `x` of `1_X`.
    pub fn theta_edge(&self, x: &[Money]) -> AccountEdge {
        let v = self.theta.at(&[]);
        AccountEdge {
            from: v.clone(),
            to: v,
            left_flows: x.to_vec(),
            right_flows: x.to_vec(),
        }
    }

    /// Image under δ of the edge `x` of the head of `η_X`.
    pub fn delta_edge(&self, x: &[Money]) -> AccountEdge {
        let v = self.delta.at(&[]);
        let right = x.iter().rev().chain(x).cloned().collect();
        AccountEdge {
            from: v.clone(),
            to: v,
            left_flows: Vec::new(),
            right_flows: right,
        }
    }

    /// Image under γ of the edge `x` of the head of `ε_X`.
    pub fn gamma_edge(&self, x: &[Money]) -> AccountEdge {
        let v = self.gamma.at(&[]);
        let left = x.iter().chain(x.iter().rev()).cloned().collect();
        AccountEdge {
            from: v.clone(),
            to: v,
            left_flows: left,
            right_flows: Vec::new(),
        }
    }

    /// Image under α of a synchronized pair of edges.
    pub fn alpha_edge(
        &self,
        a: &AccountEdge,
        b: &AccountEdge,
    ) -> Result<AccountEdge, StdAccountError> {
        if a.right_flows != b.left_flows {
            return Err(StdAccountError::NotComposable);
        }
        Ok(AccountEdge {
            from: self.alpha.at(&[a.from.clone(), b.from.clone()]),
            to: self.alpha.at(&[a.to.clone(), b.to.clone()]),
            left_flows: a.left_flows.clone(),
            right_flows: b.right_flows.clone(),
        })
    }

    /// Image under τ of a pair of edges.
    pub fn tau_edge(&self, a: &AccountEdge, b: &AccountEdge) -> AccountEdge {
        AccountEdge {
            from: self.tau.at(&[a.from.clone(), b.from.clone()]),
            to: self.tau.at(&[a.to.clone(), b.to.clone()]),
            left_flows: a.left_flows.iter().chain(&b.left_flows).cloned().collect(),
            right_flows: a
                .right_flows
                .iter()
                .chain(&b.right_flows)
                .cloned()
                .collect(),
        }
    }
}

/// Result of checking one axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomResult {
    pub axiom: usize,
    pub checked: u64,
    pub counterexample: Option<String>,
}

impl AxiomResult {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for AxiomResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(
                f,
                "axiom_{}: PASS (checked {} tuples)",
                self.axiom, self.checked
            ),
            Some(at) => write!(f, "axiom_{}: FAIL at {}", self.axiom, at),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub bound: u64,
    pub max_factors: usize,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(AxiomResult::passed)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Random edge samples per axiom, on top of the exhaustive vertex checks.
pub const EDGE_SAMPLES: u64 = 10_000;

/// Checks the five axioms for the standard cells with a fixed seed.
pub fn verify_axioms(bound: u64, max_factors: usize) -> AxiomReport {
    verify_axioms_with(&AccountCells::default(), bound, max_factors, 0)
}

/// Checks the five axioms for arbitrary cells.
///
/// Each axiom is checked twice: on vertices, exhaustively over a small cube
/// inside `[-bound, bound]`; and on edges, by sampling transitions with
/// values in `[-bound, bound]` and flows in `[0, bound]` over signatures
/// with at most `max_factors` channels. Edge images of both sides must agree
/// and every intermediate image must satisfy continuity in its own account.
pub fn verify_axioms_with(
    cells: &AccountCells,
    bound: u64,
    max_factors: usize,
    seed: u64,
) -> AxiomReport {
    let bound = bound.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = signature_shapes(max_factors);
    let mut checker = Checker {
        cells,
        bound: bound as i64,
        shapes: &shapes,
    };
    let results = (1..=5)
        .map(|axiom| {
            let mut checked = 0;
            let counterexample = checker.run(axiom, &mut rng, &mut checked).err();
            AxiomResult {
                axiom,
                checked,
                counterexample,
            }
        })
        .collect();
    AxiomReport {
        bound,
        max_factors,
        results,
    }
}

/// All signatures with at most `max_factors` channels, named `c0, c1, …`.
pub fn signature_shapes(max_factors: usize) -> Vec<Signature> {
    let mut out = Vec::new();
    for len in 0..=max_factors {
        for bits in 0..(1u32 << len) {
            let factors = (0..len)
                .map(|i| {
                    let p = if bits >> i & 1 == 0 {
                        Polarity::Plus
                    } else {
                        Polarity::Minus
                    };
                    (Channel::new(format!("c{i}")), p)
                })
                .collect();
            out.push(Signature::new(factors));
        }
    }
    out
}

struct Checker<'a> {
    cells: &'a AccountCells,
    bound: i64,
    shapes: &'a [Signature],
}

type Check = Result<(), String>;

fn int(v: i64) -> Money {
    BigInt::from(v)
}

fn fmt_sig(s: &Signature) -> String {
    format!("[{s}]")
}

impl Checker<'_> {
    fn run(&mut self, axiom: usize, rng: &mut ChaCha8Rng, checked: &mut u64) -> Check {
        match axiom {
            1 => self.axiom_1(rng, checked),
            2 => self.axiom_2(rng, checked),
            3 => self.axiom_3(rng, checked),
            4 => self.axiom_4(rng, checked),
            5 => self.axiom_5(rng, checked),
            _ => unreachable!("there are five axioms"),
        }
    }

    fn random_signature(&self, rng: &mut impl Rng) -> Signature {
        self.shapes[rng.gen_range(0..self.shapes.len())].clone()
    }

    fn flows(&self, rng: &mut impl Rng, n: usize) -> Vec<Money> {
        (0..n).map(|_| int(rng.gen_range(0..=self.bound))).collect()
    }

    fn value(&self, rng: &mut impl Rng) -> Money {
        int(rng.gen_range(-self.bound..=self.bound))
    }

    /// A random edge of `acct` whose left flows are `left` when given.
    fn edge(&self, rng: &mut impl Rng, acct: &StdAccount, left: Option<Vec<Money>>) -> AccountEdge {
        let left = left.unwrap_or_else(|| self.flows(rng, acct.dom.len()));
        let right = self.flows(rng, acct.cod.len());
        acct.edge_from(self.value(rng), left, right)
            .expect("flows sized to the signature")
    }

    fn small(&self) -> i64 {
        self.bound.min(5)
    }

    fn member(acct: &StdAccount, e: &AccountEdge, what: &str) -> Check {
        match acct.contains(e) {
            Ok(true) => Ok(()),
            _ => Err(format!(
                "{what} = {e} is not an edge of A_{{{},{}}}",
                fmt_sig(&acct.dom),
                fmt_sig(&acct.cod)
            )),
        }
    }

    fn alpha(&self, a: &AccountEdge, b: &AccountEdge) -> Result<AccountEdge, String> {
        self.cells
            .alpha_edge(a, b)
            .map_err(|e| format!("{e}: {a} then {b}"))
    }

    // (θ • A)·α = 1_A
    fn axiom_1(&mut self, rng: &mut ChaCha8Rng, checked: &mut u64) -> Check {
        let c = self.cells;
        for i in -self.bound..=self.bound {
            *checked += 1;
            let lhs = c.alpha.at(&[c.theta.at(&[]), int(i)]);
            if lhs != int(i) {
                return Err(format!("(i={i}): {lhs} != {i}"));
            }
        }
        for k in 0..EDGE_SAMPLES {
            *checked += 1;
            let x = &self.shapes[k as usize % self.shapes.len()];
            let y = self.random_signature(rng);
            let acct = StdAccount::new(x.clone(), y.clone());
            let a = self.edge(rng, &acct, None);
            let th = c.theta_edge(&a.left_flows);
            Self::member(&StdAccount::new(x.clone(), x.clone()), &th, "theta")?;
            let lhs = self.alpha(&th, &a)?;
            Self::member(&acct, &lhs, "lhs")?;
            if lhs != a {
                return Err(format!(
                    "(X={}, Y={}, edge={a}): lhs {lhs}",
                    fmt_sig(x),
                    fmt_sig(&y)
                ));
            }
        }
        Ok(())
    }

    // (α • A)·α = (A • α)·α
    fn axiom_2(&mut self, rng: &mut ChaCha8Rng, checked: &mut u64) -> Check {
        let c = self.cells;
        let s = self.small();
        for i in -s..=s {
            for j in -s..=s {
                for k in -s..=s {
                    *checked += 1;
                    let (i_, j_, k_) = (int(i), int(j), int(k));
                    let lhs = c
                        .alpha
                        .at(&[c.alpha.at(&[i_.clone(), j_.clone()]), k_.clone()]);
                    let rhs = c.alpha.at(&[i_, c.alpha.at(&[j_, k_])]);
                    if lhs != rhs {
                        return Err(format!("(i={i}, j={j}, k={k}): {lhs} != {rhs}"));
                    }
                }
            }
        }
        for _ in 0..EDGE_SAMPLES {
            *checked += 1;
            let [w, x, y, z] = std::array::from_fn(|_| self.random_signature(rng));
            let a = self.edge(rng, &StdAccount::new(w.clone(), x.clone()), None);
            let b = self.edge(
                rng,
                &StdAccount::new(x.clone(), y.clone()),
                Some(a.right_flows.clone()),
            );
            let cc = self.edge(
                rng,
                &StdAccount::new(y.clone(), z.clone()),
                Some(b.right_flows.clone()),
            );
            let ab = self.alpha(&a, &b)?;
            Self::member(&StdAccount::new(w.clone(), y.clone()), &ab, "alpha(a,b)")?;
            let bc = self.alpha(&b, &cc)?;
            Self::member(&StdAccount::new(x.clone(), z.clone()), &bc, "alpha(b,c)")?;
            let lhs = self.alpha(&ab, &cc)?;
            let rhs = self.alpha(&a, &bc)?;
            Self::member(&StdAccount::new(w.clone(), z.clone()), &lhs, "lhs")?;
            if lhs != rhs {
                return Err(format!("(a={a}, b={b}, c={cc}): {lhs} != {rhs}"));
            }
        }
        Ok(())
    }

    // (α ⊗ α)·τ = (τ • τ)·α
    fn axiom_3(&mut self, rng: &mut ChaCha8Rng, checked: &mut u64) -> Check {
        let c = self.cells;
        let s = self.small();
        for i in -s..=s {
            for j in -s..=s {
                for i2 in -s..=s {
                    for j2 in -s..=s {
                        *checked += 1;
                        let v = |n| int(n);
                        let lhs = c
                            .tau
                            .at(&[c.alpha.at(&[v(i), v(j)]), c.alpha.at(&[v(i2), v(j2)])]);
                        let rhs = c
                            .alpha
                            .at(&[c.tau.at(&[v(i), v(i2)]), c.tau.at(&[v(j), v(j2)])]);
                        if lhs != rhs {
                            return Err(format!(
                                "(i={i}, j={j}, i'={i2}, j'={j2}): {lhs} != {rhs}"
                            ));
                        }
                    }
                }
            }
        }
        for _ in 0..EDGE_SAMPLES {
            *checked += 1;
            let [x, y, z, x2, y2, z2] = std::array::from_fn(|_| self.random_signature(rng));
            let a = self.edge(rng, &StdAccount::new(x.clone(), y.clone()), None);
            let b = self.edge(
                rng,
                &StdAccount::new(y.clone(), z.clone()),
                Some(a.right_flows.clone()),
            );
            let a2 = self.edge(rng, &StdAccount::new(x2.clone(), y2.clone()), None);
            let b2 = self.edge(
                rng,
                &StdAccount::new(y2.clone(), z2.clone()),
                Some(a2.right_flows.clone()),
            );
            let target = StdAccount::new(x.tensor(&x2), z.tensor(&z2));
            let lhs = c.tau_edge(&self.alpha(&a, &b)?, &self.alpha(&a2, &b2)?);
            let left_pair = c.tau_edge(&a, &a2);
            Self::member(
                &StdAccount::new(x.tensor(&x2), y.tensor(&y2)),
                &left_pair,
                "tau(a,a')",
            )?;
            let right_pair = c.tau_edge(&b, &b2);
            Self::member(
                &StdAccount::new(y.tensor(&y2), z.tensor(&z2)),
                &right_pair,
                "tau(b,b')",
            )?;
            let rhs = self.alpha(&left_pair, &right_pair)?;
            Self::member(&target, &lhs, "lhs")?;
            if lhs != rhs {
                return Err(format!("(a={a}, b={b}, a'={a2}, b'={b2}): {lhs} != {rhs}"));
            }
        }
        Ok(())
    }

    fn zero_vertex_check(
        &self,
        first: [&Valuation2Cell; 2],
        second: [&Valuation2Cell; 2],
    ) -> Check {
        let c = self.cells;
        let lhs = c.alpha.at(&[
            c.tau.at(&[first[0].at(&[]), first[1].at(&[])]),
            c.tau.at(&[second[0].at(&[]), second[1].at(&[])]),
        ]);
        let rhs = c.theta.at(&[]);
        if lhs != rhs {
            return Err(format!("(head vertex): {lhs} != {rhs}"));
        }
        Ok(())
    }

    // ((θ⊗δ)•(γ⊗θ))·(τ•τ)·α = θ on (1_X ⊗ η_X)•(ε_X ⊗ 1_X) = 1_X
    fn axiom_4(&mut self, rng: &mut ChaCha8Rng, checked: &mut u64) -> Check {
        let c = self.cells;
        *checked += 1;
        self.zero_vertex_check([&c.theta, &c.delta], [&c.gamma, &c.theta])?;
        let i = Signature::unit();
        for k in 0..EDGE_SAMPLES {
            *checked += 1;
            let x = &self.shapes[k as usize % self.shapes.len()];
            let xr = x.reverse();
            let flows = self.flows(rng, x.len());
            let th_l = c.theta_edge(&flows);
            let de = c.delta_edge(&flows);
            Self::member(&StdAccount::new(i.clone(), xr.tensor(x)), &de, "delta")?;
            let left = c.tau_edge(&th_l, &de);
            Self::member(
                &StdAccount::new(x.clone(), x.tensor(&xr).tensor(x)),
                &left,
                "tau(theta,delta)",
            )?;
            let ga = c.gamma_edge(&flows);
            Self::member(&StdAccount::new(x.tensor(&xr), i.clone()), &ga, "gamma")?;
            let right = c.tau_edge(&ga, &c.theta_edge(&flows));
            Self::member(
                &StdAccount::new(x.tensor(&xr).tensor(x), x.clone()),
                &right,
                "tau(gamma,theta)",
            )?;
            let lhs = self.alpha(&left, &right)?;
            let rhs = c.theta_edge(&flows);
            Self::member(&StdAccount::new(x.clone(), x.clone()), &lhs, "lhs")?;
            if lhs != rhs {
                return Err(format!(
                    "(X={}, edge={}): {lhs} != {rhs}",
                    fmt_sig(x),
                    fmt_flows(&flows)
                ));
            }
        }
        Ok(())
    }

    // ((δ⊗θ)•(θ⊗γ))·(τ•τ)·α = θ on (η_X ⊗ 1)•(1 ⊗ ε_X) = 1_{X⁻¹}
    fn axiom_5(&mut self, rng: &mut ChaCha8Rng, checked: &mut u64) -> Check {
        let c = self.cells;
        *checked += 1;
        self.zero_vertex_check([&c.delta, &c.theta], [&c.theta, &c.gamma])?;
        let i = Signature::unit();
        for k in 0..EDGE_SAMPLES {
            *checked += 1;
            let x = &self.shapes[k as usize % self.shapes.len()];
            let xr = x.reverse();
            // An edge of X⁻¹; the same move read in X runs in reverse order.
            let on_dual = self.flows(rng, x.len());
            let on_x: Vec<Money> = on_dual.iter().rev().cloned().collect();
            let de = c.delta_edge(&on_x);
            let left = c.tau_edge(&de, &c.theta_edge(&on_dual));
            Self::member(
                &StdAccount::new(xr.clone(), xr.tensor(x).tensor(&xr)),
                &left,
                "tau(delta,theta)",
            )?;
            let ga = c.gamma_edge(&on_x);
            Self::member(&StdAccount::new(x.tensor(&xr), i.clone()), &ga, "gamma")?;
            let right = c.tau_edge(&c.theta_edge(&on_dual), &ga);
            Self::member(
                &StdAccount::new(xr.tensor(x).tensor(&xr), xr.clone()),
                &right,
                "tau(theta,gamma)",
            )?;
            let lhs = self.alpha(&left, &right)?;
            let rhs = c.theta_edge(&on_dual);
            Self::member(&StdAccount::new(xr.clone(), xr.clone()), &lhs, "lhs")?;
            if lhs != rhs {
                return Err(format!(
                    "(X={}, edge={}): {lhs} != {rhs}",
                    fmt_sig(x),
                    fmt_flows(&on_dual)
                ));
            }
        }
        Ok(())
    }
}

fn fmt_flows(v: &[Money]) -> String {
    format!(
        "[{}]",
        v.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    )
}
