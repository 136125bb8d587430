//! General accounts: finite transition systems measured in value.
//!
//! An [`AccountObject`] is a finite carrier graph `U` together with a
//! labelling of its edges by flows on a [`Signature`]. A [`GeneralAccount`]
//! is a span of carriers with a valuation on head vertices; the valuation is
//! the transposed form of the 2-cell into the standard account, and it must
//! satisfy the measurement condition on every head edge.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::behaviour::{BehaviourError, Path};
use crate::rgraph::{GraphError, GraphMorphism, Id, RGraph};
use crate::span::{iso_spans_with, pullback, transpose, untranspose, Span, SpanError, TwoCell};
use crate::stdaccount::{net_flow, Signature, StdAccountError};
use crate::Money;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AccountError {
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Flow(#[from] StdAccountError),
    #[error(transparent)]
    Path(#[from] BehaviourError),
    #[error("edge {edge}: label has {found} flows but the signature has {expected} channels")]
    LabelArity {
        edge: Id,
        expected: usize,
        found: usize,
    },
    #[error("null loop {0} must carry zero flows")]
    NullLabel(Id),
    #[error("edge {0} carries a negative flow")]
    NegativeLabel(Id),
    #[error("span {0} leg does not land in the carrier")]
    LegMismatch(&'static str),
    #[error("valuation has {found} entries for {expected} head vertices")]
    ValuationArity { expected: usize, found: usize },
    #[error("measurement violated on edge {edge}: value change {lhs} but net flow {rhs}")]
    MeasurementViolation { edge: Id, lhs: Money, rhs: Money },
    #[error("boundary mismatch: [{left}] against [{right}]")]
    BoundaryMismatch { left: String, right: String },
    #[error("at {path}: {source}")]
    AtNode {
        path: String,
        source: Box<AccountError>,
    },
    #[error("account is not closed: boundaries are [{dom}] and [{cod}]")]
    NotClosed { dom: String, cod: String },
    #[error("value changed along the path at step {step}: {expected} then {found}")]
    InvariantBroken {
        step: usize,
        expected: Money,
        found: Money,
    },
}

/// A carrier graph labelled by flows on a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccountObject {
    carrier: RGraph,
    signature: Signature,
    labels: Vec<Vec<Money>>,
}

impl AccountObject {
    /// Labels are given per non-null edge; omitted edges carry zero flows.
    pub fn new(
        carrier: RGraph,
        signature: Signature,
        labels: impl IntoIterator<Item = (Id, Vec<Money>)>,
    ) -> Result<Self, AccountError> {
        let n = signature.len();
        let mut table = vec![vec![BigInt::zero(); n]; carrier.edge_count()];
        for (id, flows) in labels {
            let e = carrier
                .edge_index(&id)
                .ok_or_else(|| GraphError::UnknownEdge(id.clone()))?;
            if flows.len() != n {
                return Err(AccountError::LabelArity {
                    edge: id,
                    expected: n,
                    found: flows.len(),
                });
            }
            if flows.iter().any(Signed::is_negative) {
                return Err(AccountError::NegativeLabel(id));
            }
            if carrier.is_null(e) && flows.iter().any(|x| !x.is_zero()) {
                return Err(AccountError::NullLabel(id));
            }
            table[e] = flows;
        }
        Ok(AccountObject {
            carrier,
            signature,
            labels: table,
        })
    }

    /// The unit object `I`: terminal carrier, empty signature.
    pub fn unit() -> Self {
        AccountObject {
            carrier: RGraph::terminal(),
            signature: Signature::unit(),
            labels: vec![Vec::new()],
        }
    }

    pub fn carrier(&self) -> &RGraph {
        &self.carrier
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Flows on carrier edge `e`, one per channel.
    pub fn label(&self, e: usize) -> &[Money] {
        &self.labels[e]
    }

    /// Same carrier, reversed signature, labels read backwards.
    pub fn dual(&self) -> Self {
        AccountObject {
            carrier: self.carrier.clone(),
            signature: self.signature.reverse(),
            labels: self
                .labels
                .iter()
                .map(|l| l.iter().rev().cloned().collect())
                .collect(),
        }
    }

    pub fn tensor(&self, other: &AccountObject) -> Self {
        let carrier = self.carrier.product(&other.carrier);
        let mut labels = Vec::with_capacity(carrier.edge_count());
        for a in &self.labels {
            for b in &other.labels {
                labels.push(a.iter().chain(b).cloned().collect());
            }
        }
        AccountObject {
            carrier,
            signature: self.signature.tensor(&other.signature),
            labels,
        }
    }

    fn describe(&self) -> String {
        self.signature.to_string()
    }
}

/// A span of carriers with a valuation satisfying the measurement condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralAccount {
    dom: AccountObject,
    cod: AccountObject,
    span: Span,
    valuation: Vec<Money>,
}

impl GeneralAccount {
    /// Validates and builds an account. `valuation[v]` is the value of head
    /// vertex `v`.
    pub fn new(
        dom: AccountObject,
        cod: AccountObject,
        span: Span,
        valuation: Vec<Money>,
    ) -> Result<Self, AccountError> {
        if span.dom() != dom.carrier() {
            return Err(AccountError::LegMismatch("left"));
        }
        if span.cod() != cod.carrier() {
            return Err(AccountError::LegMismatch("right"));
        }
        let expected = span.head().vertex_count();
        if valuation.len() != expected {
            return Err(AccountError::ValuationArity {
                expected,
                found: valuation.len(),
            });
        }
        let account = GeneralAccount {
            dom,
            cod,
            span,
            valuation,
        };
        account.check_measurement()?;
        Ok(account)
    }

    pub fn dom(&self) -> &AccountObject {
        &self.dom
    }

    pub fn cod(&self) -> &AccountObject {
        &self.cod
    }

    pub fn span(&self) -> &Span {
        &self.span
    }

    pub fn head(&self) -> &RGraph {
        self.span.head()
    }

    pub fn valuation(&self) -> &[Money] {
        &self.valuation
    }

    pub fn value_at(&self, v: usize) -> &Money {
        &self.valuation[v]
    }

    /// Boundary flows of head edge `e`, read through the legs.
    pub fn flows(&self, e: usize) -> (&[Money], &[Money]) {
        (
            self.dom.label(self.span.left().edge_image(e)),
            self.cod.label(self.span.right().edge_image(e)),
        )
    }

    /// Re-checks `ν(target) − ν(source) = Σξx − Σζy` on every head edge.
    pub fn check_measurement(&self) -> Result<(), AccountError> {
        let head = self.head();
        let xi = self.dom.signature.polarities();
        let zeta = self.cod.signature.polarities();
        for (e, edge) in head.edges().iter().enumerate() {
            let (x, y) = self.flows(e);
            let rhs = net_flow(&xi, &zeta, x, y)?;
            let lhs = &self.valuation[edge.target] - &self.valuation[edge.source];
            if lhs != rhs {
                return Err(AccountError::MeasurementViolation {
                    edge: edge.id.clone(),
                    lhs,
                    rhs,
                });
            }
        }
        Ok(())
    }

    /// Sequential composite; the valuation of a synchronized pair is the sum.
    pub fn compose(&self, next: &GeneralAccount) -> Result<GeneralAccount, AccountError> {
        if self.cod != next.dom {
            return Err(AccountError::BoundaryMismatch {
                left: self.cod.describe(),
                right: next.dom.describe(),
            });
        }
        let pb = pullback(&self.span, &next.span)?;
        let valuation = (0..pb.span.head().vertex_count())
            .map(|k| {
                &self.valuation[pb.to_first.vertex_image(k)]
                    + &next.valuation[pb.to_second.vertex_image(k)]
            })
            .collect();
        GeneralAccount::new(self.dom.clone(), next.cod.clone(), pb.span, valuation)
    }

    /// Parallel composite; pair states are valued by the sum.
    pub fn tensor(&self, other: &GeneralAccount) -> Result<GeneralAccount, AccountError> {
        let span = self.span.tensor(&other.span);
        let mut valuation = Vec::with_capacity(span.head().vertex_count());
        for a in &self.valuation {
            for b in &other.valuation {
                valuation.push(a + b);
            }
        }
        GeneralAccount::new(
            self.dom.tensor(&other.dom),
            self.cod.tensor(&other.cod),
            span,
            valuation,
        )
    }

    pub fn identity(obj: &AccountObject) -> GeneralAccount {
        Self::zero_valued(obj.clone(), obj.clone(), Span::identity(obj.carrier()))
    }

    /// `η : I → O* ⊗ O`.
    pub fn unit(obj: &AccountObject) -> GeneralAccount {
        Self::zero_valued(
            AccountObject::unit(),
            obj.dual().tensor(obj),
            Span::eta(obj.carrier()),
        )
    }

    /// `ε : O ⊗ O* → I`.
    pub fn counit(obj: &AccountObject) -> GeneralAccount {
        Self::zero_valued(
            obj.tensor(&obj.dual()),
            AccountObject::unit(),
            Span::epsilon(obj.carrier()),
        )
    }

    /// The account `m_*` of a carrier morphism, valued 0. Used for the
    /// structural isomorphisms between bracketings of tensor products.
    pub fn from_morphism(
        dom: &AccountObject,
        cod: &AccountObject,
        m: &GraphMorphism,
    ) -> Result<GeneralAccount, AccountError> {
        let span = Span::lower_star(m);
        let valuation = vec![BigInt::zero(); span.head().vertex_count()];
        GeneralAccount::new(dom.clone(), cod.clone(), span, valuation)
    }

    fn zero_valued(dom: AccountObject, cod: AccountObject, span: Span) -> GeneralAccount {
        let valuation = vec![BigInt::zero(); span.head().vertex_count()];
        GeneralAccount::new(dom, cod, span, valuation).expect("structural accounts balance")
    }

    pub fn is_closed(&self) -> bool {
        self.dom.signature.is_empty() && self.cod.signature.is_empty()
    }

    /// The finite part of the measurement 2-cell, in both forms.
    pub fn measurement_cell(&self) -> Result<MeasurementCell, AccountError> {
        MeasurementCell::build(self)
    }
}

pub fn make_general_account(
    dom: AccountObject,
    cod: AccountObject,
    span: Span,
    valuation: Vec<Money>,
) -> Result<GeneralAccount, AccountError> {
    GeneralAccount::new(dom, cod, span, valuation)
}

pub fn compose_accounts(
    a: &GeneralAccount,
    b: &GeneralAccount,
) -> Result<GeneralAccount, AccountError> {
    a.compose(b)
}

pub fn tensor_accounts(
    a: &GeneralAccount,
    b: &GeneralAccount,
) -> Result<GeneralAccount, AccountError> {
    a.tensor(b)
}

pub fn identity_account(obj: &AccountObject) -> GeneralAccount {
    GeneralAccount::identity(obj)
}

pub fn unit_account(obj: &AccountObject) -> GeneralAccount {
    GeneralAccount::unit(obj)
}

pub fn counit_account(obj: &AccountObject) -> GeneralAccount {
    GeneralAccount::counit(obj)
}

/// An invertible 2-cell between accounts that also preserves value.
pub fn iso_accounts(
    a: &GeneralAccount,
    b: &GeneralAccount,
    max_vertices: usize,
) -> Result<Option<TwoCell>, AccountError> {
    if a.dom != b.dom || a.cod != b.cod {
        return Ok(None);
    }
    Ok(iso_spans_with(&a.span, &b.span, max_vertices, |i, j| {
        a.valuation[i] == b.valuation[j]
    })?)
}

/// The measurement 2-cell restricted to the part of the standard account an
/// account actually reaches.
///
/// `x_fin` and `y_fin` are one-vertex graphs whose edges are the flow tuples
/// that occur on the boundaries; `a_fin : x_fin → y_fin` is the fragment of
/// the standard account spanned by the values and transitions the account
/// visits; `phi` is the valuation as a head morphism into `a_fin`; and
/// `cell` is its untransposed form `R • g_* ⇒ f_* • a_fin`.
#[derive(Clone, Debug)]
pub struct MeasurementCell {
    pub x_fin: RGraph,
    pub y_fin: RGraph,
    pub a_fin: Span,
    pub f: GraphMorphism,
    pub g: GraphMorphism,
    pub phi: GraphMorphism,
    pub cell: TwoCell,
}

fn tuple_id(prefix: &str, flows: &[Money]) -> Id {
    let body = flows
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",");
    Id::name(format!("{prefix}[{body}]"))
}

fn is_zero_tuple(v: &[Money]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// One-vertex graph with an edge per nonzero tuple, and the map sending
/// each carrier edge to its tuple.
fn flow_graph(obj: &AccountObject, prefix: &str) -> Result<(RGraph, GraphMorphism), GraphError> {
    let point = Id::name("*");
    let tuples: BTreeSet<Id> = (0..obj.carrier.edge_count())
        .filter(|&e| !is_zero_tuple(obj.label(e)))
        .map(|e| tuple_id(prefix, obj.label(e)))
        .collect();
    let graph = RGraph::new(
        [point.clone()],
        tuples
            .into_iter()
            .map(|t| (t, point.clone(), point.clone())),
    )?;
    let vmap = obj
        .carrier
        .vertices()
        .iter()
        .map(|v| (v.clone(), point.clone()));
    let emap = (0..obj.carrier.edge_count()).map(|e| {
        let image = if is_zero_tuple(obj.label(e)) {
            Id::null_of(point.clone())
        } else {
            tuple_id(prefix, obj.label(e))
        };
        (obj.carrier.edge(e).id.clone(), image)
    });
    let m = GraphMorphism::new(obj.carrier(), &graph, vmap, emap)?;
    Ok((graph, m))
}

impl MeasurementCell {
    fn build(a: &GeneralAccount) -> Result<Self, AccountError> {
        let (x_fin, f) = flow_graph(&a.dom, "x")?;
        let (y_fin, g) = flow_graph(&a.cod, "y")?;
        let head = a.head();
        let vid = |v: &Money| Id::name(format!("v{v}"));
        let values: BTreeSet<Money> = a.valuation.iter().cloned().collect();

        // An edge of the standard account is determined by its source value
        // and its flows; identical tuples with no movement are null loops.
        let key = |e: usize| {
            let (x, y) = a.flows(e);
            let src = &a.valuation[head.source(e)];
            (src.clone(), x.to_vec(), y.to_vec())
        };
        let mut edges: BTreeMap<(Money, Vec<Money>, Vec<Money>), Id> = BTreeMap::new();
        for e in 0..head.edge_count() {
            let k = key(e);
            if is_zero_tuple(&k.1) && is_zero_tuple(&k.2) || edges.contains_key(&k) {
                continue;
            }
            let id = Id::name(format!(
                "e{}:{}|{}",
                k.0,
                tuple_id("", &k.1),
                tuple_id("", &k.2)
            ));
            edges.insert(k, id);
        }
        let edge_image = |e: usize| -> Id {
            let k = key(e);
            match edges.get(&k) {
                Some(id) => id.clone(),
                None => Id::null_of(vid(&k.0)),
            }
        };
        let mut triples = Vec::new();
        let mut seen = BTreeSet::new();
        for e in 0..head.edge_count() {
            let id = edge_image(e);
            if edges.values().any(|v| v == &id) && seen.insert(id.clone()) {
                triples.push((
                    id,
                    vid(&a.valuation[head.source(e)]),
                    vid(&a.valuation[head.target(e)]),
                ));
            }
        }
        let a_head = RGraph::new(values.iter().map(vid), triples.iter().cloned())?;

        let star = Id::name("*");
        let leg = |to: &RGraph, prefix: &str, side: usize| -> Result<GraphMorphism, GraphError> {
            let vmap = a_head.vertices().iter().map(|v| (v.clone(), star.clone()));
            let emap = edges.iter().map(|(k, id)| {
                let flows = if side == 0 { &k.1 } else { &k.2 };
                let image = if is_zero_tuple(flows) {
                    Id::null_of(star.clone())
                } else {
                    tuple_id(prefix, flows)
                };
                (id.clone(), image)
            });
            GraphMorphism::new(&a_head, to, vmap, emap)
        };
        let a_fin = Span::new(leg(&x_fin, "x", 0)?, leg(&y_fin, "y", 1)?)?;

        let vmap = (0..head.vertex_count()).map(|v| (head.vertex(v).clone(), vid(&a.valuation[v])));
        let emap = (0..head.edge_count()).map(|e| (head.edge(e).id.clone(), edge_image(e)));
        let phi = GraphMorphism::new(head, &a_head, vmap, emap)?;
        let cell = untranspose(&a.span, &a_fin, &f, &g, &phi)?;
        Ok(MeasurementCell {
            x_fin,
            y_fin,
            a_fin,
            f,
            g,
            phi,
            cell,
        })
    }

    /// Transposes the stored 2-cell back into a head morphism.
    pub fn transpose_back(&self, a: &GeneralAccount) -> Result<GraphMorphism, AccountError> {
        Ok(transpose(
            &a.span,
            &self.a_fin,
            &self.f,
            &self.g,
            &self.cell,
        )?)
    }
}

/// A system of accounts. There is deliberately no node that copies a
/// boundary: duplicating a flow would create value from nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expression {
    Atom(GeneralAccount),
    Compose(Box<Expression>, Box<Expression>),
    Tensor(Box<Expression>, Box<Expression>),
    Identity(AccountObject),
    Unit(AccountObject),
    Counit(AccountObject),
}

impl Expression {
    pub fn compose(self, next: Expression) -> Expression {
        Expression::Compose(Box::new(self), Box::new(next))
    }

    pub fn tensor(self, other: Expression) -> Expression {
        Expression::Tensor(Box::new(self), Box::new(other))
    }

    /// Evaluates bottom-up, re-verifying the measurement condition at every
    /// node. Errors carry the path to the failing node, e.g.
    /// `root.compose[1].tensor[0]`.
    pub fn eval(&self) -> Result<GeneralAccount, AccountError> {
        self.eval_at("root")
    }

    fn eval_at(&self, path: &str) -> Result<GeneralAccount, AccountError> {
        let at = |source: AccountError| match source {
            e @ AccountError::AtNode { .. } => e,
            source => AccountError::AtNode {
                path: path.to_string(),
                source: Box::new(source),
            },
        };
        let result = match self {
            Expression::Atom(a) => a.check_measurement().map(|_| a.clone()),
            Expression::Identity(o) => Ok(GeneralAccount::identity(o)),
            Expression::Unit(o) => Ok(GeneralAccount::unit(o)),
            Expression::Counit(o) => Ok(GeneralAccount::counit(o)),
            Expression::Compose(l, r) => {
                let a = l.eval_at(&format!("{path}.compose[0]"))?;
                let b = r.eval_at(&format!("{path}.compose[1]"))?;
                a.compose(&b)
            }
            Expression::Tensor(l, r) => {
                let a = l.eval_at(&format!("{path}.tensor[0]"))?;
                let b = r.eval_at(&format!("{path}.tensor[1]"))?;
                a.tensor(&b)
            }
        };
        let account = result.map_err(at)?;
        account.check_measurement().map_err(at)?;
        Ok(account)
    }
}

pub fn eval(e: &Expression) -> Result<GeneralAccount, AccountError> {
    e.eval()
}

/// The value carried along a path of a closed system. Fails if the value
/// moves, which a validated account cannot do.
pub fn total_value(a: &GeneralAccount, path: &Path) -> Result<Money, AccountError> {
    if !a.is_closed() {
        return Err(AccountError::NotClosed {
            dom: a.dom.describe(),
            cod: a.cod.describe(),
        });
    }
    if path.graph() != a.head() {
        return Err(BehaviourError::WrongGraph.into());
    }
    let expected = a.valuation[path.start()].clone();
    for (step, v) in path.vertices().enumerate() {
        if a.valuation[v] != expected {
            return Err(AccountError::InvariantBroken {
                step,
                expected,
                found: a.valuation[v].clone(),
            });
        }
    }
    Ok(expected)
}

impl fmt::Display for GeneralAccount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "account [{}] -> [{}], {} states, {} transitions",
            self.dom.describe(),
            self.cod.describe(),
            self.head().vertex_count(),
            self.head().non_null_edge_count()
        )
    }
}
