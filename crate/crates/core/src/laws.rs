//! Randomized checks of the equational laws: snake equations, adjunction
//! triangles, the transpose bijection, behaviours of composites, the
//! interchange law and conservation in closed systems.
//!
//! All generators draw from a seeded ChaCha stream, so a seed fixes every
//! instance and every report line.

use std::fmt;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::accounts::{
    iso_accounts, total_value, AccountError, AccountObject, Expression, GeneralAccount,
};
use crate::behaviour::{
    check_composite_behaviours, check_eta_behaviours, check_tensor_behaviours, enumerate_paths,
};
use crate::rgraph::{structural, GraphMorphism, Id, Polarity, RGraph};
use crate::span::{
    adjunction_counit, adjunction_unit, coherence, iso_spans, transpose, untranspose, Span,
    SpanError, TwoCell,
};
use crate::stdaccount::{Channel, Signature};
use crate::Money;

/// Vertex bound for isomorphism searches.
pub const ISO_BOUND: usize = 64;

/// Seeded generator of small random instances.
pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A graph with 1..=`max_vertices` vertices and up to `max_edges`
    /// non-null edges, loops and parallel edges allowed.
    pub fn graph(&mut self, max_vertices: usize, max_edges: usize) -> RGraph {
        let n = self.rng.gen_range(1..=max_vertices.max(1));
        let m = self.rng.gen_range(0..=max_edges);
        let vertices: Vec<Id> = (0..n).map(|i| Id::name(format!("v{i}"))).collect();
        let edges: Vec<(Id, Id, Id)> = (0..m)
            .map(|i| {
                let s = vertices[self.rng.gen_range(0..n)].clone();
                let t = vertices[self.rng.gen_range(0..n)].clone();
                (Id::name(format!("e{i}")), s, t)
            })
            .collect();
        RGraph::new(vertices, edges).expect("fresh ids")
    }

    /// A random morphism; falls back to the constant map onto the first
    /// vertex when random vertex maps keep leaving edges without images.
    pub fn morphism(&mut self, dom: &RGraph, cod: &RGraph) -> GraphMorphism {
        for _ in 0..20 {
            let vmap: Vec<usize> = (0..dom.vertex_count())
                .map(|_| self.rng.gen_range(0..cod.vertex_count()))
                .collect();
            let mut emap = Vec::with_capacity(dom.edge_count());
            for e in 0..dom.edge_count() {
                let (s, t) = (vmap[dom.source(e)], vmap[dom.target(e)]);
                if dom.is_null(e) {
                    emap.push(cod.null_loop(s));
                    continue;
                }
                let candidates: Vec<usize> = (0..cod.edge_count())
                    .filter(|&f| cod.source(f) == s && cod.target(f) == t)
                    .collect();
                match candidates.choose(&mut self.rng) {
                    Some(&f) => emap.push(f),
                    None => break,
                }
            }
            if emap.len() == dom.edge_count() {
                return GraphMorphism::from_indices(dom.clone(), cod.clone(), vmap, emap)
                    .expect("endpoints respected");
            }
        }
        let v = 0;
        let emap = vec![cod.null_loop(v); dom.edge_count()];
        GraphMorphism::from_indices(dom.clone(), cod.clone(), vec![v; dom.vertex_count()], emap)
            .expect("constant map is a morphism")
    }

    pub fn span(&mut self, x: &RGraph, y: &RGraph, max_vertices: usize, max_edges: usize) -> Span {
        let head = self.graph(max_vertices, max_edges);
        let left = self.morphism(&head, x);
        let right = self.morphism(&head, y);
        Span::new(left, right).expect("legs share the head")
    }

    pub fn signature(&mut self, max_channels: usize) -> Signature {
        let n = self.rng.gen_range(1..=max_channels.max(1));
        Signature::new(
            (0..n)
                .map(|i| {
                    let p = if self.rng.gen_bool(0.5) {
                        Polarity::Plus
                    } else {
                        Polarity::Minus
                    };
                    (Channel::new(format!("c{i}")), p)
                })
                .collect(),
        )
    }

    /// A labelled object with flows in `0..=max_flow`.
    pub fn object(
        &mut self,
        carrier: &RGraph,
        signature: Signature,
        max_flow: u32,
    ) -> AccountObject {
        let n = signature.len();
        let labels: Vec<(Id, Vec<Money>)> = carrier
            .edges()
            .iter()
            .filter(|e| !e.is_null)
            .map(|e| {
                (
                    e.id.clone(),
                    (0..n)
                        .map(|_| BigInt::from(self.rng.gen_range(0..=max_flow)))
                        .collect(),
                )
            })
            .collect();
        AccountObject::new(carrier.clone(), signature, labels).expect("labels fit the signature")
    }

    /// An account on the given boundaries whose head tracks carrier states
    /// together with a value in `window`, keeping at most `max_vertices` of
    /// them. Every transition is recorded at the value it forces, so the
    /// measurement condition holds by construction.
    pub fn account(
        &mut self,
        dom: &AccountObject,
        cod: &AccountObject,
        max_vertices: usize,
    ) -> GeneralAccount {
        let xi = dom.signature().polarities();
        let zeta = cod.signature().polarities();
        let (u, v) = (dom.carrier(), cod.carrier());
        let mut states: Vec<(usize, usize, i64)> = Vec::new();
        for a in 0..u.vertex_count() {
            for b in 0..v.vertex_count() {
                for k in -2..=2 {
                    states.push((a, b, k));
                }
            }
        }
        states.shuffle(&mut self.rng);
        states.truncate(self.rng.gen_range(1..=max_vertices.max(1)));
        states.sort();
        let vid = |(a, b, k): (usize, usize, i64)| {
            Id::name(format!("{}|{}|{k}", u.vertex(a), v.vertex(b)))
        };
        let mut edges = Vec::new();
        for &(a, b, k) in &states {
            for e in (0..u.edge_count()).filter(|&e| u.source(e) == a) {
                for f in (0..v.edge_count()).filter(|&f| v.source(f) == b) {
                    if u.is_null(e) && v.is_null(f) {
                        continue;
                    }
                    let net = crate::stdaccount::net_flow(&xi, &zeta, dom.label(e), cod.label(f))
                        .expect("labels fit");
                    let to = k + i64::try_from(net).expect("small flows");
                    let target = (u.target(e), v.target(f), to);
                    if states.binary_search(&target).is_ok() && self.rng.gen_bool(0.7) {
                        edges.push((e, f, (a, b, k), target));
                    }
                }
            }
        }
        let head = RGraph::new(
            states.iter().map(|&s| vid(s)),
            edges
                .iter()
                .enumerate()
                .map(|(i, &(_, _, s, t))| (Id::name(format!("t{i}")), vid(s), vid(t))),
        )
        .expect("fresh ids");
        let mut state_of = vec![states[0]; head.vertex_count()];
        for &st in &states {
            state_of[head.vertex_index(&vid(st)).expect("declared")] = st;
        }
        let vmap_left: Vec<usize> = state_of.iter().map(|s| s.0).collect();
        let vmap_right: Vec<usize> = state_of.iter().map(|s| s.1).collect();
        let mut emap_left = vec![0; head.edge_count()];
        let mut emap_right = vec![0; head.edge_count()];
        for h in 0..head.edge_count() {
            let s = head.source(h);
            if head.is_null(h) {
                emap_left[h] = u.null_loop(vmap_left[s]);
                emap_right[h] = v.null_loop(vmap_right[s]);
            } else {
                let Id::Name(name) = &head.edge(h).id else {
                    unreachable!("edge ids are names")
                };
                let i: usize = name[1..].parse().expect("t<i>");
                emap_left[h] = edges[i].0;
                emap_right[h] = edges[i].1;
            }
        }
        let left = GraphMorphism::from_indices(head.clone(), u.clone(), vmap_left, emap_left)
            .expect("legs follow the carrier");
        let right = GraphMorphism::from_indices(head.clone(), v.clone(), vmap_right, emap_right)
            .expect("legs follow the carrier");
        let valuation = state_of.iter().map(|s| BigInt::from(s.2)).collect();
        GeneralAccount::new(
            dom.clone(),
            cod.clone(),
            Span::new(left, right).expect("common head"),
            valuation,
        )
        .expect("valuation follows the flows")
    }
}

/// All morphisms `dom → cod`, up to `cap` of them.
pub fn all_morphisms(dom: &RGraph, cod: &RGraph, cap: usize) -> Vec<GraphMorphism> {
    let mut out = Vec::new();
    let n = dom.vertex_count();
    let mut vmap = vec![0; n];
    loop {
        let choices: Vec<Vec<usize>> = (0..dom.edge_count())
            .map(|e| {
                let (s, t) = (vmap[dom.source(e)], vmap[dom.target(e)]);
                if dom.is_null(e) {
                    vec![cod.null_loop(s)]
                } else {
                    (0..cod.edge_count())
                        .filter(|&f| cod.source(f) == s && cod.target(f) == t)
                        .collect()
                }
            })
            .collect();
        if choices.iter().all(|c| !c.is_empty()) {
            let mut idx = vec![0; choices.len()];
            loop {
                let emap = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
                out.push(
                    GraphMorphism::from_indices(dom.clone(), cod.clone(), vmap.clone(), emap)
                        .expect("enumerated"),
                );
                if out.len() >= cap {
                    return out;
                }
                let Some(k) = (0..idx.len()).find(|&k| idx[k] + 1 < choices[k].len()) else {
                    break;
                };
                idx[k] += 1;
                idx[..k].iter_mut().for_each(|i| *i = 0);
            }
        }
        let Some(k) = (0..n).find(|&k| vmap[k] + 1 < cod.vertex_count()) else {
            return out;
        };
        vmap[k] += 1;
        vmap[..k].iter_mut().for_each(|v| *v = 0);
    }
}

/// Tally of one law over many instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawResult {
    pub law: String,
    pub checked: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl LawResult {
    pub fn new(law: impl Into<String>) -> Self {
        LawResult {
            law: law.into(),
            checked: 0,
            failed: 0,
            first_failure: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }

    /// Records one instance; `Err` carries a description of the failure.
    pub fn record(&mut self, outcome: Result<(), String>) {
        self.checked += 1;
        if let Err(why) = outcome {
            self.failed += 1;
            self.first_failure.get_or_insert(why);
        }
    }
}

impl fmt::Display for LawResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_failure {
            None if self.checked > 0 => {
                write!(f, "{}: PASS ({} instances)", self.law, self.checked)
            }
            None => write!(f, "{}: FAIL (no instances checked)", self.law),
            Some(why) => write!(
                f,
                "{}: FAIL ({} of {} instances; first: {why})",
                self.law, self.failed, self.checked
            ),
        }
    }
}

fn chain(steps: &[Span]) -> Result<Span, SpanError> {
    let mut acc = steps[0].clone();
    for s in &steps[1..] {
        acc = acc.compose(s)?;
    }
    Ok(acc)
}

fn show<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Both snake composites of `x` are isomorphic to the identity span.
pub fn snake_spans(x: &RGraph) -> Result<(), String> {
    let first = chain(&[
        Span::lower_star(&structural::right_unitor_inv(x)),
        Span::identity(x).tensor(&Span::eta(x)),
        Span::lower_star(&structural::assoc_inv(x, x, x)),
        Span::epsilon(x).tensor(&Span::identity(x)),
        Span::lower_star(&structural::left_unitor(x)),
    ])
    .map_err(show)?;
    let second = chain(&[
        Span::lower_star(&structural::left_unitor_inv(x)),
        Span::eta(x).tensor(&Span::identity(x)),
        Span::lower_star(&structural::assoc(x, x, x)),
        Span::identity(x).tensor(&Span::epsilon(x)),
        Span::lower_star(&structural::right_unitor(x)),
    ])
    .map_err(show)?;
    let id = Span::identity(x);
    for (name, s) in [("first", first), ("second", second)] {
        if iso_spans(&s, &id, ISO_BOUND).map_err(show)?.is_none() {
            return Err(format!("{name} snake on {x:?} is not the identity"));
        }
    }
    Ok(())
}

fn chain_accounts(steps: &[GeneralAccount]) -> Result<GeneralAccount, AccountError> {
    let mut acc = steps[0].clone();
    for s in &steps[1..] {
        acc = acc.compose(s)?;
    }
    Ok(acc)
}

/// Both snake composites of a labelled object are the zero-valued identity.
pub fn snake_accounts(o: &AccountObject) -> Result<(), String> {
    let u = o.carrier();
    let i = AccountObject::unit();
    let od = o.dual();
    let iso = |d: &AccountObject, c: &AccountObject, m: &GraphMorphism| {
        GeneralAccount::from_morphism(d, c, m)
    };
    let first = (|| {
        chain_accounts(&[
            iso(o, &o.tensor(&i), &structural::right_unitor_inv(u))?,
            GeneralAccount::identity(o).tensor(&GeneralAccount::unit(o))?,
            iso(
                &o.tensor(&od.tensor(o)),
                &o.tensor(&od).tensor(o),
                &structural::assoc_inv(u, u, u),
            )?,
            GeneralAccount::counit(o).tensor(&GeneralAccount::identity(o))?,
            iso(&i.tensor(o), o, &structural::left_unitor(u))?,
        ])
    })()
    .map_err(show)?;
    // On the dual side, η_O supplies O*⊗O and ε_O consumes O⊗O*.
    let second = (|| {
        chain_accounts(&[
            iso(&od, &i.tensor(&od), &structural::left_unitor_inv(u))?,
            GeneralAccount::unit(o).tensor(&GeneralAccount::identity(&od))?,
            iso(
                &od.tensor(o).tensor(&od),
                &od.tensor(&o.tensor(&od)),
                &structural::assoc(u, u, u),
            )?,
            GeneralAccount::identity(&od).tensor(&GeneralAccount::counit(o))?,
            iso(&od.tensor(&i), &od, &structural::right_unitor(u))?,
        ])
    })()
    .map_err(show)?;
    for (name, s, id) in [
        ("first", first, GeneralAccount::identity(o)),
        ("second", second, GeneralAccount::identity(&od)),
    ] {
        if iso_accounts(&s, &id, ISO_BOUND).map_err(show)?.is_none() {
            return Err(format!(
                "{name} account snake on [{}] is not the identity",
                o.signature()
            ));
        }
    }
    Ok(())
}

/// Both triangle identities of the adjunction `f_* ⊣ f^*`.
pub fn triangles(f: &GraphMorphism) -> Result<(), String> {
    let lower = Span::lower_star(f);
    let upper = Span::upper_star(f);
    let (unit, counit) = (
        adjunction_unit(f).map_err(show)?,
        adjunction_counit(f).map_err(show)?,
    );
    let id_lower = TwoCell::identity(&lower);
    let id_upper = TwoCell::identity(&upper);
    let run = |cells: Vec<Result<TwoCell, SpanError>>| -> Result<TwoCell, SpanError> {
        let mut it = cells.into_iter();
        let mut acc = it.next().expect("non-empty")?;
        for c in it {
            acc = acc.vertical(&c?)?;
        }
        Ok(acc)
    };
    let first = run(vec![
        coherence::left_unitor_inv(&lower),
        unit.horizontal(&id_lower),
        coherence::associator(&lower, &upper, &lower),
        id_lower.horizontal(&counit),
        coherence::right_unitor(&lower),
    ])
    .map_err(show)?;
    if first != id_lower {
        return Err("f_* triangle is not the identity 2-cell".into());
    }
    let second = run(vec![
        coherence::right_unitor_inv(&upper),
        id_upper.horizontal(&unit),
        coherence::associator_inv(&upper, &lower, &upper),
        counit.horizontal(&id_upper),
        coherence::left_unitor(&upper),
    ])
    .map_err(show)?;
    if second != id_upper {
        return Err("f^* triangle is not the identity 2-cell".into());
    }
    Ok(())
}

/// Round trips of the transpose bijection on a random instance.
///
/// The target span has head `R × K` with legs through `f` and `g`, so that
/// every `(1, h)` with `h : R → K` is a valid head morphism.
pub fn transpose_round_trip(gen: &mut Gen) -> Result<(), String> {
    let (u, v) = (gen.graph(3, 4), gen.graph(3, 4));
    let r = gen.span(&u, &v, 3, 4);
    let (x, y) = (gen.graph(3, 4), gen.graph(3, 4));
    let f = gen.morphism(&u, &x);
    let g = gen.morphism(&v, &y);
    let k = gen.graph(2, 3);
    let rk = r.head().product(&k);
    let first = GraphMorphism::proj_left(r.head(), &k);
    let s = Span::new(
        first
            .then(r.left())
            .and_then(|m| m.then(&f))
            .map_err(show)?,
        first
            .then(r.right())
            .and_then(|m| m.then(&g))
            .map_err(show)?,
    )
    .map_err(show)?;
    let mut phis = Vec::new();
    for _ in 0..2 {
        let h = gen.morphism(r.head(), &k);
        phis.push(GraphMorphism::pairing(&GraphMorphism::identity(r.head()), &h).map_err(show)?);
    }
    debug_assert!(phis.iter().all(|p| p.cod() == &rk));
    for phi in &phis {
        let cell = untranspose(&r, &s, &f, &g, phi).map_err(show)?;
        let back = transpose(&r, &s, &f, &g, &cell).map_err(show)?;
        if &back != phi {
            return Err("transpose(untranspose(φ)) ≠ φ".into());
        }
        let again = untranspose(&r, &s, &f, &g, &back).map_err(show)?;
        if again != cell {
            return Err("untranspose(transpose(θ)) ≠ θ".into());
        }
    }
    if phis[0] != phis[1] {
        let c0 = untranspose(&r, &s, &f, &g, &phis[0]).map_err(show)?;
        let c1 = untranspose(&r, &s, &f, &g, &phis[1]).map_err(show)?;
        if c0 == c1 {
            return Err("distinct morphisms share a 2-cell".into());
        }
    }
    Ok(())
}

/// The measurement 2-cell of an account transposes back to its valuation.
pub fn measurement_round_trip(a: &GeneralAccount) -> Result<(), String> {
    let mc = a.measurement_cell().map_err(show)?;
    let back = mc.transpose_back(a).map_err(show)?;
    if back != mc.phi {
        return Err("measurement 2-cell does not transpose back to the valuation".into());
    }
    Ok(())
}

/// The three behaviour correspondences on a random span.
pub fn behaviours(gen: &mut Gen, max_len: usize) -> Result<usize, String> {
    let (x, y, z) = (gen.graph(3, 3), gen.graph(3, 3), gen.graph(3, 3));
    let r = gen.span(&x, &y, 4, 5);
    let s = gen.span(&y, &z, 4, 5);
    let composite = check_composite_behaviours(&r, &s, max_len).map_err(show)?;
    let tensor = check_tensor_behaviours(&r, &s, max_len);
    let eta = check_eta_behaviours(r.head(), max_len);
    let mut checked = 0;
    for report in [composite, tensor, eta] {
        if let Some(w) = report.witness {
            return Err(format!("{}: {w}", report.law));
        }
        checked += report.checked;
    }
    Ok(checked)
}

/// A 2-cell `R₁ ⇒ R₂` where `R₁` factors its head through that of `R₂`.
fn cell_into(gen: &mut Gen, target: &Span) -> TwoCell {
    let h = gen.graph(3, 3);
    let m = gen.morphism(&h, target.head());
    let src = Span::new(
        m.then(target.left()).expect("composable"),
        m.then(target.right()).expect("composable"),
    )
    .expect("common head");
    TwoCell::new(src, target.clone(), m).expect("commutes by construction")
}

/// `(α • β)·(α′ • β′) = (α·α′) • (β·β′)` on random chains of 2-cells.
pub fn interchange(gen: &mut Gen) -> Result<(), String> {
    let (x, y, z) = (gen.graph(2, 2), gen.graph(2, 2), gen.graph(2, 2));
    let r3 = gen.span(&x, &y, 3, 3);
    let s3 = gen.span(&y, &z, 3, 3);
    let a2 = cell_into(gen, &r3);
    let a1 = cell_into(gen, a2.src());
    let b2 = cell_into(gen, &s3);
    let b1 = cell_into(gen, b2.src());
    let lhs = a1
        .horizontal(&b1)
        .and_then(|l| l.vertical(&a2.horizontal(&b2)?))
        .map_err(show)?;
    let rhs = a1
        .vertical(&a2)
        .and_then(|a| a.horizontal(&b1.vertical(&b2)?))
        .map_err(show)?;
    if lhs != rhs {
        return Err("interchange fails".into());
    }
    Ok(())
}

/// A random closed system together with a short description.
pub fn closed_system(gen: &mut Gen) -> (String, Expression) {
    let u = gen.graph(2, 3);
    let sig = gen.signature(2);
    let o = gen.object(&u, sig, 2);
    let i = AccountObject::unit();
    match gen.rng.gen_range(0..4) {
        0 => {
            let a = gen.account(&i, &o, 5);
            let b = gen.account(&o, &i, 5);
            (
                "A ; B".into(),
                Expression::Atom(a).compose(Expression::Atom(b)),
            )
        }
        1 => {
            let a = gen.account(&i, &o, 5);
            let b = gen.account(&o, &i, 5);
            let e = Expression::Atom(a)
                .compose(Expression::Identity(o.clone()))
                .compose(Expression::Atom(b));
            ("A ; id ; B".into(), e)
        }
        2 => {
            let swap = GeneralAccount::from_morphism(
                &o.dual().tensor(&o),
                &o.tensor(&o.dual()),
                &structural::swap(&u, &u),
            )
            .expect("swap preserves flows");
            let e = Expression::Unit(o.clone())
                .compose(Expression::Atom(swap))
                .compose(Expression::Counit(o.clone()));
            ("eta ; swap ; eps".into(), e)
        }
        _ => {
            let a = gen.account(&i, &o, 4);
            let b = gen.account(&o, &i, 4);
            let c = gen.account(&i, &i, 3);
            let e = Expression::Atom(a)
                .compose(Expression::Atom(b))
                .tensor(Expression::Atom(c));
            ("(A ; B) (x) C".into(), e)
        }
    }
}

/// Value is constant along every path of length at most `max_len`.
pub fn conservation(e: &Expression, max_len: usize) -> Result<usize, String> {
    let a = e.eval().map_err(show)?;
    let mut checked = 0;
    for p in enumerate_paths(a.head(), max_len) {
        total_value(&a, &p).map_err(show)?;
        checked += 1;
    }
    Ok(checked)
}

/// Instance counts for [`check_laws`].
#[derive(Clone, Copy, Debug)]
pub struct LawCounts {
    pub snake: usize,
    pub transpose: usize,
    pub behaviours: usize,
    pub triangles: usize,
    pub closed: usize,
    pub interchange: usize,
}

impl Default for LawCounts {
    fn default() -> Self {
        LawCounts {
            snake: 50,
            transpose: 100,
            behaviours: 50,
            triangles: 50,
            closed: 100,
            interchange: 50,
        }
    }
}

/// Runs every law with a fixed seed. Path-based laws use `max_len`.
pub fn check_laws(seed: u64, max_len: usize, counts: LawCounts) -> Vec<LawResult> {
    let mut gen = Gen::new(seed);
    let mut results = Vec::new();

    let mut r = LawResult::new("snake_spans");
    for _ in 0..counts.snake {
        let g = gen.graph(4, 6);
        r.record(snake_spans(&g));
    }
    results.push(r);

    let mut r = LawResult::new("snake_accounts");
    for _ in 0..counts.snake {
        let g = gen.graph(3, 4);
        let sig = gen.signature(2);
        let o = gen.object(&g, sig, 3);
        r.record(snake_accounts(&o));
    }
    results.push(r);

    let mut r = LawResult::new("transpose");
    for _ in 0..counts.transpose {
        r.record(transpose_round_trip(&mut gen));
    }
    results.push(r);

    let mut r = LawResult::new("measurement_transpose");
    for _ in 0..counts.transpose {
        let (u, v) = (gen.graph(2, 2), gen.graph(2, 2));
        let (su, sv) = (gen.signature(2), gen.signature(2));
        let (du, dv) = (gen.object(&u, su, 2), gen.object(&v, sv, 2));
        let a = gen.account(&du, &dv, 5);
        r.record(measurement_round_trip(&a));
    }
    results.push(r);

    let mut r = LawResult::new("triangles");
    let mut instances = 0;
    while instances < counts.triangles {
        let (x, y) = (gen.graph(3, 3), gen.graph(3, 3));
        instances += 1;
        let all = all_morphisms(&x, &y, 256);
        let outcome = all.iter().try_for_each(triangles);
        r.record(outcome);
    }
    results.push(r);

    let mut r = LawResult::new(format!("behaviours(max_len={max_len})"));
    for _ in 0..counts.behaviours {
        r.record(behaviours(&mut gen, max_len).map(|_| ()));
    }
    results.push(r);

    let mut r = LawResult::new("interchange");
    for _ in 0..counts.interchange {
        r.record(interchange(&mut gen));
    }
    results.push(r);

    let mut r = LawResult::new(format!("conservation(max_len={max_len})"));
    for _ in 0..counts.closed {
        let (name, e) = closed_system(&mut gen);
        r.record(
            conservation(&e, max_len)
                .map(|_| ())
                .map_err(|why| format!("{name}: {why}")),
        );
    }
    results.push(r);

    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_accounts_validate() {
        let mut gen = Gen::new(3);
        for _ in 0..20 {
            let u = gen.graph(3, 3);
            let sig = gen.signature(2);
            let o = gen.object(&u, sig, 2);
            let a = gen.account(&AccountObject::unit(), &o, 5);
            assert!(a.head().vertex_count() <= 5);
            a.check_measurement().unwrap();
        }
    }

    #[test]
    fn morphism_count_arrow_into_loop() {
        let arrow =
            RGraph::new(["a", "b"], [(Id::from("e"), Id::from("a"), Id::from("b"))]).unwrap();
        let lp = RGraph::new(["v"], [(Id::from("l"), Id::from("v"), Id::from("v"))]).unwrap();
        // e may go to the loop or to the null loop.
        assert_eq!(all_morphisms(&arrow, &lp, 100).len(), 2);
        // The arrow into itself: identity, and the two constant maps.
        assert_eq!(all_morphisms(&arrow, &arrow, 100).len(), 3);
    }

    #[test]
    fn small_law_run_passes() {
        let counts = LawCounts {
            snake: 3,
            transpose: 3,
            behaviours: 3,
            triangles: 3,
            closed: 5,
            interchange: 3,
        };
        for r in check_laws(7, 3, counts) {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn same_seed_same_report() {
        let counts = LawCounts {
            snake: 2,
            transpose: 2,
            behaviours: 2,
            triangles: 2,
            closed: 3,
            interchange: 2,
        };
        let a: Vec<String> = check_laws(11, 2, counts)
            .iter()
            .map(ToString::to_string)
            .collect();
        let b: Vec<String> = check_laws(11, 2, counts)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(a, b);
    }
}
