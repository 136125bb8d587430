//! Spans of reflexive graphs and the 2-cells between them.
//!
//! Composition is the pullback over the shared boundary; tensor is the
//! product of heads and legs. Boundary agreement for composition is nominal
//! (structural graph equality), never up to isomorphism. Laws that only hold
//! up to coherent isomorphism are checked with [`iso_spans`].

use std::collections::HashMap;

use thiserror::Error;

use crate::rgraph::{GraphError, GraphMorphism, Id, RGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpanError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("legs of a span must share the head as domain")]
    LegsDisagree,
    #[error("boundary mismatch: codomain of the first span differs from the domain of the second")]
    BoundaryMismatch,
    #[error("not a 2-cell: {0}")]
    NotATwoCell(&'static str),
    #[error("2-cells do not compose: {0}")]
    TwoCellMismatch(&'static str),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("boundary condition violated: {0}")]
    BoundaryCondition(&'static str),
    #[error("isomorphism search bound exceeded: heads have {found} vertices, bound is {bound}")]
    SearchBoundExceeded { found: usize, bound: usize },
}

/// Default vertex bound for [`iso_spans`].
pub const DEFAULT_ISO_BOUND: usize = 16;

/// A span `X ← R → Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    left: GraphMorphism,
    right: GraphMorphism,
}

impl Span {
    pub fn new(left: GraphMorphism, right: GraphMorphism) -> Result<Self, SpanError> {
        if left.dom() != right.dom() {
            return Err(SpanError::LegsDisagree);
        }
        Ok(Span { left, right })
    }

    pub fn head(&self) -> &RGraph {
        self.left.dom()
    }

    pub fn left(&self) -> &GraphMorphism {
        &self.left
    }

    pub fn right(&self) -> &GraphMorphism {
        &self.right
    }

    pub fn dom(&self) -> &RGraph {
        self.left.cod()
    }

    pub fn cod(&self) -> &RGraph {
        self.right.cod()
    }

    pub fn identity(x: &RGraph) -> Self {
        let id = GraphMorphism::identity(x);
        Span {
            left: id.clone(),
            right: id,
        }
    }

    /// `η_X : I → X⁻¹ × X` with head `X`.
    pub fn eta(x: &RGraph) -> Self {
        Span {
            left: GraphMorphism::bang(x),
            right: GraphMorphism::diagonal(x),
        }
    }

    /// `ε_X : X × X⁻¹ → I` with head `X`.
    pub fn epsilon(x: &RGraph) -> Self {
        Span {
            left: GraphMorphism::diagonal(x),
            right: GraphMorphism::bang(x),
        }
    }

    /// `f_* = (1, f)`.
    pub fn lower_star(f: &GraphMorphism) -> Self {
        Span {
            left: GraphMorphism::identity(f.dom()),
            right: f.clone(),
        }
    }

    /// `f^* = (f, 1)`, the span running against `f`.
    pub fn upper_star(f: &GraphMorphism) -> Self {
        Span {
            left: f.clone(),
            right: GraphMorphism::identity(f.dom()),
        }
    }

    pub fn compose(&self, next: &Span) -> Result<Span, SpanError> {
        Ok(pullback(self, next)?.span)
    }

    pub fn tensor(&self, other: &Span) -> Span {
        Span {
            left: GraphMorphism::product(&self.left, &other.left),
            right: GraphMorphism::product(&self.right, &other.right),
        }
    }
}

pub fn identity_span(x: &RGraph) -> Span {
    Span::identity(x)
}

pub fn eta(x: &RGraph) -> Span {
    Span::eta(x)
}

pub fn epsilon(x: &RGraph) -> Span {
    Span::epsilon(x)
}

pub fn lower_star(f: &GraphMorphism) -> Span {
    Span::lower_star(f)
}

pub fn upper_star(f: &GraphMorphism) -> Span {
    Span::upper_star(f)
}

pub fn compose_spans(r: &Span, s: &Span) -> Result<Span, SpanError> {
    r.compose(s)
}

pub fn tensor_spans(r: &Span, s: &Span) -> Span {
    r.tensor(s)
}

/// The composite span together with its projections onto both heads.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub span: Span,
    pub to_first: GraphMorphism,
    pub to_second: GraphMorphism,
}

/// Composes `r : X → Y` with `s : Y → Z` by pullback over `Y`.
///
/// Head vertices are the pairs `(u, v)` with `∂₁u = ∂₀v`, head edges the
/// pairs `(ρ, σ)` with `∂₁ρ = ∂₀σ`, both in lexicographic id order.
pub fn pullback(r: &Span, s: &Span) -> Result<Pullback, SpanError> {
    if r.cod() != s.dom() {
        return Err(SpanError::BoundaryMismatch);
    }
    let y = r.cod();
    let (rh, sh) = (r.head(), s.head());

    // s-side vertices and edges bucketed by their image in Y; bucket order
    // follows s's id order, so emitted pairs stay sorted.
    let mut vbucket: Vec<Vec<usize>> = vec![Vec::new(); y.vertex_count()];
    let mut vpos = vec![0; sh.vertex_count()];
    for j in 0..sh.vertex_count() {
        let b = &mut vbucket[s.left.vertex_image(j)];
        vpos[j] = b.len();
        b.push(j);
    }
    let mut ebucket: Vec<Vec<usize>> = vec![Vec::new(); y.edge_count()];
    for j in 0..sh.edge_count() {
        ebucket[s.left.edge_image(j)].push(j);
    }

    let mut vertices = Vec::new();
    let (mut pv_r, mut pv_s) = (Vec::new(), Vec::new());
    let mut voff = vec![0; rh.vertex_count()];
    for i in 0..rh.vertex_count() {
        voff[i] = vertices.len();
        for &j in &vbucket[r.right.vertex_image(i)] {
            vertices.push(Id::pair(rh.vertex(i).clone(), sh.vertex(j).clone()));
            pv_r.push(i);
            pv_s.push(j);
        }
    }

    let mut edges = Vec::new();
    let (mut pe_r, mut pe_s) = (Vec::new(), Vec::new());
    for (i, rho) in rh.edges().iter().enumerate() {
        for &j in &ebucket[r.right.edge_image(i)] {
            let sigma = sh.edge(j);
            edges.push(crate::rgraph::Edge {
                id: Id::pair(rho.id.clone(), sigma.id.clone()),
                source: voff[rho.source] + vpos[sigma.source],
                target: voff[rho.target] + vpos[sigma.target],
                is_null: rho.is_null && sigma.is_null,
            });
            pe_r.push(i);
            pe_s.push(j);
        }
    }

    let head = RGraph::from_sorted(vertices, edges);
    let to_first = GraphMorphism::from_indices(head.clone(), rh.clone(), pv_r, pe_r)?;
    let to_second = GraphMorphism::from_indices(head, sh.clone(), pv_s, pe_s)?;
    let span = Span::new(to_first.then(&r.left)?, to_second.then(&s.right)?)?;
    Ok(Pullback {
        span,
        to_first,
        to_second,
    })
}

/// A morphism of heads commuting with both legs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCell {
    src: Span,
    tgt: Span,
    map: GraphMorphism,
}

impl TwoCell {
    pub fn new(src: Span, tgt: Span, map: GraphMorphism) -> Result<Self, SpanError> {
        if src.dom() != tgt.dom() || src.cod() != tgt.cod() {
            return Err(SpanError::NotATwoCell(
                "source and target have different boundaries",
            ));
        }
        if map.dom() != src.head() || map.cod() != tgt.head() {
            return Err(SpanError::NotATwoCell("map does not run between the heads"));
        }
        if map.then(tgt.left())? != *src.left() {
            return Err(SpanError::NotATwoCell("left legs do not commute"));
        }
        if map.then(tgt.right())? != *src.right() {
            return Err(SpanError::NotATwoCell("right legs do not commute"));
        }
        Ok(TwoCell { src, tgt, map })
    }

    pub fn identity(r: &Span) -> Self {
        TwoCell {
            src: r.clone(),
            tgt: r.clone(),
            map: GraphMorphism::identity(r.head()),
        }
    }

    pub fn src(&self) -> &Span {
        &self.src
    }

    pub fn tgt(&self) -> &Span {
        &self.tgt
    }

    pub fn map(&self) -> &GraphMorphism {
        &self.map
    }

    /// `self · next`: first `self`, then `next`.
    pub fn vertical(&self, next: &TwoCell) -> Result<TwoCell, SpanError> {
        if self.tgt != next.src {
            return Err(SpanError::TwoCellMismatch(
                "target of the first is not the source of the second",
            ));
        }
        TwoCell::new(
            self.src.clone(),
            next.tgt.clone(),
            self.map.then(&next.map)?,
        )
    }

    /// `self • next` for `self : R ⇒ S` over `X → Y` and `next : T ⇒ U` over `Y → Z`.
    pub fn horizontal(&self, next: &TwoCell) -> Result<TwoCell, SpanError> {
        if self.src.cod() != next.src.dom() {
            return Err(SpanError::TwoCellMismatch("boundaries do not meet"));
        }
        let src = pullback(&self.src, &next.src)?;
        let tgt = pullback(&self.tgt, &next.tgt)?;
        let (sh, th) = (src.span.head(), tgt.span.head());
        let (a, b) = (self.tgt.head(), next.tgt.head());
        let vmap = (0..sh.vertex_count())
            .map(|k| {
                let i = self.map.vertex_image(src.to_first.vertex_image(k));
                let j = next.map.vertex_image(src.to_second.vertex_image(k));
                let id = Id::pair(a.vertex(i).clone(), b.vertex(j).clone());
                th.vertex_index(&id).ok_or(GraphError::UnknownVertex(id))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let emap = (0..sh.edge_count())
            .map(|k| {
                let i = self.map.edge_image(src.to_first.edge_image(k));
                let j = next.map.edge_image(src.to_second.edge_image(k));
                let id = Id::pair(a.edge(i).id.clone(), b.edge(j).id.clone());
                th.edge_index(&id).ok_or(GraphError::UnknownEdge(id))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let map = GraphMorphism::from_indices(sh.clone(), th.clone(), vmap, emap)?;
        TwoCell::new(src.span, tgt.span, map)
    }
}

pub fn vertical_compose(phi: &TwoCell, psi: &TwoCell) -> Result<TwoCell, SpanError> {
    phi.vertical(psi)
}

pub fn horizontal_compose(phi: &TwoCell, psi: &TwoCell) -> Result<TwoCell, SpanError> {
    phi.horizontal(psi)
}

fn pair_of(id: &Id) -> Option<(Id, Id)> {
    id.as_pair().map(|(a, b)| (a.clone(), b.clone()))
}

/// `1_X ⇒ f_* • f^*`, sending `a` to `(a, a)`.
pub fn adjunction_unit(f: &GraphMorphism) -> Result<TwoCell, SpanError> {
    let src = Span::identity(f.dom());
    let tgt = Span::lower_star(f).compose(&Span::upper_star(f))?;
    let diag = |id: &Id| Some(Id::pair(id.clone(), id.clone()));
    let map = GraphMorphism::from_id_fns(src.head(), tgt.head(), diag, diag)?;
    TwoCell::new(src, tgt, map)
}

/// `f^* • f_* ⇒ 1_Y`, sending `(a, a)` to `f(a)`.
pub fn adjunction_counit(f: &GraphMorphism) -> Result<TwoCell, SpanError> {
    let pb = pullback(&Span::upper_star(f), &Span::lower_star(f))?;
    let map = pb.to_first.then(f)?;
    TwoCell::new(pb.span, Span::identity(f.cod()), map)
}

/// Canonical coherence 2-cells of span composition.
pub mod coherence {
    use super::*;

    /// `1_X • R ⇒ R`.
    pub fn left_unitor(r: &Span) -> Result<TwoCell, SpanError> {
        let pb = pullback(&Span::identity(r.dom()), r)?;
        TwoCell::new(pb.span, r.clone(), pb.to_second)
    }

    /// `R ⇒ 1_X • R`.
    pub fn left_unitor_inv(r: &Span) -> Result<TwoCell, SpanError> {
        let tgt = Span::identity(r.dom()).compose(r)?;
        let h = r.head();
        let x = r.dom();
        let fv = |id: &Id| {
            let i = h.vertex_index(id)?;
            Some(Id::pair(
                x.vertex(r.left().vertex_image(i)).clone(),
                id.clone(),
            ))
        };
        let fe = |id: &Id| {
            let i = h.edge_index(id)?;
            Some(Id::pair(
                x.edge(r.left().edge_image(i)).id.clone(),
                id.clone(),
            ))
        };
        let map = GraphMorphism::from_id_fns(h, tgt.head(), fv, fe)?;
        TwoCell::new(r.clone(), tgt, map)
    }

    /// `R • 1_Y ⇒ R`.
    pub fn right_unitor(r: &Span) -> Result<TwoCell, SpanError> {
        let pb = pullback(r, &Span::identity(r.cod()))?;
        TwoCell::new(pb.span, r.clone(), pb.to_first)
    }

    /// `R ⇒ R • 1_Y`.
    pub fn right_unitor_inv(r: &Span) -> Result<TwoCell, SpanError> {
        let tgt = r.compose(&Span::identity(r.cod()))?;
        let h = r.head();
        let y = r.cod();
        let fv = |id: &Id| {
            let i = h.vertex_index(id)?;
            Some(Id::pair(
                id.clone(),
                y.vertex(r.right().vertex_image(i)).clone(),
            ))
        };
        let fe = |id: &Id| {
            let i = h.edge_index(id)?;
            Some(Id::pair(
                id.clone(),
                y.edge(r.right().edge_image(i)).id.clone(),
            ))
        };
        let map = GraphMorphism::from_id_fns(h, tgt.head(), fv, fe)?;
        TwoCell::new(r.clone(), tgt, map)
    }

    /// `(R • S) • T ⇒ R • (S • T)`.
    pub fn associator(r: &Span, s: &Span, t: &Span) -> Result<TwoCell, SpanError> {
        let src = r.compose(s)?.compose(t)?;
        let tgt = r.compose(&s.compose(t)?)?;
        let f = |id: &Id| {
            let (ab, c) = pair_of(id)?;
            let (a, b) = pair_of(&ab)?;
            Some(Id::pair(a, Id::pair(b, c)))
        };
        let map = GraphMorphism::from_id_fns(src.head(), tgt.head(), f, f)?;
        TwoCell::new(src, tgt, map)
    }

    /// `R • (S • T) ⇒ (R • S) • T`.
    pub fn associator_inv(r: &Span, s: &Span, t: &Span) -> Result<TwoCell, SpanError> {
        let src = r.compose(&s.compose(t)?)?;
        let tgt = r.compose(s)?.compose(t)?;
        let f = |id: &Id| {
            let (a, bc) = pair_of(id)?;
            let (b, c) = pair_of(&bc)?;
            Some(Id::pair(Id::pair(a, b), c))
        };
        let map = GraphMorphism::from_id_fns(src.head(), tgt.head(), f, f)?;
        TwoCell::new(src, tgt, map)
    }
}

fn check_transpose_shape(
    r: &Span,
    s: &Span,
    f: &GraphMorphism,
    g: &GraphMorphism,
) -> Result<(), SpanError> {
    if f.dom() != r.dom() || g.dom() != r.cod() {
        return Err(SpanError::ShapeMismatch(
            "f and g must start at the boundaries of R",
        ));
    }
    if f.cod() != s.dom() || g.cod() != s.cod() {
        return Err(SpanError::ShapeMismatch(
            "f and g must end at the boundaries of S",
        ));
    }
    Ok(())
}

/// Reads a 2-cell `R • g_* ⇒ f_* • S` as a head morphism `R → S` with
/// `∂₀φ = f∂₀` and `∂₁φ = g∂₁`.
pub fn transpose(
    r: &Span,
    s: &Span,
    f: &GraphMorphism,
    g: &GraphMorphism,
    cell: &TwoCell,
) -> Result<GraphMorphism, SpanError> {
    check_transpose_shape(r, s, f, g)?;
    let src = r.compose(&Span::lower_star(g))?;
    let tgt = Span::lower_star(f).compose(s)?;
    if cell.src() != &src || cell.tgt() != &tgt {
        return Err(SpanError::ShapeMismatch(
            "2-cell must run from R • g_* to f_* • S",
        ));
    }
    let (rh, v) = (r.head(), r.cod());
    let (sh, th) = (src.head(), tgt.head());
    let second = |id: &Id| -> Result<Id, GraphError> {
        pair_of(id)
            .map(|(_, b)| b)
            .ok_or_else(|| GraphError::MalformedId(id.clone()))
    };
    let vmap = (0..rh.vertex_count())
        .map(|i| {
            let id = Id::pair(
                rh.vertex(i).clone(),
                v.vertex(r.right().vertex_image(i)).clone(),
            );
            let k = sh.vertex_index(&id).ok_or(GraphError::UnknownVertex(id))?;
            let image = second(th.vertex(cell.map().vertex_image(k)))?;
            s.head()
                .vertex_index(&image)
                .ok_or(GraphError::UnknownVertex(image))
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    let emap = (0..rh.edge_count())
        .map(|i| {
            let id = Id::pair(
                rh.edge(i).id.clone(),
                v.edge(r.right().edge_image(i)).id.clone(),
            );
            let k = sh.edge_index(&id).ok_or(GraphError::UnknownEdge(id))?;
            let image = second(&th.edge(cell.map().edge_image(k)).id)?;
            s.head()
                .edge_index(&image)
                .ok_or(GraphError::UnknownEdge(image))
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    let phi = GraphMorphism::from_indices(rh.clone(), s.head().clone(), vmap, emap)?;
    check_boundary_conditions(r, s, f, g, &phi)?;
    Ok(phi)
}

fn check_boundary_conditions(
    r: &Span,
    s: &Span,
    f: &GraphMorphism,
    g: &GraphMorphism,
    phi: &GraphMorphism,
) -> Result<(), SpanError> {
    if phi.dom() != r.head() || phi.cod() != s.head() {
        return Err(SpanError::ShapeMismatch(
            "morphism must run from the head of R to the head of S",
        ));
    }
    if phi.then(s.left())? != r.left().then(f)? {
        return Err(SpanError::BoundaryCondition("∂₀φ ≠ f∂₀"));
    }
    if phi.then(s.right())? != r.right().then(g)? {
        return Err(SpanError::BoundaryCondition("∂₁φ ≠ g∂₁"));
    }
    Ok(())
}

/// Inverse of [`transpose`].
pub fn untranspose(
    r: &Span,
    s: &Span,
    f: &GraphMorphism,
    g: &GraphMorphism,
    phi: &GraphMorphism,
) -> Result<TwoCell, SpanError> {
    check_transpose_shape(r, s, f, g)?;
    check_boundary_conditions(r, s, f, g, phi)?;
    let src = r.compose(&Span::lower_star(g))?;
    let tgt = Span::lower_star(f).compose(s)?;
    let (rh, sh, u) = (r.head(), s.head(), r.dom());
    let fv = |id: &Id| {
        let (a, _) = pair_of(id)?;
        let i = rh.vertex_index(&a)?;
        Some(Id::pair(
            u.vertex(r.left().vertex_image(i)).clone(),
            sh.vertex(phi.vertex_image(i)).clone(),
        ))
    };
    let fe = |id: &Id| {
        let (a, _) = pair_of(id)?;
        let i = rh.edge_index(&a)?;
        Some(Id::pair(
            u.edge(r.left().edge_image(i)).id.clone(),
            sh.edge(phi.edge_image(i)).id.clone(),
        ))
    };
    let map = GraphMorphism::from_id_fns(src.head(), tgt.head(), fv, fe)?;
    TwoCell::new(src, tgt, map)
}

/// Searches for an invertible 2-cell `r ⇒ s` by backtracking over head
/// vertex bijections. Returns `Ok(None)` when the spans are not isomorphic.
pub fn iso_spans(r: &Span, s: &Span, max_vertices: usize) -> Result<Option<TwoCell>, SpanError> {
    iso_spans_with(r, s, max_vertices, |_, _| true)
}

/// As [`iso_spans`], restricted to vertex pairings accepted by `compatible`.
pub fn iso_spans_with(
    r: &Span,
    s: &Span,
    max_vertices: usize,
    compatible: impl Fn(usize, usize) -> bool,
) -> Result<Option<TwoCell>, SpanError> {
    if r.dom() != s.dom() || r.cod() != s.cod() {
        return Ok(None);
    }
    let n = r.head().vertex_count();
    if n > max_vertices || s.head().vertex_count() > max_vertices {
        return Err(SpanError::SearchBoundExceeded {
            found: n.max(s.head().vertex_count()),
            bound: max_vertices,
        });
    }
    if n != s.head().vertex_count() || r.head().edge_count() != s.head().edge_count() {
        return Ok(None);
    }
    let a = IsoSide::new(r);
    let b = IsoSide::new(s);
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&w| a.vkey[v] == b.vkey[w] && compatible(v, w))
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| candidates[v].len());

    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if !search(0, &order, &candidates, &a, &b, &mut assign, &mut used) {
        return Ok(None);
    }

    // Vertex bijection fixed: match edges between each ordered vertex pair
    // by their leg images.
    let mut emap = vec![usize::MAX; r.head().edge_count()];
    for v in 0..n {
        emap[r.head().null_loop(v)] = s.head().null_loop(assign[v]);
    }
    for ((u, v), list) in &a.between {
        let other = &b.between[&(assign[*u], assign[*v])];
        for (x, y) in list.iter().zip(other) {
            emap[x.1] = y.1;
        }
    }
    let map = GraphMorphism::from_indices(r.head().clone(), s.head().clone(), assign, emap)?;
    Ok(Some(TwoCell::new(r.clone(), s.clone(), map)?))
}

type EdgeKey = ((usize, usize), usize);

struct IsoSide {
    vkey: Vec<(usize, usize, usize, usize)>,
    between: HashMap<(usize, usize), Vec<EdgeKey>>,
}

impl IsoSide {
    fn new(r: &Span) -> Self {
        let h = r.head();
        let mut outdeg = vec![0; h.vertex_count()];
        let mut indeg = vec![0; h.vertex_count()];
        let mut between: HashMap<(usize, usize), Vec<EdgeKey>> = HashMap::new();
        for (i, e) in h.edges().iter().enumerate() {
            if e.is_null {
                continue;
            }
            outdeg[e.source] += 1;
            indeg[e.target] += 1;
            let key = (r.left().edge_image(i), r.right().edge_image(i));
            between
                .entry((e.source, e.target))
                .or_default()
                .push((key, i));
        }
        for list in between.values_mut() {
            list.sort();
        }
        let vkey = (0..h.vertex_count())
            .map(|v| {
                (
                    r.left().vertex_image(v),
                    r.right().vertex_image(v),
                    outdeg[v],
                    indeg[v],
                )
            })
            .collect();
        IsoSide { vkey, between }
    }

    fn keys(&self, u: usize, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.between
            .get(&(u, v))
            .into_iter()
            .flatten()
            .map(|(k, _)| *k)
    }
}

fn search(
    depth: usize,
    order: &[usize],
    candidates: &[Vec<usize>],
    a: &IsoSide,
    b: &IsoSide,
    assign: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    for &w in &candidates[v] {
        if used[w] {
            continue;
        }
        assign[v] = w;
        let consistent = order[..=depth].iter().all(|&u| {
            let x = assign[u];
            a.keys(u, v).eq(b.keys(x, w)) && a.keys(v, u).eq(b.keys(w, x))
        });
        if consistent {
            used[w] = true;
            if search(depth + 1, order, candidates, a, b, assign, used) {
                return true;
            }
            used[w] = false;
        }
        assign[v] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rgraph::structural;

    fn e(id: &str, s: &str, t: &str) -> (Id, Id, Id) {
        (id.into(), s.into(), t.into())
    }

    fn loop_graph() -> RGraph {
        RGraph::new(["y"], [e("l", "y", "y")]).unwrap()
    }

    fn arrow() -> RGraph {
        RGraph::new(["a", "b"], [e("f", "a", "b")]).unwrap()
    }

    /// Head with two parallel edges `p, q : h0 → h0`, both over `l`.
    fn two_parallel_over_loop(to_right: bool) -> Span {
        let y = loop_graph();
        let head = RGraph::new(["h0"], [e("p", "h0", "h0"), e("q", "h0", "h0")]).unwrap();
        let over = GraphMorphism::new(
            &head,
            &y,
            [("h0".into(), "y".into())],
            [("p".into(), "l".into()), ("q".into(), "l".into())],
        )
        .unwrap();
        if to_right {
            Span::new(GraphMorphism::bang(&head), over).unwrap()
        } else {
            Span::new(over, GraphMorphism::bang(&head)).unwrap()
        }
    }

    #[test]
    fn identity_composite_is_iso_to_r() {
        let r = two_parallel_over_loop(true);
        let c = Span::identity(r.dom()).compose(&r).unwrap();
        assert!(iso_spans(&c, &r, DEFAULT_ISO_BOUND).unwrap().is_some());
        let ii = Span::identity(&arrow())
            .compose(&Span::identity(&arrow()))
            .unwrap();
        assert!(iso_spans(&ii, &Span::identity(&arrow()), 16)
            .unwrap()
            .is_some());
    }

    #[test]
    fn parallel_edges_synchronize_pairwise() {
        let r = two_parallel_over_loop(true);
        let s = two_parallel_over_loop(false);
        let c = r.compose(&s).unwrap();
        // {p,q,null} × {p,q,null} filtered by agreement over l / null:
        // 4 pairs over l, 1 null pair.
        assert_eq!(c.head().vertex_count(), 1);
        assert_eq!(c.head().edge_count(), 5);
        assert_eq!(c.head().non_null_edge_count(), 4);
    }

    #[test]
    fn boundary_mismatch_is_rejected() {
        let r = two_parallel_over_loop(true);
        assert_eq!(r.compose(&r).unwrap_err(), SpanError::BoundaryMismatch);
    }

    #[test]
    fn tensor_counts_multiply() {
        let r = two_parallel_over_loop(true);
        let t = r.tensor(&r);
        assert_eq!(t.head().edge_count(), 9);
        assert_eq!(t.head().non_null_edge_count(), 8);
        let unit = r.tensor(&Span::identity(&RGraph::terminal()));
        assert_eq!(unit.head().edge_count(), r.head().edge_count());
    }

    #[test]
    fn eta_has_head_x_and_trivial_on_terminal() {
        let x = arrow();
        assert_eq!(Span::eta(&x).head(), &x);
        let i = RGraph::terminal();
        let eta_i = Span::eta(&i);
        // I × I is terminal-like but not nominally I.
        assert!(eta_i.cod().is_terminal_like());
        let fix = Span::lower_star(&GraphMorphism::terminal_iso(eta_i.cod(), &i).unwrap());
        let c = eta_i.compose(&fix).unwrap();
        assert!(iso_spans(&c, &Span::identity(&i), 4).unwrap().is_some());
    }

    #[test]
    fn snake_identity_on_an_arrow() {
        let x = arrow();
        let steps = [
            Span::lower_star(&structural::right_unitor_inv(&x)),
            Span::identity(&x).tensor(&Span::eta(&x)),
            Span::lower_star(&structural::assoc_inv(&x, &x, &x)),
            Span::epsilon(&x).tensor(&Span::identity(&x)),
            Span::lower_star(&structural::left_unitor(&x)),
        ];
        let mut acc = steps[0].clone();
        for s in &steps[1..] {
            acc = acc.compose(s).unwrap();
        }
        assert_eq!(acc.dom(), &x);
        assert!(iso_spans(&acc, &Span::identity(&x), 16).unwrap().is_some());
    }

    #[test]
    fn two_cell_rejects_broken_leg() {
        let x = arrow();
        let r = Span::identity(&x);
        // Swap a and b: not a graph morphism at all for an arrow, so use a
        // loop graph with two loops instead.
        let g = RGraph::new(["v"], [e("m", "v", "v"), e("n", "v", "v")]).unwrap();
        let swap = GraphMorphism::new(
            &g,
            &g,
            [("v".into(), "v".into())],
            [("m".into(), "n".into()), ("n".into(), "m".into())],
        )
        .unwrap();
        let id = Span::identity(&g);
        assert!(matches!(
            TwoCell::new(id.clone(), id.clone(), swap),
            Err(SpanError::NotATwoCell(_))
        ));
        assert!(TwoCell::new(r.clone(), r.clone(), GraphMorphism::identity(&x)).is_ok());
    }

    #[test]
    fn vertical_identity_is_neutral() {
        let f = GraphMorphism::bang(&arrow());
        let unit = adjunction_unit(&f).unwrap();
        let id = TwoCell::identity(unit.tgt());
        assert_eq!(unit.vertical(&id).unwrap(), unit);
        assert_eq!(TwoCell::identity(unit.src()).vertical(&unit).unwrap(), unit);
    }

    #[test]
    fn horizontal_of_identities_is_identity() {
        let r = two_parallel_over_loop(true);
        let s = two_parallel_over_loop(false);
        let h = TwoCell::identity(&r)
            .horizontal(&TwoCell::identity(&s))
            .unwrap();
        assert_eq!(h, TwoCell::identity(&r.compose(&s).unwrap()));
    }

    #[test]
    fn lower_star_of_identity_is_identity_span() {
        let x = arrow();
        assert_eq!(
            Span::lower_star(&GraphMorphism::identity(&x)),
            Span::identity(&x)
        );
    }

    #[test]
    fn unit_of_identity_is_canonical_iso() {
        let x = arrow();
        let unit = adjunction_unit(&GraphMorphism::identity(&x)).unwrap();
        assert!(unit.map().is_iso());
    }

    #[test]
    fn counit_of_bang_lands_in_terminal() {
        let x = arrow();
        let counit = adjunction_counit(&GraphMorphism::bang(&x)).unwrap();
        assert!(counit.tgt().head().is_terminal_like());
    }

    #[test]
    fn transpose_of_identity_cell_on_lower_star_is_f() {
        // R = 1_U, S = 1_X, g = f: the identity 2-cell on f_* transposes to f.
        let u = arrow();
        let x = loop_graph();
        let f = GraphMorphism::new(
            &u,
            &x,
            [("a".into(), "y".into()), ("b".into(), "y".into())],
            [("f".into(), "l".into())],
        )
        .unwrap();
        let r = Span::identity(&u);
        let s = Span::identity(&x);
        let phi = untranspose(&r, &s, &f, &f, &f).unwrap();
        assert_eq!(transpose(&r, &s, &f, &f, &phi).unwrap(), f);
    }

    #[test]
    fn untranspose_checks_boundary_conditions() {
        let u = arrow();
        let r = Span::identity(&u);
        let id = GraphMorphism::identity(&u);
        let b = GraphMorphism::bang(&u);
        let s = Span::identity(&RGraph::terminal());
        let err = untranspose(&r, &Span::identity(&u), &id, &id, &b);
        assert!(matches!(err, Err(SpanError::ShapeMismatch(_))));
        assert!(untranspose(&r, &s, &b, &b, &b).is_ok());
    }
}
