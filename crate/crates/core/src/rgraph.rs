//! Finite reflexive graphs and their morphisms.
//!
//! Every vertex carries exactly one distinguished null loop (an idle step).
//! Vertices and edges are kept sorted by [`Id`], so every construction in
//! this crate (products, pullbacks) emits ids deterministically and lookups
//! are binary searches.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Opaque, totally ordered identifier for vertices and edges.
///
/// Products and pullbacks pair ids; null loops are named after their vertex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Id {
    Name(Arc<str>),
    Null(Arc<Id>),
    Pair(Arc<Id>, Arc<Id>),
}

impl Id {
    pub fn name(s: impl AsRef<str>) -> Self {
        Id::Name(Arc::from(s.as_ref()))
    }

    pub fn pair(a: Id, b: Id) -> Self {
        Id::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn null_of(v: Id) -> Self {
        Id::Null(Arc::new(v))
    }

    pub fn as_pair(&self) -> Option<(&Id, &Id)> {
        match self {
            Id::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl From<&str> for Id {
    fn from(s: &str) -> Self {
        Id::name(s)
    }
}

impl From<String> for Id {
    fn from(s: String) -> Self {
        Id::name(s)
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Id::Name(s) => f.write_str(s),
            Id::Null(v) => write!(f, "~{v}"),
            Id::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: Id,
    pub source: usize,
    pub target: usize,
    pub is_null: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate id `{0}`")]
    DuplicateId(Id),
    #[error("edge `{edge}` has undeclared endpoint `{vertex}`")]
    DanglingEndpoint { edge: Id, vertex: Id },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(Id),
    #[error("unknown edge `{0}`")]
    UnknownEdge(Id),
    #[error("vertex `{0}` is not mapped")]
    UnmappedVertex(Id),
    #[error("edge `{0}` is not mapped")]
    UnmappedEdge(Id),
    #[error("edge `{edge}` is sent to `{image}`, which does not preserve its {end}")]
    EndpointNotPreserved {
        edge: Id,
        image: Id,
        end: &'static str,
    },
    #[error("null loop `{edge}` is sent to non-null edge `{image}`")]
    NullNotPreserved { edge: Id, image: Id },
    #[error("morphisms do not compose: codomain and domain differ")]
    NotComposable,
    #[error("graph is not terminal-like (needs exactly one vertex and one edge)")]
    NotTerminal,
    #[error("id `{0}` does not have the expected shape")]
    MalformedId(Id),
}

#[derive(Debug, PartialEq, Eq)]
struct GraphData {
    vertices: Vec<Id>,
    edges: Vec<Edge>,
    null_of: Vec<usize>,
}

/// A finite reflexive graph. Cheap to clone; immutable once built.
#[derive(Clone)]
pub struct RGraph(Arc<GraphData>);

impl PartialEq for RGraph {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for RGraph {}

impl fmt::Debug for RGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RGraph {{ vertices: [")?;
        for (i, v) in self.0.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "], edges: [")?;
        let mut first = true;
        for e in self.0.edges.iter().filter(|e| !e.is_null) {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(
                f,
                "{}: {} -> {}",
                e.id, self.0.vertices[e.source], self.0.vertices[e.target]
            )?;
        }
        write!(f, "] }}")
    }
}

impl RGraph {
    /// Builds a graph from declared vertices and non-null edges
    /// `(id, source, target)`. One null loop per vertex is synthesized.
    ///
    /// Ids must be unique across vertices and edges together.
    pub fn new<V, E>(vertices: V, non_null_edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<Id>,
        E: IntoIterator<Item = (Id, Id, Id)>,
    {
        let mut verts: Vec<Id> = vertices.into_iter().map(Into::into).collect();
        verts.sort();
        if let Some(w) = verts.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateId(w[0].clone()));
        }
        let lookup = |v: &Id| verts.binary_search(v).ok();

        let mut edges = Vec::new();
        for (id, s, t) in non_null_edges {
            if lookup(&id).is_some() {
                return Err(GraphError::DuplicateId(id));
            }
            let source = lookup(&s).ok_or_else(|| GraphError::DanglingEndpoint {
                edge: id.clone(),
                vertex: s.clone(),
            })?;
            let target = lookup(&t).ok_or_else(|| GraphError::DanglingEndpoint {
                edge: id.clone(),
                vertex: t.clone(),
            })?;
            edges.push(Edge {
                id,
                source,
                target,
                is_null: false,
            });
        }
        for (i, v) in verts.iter().enumerate() {
            edges.push(Edge {
                id: Id::null_of(v.clone()),
                source: i,
                target: i,
                is_null: true,
            });
        }
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = edges.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateId(w[0].id.clone()));
        }
        Ok(Self::from_sorted(verts, edges))
    }

    /// Assembles a graph from parts already sorted by id with exactly one
    /// null edge per vertex.
    pub(crate) fn from_sorted(vertices: Vec<Id>, edges: Vec<Edge>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.windows(2).all(|w| w[0].id < w[1].id));
        let mut null_of = vec![usize::MAX; vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            if e.is_null {
                debug_assert_eq!(e.source, e.target);
                debug_assert_eq!(null_of[e.source], usize::MAX);
                null_of[e.source] = i;
            }
        }
        debug_assert!(null_of.iter().all(|&n| n != usize::MAX));
        RGraph(Arc::new(GraphData {
            vertices,
            edges,
            null_of,
        }))
    }

    /// The terminal graph `I`: one vertex `0` and its null loop.
    pub fn terminal() -> Self {
        let v = Id::name("0");
        let e = Edge {
            id: Id::null_of(v.clone()),
            source: 0,
            target: 0,
            is_null: true,
        };
        Self::from_sorted(vec![v], vec![e])
    }

    /// True for any graph with one vertex and one edge (necessarily its null loop).
    pub fn is_terminal_like(&self) -> bool {
        self.vertex_count() == 1 && self.edge_count() == 1
    }

    pub fn vertex_count(&self) -> usize {
        self.0.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.0.edges.len()
    }

    pub fn vertices(&self) -> &[Id] {
        &self.0.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.0.edges
    }

    pub fn vertex(&self, v: usize) -> &Id {
        &self.0.vertices[v]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.0.edges[e]
    }

    pub fn vertex_index(&self, id: &Id) -> Option<usize> {
        self.0.vertices.binary_search(id).ok()
    }

    pub fn edge_index(&self, id: &Id) -> Option<usize> {
        self.0.edges.binary_search_by(|e| e.id.cmp(id)).ok()
    }

    pub fn source(&self, e: usize) -> usize {
        self.0.edges[e].source
    }

    pub fn target(&self, e: usize) -> usize {
        self.0.edges[e].target
    }

    pub fn is_null(&self, e: usize) -> bool {
        self.0.edges[e].is_null
    }

    pub fn null_loop(&self, v: usize) -> usize {
        self.0.null_of[v]
    }

    pub fn non_null_edge_count(&self) -> usize {
        self.edge_count() - self.vertex_count()
    }

    /// Outgoing edge indices per vertex, in id order (null loops included).
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for (i, e) in self.0.edges.iter().enumerate() {
            out[e.source].push(i);
        }
        out
    }

    /// Cartesian product; vertex and edge ids are lexicographic pairs.
    pub fn product(&self, other: &RGraph) -> RGraph {
        let nv = other.vertex_count();
        let vertices = self
            .vertices()
            .iter()
            .flat_map(|a| {
                other
                    .vertices()
                    .iter()
                    .map(move |b| Id::pair(a.clone(), b.clone()))
            })
            .collect();
        let mut edges = Vec::with_capacity(self.edge_count() * other.edge_count());
        for e in self.edges() {
            for f in other.edges() {
                edges.push(Edge {
                    id: Id::pair(e.id.clone(), f.id.clone()),
                    source: e.source * nv + f.source,
                    target: e.target * nv + f.target,
                    is_null: e.is_null && f.is_null,
                });
            }
        }
        RGraph::from_sorted(vertices, edges)
    }

    /// The reverse graph. Its data is this very graph; only the polarity
    /// marker changes.
    pub fn reverse(&self) -> Polarized {
        Polarized {
            graph: self.clone(),
            polarity: Polarity::Minus,
        }
    }
}

/// Direction of a boundary position: `X` or `X⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Plus => Polarity::Minus,
            Polarity::Minus => Polarity::Plus,
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Polarity::Plus => 1,
            Polarity::Minus => -1,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Plus => "+",
            Polarity::Minus => "-",
        })
    }
}

/// A graph tagged with the polarity it occupies on a boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarized {
    pub graph: RGraph,
    pub polarity: Polarity,
}

impl Polarized {
    pub fn positive(graph: RGraph) -> Self {
        Polarized {
            graph,
            polarity: Polarity::Plus,
        }
    }

    pub fn reverse(&self) -> Polarized {
        Polarized {
            graph: self.graph.clone(),
            polarity: self.polarity.flip(),
        }
    }
}

/// A structure-preserving map of reflexive graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMorphism {
    dom: RGraph,
    cod: RGraph,
    vmap: Vec<usize>,
    emap: Vec<usize>,
}

impl GraphMorphism {
    /// Builds a morphism from id-level maps. Null loops may be omitted from
    /// `emap`; they are sent to the null loop of their vertex's image.
    pub fn new<V, E>(dom: &RGraph, cod: &RGraph, vmap: V, emap: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = (Id, Id)>,
        E: IntoIterator<Item = (Id, Id)>,
    {
        let mut vm = vec![usize::MAX; dom.vertex_count()];
        for (a, b) in vmap {
            let i = dom.vertex_index(&a).ok_or(GraphError::UnknownVertex(a))?;
            let j = cod.vertex_index(&b).ok_or(GraphError::UnknownVertex(b))?;
            vm[i] = j;
        }
        if let Some(i) = vm.iter().position(|&j| j == usize::MAX) {
            return Err(GraphError::UnmappedVertex(dom.vertex(i).clone()));
        }
        let mut em = vec![usize::MAX; dom.edge_count()];
        for (a, b) in emap {
            let i = dom.edge_index(&a).ok_or(GraphError::UnknownEdge(a))?;
            let j = cod.edge_index(&b).ok_or(GraphError::UnknownEdge(b))?;
            em[i] = j;
        }
        for (i, slot) in em.iter_mut().enumerate() {
            if *slot == usize::MAX {
                if dom.is_null(i) {
                    *slot = cod.null_loop(vm[dom.source(i)]);
                } else {
                    return Err(GraphError::UnmappedEdge(dom.edge(i).id.clone()));
                }
            }
        }
        Self::from_indices(dom.clone(), cod.clone(), vm, em)
    }

    /// Builds a morphism from index maps, checking that endpoints and null
    /// loops are preserved.
    pub fn from_indices(
        dom: RGraph,
        cod: RGraph,
        vmap: Vec<usize>,
        emap: Vec<usize>,
    ) -> Result<Self, GraphError> {
        assert_eq!(
            vmap.len(),
            dom.vertex_count(),
            "vertex map has wrong length"
        );
        assert_eq!(emap.len(), dom.edge_count(), "edge map has wrong length");
        for (i, e) in dom.edges().iter().enumerate() {
            let j = emap[i];
            let image = cod.edge(j);
            if image.source != vmap[e.source] {
                return Err(GraphError::EndpointNotPreserved {
                    edge: e.id.clone(),
                    image: image.id.clone(),
                    end: "source",
                });
            }
            if image.target != vmap[e.target] {
                return Err(GraphError::EndpointNotPreserved {
                    edge: e.id.clone(),
                    image: image.id.clone(),
                    end: "target",
                });
            }
            if e.is_null && !image.is_null {
                return Err(GraphError::NullNotPreserved {
                    edge: e.id.clone(),
                    image: image.id.clone(),
                });
            }
        }
        Ok(GraphMorphism {
            dom,
            cod,
            vmap,
            emap,
        })
    }

    /// Builds a morphism by rewriting ids and looking the results up in `cod`.
    pub fn from_id_fns(
        dom: &RGraph,
        cod: &RGraph,
        on_vertex: impl Fn(&Id) -> Option<Id>,
        on_edge: impl Fn(&Id) -> Option<Id>,
    ) -> Result<Self, GraphError> {
        let vmap = dom
            .vertices()
            .iter()
            .map(|v| {
                let w = on_vertex(v).ok_or_else(|| GraphError::MalformedId(v.clone()))?;
                cod.vertex_index(&w).ok_or(GraphError::UnknownVertex(w))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let emap = dom
            .edges()
            .iter()
            .map(|e| {
                let w = on_edge(&e.id).ok_or_else(|| GraphError::MalformedId(e.id.clone()))?;
                cod.edge_index(&w).ok_or(GraphError::UnknownEdge(w))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_indices(dom.clone(), cod.clone(), vmap, emap)
    }

    pub fn identity(g: &RGraph) -> Self {
        GraphMorphism {
            dom: g.clone(),
            cod: g.clone(),
            vmap: (0..g.vertex_count()).collect(),
            emap: (0..g.edge_count()).collect(),
        }
    }

    /// The unique morphism into the terminal graph.
    pub fn bang(g: &RGraph) -> Self {
        GraphMorphism {
            dom: g.clone(),
            cod: RGraph::terminal(),
            vmap: vec![0; g.vertex_count()],
            emap: vec![0; g.edge_count()],
        }
    }

    /// The unique morphism between two terminal-like graphs.
    pub fn terminal_iso(dom: &RGraph, cod: &RGraph) -> Result<Self, GraphError> {
        if !dom.is_terminal_like() || !cod.is_terminal_like() {
            return Err(GraphError::NotTerminal);
        }
        Ok(GraphMorphism {
            dom: dom.clone(),
            cod: cod.clone(),
            vmap: vec![0],
            emap: vec![0],
        })
    }

    /// `g → g × g`.
    pub fn diagonal(g: &RGraph) -> Self {
        let id = Self::identity(g);
        Self::pairing(&id, &id).expect("identity has a common domain with itself")
    }

    /// `⟨f, g⟩ : Z → X × Y` for `f : Z → X`, `g : Z → Y`.
    pub fn pairing(f: &GraphMorphism, g: &GraphMorphism) -> Result<Self, GraphError> {
        if f.dom != g.dom {
            return Err(GraphError::NotComposable);
        }
        let cod = f.cod.product(&g.cod);
        let nv = g.cod.vertex_count();
        let ne = g.cod.edge_count();
        let vmap = f
            .vmap
            .iter()
            .zip(&g.vmap)
            .map(|(a, b)| a * nv + b)
            .collect();
        let emap = f
            .emap
            .iter()
            .zip(&g.emap)
            .map(|(a, b)| a * ne + b)
            .collect();
        Self::from_indices(f.dom.clone(), cod, vmap, emap)
    }

    /// `f × g : A × B → C × D`.
    pub fn product(f: &GraphMorphism, g: &GraphMorphism) -> Self {
        let dom = f.dom.product(&g.dom);
        let cod = f.cod.product(&g.cod);
        let (dv, de) = (g.dom.vertex_count(), g.dom.edge_count());
        let (cv, ce) = (g.cod.vertex_count(), g.cod.edge_count());
        let vmap = (0..dom.vertex_count())
            .map(|k| f.vmap[k / dv] * cv + g.vmap[k % dv])
            .collect();
        let emap = (0..dom.edge_count())
            .map(|k| f.emap[k / de] * ce + g.emap[k % de])
            .collect();
        GraphMorphism {
            dom,
            cod,
            vmap,
            emap,
        }
    }

    /// Projection `g × h → g`.
    pub fn proj_left(g: &RGraph, h: &RGraph) -> Self {
        let dom = g.product(h);
        let (nv, ne) = (h.vertex_count(), h.edge_count());
        let vmap = (0..dom.vertex_count()).map(|k| k / nv).collect();
        let emap = (0..dom.edge_count()).map(|k| k / ne).collect();
        GraphMorphism {
            dom,
            cod: g.clone(),
            vmap,
            emap,
        }
    }

    /// Projection `g × h → h`.
    pub fn proj_right(g: &RGraph, h: &RGraph) -> Self {
        let dom = g.product(h);
        let (nv, ne) = (h.vertex_count(), h.edge_count());
        let vmap = (0..dom.vertex_count()).map(|k| k % nv).collect();
        let emap = (0..dom.edge_count()).map(|k| k % ne).collect();
        GraphMorphism {
            dom,
            cod: h.clone(),
            vmap,
            emap,
        }
    }

    /// Diagrammatic composite: first `self`, then `next`.
    pub fn then(&self, next: &GraphMorphism) -> Result<Self, GraphError> {
        if self.cod != next.dom {
            return Err(GraphError::NotComposable);
        }
        Ok(GraphMorphism {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            vmap: self.vmap.iter().map(|&j| next.vmap[j]).collect(),
            emap: self.emap.iter().map(|&j| next.emap[j]).collect(),
        })
    }

    pub fn dom(&self) -> &RGraph {
        &self.dom
    }

    pub fn cod(&self) -> &RGraph {
        &self.cod
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vmap[v]
    }

    pub fn edge_image(&self, e: usize) -> usize {
        self.emap[e]
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vmap
    }

    pub fn edge_map(&self) -> &[usize] {
        &self.emap
    }

    pub fn is_iso(&self) -> bool {
        fn bijective(map: &[usize], n: usize) -> bool {
            if map.len() != n {
                return false;
            }
            let mut seen = vec![false; n];
            map.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
        }
        bijective(&self.vmap, self.cod.vertex_count())
            && bijective(&self.emap, self.cod.edge_count())
    }
}

/// Free-standing spellings of the morphism constructors.
pub fn compose_morphisms(
    f: &GraphMorphism,
    g: &GraphMorphism,
) -> Result<GraphMorphism, GraphError> {
    f.then(g)
}

pub fn identity_morphism(g: &RGraph) -> GraphMorphism {
    GraphMorphism::identity(g)
}

pub fn bang(g: &RGraph) -> GraphMorphism {
    GraphMorphism::bang(g)
}

pub fn diagonal(g: &RGraph) -> GraphMorphism {
    GraphMorphism::diagonal(g)
}

/// Canonical structural isomorphisms between iterated products.
pub mod structural {
    use super::*;

    fn split(id: &Id) -> Option<(Id, Id)> {
        id.as_pair().map(|(a, b)| (a.clone(), b.clone()))
    }

    /// `(X × Y) × Z → X × (Y × Z)`.
    pub fn assoc(x: &RGraph, y: &RGraph, z: &RGraph) -> GraphMorphism {
        let dom = x.product(y).product(z);
        let cod = x.product(&y.product(z));
        let f = |id: &Id| {
            let (xy, c) = split(id)?;
            let (a, b) = split(&xy)?;
            Some(Id::pair(a, Id::pair(b, c)))
        };
        GraphMorphism::from_id_fns(&dom, &cod, f, f).expect("associator is well-formed")
    }

    /// `X × (Y × Z) → (X × Y) × Z`.
    pub fn assoc_inv(x: &RGraph, y: &RGraph, z: &RGraph) -> GraphMorphism {
        let dom = x.product(&y.product(z));
        let cod = x.product(y).product(z);
        let f = |id: &Id| {
            let (a, yz) = split(id)?;
            let (b, c) = split(&yz)?;
            Some(Id::pair(Id::pair(a, b), c))
        };
        GraphMorphism::from_id_fns(&dom, &cod, f, f).expect("associator is well-formed")
    }

    /// `I × X → X`.
    pub fn left_unitor(x: &RGraph) -> GraphMorphism {
        GraphMorphism::proj_right(&RGraph::terminal(), x)
    }

    /// `X → I × X`.
    pub fn left_unitor_inv(x: &RGraph) -> GraphMorphism {
        GraphMorphism::pairing(&GraphMorphism::bang(x), &GraphMorphism::identity(x))
            .expect("common domain")
    }

    /// `X × I → X`.
    pub fn right_unitor(x: &RGraph) -> GraphMorphism {
        GraphMorphism::proj_left(x, &RGraph::terminal())
    }

    /// `X → X × I`.
    pub fn right_unitor_inv(x: &RGraph) -> GraphMorphism {
        GraphMorphism::pairing(&GraphMorphism::identity(x), &GraphMorphism::bang(x))
            .expect("common domain")
    }

    /// `X × Y → Y × X`.
    pub fn swap(x: &RGraph, y: &RGraph) -> GraphMorphism {
        GraphMorphism::pairing(
            &GraphMorphism::proj_right(x, y),
            &GraphMorphism::proj_left(x, y),
        )
        .expect("common domain")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(id: &str, s: &str, t: &str) -> (Id, Id, Id) {
        (id.into(), s.into(), t.into())
    }

    fn arrow() -> RGraph {
        RGraph::new(["a", "b"], [edge("e", "a", "b")]).unwrap()
    }

    #[test]
    fn minimal_graph_has_one_null_loop() {
        let g = RGraph::new(["a"], []).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 1);
        assert!(g.is_null(0));
    }

    #[test]
    fn nulls_are_forced() {
        let g = arrow();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        for v in 0..g.vertex_count() {
            let n = g.null_loop(v);
            assert_eq!(g.source(n), v);
            assert_eq!(g.target(n), v);
        }
    }

    #[test]
    fn dangling_endpoint_rejected() {
        let err = RGraph::new(["a"], [edge("e", "a", "c")]).unwrap_err();
        assert!(matches!(err, GraphError::DanglingEndpoint { .. }));
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(matches!(
            RGraph::new(["a", "a"], []),
            Err(GraphError::DuplicateId(_))
        ));
        let err = RGraph::new(["a"], [edge("e", "a", "a"), edge("e", "a", "a")]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateId(_)));
        let err = RGraph::new(["a"], [edge("a", "a", "a")]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateId(_)));
    }

    #[test]
    fn product_counts() {
        let g = arrow();
        let p = g.product(&g);
        assert_eq!(p.vertex_count(), 4);
        assert_eq!(p.edge_count(), 9);
        assert_eq!(p.non_null_edge_count(), 5);
        let a = g.vertex_index(&"a".into()).unwrap();
        let n = p.null_loop(a * 2 + a);
        assert_eq!(
            p.edge(n).id,
            Id::pair(
                g.edge(g.null_loop(a)).id.clone(),
                g.edge(g.null_loop(a)).id.clone()
            )
        );
    }

    #[test]
    fn product_with_terminal_is_unit() {
        let g = arrow();
        let p = RGraph::terminal().product(&g);
        let proj = structural::left_unitor(&g);
        assert_eq!(proj.dom(), &p);
        assert!(proj.is_iso());
        assert!(RGraph::terminal()
            .product(&RGraph::terminal())
            .is_terminal_like());
    }

    #[test]
    fn product_is_associative_up_to_reassociation() {
        let g = arrow();
        let h = RGraph::new(["u"], [edge("l", "u", "u")]).unwrap();
        let a = structural::assoc(&g, &h, &g);
        assert!(a.is_iso());
        let back = a.then(&structural::assoc_inv(&g, &h, &g)).unwrap();
        assert_eq!(back, GraphMorphism::identity(a.dom()));
    }

    #[test]
    fn reverse_is_an_involution_on_polarity_only() {
        let g = arrow();
        let r = g.reverse();
        assert_eq!(r.graph.edges(), g.edges());
        assert_eq!(r.reverse(), Polarized::positive(g.clone()));
        assert_eq!(RGraph::terminal().reverse().graph, RGraph::terminal());
    }

    #[test]
    fn morphism_rejects_broken_endpoints() {
        let g = arrow();
        let err = GraphMorphism::new(
            &g,
            &g,
            [("a".into(), "b".into()), ("b".into(), "b".into())],
            [("e".into(), "e".into())],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            GraphError::EndpointNotPreserved { end: "source", .. }
        ));
    }

    #[test]
    fn morphism_rejects_null_to_non_null() {
        let g = RGraph::new(["a"], [edge("l", "a", "a")]).unwrap();
        let err = GraphMorphism::new(
            &g,
            &g,
            [("a".into(), "a".into())],
            [
                ("l".into(), "l".into()),
                (Id::null_of("a".into()), "l".into()),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::NullNotPreserved { .. }));
    }

    #[test]
    fn unmapped_edge_rejected() {
        let g = arrow();
        let err = GraphMorphism::new(
            &g,
            &g,
            [("a".into(), "a".into()), ("b".into(), "b".into())],
            [],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::UnmappedEdge(_)));
    }

    #[test]
    fn identity_is_neutral() {
        let g = arrow();
        let f = GraphMorphism::bang(&g);
        assert_eq!(GraphMorphism::identity(&g).then(&f).unwrap(), f);
        assert_eq!(f.then(&GraphMorphism::identity(f.cod())).unwrap(), f);
    }

    #[test]
    fn bang_hits_the_null_loop() {
        let g = arrow();
        let b = bang(&g);
        assert!((0..g.edge_count()).all(|e| b.cod().is_null(b.edge_image(e))));
    }

    #[test]
    fn diagonal_pairs_each_edge_with_itself() {
        let g = arrow();
        let d = diagonal(&g);
        for (i, e) in g.edges().iter().enumerate() {
            assert_eq!(
                d.cod().edge(d.edge_image(i)).id,
                Id::pair(e.id.clone(), e.id.clone())
            );
        }
    }

    #[test]
    fn projections_are_morphisms_and_pairing_recovers_them() {
        let g = arrow();
        let h = RGraph::new(["u", "w"], [edge("k", "u", "w"), edge("m", "w", "w")]).unwrap();
        let pl = GraphMorphism::proj_left(&g, &h);
        let pr = GraphMorphism::proj_right(&g, &h);
        let pair = GraphMorphism::pairing(&pl, &pr).unwrap();
        assert_eq!(pair, GraphMorphism::identity(&g.product(&h)));
        assert!(GraphMorphism::from_indices(
            pl.dom().clone(),
            pl.cod().clone(),
            pl.vertex_map().to_vec(),
            pl.edge_map().to_vec()
        )
        .is_ok());
    }
}
