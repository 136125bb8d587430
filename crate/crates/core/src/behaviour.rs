//! Finite behaviours of spans: paths in the head and their reflections on
//! the boundaries.
//!
//! Paths fix their start vertex and may contain null-loop steps; two paths
//! are equal only if they agree step for step, idling included.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::rgraph::{GraphMorphism, RGraph};
use crate::span::{pullback, Span, SpanError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BehaviourError {
    #[error("path does not live in the graph it is applied to")]
    WrongGraph,
    #[error("step {0} does not start where the previous one ends")]
    NotIncident(usize),
    #[error("vertex or edge index out of range")]
    OutOfRange,
}

/// A finite path: a start vertex and a sequence of incident edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    graph: RGraph,
    start: usize,
    edges: Vec<usize>,
}

impl Path {
    pub fn new(graph: &RGraph, start: usize, edges: Vec<usize>) -> Result<Self, BehaviourError> {
        if start >= graph.vertex_count() || edges.iter().any(|&e| e >= graph.edge_count()) {
            return Err(BehaviourError::OutOfRange);
        }
        let mut at = start;
        for (k, &e) in edges.iter().enumerate() {
            if graph.source(e) != at {
                return Err(BehaviourError::NotIncident(k));
            }
            at = graph.target(e);
        }
        Ok(Path {
            graph: graph.clone(),
            start,
            edges,
        })
    }

    pub fn empty(graph: &RGraph, start: usize) -> Self {
        Path {
            graph: graph.clone(),
            start,
            edges: Vec::new(),
        }
    }

    pub fn graph(&self) -> &RGraph {
        &self.graph
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.edges
            .last()
            .map_or(self.start, |&e| self.graph.target(e))
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertices visited, start included.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.start).chain(self.edges.iter().map(|&e| self.graph.target(e)))
    }

    /// Image of the path under a graph morphism.
    pub fn map(&self, m: &GraphMorphism) -> Result<Path, BehaviourError> {
        if m.dom() != &self.graph {
            return Err(BehaviourError::WrongGraph);
        }
        Ok(Path {
            graph: m.cod().clone(),
            start: m.vertex_image(self.start),
            edges: self.edges.iter().map(|&e| m.edge_image(e)).collect(),
        })
    }

    fn key(&self) -> (usize, Vec<usize>) {
        (self.start, self.edges.clone())
    }
}

/// All paths of length at most `max_len`, grouped by start vertex and
/// extended depth-first in edge-id order.
pub fn enumerate_paths(g: &RGraph, max_len: usize) -> Vec<Path> {
    let out = g.out_edges();
    let mut paths = Vec::new();
    let mut stack = Vec::new();
    for v in 0..g.vertex_count() {
        walk(g, &out, v, v, max_len, &mut stack, &mut paths);
    }
    paths
}

fn walk(
    g: &RGraph,
    out: &[Vec<usize>],
    start: usize,
    at: usize,
    remaining: usize,
    stack: &mut Vec<usize>,
    paths: &mut Vec<Path>,
) {
    paths.push(Path {
        graph: g.clone(),
        start,
        edges: stack.clone(),
    });
    if remaining == 0 {
        return;
    }
    for &e in &out[at] {
        stack.push(e);
        walk(g, out, start, g.target(e), remaining - 1, stack, paths);
        stack.pop();
    }
}

/// Reflects a behaviour of `s` onto its two boundaries.
pub fn project(s: &Span, path: &Path) -> Result<(Path, Path), BehaviourError> {
    Ok((path.map(s.left())?, path.map(s.right())?))
}

/// One line per step: `step k: head_edge | left_boundary_edge | right_boundary_edge`.
pub fn trace_lines(s: &Span, path: &Path) -> Result<Vec<String>, BehaviourError> {
    let (l, r) = project(s, path)?;
    let head = s.head();
    Ok(path
        .edges()
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            format!(
                "step {}: {} | {} | {}",
                k + 1,
                head.edge(e).id,
                s.dom().edge(l.edges()[k]).id,
                s.cod().edge(r.edges()[k]).id
            )
        })
        .collect())
}

/// Outcome of one behaviour check. `witness` names the first discrepancy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviourReport {
    pub law: &'static str,
    pub checked: usize,
    pub witness: Option<String>,
}

impl BehaviourReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    fn fail(law: &'static str, checked: usize, witness: String) -> Self {
        BehaviourReport {
            law,
            checked,
            witness: Some(witness),
        }
    }
}

type PathKey = (usize, Vec<usize>);

/// Behaviours of `r • s` are exactly the pairs of behaviours of `r` and `s`
/// that agree on the shared boundary.
pub fn check_composite_behaviours(
    r: &Span,
    s: &Span,
    max_len: usize,
) -> Result<BehaviourReport, SpanError> {
    const LAW: &str = "composite";
    let pb = pullback(r, s)?;
    let composite = enumerate_paths(pb.span.head(), max_len);

    let mut seen: BTreeSet<(PathKey, PathKey)> = BTreeSet::new();
    for p in &composite {
        let a = p
            .map(&pb.to_first)
            .expect("projection starts at the composite head");
        let b = p
            .map(&pb.to_second)
            .expect("projection starts at the composite head");
        let ya = a.map(r.right()).expect("path lives in r's head");
        let yb = b.map(s.left()).expect("path lives in s's head");
        if ya != yb {
            return Ok(BehaviourReport::fail(
                LAW,
                seen.len(),
                format!("composite path {:?} is not synchronized", p.key()),
            ));
        }
        if !seen.insert((a.key(), b.key())) {
            return Ok(BehaviourReport::fail(
                LAW,
                seen.len(),
                format!("two composite paths project to {:?}", (a.key(), b.key())),
            ));
        }
    }

    let mut by_boundary: HashMap<PathKey, Vec<PathKey>> = HashMap::new();
    for q in enumerate_paths(s.head(), max_len) {
        let y = q.map(s.left()).expect("path lives in s's head");
        by_boundary.entry(y.key()).or_default().push(q.key());
    }
    let mut synchronized = 0;
    for p in enumerate_paths(r.head(), max_len) {
        let y = p.map(r.right()).expect("path lives in r's head");
        for q in by_boundary.get(&y.key()).into_iter().flatten() {
            synchronized += 1;
            if !seen.contains(&(p.key(), q.clone())) {
                return Ok(BehaviourReport::fail(
                    LAW,
                    synchronized,
                    format!(
                        "synchronized pair {:?} has no composite behaviour",
                        (p.key(), q)
                    ),
                ));
            }
        }
    }
    if synchronized != seen.len() {
        return Ok(BehaviourReport::fail(
            LAW,
            synchronized,
            "pair counts differ".into(),
        ));
    }
    Ok(BehaviourReport {
        law: LAW,
        checked: synchronized,
        witness: None,
    })
}

/// Behaviours of `r ⊗ s` are exactly the pairs of equal-length behaviours.
pub fn check_tensor_behaviours(r: &Span, s: &Span, max_len: usize) -> BehaviourReport {
    const LAW: &str = "tensor";
    let t = r.tensor(s);
    let pl = GraphMorphism::proj_left(r.head(), s.head());
    let pr = GraphMorphism::proj_right(r.head(), s.head());
    let mut seen = BTreeSet::new();
    for p in enumerate_paths(t.head(), max_len) {
        let a = p.map(&pl).expect("tensor head is the product of heads");
        let b = p.map(&pr).expect("tensor head is the product of heads");
        if !seen.insert((a.key(), b.key())) {
            return BehaviourReport::fail(
                LAW,
                seen.len(),
                format!("duplicate projection {:?}", (a.key(), b.key())),
            );
        }
    }
    let rp = enumerate_paths(r.head(), max_len);
    let sp = enumerate_paths(s.head(), max_len);
    let mut pairs = 0;
    for a in &rp {
        for b in sp.iter().filter(|b| b.len() == a.len()) {
            pairs += 1;
            if !seen.contains(&(a.key(), b.key())) {
                return BehaviourReport::fail(
                    LAW,
                    pairs,
                    format!("pair {:?} missing", (a.key(), b.key())),
                );
            }
        }
    }
    if pairs != seen.len() {
        return BehaviourReport::fail(LAW, pairs, "pair counts differ".into());
    }
    BehaviourReport {
        law: LAW,
        checked: pairs,
        witness: None,
    }
}

/// Every behaviour of `η_X` appears equally on both factors of its codomain,
/// and idles on its domain `I`.
pub fn check_eta_behaviours(x: &RGraph, max_len: usize) -> BehaviourReport {
    const LAW: &str = "eta";
    let eta = Span::eta(x);
    let pl = GraphMorphism::proj_left(x, x);
    let pr = GraphMorphism::proj_right(x, x);
    let mut checked = 0;
    for p in enumerate_paths(eta.head(), max_len) {
        checked += 1;
        let (l, r) = project(&eta, &p).expect("path lives in the head");
        if l.len() != p.len() || !l.edges().iter().all(|&e| l.graph().is_null(e)) {
            return BehaviourReport::fail(
                LAW,
                checked,
                format!("left reflection of {:?} is not idle", p.key()),
            );
        }
        let first = r.map(&pl).expect("codomain is X × X");
        let second = r.map(&pr).expect("codomain is X × X");
        if first != p || second != p {
            return BehaviourReport::fail(
                LAW,
                checked,
                format!("path {:?} is not reflected equally", p.key()),
            );
        }
    }
    BehaviourReport {
        law: LAW,
        checked,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rgraph::Id;

    fn single_loop() -> RGraph {
        RGraph::new(["v"], [(Id::from("l"), Id::from("v"), Id::from("v"))]).unwrap()
    }

    #[test]
    fn terminal_paths() {
        let paths = enumerate_paths(&RGraph::terminal(), 2);
        assert_eq!(paths.len(), 3);
        assert_eq!(
            paths.iter().map(Path::len).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn loop_paths_up_to_one() {
        // empty path, the null loop, the loop `l`
        assert_eq!(enumerate_paths(&single_loop(), 1).len(), 3);
    }

    #[test]
    fn zero_length_is_one_path_per_vertex() {
        let g = RGraph::new(["a", "b", "c"], []).unwrap();
        let paths = enumerate_paths(&g, 0);
        assert_eq!(paths.len(), 3);
        assert!(paths.iter().all(Path::is_empty));
    }

    #[test]
    fn null_paths_project_to_null_paths() {
        let g = single_loop();
        let s = Span::eta(&g);
        let p = Path::new(&g, 0, vec![g.null_loop(0), g.null_loop(0)]).unwrap();
        let (l, r) = project(&s, &p).unwrap();
        assert!(l.edges().iter().all(|&e| l.graph().is_null(e)));
        assert!(r.edges().iter().all(|&e| r.graph().is_null(e)));
        assert_eq!(l.len(), 2);
    }

    #[test]
    fn identity_projects_to_itself() {
        let g = single_loop();
        let s = Span::identity(&g);
        for p in enumerate_paths(&g, 3) {
            let (l, r) = project(&s, &p).unwrap();
            assert_eq!(l, p);
            assert_eq!(r, p);
        }
    }

    #[test]
    fn non_incident_path_rejected() {
        let g = RGraph::new(["a", "b"], [(Id::from("e"), Id::from("a"), Id::from("b"))]).unwrap();
        let e = g.edge_index(&"e".into()).unwrap();
        assert_eq!(
            Path::new(&g, 0, vec![e, e]),
            Err(BehaviourError::NotIncident(1))
        );
    }

    #[test]
    fn wrong_graph_rejected() {
        let g = single_loop();
        let p = Path::empty(&g, 0);
        assert_eq!(
            project(&Span::identity(&RGraph::terminal()), &p),
            Err(BehaviourError::WrongGraph)
        );
    }

    #[test]
    fn eta_and_identity_behaviours() {
        let g = single_loop();
        assert!(check_eta_behaviours(&g, 3).passed());
        let id = Span::identity(&g);
        assert!(check_composite_behaviours(&id, &id, 3).unwrap().passed());
        assert!(check_tensor_behaviours(&id, &Span::eta(&g), 2).passed());
    }

    #[test]
    fn trace_format() {
        let g = single_loop();
        let s = Span::identity(&g);
        let l = g.edge_index(&"l".into()).unwrap();
        let p = Path::new(&g, 0, vec![l]).unwrap();
        assert_eq!(
            trace_lines(&s, &p).unwrap(),
            vec!["step 1: l | l | l".to_string()]
        );
    }
}
