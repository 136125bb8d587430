#![allow(dead_code)]

use std::collections::BTreeSet;

use spanledger::rgraph::Id;
use spanledger::span::Span;

/// A span flattened to ids: vertices as (id, left image, right image),
/// edges as (id, source, target, null, left image, right image).
pub type Flat = (BTreeSet<(Id, Id, Id)>, BTreeSet<(Id, Id, Id, bool, Id, Id)>);

pub fn flatten(s: &Span) -> Flat {
    let h = s.head();
    let vertices = (0..h.vertex_count())
        .map(|v| {
            (
                h.vertex(v).clone(),
                s.dom().vertex(s.left().vertex_image(v)).clone(),
                s.cod().vertex(s.right().vertex_image(v)).clone(),
            )
        })
        .collect();
    let edges = (0..h.edge_count())
        .map(|e| {
            let edge = h.edge(e);
            (
                edge.id.clone(),
                h.vertex(edge.source).clone(),
                h.vertex(edge.target).clone(),
                edge.is_null,
                s.dom().edge(s.left().edge_image(e)).id.clone(),
                s.cod().edge(s.right().edge_image(e)).id.clone(),
            )
        })
        .collect();
    (vertices, edges)
}

/// The composite of `r` then `s`, by enumerating every pair of states and
/// every pair of transitions and keeping those that agree on the middle.
pub fn brute_force_compose(r: &Span, s: &Span) -> (Flat, usize, usize) {
    let (rh, sh, y) = (r.head(), s.head(), r.cod());
    let mut vertices = BTreeSet::new();
    let mut nv = 0;
    for i in 0..rh.vertex_count() {
        for j in 0..sh.vertex_count() {
            if y.vertex(r.right().vertex_image(i)) == y.vertex(s.left().vertex_image(j)) {
                nv += 1;
                vertices.insert((
                    Id::pair(rh.vertex(i).clone(), sh.vertex(j).clone()),
                    r.dom().vertex(r.left().vertex_image(i)).clone(),
                    s.cod().vertex(s.right().vertex_image(j)).clone(),
                ));
            }
        }
    }
    let mut edges = BTreeSet::new();
    let mut ne = 0;
    for i in 0..rh.edge_count() {
        for j in 0..sh.edge_count() {
            if y.edge(r.right().edge_image(i)).id != y.edge(s.left().edge_image(j)).id {
                continue;
            }
            ne += 1;
            let (a, b) = (rh.edge(i), sh.edge(j));
            edges.insert((
                Id::pair(a.id.clone(), b.id.clone()),
                Id::pair(rh.vertex(a.source).clone(), sh.vertex(b.source).clone()),
                Id::pair(rh.vertex(a.target).clone(), sh.vertex(b.target).clone()),
                a.is_null && b.is_null,
                r.dom().edge(r.left().edge_image(i)).id.clone(),
                s.cod().edge(s.right().edge_image(j)).id.clone(),
            ));
        }
    }
    ((vertices, edges), nv, ne)
}

/// `Ok` when `compose_spans` agrees with the brute-force composite.
pub fn agrees(r: &Span, s: &Span) -> Result<(), String> {
    let c = r.compose(s).map_err(|e| e.to_string())?;
    let (oracle, nv, ne) = brute_force_compose(r, s);
    if c.head().vertex_count() != nv || c.head().edge_count() != ne {
        return Err(format!(
            "sizes differ: {}/{} states, {}/{} edges",
            c.head().vertex_count(),
            nv,
            c.head().edge_count(),
            ne
        ));
    }
    if flatten(&c) != oracle {
        return Err("composite differs from pair enumeration".into());
    }
    Ok(())
}
