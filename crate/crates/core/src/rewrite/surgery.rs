//! Low-level graph edits shared by the rewrite rules.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::{Diagram, Edge, Endpoint, Generator, NodeId, WireType};
use crate::C64;

/// Remove `nodes`, joining their ports by straight wires according to
/// `pairs`. Every port of a removed node must occur in exactly one pair.
/// Each chain of wires is reconnected end to end; chains that close up on
/// themselves become scalar nodes carrying the loop's index size. Returns
/// `None` if a chain would join two sources or two targets.
pub(crate) fn splice(d: &Diagram, nodes: &[NodeId], pairs: &[(Endpoint, Endpoint)]) -> Option<Diagram> {
    let removed: BTreeSet<NodeId> = nodes.iter().copied().collect();
    let is_removed = |e: Endpoint| e.node().is_some_and(|n| removed.contains(&n));
    let mut partner = BTreeMap::new();
    for &(a, b) in pairs {
        if partner.insert(a, b).is_some() || partner.insert(b, a).is_some() {
            return None;
        }
    }
    let mut ext: BTreeMap<Endpoint, (Endpoint, WireType)> = BTreeMap::new();
    for e in d.edges() {
        if is_removed(e.src) {
            ext.insert(e.src, (e.tgt, e.ty));
        }
        if is_removed(e.tgt) {
            ext.insert(e.tgt, (e.src, e.ty));
        }
    }
    if ext.keys().any(|p| !partner.contains_key(p)) || partner.keys().any(|p| !ext.contains_key(p)) {
        return None;
    }
    let mut g = d.clone();
    for &n in nodes {
        g.remove_node(n);
    }
    let mut visited = BTreeSet::new();
    let ports: Vec<Endpoint> = ext.keys().copied().collect();
    for &p in &ports {
        let (start, ty) = ext[&p];
        if visited.contains(&p) || is_removed(start) {
            continue;
        }
        visited.insert(p);
        let mut cur = p;
        let end = loop {
            let q = partner[&cur];
            visited.insert(q);
            let (e, _) = ext[&q];
            if is_removed(e) {
                visited.insert(e);
                cur = e;
            } else {
                break e;
            }
        };
        match (start.is_source(), end.is_source()) {
            (true, false) => g.push_edge(start, end, ty),
            (false, true) => g.push_edge(end, start, ty),
            _ => return None,
        }
    }
    for &p in &ports {
        if visited.contains(&p) {
            continue;
        }
        let ty = ext[&p].1;
        let mut cur = p;
        loop {
            visited.insert(cur);
            let q = partner[&cur];
            visited.insert(q);
            let (e, _) = ext[&q];
            if visited.contains(&e) {
                break;
            }
            cur = e;
        }
        g.insert_node(Generator::Scalar(C64::new(ty.index_size() as f64, 0.0)));
    }
    Some(g)
}

/// Remove `old` nodes after inserting `new` ones, re-pointing every edge
/// that touched an old node through `map`. Edges for which `map` returns
/// `None` at either end are dropped. `map` receives the ids of the new nodes.
pub(crate) fn rebuild(
    d: &Diagram,
    old: &[NodeId],
    new: Vec<Generator>,
    map: impl Fn(Endpoint, &[NodeId]) -> Option<Endpoint>,
) -> Diagram {
    let mut g = d.clone();
    let ids: Vec<NodeId> = new.into_iter().map(|gen| g.insert_node(gen)).collect();
    let mut touched: Vec<Edge> = Vec::new();
    for &n in old {
        for e in g.remove_node(n) {
            if !touched.contains(&e) {
                touched.push(e);
            }
        }
    }
    let remap = |e: Endpoint| if e.node().is_some_and(|n| old.contains(&n)) { map(e, &ids) } else { Some(e) };
    for e in touched {
        if let (Some(s), Some(t)) = (remap(e.src), remap(e.tgt)) {
            g.push_edge(s, t, e.ty);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{compose_par, compose_seq, isomorphic};
    use crate::tensor::NumericTolerance;

    #[test]
    fn splice_swap_crosses_wires() {
        let w = WireType::classical(2);
        let v = WireType::classical(3);
        let s = Diagram::swap(w, v);
        let id = s.node_ids()[0];
        let out = splice(
            &s,
            &[id],
            &[(Endpoint::In(id, 0), Endpoint::Out(id, 1)), (Endpoint::In(id, 1), Endpoint::Out(id, 0))],
        )
        .unwrap();
        out.validate().unwrap();
        assert_eq!(out.edge_to(Endpoint::Output(1)).unwrap().src, Endpoint::Input(0));
    }

    #[test]
    fn splice_circle_becomes_scalar() {
        let c = Diagram::circle(WireType::quantum(2));
        let ids = c.node_ids();
        let (cup, cap) = (ids[0], ids[1]);
        let out = splice(
            &c,
            &ids,
            &[(Endpoint::Out(cup, 0), Endpoint::Out(cup, 1)), (Endpoint::In(cap, 0), Endpoint::In(cap, 1))],
        )
        .unwrap();
        let expect = Diagram::scalar(C64::new(4.0, 0.0));
        assert!(isomorphic(&out, &expect, NumericTolerance::default()));
    }

    #[test]
    fn splice_rejects_bare_cup() {
        let c = Diagram::cup(WireType::classical(2));
        let id = c.node_ids()[0];
        assert!(splice(&c, &[id], &[(Endpoint::Out(id, 0), Endpoint::Out(id, 1))]).is_none());
    }

    #[test]
    fn zigzag_splices_to_wire() {
        let w = WireType::classical(2);
        let top = compose_par(&Diagram::identity(&[w]), &Diagram::cup(w));
        let bottom = compose_par(&Diagram::cap(w), &Diagram::identity(&[w]));
        let z = compose_seq(&top, &bottom).unwrap();
        let ids = z.node_ids();
        let (cup, cap) = (ids[0], ids[1]);
        let out = splice(
            &z,
            &ids,
            &[(Endpoint::Out(cup, 0), Endpoint::Out(cup, 1)), (Endpoint::In(cap, 0), Endpoint::In(cap, 1))],
        )
        .unwrap();
        assert!(isomorphic(&out, &Diagram::identity(&[w]), NumericTolerance::default()));
    }
}
