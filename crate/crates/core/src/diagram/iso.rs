//! Graph isomorphism of diagrams, anchored at the ordered boundary.
//!
//! Spider legs within one direction and the two legs of a cup or cap are
//! interchangeable, so edges at those nodes are compared without port
//! numbers. Box and swap ports stay ordered. Scalar nodes carry no ports and
//! are compared through their product.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Diagram, Endpoint, Generator, NodeId, WireType};
use crate::phases::PhaseVector;
use crate::tensor::{EqualityMode, NumericTolerance};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Anchor {
    Input(usize),
    Output(usize),
    Node(NodeId),
}

type PortKey = (Option<usize>, Option<usize>, WireType);

struct View<'a> {
    d: &'a Diagram,
    adj: HashMap<(Anchor, Anchor), Vec<PortKey>>,
    nodes: Vec<NodeId>,
    degree: HashMap<NodeId, usize>,
}

impl<'a> View<'a> {
    fn new(d: &'a Diagram) -> Self {
        let port = |e: Endpoint| -> (Anchor, Option<usize>) {
            match e {
                Endpoint::Input(i) => (Anchor::Input(i), None),
                Endpoint::Output(j) => (Anchor::Output(j), None),
                Endpoint::In(n, k) | Endpoint::Out(n, k) => {
                    let sym = d.node(n).is_some_and(Generator::is_leg_symmetric);
                    (Anchor::Node(n), if sym { None } else { Some(k) })
                }
            }
        };
        let mut adj: HashMap<(Anchor, Anchor), Vec<PortKey>> = HashMap::new();
        let mut degree = HashMap::new();
        for e in d.edges() {
            let (sa, sp) = port(e.src);
            let (ta, tp) = port(e.tgt);
            adj.entry((sa, ta)).or_default().push((sp, tp, e.ty));
            for n in [e.src.node(), e.tgt.node()].into_iter().flatten() {
                *degree.entry(n).or_insert(0) += 1;
            }
        }
        for v in adj.values_mut() {
            v.sort();
        }
        let nodes = d.nodes().filter(|(_, g)| !matches!(g, Generator::Scalar(_))).map(|(id, _)| id).collect();
        Self { d, adj, nodes, degree }
    }

    fn between(&self, x: Anchor, y: Anchor) -> &[PortKey] { self.adj.get(&(x, y)).map_or(&[], |v| v.as_slice()) }

    /// Nodes in breadth-first order from the boundary, then any closed
    /// components in id order.
    fn search_order(&self) -> Vec<NodeId> {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut queue: VecDeque<NodeId> = VecDeque::new();
        let boundary: Vec<NodeId> = self
            .d
            .edges()
            .iter()
            .filter(|e| matches!(e.src, Endpoint::Input(_)) || matches!(e.tgt, Endpoint::Output(_)))
            .flat_map(|e| [e.src.node(), e.tgt.node()])
            .flatten()
            .collect();
        let starts: Vec<NodeId> = boundary.into_iter().chain(self.nodes.iter().copied()).collect();
        for s in starts {
            if !self.nodes.contains(&s) || !seen.insert(s) {
                continue;
            }
            queue.push_back(s);
            while let Some(n) = queue.pop_front() {
                order.push(n);
                for m in self.d.neighbours(n) {
                    if self.nodes.contains(&m) && seen.insert(m) {
                        queue.push_back(m);
                    }
                }
            }
        }
        order
    }
}

fn phases_close(a: Option<&PhaseVector>, b: Option<&PhaseVector>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(p), Some(q)) => p.approx_eq(q, tol),
        (Some(p), None) | (None, Some(p)) => p.is_unit(tol),
    }
}

fn sorted(ws: &[WireType]) -> Vec<WireType> {
    let mut v = ws.to_vec();
    v.sort();
    v
}

/// Whether two generators may be matched: same kind, legs and decoration.
/// Box names are labels only and are ignored.
pub(crate) fn compatible(g: &Generator, h: &Generator, tol: f64) -> bool {
    match (g, h) {
        (Generator::Spider(a), Generator::Spider(b)) => {
            a.family() == b.family()
                && a.dim() == b.dim()
                && a.heads() == b.heads()
                && sorted(a.inputs()) == sorted(b.inputs())
                && sorted(a.outputs()) == sorted(b.outputs())
                && phases_close(a.phase(), b.phase(), tol)
        }
        (Generator::Box(a), Generator::Box(b)) => {
            a.flavor() == b.flavor()
                && a.inputs() == b.inputs()
                && a.outputs() == b.outputs()
                && a.payload().max_abs_diff(b.payload()).is_some_and(|x| x <= tol)
        }
        (Generator::Cup(a), Generator::Cup(b)) | (Generator::Cap(a), Generator::Cap(b)) => a == b,
        (Generator::Swap(a1, a2), Generator::Swap(b1, b2)) => a1 == b1 && a2 == b2,
        _ => false,
    }
}

/// Isomorphism respecting boundary order, up to leg permutations of
/// symmetric generators. Scalars are compared according to `tol.mode`.
pub fn isomorphic(a: &Diagram, b: &Diagram, tol: NumericTolerance) -> bool {
    if a.inputs() != b.inputs() || a.outputs() != b.outputs() || a.edge_count() != b.edge_count() {
        return false;
    }
    let (sa, sb) = (a.scalar_factor(), b.scalar_factor());
    let scalars_ok = match tol.mode {
        EqualityMode::Strict => (sa - sb).norm() <= tol.absolute,
        EqualityMode::UpToScalar => (sa.norm() <= tol.absolute) == (sb.norm() <= tol.absolute),
    };
    if !scalars_ok {
        return false;
    }
    let va = View::new(a);
    let vb = View::new(b);
    if va.nodes.len() != vb.nodes.len() {
        return false;
    }
    for i in 0..a.inputs().len() {
        for j in 0..a.outputs().len() {
            if va.between(Anchor::Input(i), Anchor::Output(j)) != vb.between(Anchor::Input(i), Anchor::Output(j)) {
                return false;
            }
        }
    }
    let order = va.search_order();
    let mut map: HashMap<NodeId, NodeId> = HashMap::new();
    let mut used: BTreeSet<NodeId> = BTreeSet::new();
    search(&va, &vb, &order, 0, &mut map, &mut used, tol.absolute)
}

fn search(
    va: &View,
    vb: &View,
    order: &[NodeId],
    k: usize,
    map: &mut HashMap<NodeId, NodeId>,
    used: &mut BTreeSet<NodeId>,
    tol: f64,
) -> bool {
    let Some(&x) = order.get(k) else { return true };
    let gx = va.d.node(x).expect("node in view");
    for &y in &vb.nodes {
        if used.contains(&y) || va.degree.get(&x) != vb.degree.get(&y) {
            continue;
        }
        if !compatible(gx, vb.d.node(y).expect("node in view"), tol) {
            continue;
        }
        map.insert(x, y);
        if consistent(va, vb, x, y, map) {
            used.insert(y);
            if search(va, vb, order, k + 1, map, used, tol) {
                return true;
            }
            used.remove(&y);
        }
        map.remove(&x);
    }
    false
}

/// Edges between the new pair and everything already mapped must agree.
fn consistent(va: &View, vb: &View, x: NodeId, y: NodeId, map: &HashMap<NodeId, NodeId>) -> bool {
    let (ax, ay) = (Anchor::Node(x), Anchor::Node(y));
    let boundary = (0..va.d.inputs().len())
        .map(Anchor::Input)
        .chain((0..va.d.outputs().len()).map(Anchor::Output))
        .map(|b| (b, b));
    let mapped = map.iter().map(|(&p, &q)| (Anchor::Node(p), Anchor::Node(q)));
    for (p, q) in boundary.chain(mapped) {
        if va.between(ax, p) != vb.between(ay, q) || va.between(p, ax) != vb.between(q, ay) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{compose_seq, Spider};
    use crate::C64;

    #[test]
    fn identity_composed_with_identity() {
        let w = WireType::classical(2);
        let id = Diagram::identity(&[w]);
        let idid = compose_seq(&id, &id).unwrap();
        assert!(isomorphic(&idid, &id, NumericTolerance::default()));
    }

    #[test]
    fn copy_legs_are_interchangeable_but_outputs_ordered() {
        let w = WireType::classical(2);
        let copy = Diagram::copy(2);
        let swapped = compose_seq(&copy, &Diagram::swap(w, w)).unwrap();
        assert!(!isomorphic(&copy, &swapped, NumericTolerance::default()));
        assert!(isomorphic(&copy, &copy.clone(), NumericTolerance::default()));
    }

    #[test]
    fn scalars_compared_by_mode() {
        let s = Spider::classical(1, 1, 2);
        let a = Diagram::spider(s.clone());
        let b = crate::diagram::compose_par(&a, &Diagram::scalar(C64::new(2.0, 0.0)));
        assert!(!isomorphic(&a, &b, NumericTolerance::strict(1e-9)));
        assert!(isomorphic(&a, &b, NumericTolerance::up_to_scalar(1e-9)));
    }
}
