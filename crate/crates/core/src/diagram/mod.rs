//! Open-graph representation of classical-quantum string diagrams.
//!
//! A [`Diagram`] is a set of [`Generator`] nodes with ordered ports, a list
//! of typed edges joining an output-side endpoint to an input-side endpoint,
//! and ordered input/output boundaries. Every port and every boundary
//! position is used by exactly one edge.

mod generator;
mod iso;
mod ops;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generator::{double_payload, BoxGen, Family, Flavor, Generator, Heads, Spider};
pub use iso::isomorphic;
pub use ops::{compose_par, compose_seq, conjugate, dagger, discard, double, transpose};

use crate::phases::PhaseVector;
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("wire {0} has the wrong kind for this operation")]
    WrongKind(WireType),
    #[error("diagram contains quantum wires or doubled generators")]
    NotPlain,
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("invalid wiring: {0}")]
    InvalidWiring(String),
}

pub type DiagramResult<T> = Result<T, DiagramError>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WireKind {
    Classical,
    Quantum,
}

/// A wire's kind together with its base dimension.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WireType {
    kind: WireKind,
    dim: usize,
}

impl WireType {
    pub fn new(kind: WireKind, dim: usize) -> DiagramResult<Self> {
        if dim == 0 {
            return Err(DiagramError::InvalidGenerator("wire dimension must be positive".into()));
        }
        Ok(Self { kind, dim })
    }

    pub fn classical(dim: usize) -> Self {
        assert!(dim >= 1, "wire dimension must be positive");
        Self { kind: WireKind::Classical, dim }
    }

    pub fn quantum(dim: usize) -> Self {
        assert!(dim >= 1, "wire dimension must be positive");
        Self { kind: WireKind::Quantum, dim }
    }

    pub fn kind(&self) -> WireKind { self.kind }

    pub fn dim(&self) -> usize { self.dim }

    pub fn is_quantum(&self) -> bool { self.kind == WireKind::Quantum }

    /// Size of the tensor index carried by this wire.
    pub fn index_size(&self) -> usize {
        match self.kind {
            WireKind::Classical => self.dim,
            WireKind::Quantum => self.dim * self.dim,
        }
    }
}

impl fmt::Display for WireType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WireKind::Classical => write!(f, "c{}", self.dim),
            WireKind::Quantum => write!(f, "q{}", self.dim),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result { write!(f, "n{}", self.0) }
}

/// One end of an edge. Sources are `Input` and `Out`; targets are `Output`
/// and `In`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    /// Diagram input position.
    Input(usize),
    /// Diagram output position.
    Output(usize),
    /// Input port of a node.
    In(NodeId, usize),
    /// Output port of a node.
    Out(NodeId, usize),
}

impl Endpoint {
    pub fn is_source(&self) -> bool { matches!(self, Self::Input(_) | Self::Out(..)) }

    pub fn node(&self) -> Option<NodeId> {
        match self {
            Self::In(n, _) | Self::Out(n, _) => Some(*n),
            _ => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: Endpoint,
    pub tgt: Endpoint,
    pub ty: WireType,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Diagram {
    nodes: BTreeMap<NodeId, Generator>,
    edges: Vec<Edge>,
    inputs: Vec<WireType>,
    outputs: Vec<WireType>,
    next_id: u32,
}

impl Diagram {
    /// The empty diagram, unit of parallel composition.
    pub fn empty() -> Self { Self::default() }

    /// Parallel identity wires.
    pub fn identity(types: &[WireType]) -> Self {
        let mut b = DiagramBuilder::new();
        for &t in types {
            let i = b.add_input(t);
            b.add_output(i).expect("identity wiring");
        }
        b.finish().expect("identity wiring")
    }

    /// A single generator with its ports exposed as the boundary in order.
    pub fn from_generator(g: Generator) -> Self {
        let mut b = DiagramBuilder::new();
        let srcs: Vec<Endpoint> = g.inputs().into_iter().map(|t| b.add_input(t)).collect();
        let outs = b.place(g, &srcs).expect("ports match generator");
        for o in outs {
            b.add_output(o).expect("ports match generator");
        }
        b.finish().expect("ports match generator")
    }

    pub fn spider(s: Spider) -> Self { Self::from_generator(Generator::Spider(s)) }

    pub fn boxed(b: BoxGen) -> Self { Self::from_generator(Generator::Box(b)) }

    pub fn scalar(z: C64) -> Self { Self::from_generator(Generator::Scalar(z)) }

    pub fn cup(t: WireType) -> Self { Self::from_generator(Generator::Cup(t)) }

    pub fn cap(t: WireType) -> Self { Self::from_generator(Generator::Cap(t)) }

    pub fn swap(a: WireType, b: WireType) -> Self { Self::from_generator(Generator::Swap(a, b)) }

    /// Classical spider `n -> m` in the computational basis.
    pub fn classical_spider(n: usize, m: usize, d: usize) -> Self { Self::spider(Spider::classical(n, m, d)) }

    /// Quantum (doubled) spider `n -> m`.
    pub fn quantum_spider(n: usize, m: usize, d: usize) -> Self { Self::spider(Spider::quantum(n, m, d)) }

    pub fn copy(d: usize) -> Self { Self::classical_spider(1, 2, d) }

    pub fn delete(d: usize) -> Self { Self::classical_spider(1, 0, d) }

    pub fn measure(d: usize) -> Self {
        Self::spider(Spider::bastard(d, vec![WireType::quantum(d)], vec![WireType::classical(d)]).expect("legs share d"))
    }

    pub fn encode(d: usize) -> Self {
        Self::spider(Spider::bastard(d, vec![WireType::classical(d)], vec![WireType::quantum(d)]).expect("legs share d"))
    }

    /// Encode after measure, as a single bastard spider.
    pub fn decoherence(d: usize) -> Self {
        Self::spider(Spider::bastard(d, vec![WireType::quantum(d)], vec![WireType::quantum(d)]).expect("legs share d"))
    }

    /// Non-demolition measurement: quantum in, classical and quantum out.
    pub fn nondemolition(d: usize) -> Self {
        Self::spider(
            Spider::bastard(d, vec![WireType::quantum(d)], vec![WireType::classical(d), WireType::quantum(d)])
                .expect("legs share d"),
        )
    }

    /// The doubled phase spider `1 -> 1` (a phase gate).
    pub fn phase_gate(p: &PhaseVector) -> Self {
        let d = p.dim();
        Self::spider(Spider::quantum(1, 1, d).with_phase(p.clone()).expect("dimensions agree"))
    }

    /// Classical value `i` as a one-hot state box.
    pub fn classical_value(i: usize, d: usize) -> Self {
        assert!(i < d);
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[i] = C64::new(1.0, 0.0);
        Self::boxed(BoxGen::classical(format!("v{i}"), crate::Tensor::state(v)))
    }

    /// The circle: a cup closed by a cap, whose value is the wire's index size.
    pub fn circle(t: WireType) -> Self {
        compose_seq(&Self::cup(t), &Self::cap(t)).expect("cup and cap agree")
    }

    pub fn inputs(&self) -> &[WireType] { &self.inputs }

    pub fn outputs(&self) -> &[WireType] { &self.outputs }

    pub fn edges(&self) -> &[Edge] { &self.edges }

    pub fn node(&self, id: NodeId) -> Option<&Generator> { self.nodes.get(&id) }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Generator)> { self.nodes.iter().map(|(k, v)| (*k, v)) }

    pub fn node_ids(&self) -> Vec<NodeId> { self.nodes.keys().copied().collect() }

    pub fn node_count(&self) -> usize { self.nodes.len() }

    pub fn edge_count(&self) -> usize { self.edges.len() }

    pub fn is_empty(&self) -> bool { self.nodes.is_empty() && self.edges.is_empty() }

    /// The edge leaving a source endpoint.
    pub fn edge_from(&self, src: Endpoint) -> Option<&Edge> { self.edges.iter().find(|e| e.src == src) }

    /// The edge entering a target endpoint.
    pub fn edge_to(&self, tgt: Endpoint) -> Option<&Edge> { self.edges.iter().find(|e| e.tgt == tgt) }

    /// Edges touching a node, each listed once.
    pub fn edges_at(&self, n: NodeId) -> Vec<Edge> {
        self.edges.iter().filter(|e| e.src.node() == Some(n) || e.tgt.node() == Some(n)).copied().collect()
    }

    /// Distinct nodes joined to `n` by at least one edge.
    pub fn neighbours(&self, n: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edges_at(n)
            .iter()
            .flat_map(|e| [e.src.node(), e.tgt.node()])
            .flatten()
            .filter(|&m| m != n)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Product of all scalar nodes.
    pub fn scalar_factor(&self) -> C64 {
        self.nodes
            .values()
            .filter_map(|g| match g {
                Generator::Scalar(z) => Some(*z),
                _ => None,
            })
            .product()
    }

    /// Check every structural invariant.
    pub fn validate(&self) -> DiagramResult<()> {
        let mut seen_src = std::collections::HashSet::new();
        let mut seen_tgt = std::collections::HashSet::new();
        for e in &self.edges {
            if !e.src.is_source() || e.tgt.is_source() {
                return Err(DiagramError::InvalidWiring(format!("edge {:?} -> {:?} has wrong orientation", e.src, e.tgt)));
            }
            if self.source_type(e.src)? != e.ty || self.target_type(e.tgt)? != e.ty {
                return Err(DiagramError::InvalidWiring(format!("edge {:?} -> {:?} joins different wire types", e.src, e.tgt)));
            }
            if !seen_src.insert(e.src) || !seen_tgt.insert(e.tgt) {
                return Err(DiagramError::InvalidWiring(format!("port used twice by edge {:?} -> {:?}", e.src, e.tgt)));
            }
        }
        let expected_src = self.inputs.len() + self.nodes.values().map(|g| g.outputs().len()).sum::<usize>();
        let expected_tgt = self.outputs.len() + self.nodes.values().map(|g| g.inputs().len()).sum::<usize>();
        if seen_src.len() != expected_src || seen_tgt.len() != expected_tgt {
            return Err(DiagramError::InvalidWiring("dangling port".into()));
        }
        Ok(())
    }

    pub(crate) fn source_type(&self, src: Endpoint) -> DiagramResult<WireType> {
        match src {
            Endpoint::Input(i) => self.inputs.get(i).copied(),
            Endpoint::Out(n, k) => self.nodes.get(&n).and_then(|g| g.outputs().get(k).copied()),
            _ => None,
        }
        .ok_or_else(|| DiagramError::InvalidWiring(format!("{src:?} is not a source endpoint of this diagram")))
    }

    pub(crate) fn target_type(&self, tgt: Endpoint) -> DiagramResult<WireType> {
        match tgt {
            Endpoint::Output(j) => self.outputs.get(j).copied(),
            Endpoint::In(n, k) => self.nodes.get(&n).and_then(|g| g.inputs().get(k).copied()),
            _ => None,
        }
        .ok_or_else(|| DiagramError::InvalidWiring(format!("{tgt:?} is not a target endpoint of this diagram")))
    }

    // Low-level editing used by the rewriter. Callers restore the invariants
    // before handing the diagram out.

    pub(crate) fn insert_node(&mut self, g: Generator) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        self.nodes.insert(id, g);
        id
    }

    pub(crate) fn replace_node(&mut self, id: NodeId, g: Generator) { self.nodes.insert(id, g); }

    /// Remove a node and every edge touching it, returning the removed edges.
    pub(crate) fn remove_node(&mut self, id: NodeId) -> Vec<Edge> {
        self.nodes.remove(&id);
        let (gone, keep): (Vec<Edge>, Vec<Edge>) =
            self.edges.drain(..).partition(|e| e.src.node() == Some(id) || e.tgt.node() == Some(id));
        self.edges = keep;
        gone
    }

    pub(crate) fn remove_edge(&mut self, e: &Edge) { self.edges.retain(|x| x != e); }

    pub(crate) fn push_edge(&mut self, src: Endpoint, tgt: Endpoint, ty: WireType) {
        self.edges.push(Edge { src, tgt, ty });
        self.edges.sort();
    }

    pub(crate) fn raw_parts(&self) -> (&BTreeMap<NodeId, Generator>, u32) { (&self.nodes, self.next_id) }

    pub(crate) fn from_raw(
        nodes: BTreeMap<NodeId, Generator>,
        mut edges: Vec<Edge>,
        inputs: Vec<WireType>,
        outputs: Vec<WireType>,
        next_id: u32,
    ) -> Self {
        edges.sort();
        Self { nodes, edges, inputs, outputs, next_id }
    }

    /// A deterministic text dump: node list then edge list. Two diagrams with
    /// the same dump are structurally identical.
    pub fn canonical_dump(&self) -> String {
        let mut s = String::new();
        let list = |ws: &[WireType]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
        s.push_str(&format!("in {}\nout {}\n", list(&self.inputs), list(&self.outputs)));
        for (id, g) in &self.nodes {
            s.push_str(&format!("{id} {g}"));
            if let Generator::Box(b) = g {
                for z in b.payload().data() {
                    s.push_str(&format!(" {:?},{:?}", z.re, z.im));
                }
            }
            if let Generator::Spider(sp) = g {
                if let Some(p) = sp.phase() {
                    for z in p.components() {
                        s.push_str(&format!(" {:?},{:?}", z.re, z.im));
                    }
                }
            }
            s.push('\n');
        }
        for e in &self.edges {
            s.push_str(&format!("{} -> {} {}\n", fmt_endpoint(e.src), fmt_endpoint(e.tgt), e.ty));
        }
        s
    }
}

fn fmt_endpoint(e: Endpoint) -> String {
    match e {
        Endpoint::Input(i) => format!("in[{i}]"),
        Endpoint::Output(j) => format!("out[{j}]"),
        Endpoint::In(n, k) => format!("{n}.in{k}"),
        Endpoint::Out(n, k) => format!("{n}.out{k}"),
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ws: &[WireType]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ");
        writeln!(f, "diagram [{}] -> [{}]", list(&self.inputs), list(&self.outputs))?;
        for (id, g) in &self.nodes {
            writeln!(f, "  {id}: {g}")?;
        }
        for e in &self.edges {
            writeln!(f, "  {} -> {} : {}", fmt_endpoint(e.src), fmt_endpoint(e.tgt), e.ty)?;
        }
        Ok(())
    }
}

/// Incremental construction of a [`Diagram`] by wiring endpoints.
///
/// ```
/// use cqdiag::{DiagramBuilder, WireType, Generator};
/// use cqdiag::diagram::Spider;
///
/// let mut b = DiagramBuilder::new();
/// let x = b.add_input(WireType::classical(2));
/// let outs = b.place(Generator::Spider(Spider::classical(1, 2, 2)), &[x]).unwrap();
/// for o in outs {
///     b.add_output(o).unwrap();
/// }
/// let copy = b.finish().unwrap();
/// assert_eq!(copy.outputs().len(), 2);
/// ```
#[derive(Default)]
pub struct DiagramBuilder {
    d: Diagram,
}

impl DiagramBuilder {
    pub fn new() -> Self { Self::default() }

    /// Append a boundary input and return it as a source endpoint.
    pub fn add_input(&mut self, t: WireType) -> Endpoint {
        self.d.inputs.push(t);
        Endpoint::Input(self.d.inputs.len() - 1)
    }

    pub fn add_node(&mut self, g: Generator) -> NodeId { self.d.insert_node(g) }

    pub fn connect(&mut self, src: Endpoint, tgt: Endpoint) -> DiagramResult<()> {
        let ts = self.d.source_type(src)?;
        let tt = self.d.target_type(tgt)?;
        if ts != tt {
            return Err(DiagramError::BoundaryMismatch(format!("cannot connect {ts} to {tt}")));
        }
        if self.d.edges.iter().any(|e| e.src == src || e.tgt == tgt) {
            return Err(DiagramError::InvalidWiring(format!("{src:?} or {tgt:?} already connected")));
        }
        self.d.edges.push(Edge { src, tgt, ty: ts });
        Ok(())
    }

    /// Append a boundary output fed by `src`.
    pub fn add_output(&mut self, src: Endpoint) -> DiagramResult<()> {
        let t = self.d.source_type(src)?;
        self.d.outputs.push(t);
        let j = self.d.outputs.len() - 1;
        self.connect(src, Endpoint::Output(j))
    }

    /// Add a generator whose inputs are fed by `srcs`, returning its outputs.
    pub fn place(&mut self, g: Generator, srcs: &[Endpoint]) -> DiagramResult<Vec<Endpoint>> {
        let n_in = g.inputs().len();
        if n_in != srcs.len() {
            return Err(DiagramError::BoundaryMismatch(format!("generator takes {n_in} inputs, {} given", srcs.len())));
        }
        let n_out = g.outputs().len();
        let id = self.add_node(g);
        for (k, &s) in srcs.iter().enumerate() {
            self.connect(s, Endpoint::In(id, k))?;
        }
        Ok((0..n_out).map(|k| Endpoint::Out(id, k)).collect())
    }

    /// Copy a whole diagram in, feeding its inputs from `srcs`; returns the
    /// sources that drive its outputs.
    pub fn embed(&mut self, sub: &Diagram, srcs: &[Endpoint]) -> DiagramResult<Vec<Endpoint>> {
        if sub.inputs.len() != srcs.len() {
            return Err(DiagramError::BoundaryMismatch(format!(
                "diagram takes {} inputs, {} given",
                sub.inputs.len(),
                srcs.len()
            )));
        }
        for (k, (&s, t)) in srcs.iter().zip(&sub.inputs).enumerate() {
            let ts = self.d.source_type(s)?;
            if ts != *t {
                return Err(DiagramError::BoundaryMismatch(format!("input {k}: expected {t}, found {ts}")));
            }
        }
        let mut map = BTreeMap::new();
        for (&id, g) in &sub.nodes {
            map.insert(id, self.add_node(g.clone()));
        }
        let src_of = |e: Endpoint| match e {
            Endpoint::Input(i) => srcs[i],
            Endpoint::Out(n, k) => Endpoint::Out(map[&n], k),
            _ => unreachable!("edges start at sources"),
        };
        let mut outs = vec![None; sub.outputs.len()];
        for e in &sub.edges {
            let s = src_of(e.src);
            match e.tgt {
                Endpoint::Output(j) => outs[j] = Some(s),
                Endpoint::In(n, k) => self.connect(s, Endpoint::In(map[&n], k))?,
                _ => unreachable!("edges end at targets"),
            }
        }
        outs.into_iter()
            .map(|o| o.ok_or_else(|| DiagramError::InvalidWiring("sub-diagram output is not driven".into())))
            .collect()
    }

    pub fn finish(mut self) -> DiagramResult<Diagram> {
        self.d.edges.sort();
        self.d.validate()?;
        Ok(self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_rejects_dangling_port() {
        let mut b = DiagramBuilder::new();
        let x = b.add_input(WireType::classical(2));
        b.place(Generator::Spider(Spider::classical(1, 2, 2)), &[x]).unwrap();
        assert!(b.finish().is_err());
    }

    #[test]
    fn builder_rejects_type_mismatch() {
        let mut b = DiagramBuilder::new();
        let x = b.add_input(WireType::classical(2));
        assert!(b.place(Generator::Spider(Spider::quantum(1, 1, 2)), &[x]).is_err());
    }

    #[test]
    fn identity_has_no_nodes() {
        let id = Diagram::identity(&[WireType::quantum(2), WireType::classical(3)]);
        assert_eq!(id.node_count(), 0);
        assert_eq!(id.edge_count(), 2);
        id.validate().unwrap();
    }

    #[test]
    fn wire_type_display() {
        assert_eq!(WireType::quantum(3).to_string(), "q3");
        assert_eq!(WireType::classical(2).index_size(), 2);
        assert_eq!(WireType::quantum(2).index_size(), 4);
    }
}
