//! Seeded random generators for diagrams, phases and payloads.
//!
//! Everything takes an explicit [`Rng`] so that suites are reproducible from
//! a seed.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diagram::{compose_par, compose_seq, BoxGen, Diagram, DiagramBuilder, Endpoint, Family, Generator, Heads, NodeId, Spider, WireKind, WireType};
use crate::phases::PhaseVector;
use crate::tensor::Tensor;
use crate::C64;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng { ChaCha8Rng::seed_from_u64(seed) }

pub fn random_complex(rng: &mut Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn random_phase(rng: &mut Rng, d: usize) -> PhaseVector {
    let angles: Vec<f64> = (0..d).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
    PhaseVector::from_angles(&angles).expect("non-empty")
}

pub fn random_tensor(rng: &mut Rng, in_shape: &[usize], out_shape: &[usize]) -> Tensor {
    let n: usize = in_shape.iter().chain(out_shape).product();
    Tensor::new(in_shape, out_shape, (0..n).map(|_| random_complex(rng)).collect()).expect("shape from dims")
}

/// A plain box with Gaussian payload on the given legs.
pub fn random_box(rng: &mut Rng, name: &str, inputs: Vec<WireType>, outputs: Vec<WireType>) -> BoxGen {
    let ins: Vec<usize> = inputs.iter().map(WireType::index_size).collect();
    let outs: Vec<usize> = outputs.iter().map(WireType::index_size).collect();
    BoxGen::plain(name, random_tensor(rng, &ins, &outs), inputs, outputs).expect("payload sized from legs")
}

/// Shape of random spider-only diagrams.
#[derive(Clone, Debug)]
pub struct SpiderDiagramConfig {
    pub dim: usize,
    pub family: Family,
    pub max_nodes: usize,
    pub max_edges: usize,
    /// Allow quantum wires, doubled spiders and bastard spiders.
    pub quantum: bool,
    pub phase_prob: f64,
    /// Probability that an edge end sits on the boundary.
    pub boundary_prob: f64,
}

impl SpiderDiagramConfig {
    pub fn new(dim: usize) -> Self {
        Self { dim, family: Family::Onb, max_nodes: 8, max_edges: 10, quantum: true, phase_prob: 0.3, boundary_prob: 0.25 }
    }
}

/// A random diagram made only of spiders of one family, built edge first:
/// every edge picks a type and two ends, and the spiders' legs are whatever
/// their edges require.
pub fn random_spider_diagram(rng: &mut Rng, cfg: &SpiderDiagramConfig) -> Diagram {
    let d = cfg.dim;
    let n = rng.random_range(1..=cfg.max_nodes.max(1));
    let m = rng.random_range(0..=cfg.max_edges);
    #[derive(Clone, Copy)]
    enum End {
        Boundary,
        Node(usize),
    }
    let mut edges = Vec::new();
    let mut legs_in = vec![Vec::new(); n];
    let mut legs_out = vec![Vec::new(); n];
    for _ in 0..m {
        let ty = if cfg.quantum && rng.random_bool(0.5) { WireType::quantum(d) } else { WireType::classical(d) };
        let mut end = || if rng.random_bool(cfg.boundary_prob) { End::Boundary } else { End::Node(rng.random_range(0..n)) };
        let (s, t) = (end(), end());
        if let End::Node(k) = s {
            legs_out[k].push(ty);
        }
        if let End::Node(k) = t {
            legs_in[k].push(ty);
        }
        edges.push((s, t, ty));
    }
    let mut b = DiagramBuilder::new();
    let ids: Vec<NodeId> = (0..n)
        .map(|k| {
            let any_classical = legs_in[k].iter().chain(&legs_out[k]).any(|w| w.kind() == WireKind::Classical);
            let heads = if any_classical || !cfg.quantum || rng.random_bool(0.5) { Heads::Single } else { Heads::Double };
            let phase = rng.random_bool(cfg.phase_prob).then(|| random_phase(rng, d));
            let s = Spider::new(cfg.family, d, heads, legs_in[k].clone(), legs_out[k].clone(), phase).expect("legs share d");
            b.add_node(Generator::Spider(s))
        })
        .collect();
    let (mut next_in, mut next_out) = (vec![0; n], vec![0; n]);
    for (s, t, ty) in edges {
        let src = match s {
            End::Boundary => b.add_input(ty),
            End::Node(k) => {
                next_out[k] += 1;
                Endpoint::Out(ids[k], next_out[k] - 1)
            }
        };
        match t {
            End::Boundary => b.add_output(src).expect("fresh output"),
            End::Node(k) => {
                next_in[k] += 1;
                b.connect(src, Endpoint::In(ids[k], next_in[k] - 1)).expect("types follow edges");
            }
        }
    }
    b.finish().expect("every leg was created by an edge")
}

fn spider_gen(d: &Diagram, n: NodeId) -> Option<Spider> { d.node(n).and_then(Generator::as_spider).cloned() }

/// Apply `moves` random value-preserving expansions to a spider diagram:
/// splitting a spider in two, inserting an identity spider on an edge, or
/// adding a self-loop. The result is numerically equal to the input but in
/// general not isomorphic to it.
pub fn random_equal_variant(rng: &mut Rng, d: &Diagram, moves: usize) -> Diagram {
    let mut out = d.clone();
    for _ in 0..moves {
        let spiders: Vec<NodeId> = out.nodes().filter(|(_, g)| g.as_spider().is_some()).map(|(id, _)| id).collect();
        match rng.random_range(0..3) {
            0 if !spiders.is_empty() => {
                let n = spiders[rng.random_range(0..spiders.len())];
                out = split_spider(rng, &out, n);
            }
            1 if out.edge_count() > 0 => {
                let e = out.edges()[rng.random_range(0..out.edge_count())];
                out = insert_identity(&out, e);
            }
            2 if !spiders.is_empty() => {
                let n = spiders[rng.random_range(0..spiders.len())];
                out = add_self_loop(rng, &out, n);
            }
            _ => {}
        }
    }
    out
}

/// Replace spider `n` by two spiders joined by one edge, distributing its
/// legs at random and splitting its phase as a product.
pub fn split_spider(rng: &mut Rng, d: &Diagram, n: NodeId) -> Diagram {
    let s = spider_gen(d, n).expect("node is a spider");
    let dim = s.dim();
    // which part gets each leg
    let side_in: Vec<bool> = s.inputs().iter().map(|_| rng.random_bool(0.5)).collect();
    let side_out: Vec<bool> = s.outputs().iter().map(|_| rng.random_bool(0.5)).collect();
    let pick = |legs: &[WireType], side: &[bool], want: bool| -> Vec<WireType> {
        legs.iter().zip(side).filter(|(_, &x)| x == want).map(|(w, _)| *w).collect()
    };
    let (in1, in2) = (pick(s.inputs(), &side_in, false), pick(s.inputs(), &side_in, true));
    let (out1, out2) = (pick(s.outputs(), &side_out, false), pick(s.outputs(), &side_out, true));
    // a single-headed spider may shed an all-quantum part as a doubled spider
    let part2_all_quantum = in2.iter().chain(&out2).all(|w| w.is_quantum());
    let bastard_split = s.heads() == Heads::Single && part2_all_quantum && rng.random_bool(0.3);
    let link = if s.heads() == Heads::Double || bastard_split || rng.random_bool(0.5) {
        WireType::quantum(dim)
    } else {
        WireType::classical(dim)
    };
    let (p1, p2) = match (s.phase(), bastard_split) {
        (p, true) => (p.cloned(), Some(random_phase(rng, dim))),
        (None, false) => (None, None),
        (Some(p), false) => {
            let beta = random_phase(rng, dim);
            (Some(p.sum(&beta.inverse()).expect("same dim")), Some(beta))
        }
    };
    let heads2 = if bastard_split { Heads::Double } else { s.heads() };
    let mut out1_legs = out1.clone();
    out1_legs.push(link);
    let mut in2_legs = in2.clone();
    in2_legs.push(link);
    let s1 = Spider::new(s.family(), dim, s.heads(), in1.clone(), out1_legs, p1).expect("legs share d");
    let s2 = Spider::new(s.family(), dim, heads2, in2_legs, out2.clone(), p2).expect("legs share d");

    let mut g = d.clone();
    let edges = g.remove_node(n);
    let a = g.insert_node(Generator::Spider(s1));
    let b = g.insert_node(Generator::Spider(s2));
    let (mut c1i, mut c2i, mut c1o, mut c2o) = (0, 0, 0, 0);
    let in_map: Vec<Endpoint> = side_in
        .iter()
        .map(|&x| if x { c2i += 1; Endpoint::In(b, c2i - 1) } else { c1i += 1; Endpoint::In(a, c1i - 1) })
        .collect();
    let out_map: Vec<Endpoint> = side_out
        .iter()
        .map(|&x| if x { c2o += 1; Endpoint::Out(b, c2o - 1) } else { c1o += 1; Endpoint::Out(a, c1o - 1) })
        .collect();
    let remap = |e: Endpoint| match e {
        Endpoint::In(m, k) if m == n => in_map[k],
        Endpoint::Out(m, k) if m == n => out_map[k],
        other => other,
    };
    for e in edges {
        g.push_edge(remap(e.src), remap(e.tgt), e.ty);
    }
    g.push_edge(Endpoint::Out(a, out1.len()), Endpoint::In(b, in2.len()), link);
    g
}

/// Put an unphased identity spider on edge `e`.
pub fn insert_identity(d: &Diagram, e: crate::diagram::Edge) -> Diagram {
    let dim = e.ty.dim();
    let s = match e.ty.kind() {
        WireKind::Classical => Spider::classical(1, 1, dim),
        WireKind::Quantum => Spider::quantum(1, 1, dim),
    };
    let mut g = d.clone();
    g.remove_edge(&e);
    let n = g.insert_node(Generator::Spider(s));
    g.push_edge(e.src, Endpoint::In(n, 0), e.ty);
    g.push_edge(Endpoint::Out(n, 0), e.tgt, e.ty);
    g
}

/// Give spider `n` an extra output leg wired back into an extra input leg.
pub fn add_self_loop(rng: &mut Rng, d: &Diagram, n: NodeId) -> Diagram {
    let s = spider_gen(d, n).expect("node is a spider");
    let dim = s.dim();
    let ty = if s.heads() == Heads::Double || rng.random_bool(0.3) { WireType::quantum(dim) } else { WireType::classical(dim) };
    let mut ins = s.inputs().to_vec();
    let mut outs = s.outputs().to_vec();
    ins.push(ty);
    outs.push(ty);
    let ns = Spider::new(s.family(), dim, s.heads(), ins, outs, s.phase().cloned()).expect("legs share d");
    let mut g = d.clone();
    g.replace_node(n, Generator::Spider(ns));
    g.push_edge(Endpoint::Out(n, s.outputs().len()), Endpoint::In(n, s.inputs().len()), ty);
    g
}

/// Change the phase of one spider that has legs, or add a scalar if there
/// is none. Intended to produce an unequal partner diagram.
pub fn random_mutation(rng: &mut Rng, d: &Diagram) -> Diagram {
    let spiders: Vec<(NodeId, Spider)> = d
        .nodes()
        .filter_map(|(id, g)| g.as_spider().filter(|s| s.arity() > 0).map(|s| (id, s.clone())))
        .collect();
    let mut g = d.clone();
    if spiders.is_empty() {
        g.insert_node(Generator::Scalar(C64::new(2.0, 0.0)));
        return g;
    }
    let (id, s) = spiders[rng.random_range(0..spiders.len())].clone();
    let p = random_phase(rng, s.dim());
    g.replace_node(id, Generator::Spider(s.with_phase(p).expect("same dim")));
    g
}

/// A random plain (classical) diagram of at most `layers` generators, built
/// as a sequence of layers each holding one generator beside identities.
/// Generators are spiders, boxes, cups, caps, swaps and scalars on wires of
/// dimension `d`; at most `max_wires` wires are live at any point.
pub fn random_plain_diagram(rng: &mut Rng, d: usize, n_inputs: usize, layers: usize, max_wires: usize) -> Diagram {
    let w = WireType::classical(d);
    let mut wires = n_inputs;
    let mut diag = Diagram::identity(&vec![w; wires]);
    for layer in 0..layers {
        let choice = rng.random_range(0..6);
        let (consume, gen) = match choice {
            0 | 1 => {
                let k = rng.random_range(0..=wires.min(2));
                let room = max_wires + k - wires;
                let m = rng.random_range(0..=room.min(2));
                if choice == 0 {
                    let mut s = Spider::classical(k, m, d);
                    if rng.random_bool(0.3) {
                        s = s.with_phase(random_phase(rng, d)).expect("same dim");
                    }
                    (k, Generator::Spider(s))
                } else {
                    (k, Generator::Box(random_box(rng, &format!("B{layer}"), vec![w; k], vec![w; m])))
                }
            }
            2 if wires + 2 <= max_wires => (0, Generator::Cup(w)),
            3 if wires >= 2 => (2, Generator::Cap(w)),
            4 if wires >= 2 => (2, Generator::Swap(w, w)),
            _ => (0, Generator::Scalar(random_complex(rng))),
        };
        let pos = rng.random_range(0..=wires - consume);
        let left = Diagram::identity(&vec![w; pos]);
        let right = Diagram::identity(&vec![w; wires - pos - consume]);
        let produced = gen.outputs().len();
        let slice = compose_par(&compose_par(&left, &Diagram::from_generator(gen)), &right);
        diag = compose_seq(&diag, &slice).expect("layer fits the live wires");
        wires = wires - consume + produced;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{evaluate, NumericTolerance};

    #[test]
    fn spider_diagrams_are_valid_and_reproducible() {
        let cfg = SpiderDiagramConfig::new(2);
        for seed in 0..50 {
            let a = random_spider_diagram(&mut seeded(seed), &cfg);
            let b = random_spider_diagram(&mut seeded(seed), &cfg);
            a.validate().unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn equal_variants_evaluate_equal() {
        let mut rng = seeded(3);
        let cfg = SpiderDiagramConfig { max_edges: 6, ..SpiderDiagramConfig::new(2) };
        for _ in 0..40 {
            let a = random_spider_diagram(&mut rng, &cfg);
            let b = random_equal_variant(&mut rng, &a, 3);
            b.validate().unwrap();
            let (ta, tb) = (evaluate(&a).unwrap(), evaluate(&b).unwrap());
            assert!(ta.approx_eq(&tb, NumericTolerance::strict(1e-9)), "{a}\n{b}");
        }
    }

    #[test]
    fn plain_diagrams_are_valid() {
        let mut rng = seeded(4);
        for _ in 0..50 {
            let d = random_plain_diagram(&mut rng, 2, 2, 6, 4);
            d.validate().unwrap();
            assert!(d.inputs().iter().all(|w| w.kind() == WireKind::Classical));
        }
    }
}
