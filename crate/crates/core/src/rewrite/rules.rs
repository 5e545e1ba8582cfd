//! The oriented rewrite rules: matchers, appliers and left-hand-side samplers.
//!
//! Matchers are anchored at one node and return the participating nodes in
//! a fixed order. Appliers re-check every side condition, so an arbitrary
//! node list is rejected rather than misapplied.

use rand::Rng as _;

use super::surgery::{rebuild, splice};
use crate::diagram::{
    compose_par, compose_seq, dagger, BoxGen, Diagram, DiagramBuilder, Endpoint, Family, Generator, Heads, NodeId,
    Spider, WireKind, WireType,
};
use crate::linalg::{haar_unitary, CMatrix};
use crate::random::{
    add_self_loop, insert_identity, random_box, random_complex, random_phase, random_spider_diagram, Rng,
    SpiderDiagramConfig,
};
use crate::tensor::Tensor;
use crate::C64;

const UNIT_TOL: f64 = 1e-12;
const PAYLOAD_TOL: f64 = 1e-9;

fn gen(d: &Diagram, n: NodeId) -> Option<&Generator> { d.node(n) }

fn spider(d: &Diagram, n: NodeId) -> Option<&Spider> { d.node(n).and_then(Generator::as_spider) }

fn scalar(d: &Diagram, n: NodeId) -> Option<C64> {
    match d.node(n)? {
        Generator::Scalar(z) => Some(*z),
        _ => None,
    }
}

fn zero() -> C64 { C64::new(0.0, 0.0) }

// ---------------------------------------------------------------- zero

/// The normal form of every diagram whose value is exactly zero: a zero
/// scalar, one deleting spider per input and one creating spider per output.
pub fn canonical_zero(inputs: &[WireType], outputs: &[WireType]) -> Diagram {
    let mut b = DiagramBuilder::new();
    b.add_node(Generator::Scalar(zero()));
    for &t in inputs {
        let src = b.add_input(t);
        let s = Spider::new(Family::Onb, t.dim(), Heads::Single, vec![t], vec![], None).expect("one leg");
        b.place(Generator::Spider(s), &[src]).expect("types agree");
    }
    for &t in outputs {
        let s = Spider::new(Family::Onb, t.dim(), Heads::Single, vec![], vec![t], None).expect("one leg");
        let out = b.place(Generator::Spider(s), &[]).expect("no inputs");
        b.add_output(out[0]).expect("fresh output");
    }
    b.finish().expect("canonical zero is well formed")
}

pub fn is_canonical_zero(d: &Diagram) -> bool {
    d.canonical_dump() == canonical_zero(d.inputs(), d.outputs()).canonical_dump()
}

pub(crate) fn find_zero(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    (scalar(d, n)? == zero() && !is_canonical_zero(d)).then(|| vec![n])
}

pub(crate) fn apply_zero(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    find_zero(d, *m.first()?)?;
    Some(canonical_zero(d.inputs(), d.outputs()))
}

// ---------------------------------------------------------------- structure

pub(crate) fn find_swap(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    matches!(gen(d, n)?, Generator::Swap(..)).then(|| vec![n])
}

pub(crate) fn apply_swap(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let n = *m.first()?;
    find_swap(d, n)?;
    splice(
        d,
        &[n],
        &[(Endpoint::In(n, 0), Endpoint::Out(n, 1)), (Endpoint::In(n, 1), Endpoint::Out(n, 0))],
    )
}

fn cup_cap_pair(d: &Diagram, a: NodeId, b: NodeId) -> Option<(NodeId, NodeId)> {
    match (gen(d, a)?, gen(d, b)?) {
        (Generator::Cup(_), Generator::Cap(_)) => Some((a, b)),
        (Generator::Cap(_), Generator::Cup(_)) => Some((b, a)),
        _ => None,
    }
}

pub(crate) fn find_yank(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    d.neighbours(n).into_iter().find(|&m| cup_cap_pair(d, n, m).is_some()).map(|m| vec![n, m])
}

pub(crate) fn apply_yank(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let [a, b] = m else { return None };
    let (cup, cap) = cup_cap_pair(d, *a, *b)?;
    if !d.neighbours(cup).contains(&cap) {
        return None;
    }
    splice(
        d,
        &[cup, cap],
        &[(Endpoint::Out(cup, 0), Endpoint::Out(cup, 1)), (Endpoint::In(cap, 0), Endpoint::In(cap, 1))],
    )
}

fn leg_spider(t: WireType, n_in: usize, n_out: usize) -> Spider {
    let heads = if t.is_quantum() { Heads::Double } else { Heads::Single };
    Spider::new(Family::Onb, t.dim(), heads, vec![t; n_in], vec![t; n_out], None).expect("uniform legs")
}

pub(crate) fn find_cup(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    matches!(gen(d, n)?, Generator::Cup(_)).then(|| vec![n])
}

pub(crate) fn apply_cup(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let n = *m.first()?;
    let Generator::Cup(t) = gen(d, n)? else { return None };
    let mut g = d.clone();
    g.replace_node(n, Generator::Spider(leg_spider(*t, 0, 2)));
    Some(g)
}

pub(crate) fn find_cap(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    matches!(gen(d, n)?, Generator::Cap(_)).then(|| vec![n])
}

pub(crate) fn apply_cap(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let n = *m.first()?;
    let Generator::Cap(t) = gen(d, n)? else { return None };
    let mut g = d.clone();
    g.replace_node(n, Generator::Spider(leg_spider(*t, 2, 0)));
    Some(g)
}

// ---------------------------------------------------------------- spiders

pub(crate) fn find_legless(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    (spider(d, n)?.arity() == 0).then(|| vec![n])
}

pub(crate) fn apply_legless(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let n = *m.first()?;
    find_legless(d, n)?;
    let value = gen(d, n)?.tensor().ok()?.as_scalar()?;
    let mut g = d.clone();
    g.replace_node(n, Generator::Scalar(value));
    Some(g)
}

pub(crate) fn find_self_loop(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    spider(d, n)?;
    d.edges_at(n).iter().any(|e| e.src.node() == Some(n) && e.tgt.node() == Some(n)).then(|| vec![n])
}

pub(crate) fn apply_self_loop(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let n = *m.first()?;
    let s = spider(d, n)?;
    let e = d.edges_at(n).into_iter().find(|e| e.src.node() == Some(n) && e.tgt.node() == Some(n))?;
    let (Endpoint::Out(_, l), Endpoint::In(_, k)) = (e.src, e.tgt) else { return None };
    let mut ins = s.inputs().to_vec();
    let mut outs = s.outputs().to_vec();
    ins.remove(k);
    outs.remove(l);
    let ns = Spider::new(s.family(), s.dim(), s.heads(), ins, outs, s.phase().cloned()).ok()?;
    Some(rebuild(d, &[n], vec![Generator::Spider(ns)], |p, new| match p {
        Endpoint::In(_, j) if j == k => None,
        Endpoint::Out(_, j) if j == l => None,
        Endpoint::In(_, j) => Some(Endpoint::In(new[0], j - usize::from(j > k))),
        Endpoint::Out(_, j) => Some(Endpoint::Out(new[0], j - usize::from(j > l))),
        other => Some(other),
    }))
}

#[derive(Copy, Clone, PartialEq)]
enum FusionKind {
    Plain,
    Phased,
    Mixed,
}

fn fusion_kind(a: &Spider, b: &Spider) -> Option<FusionKind> {
    if a.family() != b.family() || a.dim() != b.dim() {
        return None;
    }
    Some(if a.heads() != b.heads() {
        FusionKind::Mixed
    } else if a.phase().is_none() && b.phase().is_none() {
        FusionKind::Plain
    } else {
        FusionKind::Phased
    })
}

fn find_fusion(d: &Diagram, n: NodeId, kind: FusionKind) -> Option<Vec<NodeId>> {
    let a = spider(d, n)?;
    d.neighbours(n)
        .into_iter()
        .filter(|&m| m != n)
        .find(|&m| spider(d, m).and_then(|b| fusion_kind(a, b)) == Some(kind))
        .map(|m| vec![n, m])
}

pub(crate) fn find_spider_fusion(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> { find_fusion(d, n, FusionKind::Plain) }

pub(crate) fn find_phase_fusion(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> { find_fusion(d, n, FusionKind::Phased) }

pub(crate) fn find_mixed_fusion(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> { find_fusion(d, n, FusionKind::Mixed) }

pub(crate) fn apply_spider_fusion(d: &Diagram, m: &[NodeId]) -> Option<Diagram> { apply_fusion(d, m, FusionKind::Plain) }

pub(crate) fn apply_phase_fusion(d: &Diagram, m: &[NodeId]) -> Option<Diagram> { apply_fusion(d, m, FusionKind::Phased) }

pub(crate) fn apply_mixed_fusion(d: &Diagram, m: &[NodeId]) -> Option<Diagram> { apply_fusion(d, m, FusionKind::Mixed) }

fn apply_fusion(d: &Diagram, m: &[NodeId], kind: FusionKind) -> Option<Diagram> {
    let &[a, b] = m else { return None };
    if a == b || !d.neighbours(a).contains(&b) {
        return None;
    }
    let (sa, sb) = (spider(d, a)?, spider(d, b)?);
    if fusion_kind(sa, sb)? != kind {
        return None;
    }
    let joins = |e: &crate::diagram::Edge| {
        matches!((e.src.node(), e.tgt.node()), (Some(x), Some(y)) if (x == a && y == b) || (x == b && y == a))
    };
    let internal: Vec<_> = d.edges().iter().filter(|e| joins(e)).copied().collect();
    let kept = |n: NodeId, s: &Spider| -> (Vec<usize>, Vec<usize>) {
        let ins = (0..s.inputs().len()).filter(|&k| !internal.iter().any(|e| e.tgt == Endpoint::In(n, k))).collect();
        let outs = (0..s.outputs().len()).filter(|&k| !internal.iter().any(|e| e.src == Endpoint::Out(n, k))).collect();
        (ins, outs)
    };
    let (a_in, a_out) = kept(a, sa);
    let (b_in, b_out) = kept(b, sb);
    let inputs: Vec<WireType> = a_in.iter().map(|&k| sa.inputs()[k]).chain(b_in.iter().map(|&k| sb.inputs()[k])).collect();
    let outputs: Vec<WireType> =
        a_out.iter().map(|&k| sa.outputs()[k]).chain(b_out.iter().map(|&k| sb.outputs()[k])).collect();
    let phase = match (sa.heads(), sb.heads()) {
        (Heads::Single, Heads::Double) => sa.phase().cloned(),
        (Heads::Double, Heads::Single) => sb.phase().cloned(),
        _ => match (sa.phase(), sb.phase()) {
            (Some(p), Some(q)) => Some(p.sum(q).ok()?),
            (p, q) => p.or(q).cloned(),
        },
    };
    let heads = if sa.heads() == Heads::Single || sb.heads() == Heads::Single { Heads::Single } else { Heads::Double };
    let fused = Spider::new(sa.family(), sa.dim(), heads, inputs, outputs, phase).ok()?;
    let pos = |list: &[usize], k: usize| list.iter().position(|&x| x == k);
    Some(rebuild(d, &[a, b], vec![Generator::Spider(fused)], |p, new| {
        let f = new[0];
        match p {
            Endpoint::In(n, k) if n == a => pos(&a_in, k).map(|i| Endpoint::In(f, i)),
            Endpoint::In(n, k) if n == b => pos(&b_in, k).map(|i| Endpoint::In(f, a_in.len() + i)),
            Endpoint::Out(n, k) if n == a => pos(&a_out, k).map(|i| Endpoint::Out(f, i)),
            Endpoint::Out(n, k) if n == b => pos(&b_out, k).map(|i| Endpoint::Out(f, a_out.len() + i)),
            other => Some(other),
        }
    }))
}

fn is_identity_spider(s: &Spider) -> bool {
    s.inputs().len() == 1
        && s.outputs().len() == 1
        && s.inputs()[0] == s.outputs()[0]
        && s.phase().is_none()
        && (s.heads() == Heads::Double || s.inputs()[0].kind() == WireKind::Classical)
}

pub(crate) fn find_identity(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    is_identity_spider(spider(d, n)?).then(|| vec![n])
}

pub(crate) fn apply_identity(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let n = *m.first()?;
    find_identity(d, n)?;
    splice(d, &[n], &[(Endpoint::In(n, 0), Endpoint::Out(n, 0))])
}

// ---------------------------------------------------------------- boxes

/// Index `i` if the tensor is the basis vector `|i>` on a wire of type `t`
/// (`|ii>` for a quantum wire).
fn one_hot(t: &Tensor, ty: WireType) -> Option<usize> {
    let mut hot = None;
    for (p, z) in t.data().iter().enumerate() {
        if (z - 1.0).norm() <= UNIT_TOL {
            if hot.is_some() {
                return None;
            }
            hot = Some(p);
        } else if z.norm() > UNIT_TOL {
            return None;
        }
    }
    let p = hot?;
    match ty.kind() {
        WireKind::Classical => Some(p),
        WireKind::Quantum => (p / ty.dim() == p % ty.dim()).then(|| p / ty.dim()),
    }
}

/// A basis state (`effect` false) or effect box on wire `t`.
pub(crate) fn basis_box(i: usize, t: WireType, effect: bool) -> Generator {
    let d = t.dim();
    let mut v = vec![zero(); d];
    v[i] = C64::new(1.0, 0.0);
    let (name, payload) = if effect {
        (format!("v{i}†"), Tensor::new(&[d], &[], v).expect("shape fits"))
    } else {
        (format!("v{i}"), Tensor::state(v))
    };
    Generator::Box(match t.kind() {
        WireKind::Classical => BoxGen::classical(name, payload),
        WireKind::Quantum => BoxGen::doubled(name, payload),
    })
}

/// A one-hot box with no inputs and one output (`effect` false) or one
/// input and no outputs, with its index and wire type.
fn basis_box_info(d: &Diagram, n: NodeId) -> Option<(usize, WireType, bool)> {
    let g = gen(d, n)?;
    g.as_box()?;
    let (ins, outs) = (g.inputs(), g.outputs());
    let (t, effect) = match (ins.as_slice(), outs.as_slice()) {
        ([], [t]) => (*t, false),
        ([t], []) => (*t, true),
        _ => return None,
    };
    Some((one_hot(&g.tensor().ok()?, t)?, t, effect))
}

fn copy_target(d: &Diagram, n: NodeId) -> Option<NodeId> {
    let (_, _, effect) = basis_box_info(d, n)?;
    let e = if effect { d.edge_to(Endpoint::In(n, 0))?.src } else { d.edge_from(Endpoint::Out(n, 0))?.tgt };
    let s = e.node()?;
    let sp = spider(d, s)?;
    (s != n && sp.family() == Family::Onb && sp.heads() == Heads::Single).then_some(s)
}

pub(crate) fn find_copy(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> { copy_target(d, n).map(|s| vec![n, s]) }

pub(crate) fn apply_copy(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let &[v, s] = m else { return None };
    if copy_target(d, v)? != s {
        return None;
    }
    let (i, _, effect) = basis_box_info(d, v)?;
    let sp = spider(d, s)?;
    let eaten = if effect { d.edge_to(Endpoint::In(v, 0))?.src } else { d.edge_from(Endpoint::Out(v, 0))?.tgt };
    let ins: Vec<usize> = (0..sp.inputs().len()).filter(|&k| eaten != Endpoint::In(s, k)).collect();
    let outs: Vec<usize> = (0..sp.outputs().len()).filter(|&k| eaten != Endpoint::Out(s, k)).collect();
    let mut new: Vec<Generator> = ins.iter().map(|&k| basis_box(i, sp.inputs()[k], true)).collect();
    new.extend(outs.iter().map(|&k| basis_box(i, sp.outputs()[k], false)));
    if let Some(p) = sp.phase() {
        new.push(Generator::Scalar(p.components()[i]));
    }
    let pos = |list: &[usize], k: usize| list.iter().position(|&x| x == k);
    Some(rebuild(d, &[v, s], new, |p, ids| match p {
        Endpoint::In(x, k) if x == s => pos(&ins, k).map(|j| Endpoint::In(ids[j], 0)),
        Endpoint::Out(x, k) if x == s => pos(&outs, k).map(|j| Endpoint::Out(ids[ins.len() + j], 0)),
        _ => None,
    }))
}

pub(crate) fn find_state_effect(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    let g = gen(d, n)?;
    g.as_box()?;
    if !g.inputs().is_empty() || g.outputs().len() != 1 {
        return None;
    }
    let m = d.edge_from(Endpoint::Out(n, 0))?.tgt.node()?;
    let h = gen(d, m)?;
    (h.as_box().is_some() && h.inputs().len() == 1 && h.outputs().is_empty()).then(|| vec![n, m])
}

pub(crate) fn apply_state_effect(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let &[s, e] = m else { return None };
    if find_state_effect(d, s)? != [s, e] {
        return None;
    }
    let (ts, te) = (gen(d, s)?.tensor().ok()?, gen(d, e)?.tensor().ok()?);
    let value: C64 = ts.data().iter().zip(te.data()).map(|(a, b)| a * b).sum();
    Some(rebuild(d, &[s, e], vec![Generator::Scalar(value)], |_, _| None))
}

/// `Y`: a box `[c k, q D] -> [q D]` with each control slice unitary, and
/// `X = Y†` feeding both of `Y`'s inputs from its two outputs.
fn controlled_pair(d: &Diagram, x: NodeId) -> Option<NodeId> {
    let gx = gen(d, x)?;
    gx.as_box()?;
    let (xi, xo) = (gx.inputs(), gx.outputs());
    if xi.len() != 1 || xo.len() != 2 || xo[0].is_quantum() || !xo[1].is_quantum() || xi[0] != xo[1] {
        return None;
    }
    let y = d.edge_from(Endpoint::Out(x, 0))?.tgt;
    let Endpoint::In(yn, 0) = y else { return None };
    if d.edge_from(Endpoint::Out(x, 1))?.tgt != Endpoint::In(yn, 1) {
        return None;
    }
    let gy = gen(d, yn)?;
    gy.as_box()?;
    if gy.inputs() != xo || gy.outputs() != xi {
        return None;
    }
    let (tx, ty) = (gx.tensor().ok()?, gy.tensor().ok()?);
    if tx.max_abs_diff(&ty.dagger())? > PAYLOAD_TOL {
        return None;
    }
    let (k, q) = (xo[0].index_size(), xi[0].index_size());
    let block = q * q;
    for c in 0..k {
        let slice = Tensor::new(&[q], &[q], ty.data()[c * block..(c + 1) * block].to_vec()).ok()?;
        let m = slice.to_matrix();
        if crate::linalg::isometry_defect(&m) > PAYLOAD_TOL {
            return None;
        }
    }
    Some(yn)
}

pub(crate) fn find_controlled(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> { controlled_pair(d, n).map(|y| vec![n, y]) }

pub(crate) fn apply_controlled(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let &[x, y] = m else { return None };
    if controlled_pair(d, x)? != y {
        return None;
    }
    splice(
        d,
        &[x, y],
        &[
            (Endpoint::In(x, 0), Endpoint::Out(x, 1)),
            (Endpoint::In(y, 1), Endpoint::Out(y, 0)),
            (Endpoint::Out(x, 0), Endpoint::In(y, 0)),
        ],
    )
}

// ---------------------------------------------------------------- scalars

pub(crate) fn find_scalar_merge(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    scalar(d, n)?;
    d.node_ids().into_iter().find(|&m| m != n && scalar(d, m).is_some()).map(|m| vec![n, m])
}

pub(crate) fn apply_scalar_merge(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let &[a, b] = m else { return None };
    if a == b {
        return None;
    }
    let (za, zb) = (scalar(d, a)?, scalar(d, b)?);
    let mut g = d.clone();
    g.remove_node(b);
    g.replace_node(a, Generator::Scalar(za * zb));
    Some(g)
}

pub(crate) fn find_scalar_unit(d: &Diagram, n: NodeId) -> Option<Vec<NodeId>> {
    ((scalar(d, n)? - 1.0).norm() <= UNIT_TOL).then(|| vec![n])
}

pub(crate) fn apply_scalar_unit(d: &Diagram, m: &[NodeId]) -> Option<Diagram> {
    let n = *m.first()?;
    find_scalar_unit(d, n)?;
    let mut g = d.clone();
    g.remove_node(n);
    Some(g)
}

// ---------------------------------------------------------------- samplers

fn random_type(rng: &mut Rng, dim: usize) -> WireType {
    if rng.random_bool(0.5) { WireType::quantum(dim) } else { WireType::classical(dim) }
}

fn random_family(rng: &mut Rng) -> Family { if rng.random_bool(0.7) { Family::Onb } else { Family::Fourier } }

/// A random spider on legs of type `t`, single-headed on classical legs.
fn random_leg_spider(rng: &mut Rng, t: WireType, n_in: usize, n_out: usize) -> Spider {
    let heads = if t.is_quantum() && rng.random_bool(0.5) { Heads::Double } else { Heads::Single };
    let phase = rng.random_bool(0.4).then(|| random_phase(rng, t.dim()));
    Spider::new(random_family(rng), t.dim(), heads, vec![t; n_in], vec![t; n_out], phase).expect("uniform legs")
}

/// Put random spiders on some of `core`'s boundary wires and a small random
/// spider diagram beside it.
fn sandwich(rng: &mut Rng, core: &Diagram) -> Diagram {
    let mut b = DiagramBuilder::new();
    let mut srcs = Vec::new();
    for &t in core.inputs() {
        if rng.random_bool(0.5) {
            let k = rng.random_range(0..=2);
            let ins: Vec<Endpoint> = (0..k).map(|_| b.add_input(t)).collect();
            let s = random_leg_spider(rng, t, k, 1);
            srcs.extend(b.place(Generator::Spider(s), &ins).expect("legs match"));
        } else {
            srcs.push(b.add_input(t));
        }
    }
    let outs = b.embed(core, &srcs).expect("boundary matches");
    for (o, &t) in outs.into_iter().zip(core.outputs()) {
        if rng.random_bool(0.5) {
            let k = rng.random_range(0..=2);
            let s = random_leg_spider(rng, t, 1, k);
            for x in b.place(Generator::Spider(s), &[o]).expect("legs match") {
                b.add_output(x).expect("fresh output");
            }
        } else {
            b.add_output(o).expect("fresh output");
        }
    }
    let mid = b.finish().expect("sandwich is well formed");
    if rng.random_bool(0.3) {
        let mut cfg = SpiderDiagramConfig::new(core.inputs().first().or(core.outputs().first()).map_or(2, |t| t.dim()));
        cfg.max_nodes = 2;
        cfg.max_edges = 3;
        compose_par(&mid, &random_spider_diagram(rng, &cfg))
    } else {
        mid
    }
}

fn small_cfg(rng: &mut Rng, dim: usize) -> SpiderDiagramConfig {
    let mut cfg = SpiderDiagramConfig::new(dim);
    cfg.max_nodes = 4;
    cfg.max_edges = 6;
    cfg.family = random_family(rng);
    cfg
}

fn small_diagram(rng: &mut Rng, dim: usize) -> Diagram {
    let cfg = small_cfg(rng, dim);
    random_spider_diagram(rng, &cfg)
}

/// Draw random spider diagrams until `find` matches somewhere.
fn spider_diagram_with(rng: &mut Rng, dim: usize, phase_prob: f64, find: super::FindFn) -> Diagram {
    for _ in 0..10_000 {
        let mut cfg = small_cfg(rng, dim);
        cfg.phase_prob = phase_prob;
        let d = random_spider_diagram(rng, &cfg);
        if d.node_ids().into_iter().any(|n| find(&d, n).is_some()) {
            return d;
        }
    }
    panic!("no random spider diagram matched after 10000 draws")
}

pub(crate) fn sample_zero(rng: &mut Rng, dim: usize) -> Diagram {
    let d = small_diagram(rng, dim);
    compose_par(&sandwich(rng, &d), &Diagram::scalar(zero()))
}

pub(crate) fn sample_swap(rng: &mut Rng, dim: usize) -> Diagram {
    let (a, b) = (random_type(rng, dim), random_type(rng, dim));
    sandwich(rng, &Diagram::swap(a, b))
}

pub(crate) fn sample_yank(rng: &mut Rng, dim: usize) -> Diagram {
    let t = random_type(rng, dim);
    let id = Diagram::identity(&[t]);
    let core = match rng.random_range(0..3) {
        0 => compose_seq(&compose_par(&id, &Diagram::cup(t)), &compose_par(&Diagram::cap(t), &id)),
        1 => compose_seq(&compose_par(&Diagram::cup(t), &id), &compose_par(&id, &Diagram::cap(t))),
        _ => Ok(Diagram::circle(t)),
    }
    .expect("zigzag wiring fits");
    sandwich(rng, &core)
}

pub(crate) fn sample_cup(rng: &mut Rng, dim: usize) -> Diagram { {
    let t = random_type(rng, dim);
    sandwich(rng, &Diagram::cup(t))
} }

pub(crate) fn sample_cap(rng: &mut Rng, dim: usize) -> Diagram { {
    let t = random_type(rng, dim);
    sandwich(rng, &Diagram::cap(t))
} }

pub(crate) fn sample_legless(rng: &mut Rng, dim: usize) -> Diagram {
    let t = random_type(rng, dim);
    let s = random_leg_spider(rng, t, 0, 0);
    let d = small_diagram(rng, dim);
    compose_par(&sandwich(rng, &d), &Diagram::spider(s))
}

pub(crate) fn sample_self_loop(rng: &mut Rng, dim: usize) -> Diagram {
    let d = small_diagram(rng, dim);
    let ids = d.node_ids();
    let n = ids[rng.random_range(0..ids.len())];
    add_self_loop(rng, &d, n)
}

pub(crate) fn sample_spider_fusion(rng: &mut Rng, dim: usize) -> Diagram {
    spider_diagram_with(rng, dim, 0.0, find_spider_fusion)
}

pub(crate) fn sample_phase_fusion(rng: &mut Rng, dim: usize) -> Diagram {
    spider_diagram_with(rng, dim, 0.7, find_phase_fusion)
}

pub(crate) fn sample_mixed_fusion(rng: &mut Rng, dim: usize) -> Diagram {
    spider_diagram_with(rng, dim, 0.5, find_mixed_fusion)
}

pub(crate) fn sample_identity(rng: &mut Rng, dim: usize) -> Diagram {
    loop {
        let d = small_diagram(rng, dim);
        if d.edge_count() > 0 {
            let e = d.edges()[rng.random_range(0..d.edge_count())];
            return insert_identity(&d, e);
        }
    }
}

pub(crate) fn sample_copy(rng: &mut Rng, dim: usize) -> Diagram {
    let t = random_type(rng, dim);
    let i = rng.random_range(0..dim);
    let n_in = rng.random_range(0..=2);
    let n_out = rng.random_range(0..=2);
    let mut ins = vec![t];
    ins.extend((0..n_in).map(|_| random_type(rng, dim)));
    let outs: Vec<WireType> = (0..n_out).map(|_| random_type(rng, dim)).collect();
    let phase = rng.random_bool(0.5).then(|| random_phase(rng, dim));
    let s = Spider::new(Family::Onb, dim, Heads::Single, ins.clone(), outs, phase).expect("legs share d");
    let mut b = DiagramBuilder::new();
    let mut srcs = b.place(basis_box(i, t, false), &[]).expect("no inputs");
    srcs.extend(ins[1..].iter().map(|&w| b.add_input(w)));
    for o in b.place(Generator::Spider(s), &srcs).expect("legs match") {
        b.add_output(o).expect("fresh output");
    }
    let core = b.finish().expect("copy core is well formed");
    let core = if rng.random_bool(0.5) { dagger(&core) } else { core };
    sandwich(rng, &core)
}

pub(crate) fn sample_state_effect(rng: &mut Rng, dim: usize) -> Diagram {
    let t = random_type(rng, dim);
    let s = random_box(rng, "s", vec![], vec![t]);
    let e = random_box(rng, "e", vec![t], vec![]);
    let core = compose_seq(&Diagram::boxed(s), &Diagram::boxed(e)).expect("one wire");
    let ctx = small_diagram(rng, dim);
    compose_par(&sandwich(rng, &ctx), &core)
}

/// A doubled controlled unitary `[c k, q D] -> [q D]` with Haar-random
/// branches.
pub(crate) fn random_controlled_unitary(rng: &mut Rng, dim: usize, k: usize) -> BoxGen {
    let q = dim * dim;
    let mut data = Vec::with_capacity(k * q * q);
    for _ in 0..k {
        let u: CMatrix = haar_unitary(dim, rng);
        let doubled = u.kronecker(&u.map(|z| z.conj()));
        let t = Tensor::from_matrix(&doubled, &[q], &[q]).expect("square");
        data.extend_from_slice(t.data());
    }
    let payload = Tensor::new(&[k, q], &[q], data).expect("shape fits");
    BoxGen::plain("U", payload, vec![WireType::classical(k), WireType::quantum(dim)], vec![WireType::quantum(dim)])
        .expect("legs fit payload")
}

pub(crate) fn sample_controlled(rng: &mut Rng, dim: usize) -> Diagram {
    let y = Diagram::boxed(random_controlled_unitary(rng, dim, dim * dim));
    let core = compose_seq(&dagger(&y), &y).expect("X feeds Y");
    sandwich(rng, &core)
}

pub(crate) fn sample_scalar_merge(rng: &mut Rng, dim: usize) -> Diagram {
    let d = small_diagram(rng, dim);
    let z = Diagram::scalar(random_complex(rng));
    compose_par(&compose_par(&sandwich(rng, &d), &z), &Diagram::scalar(random_complex(rng)))
}

pub(crate) fn sample_scalar_unit(rng: &mut Rng, dim: usize) -> Diagram {
    let d = small_diagram(rng, dim);
    compose_par(&sandwich(rng, &d), &Diagram::scalar(C64::new(1.0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::evaluate;

    #[test]
    fn canonical_zero_is_zero() {
        let z = canonical_zero(&[WireType::classical(2)], &[WireType::quantum(2)]);
        assert!(is_canonical_zero(&z));
        assert_eq!(evaluate(&z).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn one_hot_detects_quantum_diagonal() {
        let t = WireType::quantum(3);
        let Generator::Box(b) = basis_box(2, t, false) else { panic!() };
        let full = Generator::Box(b).tensor().unwrap();
        assert_eq!(one_hot(&full, t), Some(2));
    }

    #[test]
    fn controlled_pair_requires_dagger() {
        let mut rng = crate::random::seeded(3);
        let y = Diagram::boxed(random_controlled_unitary(&mut rng, 2, 4));
        let good = compose_seq(&dagger(&y), &y).unwrap();
        let x = good.node_ids()[0];
        assert!(find_controlled(&good, x).is_some());
        let y2 = Diagram::boxed(random_controlled_unitary(&mut rng, 2, 4));
        let bad = compose_seq(&dagger(&y2), &y).unwrap();
        assert!(find_controlled(&bad, bad.node_ids()[0]).is_none());
    }
}
