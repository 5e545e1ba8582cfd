//! Composition, daggers and doubling.

use std::collections::BTreeMap;

use super::{Diagram, DiagramBuilder, DiagramError, DiagramResult, Edge, Endpoint, Generator, Spider, WireKind, WireType};

/// Sequential composition `g ∘ f`: the outputs of `f` feed the inputs of `g`.
pub fn compose_seq(f: &Diagram, g: &Diagram) -> DiagramResult<Diagram> {
    if f.outputs() != g.inputs() {
        return Err(DiagramError::BoundaryMismatch(format!(
            "outputs [{}] do not match inputs [{}]",
            fmt_types(f.outputs()),
            fmt_types(g.inputs())
        )));
    }
    let mut b = DiagramBuilder::new();
    let ins: Vec<Endpoint> = f.inputs().iter().map(|&t| b.add_input(t)).collect();
    let mid = b.embed(f, &ins)?;
    let outs = b.embed(g, &mid)?;
    for o in outs {
        b.add_output(o)?;
    }
    b.finish()
}

/// Parallel composition `f ⊗ g` with concatenated boundaries.
pub fn compose_par(f: &Diagram, g: &Diagram) -> Diagram {
    let mut b = DiagramBuilder::new();
    let fi: Vec<Endpoint> = f.inputs().iter().map(|&t| b.add_input(t)).collect();
    let gi: Vec<Endpoint> = g.inputs().iter().map(|&t| b.add_input(t)).collect();
    let fo = b.embed(f, &fi).expect("fresh inputs match");
    let go = b.embed(g, &gi).expect("fresh inputs match");
    for o in fo.into_iter().chain(go) {
        b.add_output(o).expect("fresh outputs");
    }
    b.finish().expect("disjoint union of valid diagrams")
}

fn flip(e: Endpoint) -> Endpoint {
    match e {
        Endpoint::Input(i) => Endpoint::Output(i),
        Endpoint::Output(j) => Endpoint::Input(j),
        Endpoint::In(n, k) => Endpoint::Out(n, k),
        Endpoint::Out(n, k) => Endpoint::In(n, k),
    }
}

/// Reflect the diagram top to bottom, taking the adjoint of every generator.
pub fn dagger(f: &Diagram) -> Diagram {
    let (nodes, next_id) = f.raw_parts();
    let nodes: BTreeMap<_, _> = nodes.iter().map(|(&id, g)| (id, g.dagger())).collect();
    let edges = f.edges().iter().map(|e| Edge { src: flip(e.tgt), tgt: flip(e.src), ty: e.ty }).collect();
    Diagram::from_raw(nodes, edges, f.outputs().to_vec(), f.inputs().to_vec(), next_id)
}

/// Bend every boundary wire round with cups and caps, so that inputs become
/// outputs and vice versa in the same order.
pub fn transpose(f: &Diagram) -> Diagram {
    let mut b = DiagramBuilder::new();
    let new_ins: Vec<Endpoint> = f.outputs().iter().map(|&t| b.add_input(t)).collect();
    let mut feed = Vec::new();
    let mut new_outs = Vec::new();
    for &t in f.inputs() {
        let cup = b.place(Generator::Cup(t), &[]).expect("cup has no inputs");
        feed.push(cup[0]);
        new_outs.push(cup[1]);
    }
    let f_outs = b.embed(f, &feed).expect("cups match inputs");
    for ((&t, fo), ni) in f.outputs().iter().zip(f_outs).zip(new_ins) {
        b.place(Generator::Cap(t), &[fo, ni]).expect("cap matches output");
    }
    for o in new_outs {
        b.add_output(o).expect("fresh output");
    }
    b.finish().expect("transpose wiring")
}

/// The entrywise conjugate, as the dagger of the transpose.
pub fn conjugate(f: &Diagram) -> Diagram { dagger(&transpose(f)) }

/// Apply the doubling functor to a plain diagram.
pub fn double(f: &Diagram) -> DiagramResult<Diagram> {
    let q = |t: &WireType| match t.kind() {
        WireKind::Classical => Ok(WireType::quantum(t.dim())),
        WireKind::Quantum => Err(DiagramError::NotPlain),
    };
    let (nodes, next_id) = f.raw_parts();
    let nodes = nodes.iter().map(|(&id, g)| Ok((id, g.double()?))).collect::<DiagramResult<BTreeMap<_, _>>>()?;
    let edges = f.edges().iter().map(|e| Ok(Edge { src: e.src, tgt: e.tgt, ty: q(&e.ty)? })).collect::<DiagramResult<Vec<_>>>()?;
    let inputs = f.inputs().iter().map(q).collect::<DiagramResult<_>>()?;
    let outputs = f.outputs().iter().map(q).collect::<DiagramResult<_>>()?;
    Ok(Diagram::from_raw(nodes, edges, inputs, outputs, next_id))
}

/// The discarding effect on a quantum wire.
pub fn discard(t: WireType) -> DiagramResult<Diagram> {
    if t.kind() != WireKind::Quantum {
        return Err(DiagramError::WrongKind(t));
    }
    Ok(Diagram::spider(Spider::bastard(t.dim(), vec![t], vec![])?))
}

fn fmt_types(ts: &[WireType]) -> String { ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ") }

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::BoxGen;
    use crate::tensor::evaluate;
    use crate::{Tensor, C64};

    fn m22() -> Diagram {
        Diagram::boxed(BoxGen::classical("M", Tensor::from_real(&[2], &[2], &[1.0, 3.0, 2.0, 4.0]).unwrap()))
    }

    #[test]
    fn seq_rejects_mismatch() {
        let r = compose_seq(&Diagram::copy(2), &Diagram::copy(2));
        assert!(matches!(r, Err(DiagramError::BoundaryMismatch(_))));
    }

    #[test]
    fn transpose_of_box_is_matrix_transpose() {
        let t = evaluate(&transpose(&m22())).unwrap();
        let m = evaluate(&m22()).unwrap().to_matrix();
        assert_eq!(t.to_matrix(), m.transpose());
    }

    #[test]
    fn dagger_is_conjugate_transpose() {
        let b = Tensor::new(&[2], &[3], (0..6).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect()).unwrap();
        let d = Diagram::boxed(BoxGen::classical("B", b.clone()));
        let t = evaluate(&dagger(&d)).unwrap();
        assert_eq!(t.to_matrix(), b.to_matrix().adjoint());
        assert_eq!(dagger(&dagger(&d)), d);
    }

    #[test]
    fn double_rejects_quantum() {
        assert_eq!(double(&Diagram::measure(2)), Err(DiagramError::NotPlain));
    }

    #[test]
    fn discard_rejects_classical() {
        assert!(matches!(discard(WireType::classical(2)), Err(DiagramError::WrongKind(_))));
    }

    #[test]
    fn measure_after_encode_is_identity() {
        let me = compose_seq(&Diagram::encode(2), &Diagram::measure(2)).unwrap();
        let t = evaluate(&me).unwrap();
        assert_eq!(t.to_matrix(), nalgebra::DMatrix::identity(2, 2));
    }
}
