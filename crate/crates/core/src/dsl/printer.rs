use std::fmt::Write as _;

use super::{Decl, DeclBody, DiagramDoc, Expr, GenExpr, GraphExpr, PhaseLit, PortRef, SpiderOpts};
use crate::diagram::{Diagram, Endpoint, Family, Flavor, Generator, Heads, WireType};
use crate::tensor::Tensor;
use crate::C64;

/// Render a document in the text format. Parsing the result gives back an
/// equal document.
pub fn print(doc: &DiagramDoc) -> String {
    let mut s = String::new();
    for d in &doc.decls {
        s.push_str(&d.name);
        s.push_str(" = ");
        match &d.body {
            DeclBody::Type(t) => {
                let kind = if t.is_quantum() { "quantum" } else { "classical" };
                let _ = write!(s, "{kind} {}", t.dim());
            }
            DeclBody::Tensor(t) => tensor(&mut s, t),
            DeclBody::Diagram { expr: e, .. } => expr(&mut s, e, 0, ""),
        }
        s.push('\n');
    }
    s
}

/// A document holding `d` as a `graph` block named `name`, preceded by one
/// tensor declaration per box. Node ids are kept.
pub fn diagram_to_doc(name: &str, d: &Diagram) -> DiagramDoc {
    let mut decls = Vec::new();
    let mut nodes = Vec::new();
    for (id, g) in d.nodes() {
        let gen = match g {
            Generator::Spider(sp) => {
                let legs: Vec<&WireType> = sp.inputs().iter().chain(sp.outputs()).collect();
                let default = if !legs.is_empty() && legs.iter().all(|t| t.is_quantum()) { Heads::Double } else { Heads::Single };
                let opts = SpiderOpts {
                    heads: (sp.heads() != default).then_some(sp.heads()),
                    fourier: sp.family() == Family::Fourier,
                    phase: sp.phase().map(|p| PhaseLit::Phasor(p.components().to_vec())),
                };
                GenExpr::Spider { dim: sp.dim(), ins: names(sp.inputs()), outs: names(sp.outputs()), opts }
            }
            Generator::Box(b) => {
                let tname = format!("{name}_n{}", id.0);
                decls.push(Decl { name: tname.clone(), body: DeclBody::Tensor(b.payload().clone()) });
                let sig = (b.flavor() == Flavor::Plain).then(|| (names(b.inputs()), names(b.outputs())));
                GenExpr::Box { tensor: tname, doubled: b.flavor() == Flavor::Doubled, label: Some(b.name().to_string()), sig }
            }
            Generator::Cup(t) => GenExpr::Cup(t.to_string()),
            Generator::Cap(t) => GenExpr::Cap(t.to_string()),
            Generator::Swap(a, b) => GenExpr::Swap(a.to_string(), b.to_string()),
            Generator::Scalar(z) => GenExpr::Scalar(*z),
        };
        nodes.push((id.0, gen));
    }
    let port = |e: Endpoint| match e {
        Endpoint::Input(k) => PortRef::Input(k),
        Endpoint::Output(k) => PortRef::Output(k),
        Endpoint::In(n, p) | Endpoint::Out(n, p) => PortRef::Node(n.0, p),
    };
    let wires = d.edges().iter().map(|e| (port(e.src), port(e.tgt))).collect();
    let graph = GraphExpr { ins: names(d.inputs()), outs: names(d.outputs()), nodes, wires };
    decls.push(Decl { name: name.to_string(), body: DeclBody::Diagram { expr: Expr::Graph(graph), value: d.clone() } });
    DiagramDoc { decls }
}

pub fn print_diagram(name: &str, d: &Diagram) -> String { print(&diagram_to_doc(name, d)) }

fn names(ts: &[WireType]) -> Vec<String> { ts.iter().map(|t| t.to_string()).collect() }

fn real(s: &mut String, x: f64) { let _ = write!(s, "{x:?}"); }

fn complex(s: &mut String, z: C64) {
    if z.im == 0.0 && z.im.is_sign_positive() {
        real(s, z.re);
    } else {
        s.push('(');
        real(s, z.re);
        s.push_str(", ");
        real(s, z.im);
        s.push(')');
    }
}

fn joined<T>(s: &mut String, items: &[T], mut f: impl FnMut(&mut String, &T)) {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        f(s, x);
    }
}

fn tensor(s: &mut String, t: &Tensor) {
    let _ = write!(s, "tensor {:?} -> {:?} [", t.in_shape(), t.out_shape());
    joined(s, t.data(), |s, z| complex(s, *z));
    s.push(']');
}

fn type_list(s: &mut String, ts: &[String]) {
    s.push('[');
    s.push_str(&ts.join(", "));
    s.push(']');
}

fn expr(s: &mut String, e: &Expr, ctx: u8, indent: &str) {
    let prec = match e {
        Expr::Seq(..) => 0,
        Expr::Par(..) => 1,
        _ => 2,
    };
    if prec < ctx {
        s.push('(');
    }
    match e {
        Expr::Seq(a, b) => {
            expr(s, a, 0, indent);
            s.push_str(" ; ");
            expr(s, b, 1, indent);
        }
        Expr::Par(a, b) => {
            expr(s, a, 1, indent);
            s.push_str(" | ");
            expr(s, b, 2, indent);
        }
        Expr::Ref(n) => s.push_str(n),
        Expr::Unary(op, a) => {
            s.push_str(op.keyword());
            s.push('(');
            expr(s, a, 0, indent);
            s.push(')');
        }
        Expr::Gen(g) => gen(s, g),
        Expr::Graph(g) => graph(s, g, indent),
    }
    if prec < ctx {
        s.push(')');
    }
}

fn graph(s: &mut String, g: &GraphExpr, indent: &str) {
    s.push_str("graph ");
    type_list(s, &g.ins);
    s.push_str(" -> ");
    type_list(s, &g.outs);
    s.push_str(" {\n");
    let inner = format!("{indent}  ");
    for (id, x) in &g.nodes {
        let _ = write!(s, "{inner}n{id} = ");
        gen(s, x);
        s.push('\n');
    }
    let port = |p: &PortRef| match *p {
        PortRef::Input(k) => format!("in{k}"),
        PortRef::Output(k) => format!("out{k}"),
        PortRef::Node(n, k) => format!("n{n}.{k}"),
    };
    for (a, b) in &g.wires {
        let _ = writeln!(s, "{inner}{} -> {}", port(a), port(b));
    }
    s.push_str(indent);
    s.push('}');
}

fn opts(s: &mut String, o: &SpiderOpts) {
    match o.heads {
        Some(Heads::Single) => s.push_str(" single"),
        Some(Heads::Double) => s.push_str(" double"),
        None => {}
    }
    if o.fourier {
        s.push_str(" fourier");
    }
    match &o.phase {
        Some(PhaseLit::Angles(a)) => {
            s.push_str(" phase(");
            joined(s, a, |s, x| real(s, *x));
            s.push(')');
        }
        Some(PhaseLit::Phasor(c)) => {
            s.push_str(" phasor(");
            joined(s, c, |s, z| {
                s.push('(');
                real(s, z.re);
                s.push_str(", ");
                real(s, z.im);
                s.push(')');
            });
            s.push(')');
        }
        None => {}
    }
}

fn gen(s: &mut String, g: &GenExpr) {
    match g {
        GenExpr::SpiderShort { n, m, ty, opts: o } => {
            let _ = write!(s, "spider {n} -> {m} @ {ty}");
            opts(s, o);
        }
        GenExpr::Spider { dim, ins, outs, opts: o } => {
            let _ = write!(s, "spider {dim} ");
            type_list(s, ins);
            s.push_str(" -> ");
            type_list(s, outs);
            opts(s, o);
        }
        GenExpr::Id(ts) if ts.len() == 1 => {
            let _ = write!(s, "id {}", ts[0]);
        }
        GenExpr::Id(ts) => {
            s.push_str("id ");
            type_list(s, ts);
        }
        GenExpr::Cup(t) => {
            let _ = write!(s, "cup {t}");
        }
        GenExpr::Cap(t) => {
            let _ = write!(s, "cap {t}");
        }
        GenExpr::Swap(a, b) => {
            let _ = write!(s, "swap {a} {b}");
        }
        GenExpr::Measure(d) => {
            let _ = write!(s, "measure {d}");
        }
        GenExpr::Encode(d) => {
            let _ = write!(s, "encode {d}");
        }
        GenExpr::Discard(d) => {
            let _ = write!(s, "discard {d}");
        }
        GenExpr::Delete(d) => {
            let _ = write!(s, "delete {d}");
        }
        GenExpr::Copy(d) => {
            let _ = write!(s, "copy {d}");
        }
        GenExpr::Decohere(d) => {
            let _ = write!(s, "decohere {d}");
        }
        GenExpr::Phase(a) => {
            s.push_str("phase(");
            joined(s, a, |s, x| real(s, *x));
            s.push(')');
        }
        GenExpr::Box { tensor, doubled, label, sig } => {
            let _ = write!(s, "box {tensor}");
            if *doubled {
                s.push_str(" doubled");
            }
            if let Some(l) = label {
                let _ = write!(s, " as \"{}\"", l.replace('\\', "\\\\").replace('"', "\\\""));
            }
            if let Some((ins, outs)) = sig {
                s.push_str(" : ");
                type_list(s, ins);
                s.push_str(" -> ");
                type_list(s, outs);
            }
        }
        GenExpr::Scalar(z) => {
            s.push_str("scalar ");
            complex(s, *z);
        }
        GenExpr::Empty => s.push_str("empty"),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn nested_composition_keeps_its_shape() {
        let src = "a = id c2 ; (id c2 ; id c2)\nb = id c2 | (id c2 | id c2)\nc = id c2 | id c2 ; swap c2 c2\n";
        let doc = parse(src).unwrap();
        assert_eq!(print(&doc), src);
    }

    #[test]
    fn labels_with_quotes_survive() {
        let doc = parse("t = tensor [] -> [2] [1, (0, -1)]\nb = box t as \"a\\\"b\"\n").unwrap();
        assert_eq!(parse(&print(&doc)).unwrap(), doc);
    }
}
