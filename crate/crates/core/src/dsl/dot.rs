use std::fmt::Write as _;

use crate::diagram::{Diagram, Endpoint, Generator};

fn quote(s: &str) -> String { format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")) }

fn node_name(e: Endpoint) -> String {
    match e {
        Endpoint::Input(k) => format!("in{k}"),
        Endpoint::Output(k) => format!("out{k}"),
        Endpoint::In(n, _) | Endpoint::Out(n, _) => n.to_string(),
    }
}

/// Graphviz rendering. Spiders are filled circles, boxes are rectangles,
/// quantum wires are drawn doubled and thick, classical wires thin.
pub fn export_dot(d: &Diagram) -> String {
    let mut s = String::from("digraph diagram {\n");
    if d.is_empty() && d.inputs().is_empty() && d.outputs().is_empty() {
        s.push_str("}\n");
        return s;
    }
    s.push_str("  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n");
    for (k, t) in d.inputs().iter().enumerate() {
        let _ = writeln!(s, "  in{k} [shape=plaintext, label={}];", quote(&format!("in{k}: {t}")));
    }
    for (k, t) in d.outputs().iter().enumerate() {
        let _ = writeln!(s, "  out{k} [shape=plaintext, label={}];", quote(&format!("out{k}: {t}")));
    }
    for (id, g) in d.nodes() {
        let attrs = match g {
            Generator::Spider(sp) => {
                let fill = if sp.family() == crate::diagram::Family::Fourier { "gray40" } else { "black" };
                let label = sp.phase().map(|p| p.to_string()).unwrap_or_default();
                format!(
                    "shape=circle, style=filled, fillcolor={fill}, fontcolor=white, width=0.25, label={}, tooltip={}",
                    quote(&label),
                    quote(&g.label())
                )
            }
            Generator::Box(_) => format!("shape=box, label={}", quote(&g.label())),
            Generator::Cup(_) | Generator::Cap(_) | Generator::Swap(..) => {
                format!("shape=point, width=0.05, tooltip={}", quote(&g.label()))
            }
            Generator::Scalar(_) => format!("shape=plaintext, label={}", quote(&g.label())),
        };
        let _ = writeln!(s, "  {id} [{attrs}];");
    }
    for e in d.edges() {
        let style = if e.ty.is_quantum() { "color=\"black:white:black\", penwidth=2" } else { "penwidth=1" };
        let _ = writeln!(s, "  {} -> {} [{style}, arrowhead=none, label={}];", node_name(e.src), node_name(e.tgt), quote(&e.ty.to_string()));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_diagram() { assert_eq!(export_dot(&Diagram::empty()), "digraph diagram {\n}\n"); }

    #[test]
    fn measure_has_both_wire_styles() {
        let out = export_dot(&Diagram::measure(2));
        assert!(out.contains("in0 -> n0 [color=\"black:white:black\""));
        assert!(out.contains("n0 -> out0 [penwidth=1"));
        assert_eq!(out.matches("->").count(), 2);
    }
}
