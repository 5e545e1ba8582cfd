//! Random well-formed documents, used by round-trip tests.

use rand::seq::IndexedRandom;
use rand::Rng as _;

use super::print_diagram;
use crate::diagram::{Diagram, WireType};
use crate::random::{random_plain_diagram, random_spider_diagram, Rng, SpiderDiagramConfig};

struct Ctx {
    aliases: Vec<(String, WireType)>,
    /// Tensor name, input dims, output dims.
    tensors: Vec<(String, Vec<usize>, Vec<usize>)>,
    diagrams: Vec<(String, Vec<WireType>, Vec<WireType>)>,
}

impl Ctx {
    fn name(&self, rng: &mut Rng, t: WireType) -> String {
        let named: Vec<&String> = self.aliases.iter().filter(|(_, a)| *a == t).map(|(n, _)| n).collect();
        match named.choose(rng) {
            Some(n) if rng.random_bool(0.5) => (*n).clone(),
            _ => t.to_string(),
        }
    }
}

fn number(rng: &mut Rng) -> String {
    let sign = if rng.random_bool(0.3) { "-" } else { "" };
    match rng.random_range(0..3) {
        0 => format!("{sign}{}", rng.random_range(0..5)),
        1 => format!("{sign}{:.3}", rng.random_range(0.0..4.0)),
        _ => format!("{sign}{:e}", rng.random_range(0.001..0.01)),
    }
}

fn complex(rng: &mut Rng) -> String {
    if rng.random_bool(0.5) {
        number(rng)
    } else {
        format!("({}, {})", number(rng), number(rng))
    }
}

fn angle(rng: &mut Rng) -> String {
    match rng.random_range(0..4) {
        0 => "pi".into(),
        1 => format!("pi/{}", rng.random_range(1..7)),
        2 => format!("-{}*pi/{}", rng.random_range(1..4), rng.random_range(2..9)),
        _ => format!("{:.4}", rng.random_range(-3.0..3.0)),
    }
}

fn angles(rng: &mut Rng, d: usize) -> String { (0..d).map(|_| angle(rng)).collect::<Vec<_>>().join(", ") }

fn spider_opts(rng: &mut Rng, d: usize) -> String {
    let mut s = String::new();
    if rng.random_bool(0.3) {
        s.push_str(" fourier");
    }
    if rng.random_bool(0.4) {
        s.push_str(&format!(" phase({})", angles(rng, d)));
    }
    s
}

/// A generator with one input of type `t`.
fn unary_gen(rng: &mut Rng, ctx: &Ctx, t: WireType) -> (String, Vec<WireType>) {
    let d = t.dim();
    let tn = ctx.name(rng, t);
    let q = WireType::quantum(d);
    let c = WireType::classical(d);
    let boxes: Vec<&(String, Vec<usize>, Vec<usize>)> = ctx.tensors.iter().filter(|(_, i, _)| i == &[d]).collect();
    let choice = rng.random_range(0..7);
    if choice == 6 {
        if let Some((name, _, outs)) = boxes.choose(rng) {
            return if t.is_quantum() {
                (format!("box {name} doubled"), outs.iter().map(|&k| WireType::quantum(k)).collect())
            } else {
                (format!("box {name} as \"{name}'\""), outs.iter().map(|&k| WireType::classical(k)).collect())
            };
        }
    }
    match (t.is_quantum(), choice) {
        (_, 0) => (format!("id {tn}"), vec![t]),
        (_, 1) => {
            let m = rng.random_range(0..3);
            (format!("spider 1 -> {m} @ {tn}{}", spider_opts(rng, d)), vec![t; m])
        }
        (_, 2) => (format!("dagger(spider 1 -> 1 @ {tn} phase({}))", angles(rng, d)), vec![t]),
        (false, 3) => (format!("copy {d}"), vec![c, c]),
        (false, 4) => (format!("delete {d}"), vec![]),
        (false, _) => (format!("encode {d}"), vec![q]),
        (true, 3) => (format!("measure {d}"), vec![c]),
        (true, 4) => (format!("phase({})", angles(rng, d)), vec![q]),
        (true, 5) => (format!("double(spider 1 -> 2 @ c{d})"), vec![q, q]),
        (true, _) => (format!("transpose(encode {d})"), vec![c]),
    }
}

fn nullary_gen(rng: &mut Rng, ctx: &Ctx) -> (String, Vec<WireType>) {
    let d = rng.random_range(2..4);
    let t = if rng.random_bool(0.5) { WireType::quantum(d) } else { WireType::classical(d) };
    match rng.random_range(0..4) {
        0 => (format!("cup {}", ctx.name(rng, t)), vec![t, t]),
        1 => (format!("scalar {}", complex(rng)), vec![]),
        2 => (format!("spider 0 -> 1 @ {}{}", ctx.name(rng, t), spider_opts(rng, d)), vec![t]),
        _ => ("empty".into(), vec![]),
    }
}

/// One layer acting on `ins`, as text and output types.
fn layer(rng: &mut Rng, ctx: &Ctx, ins: &[WireType]) -> (String, Vec<WireType>) {
    let mut parts = Vec::new();
    let mut outs = Vec::new();
    if ins.is_empty() || rng.random_bool(0.2) {
        let (s, o) = nullary_gen(rng, ctx);
        parts.push(s);
        outs.extend(o);
    }
    for &t in ins {
        let (s, o) = unary_gen(rng, ctx, t);
        parts.push(s);
        outs.extend(o);
    }
    (parts.join(" | "), outs)
}

fn expr(rng: &mut Rng, ctx: &Ctx) -> (String, Vec<WireType>, Vec<WireType>) {
    let ins: Vec<WireType> = (0..rng.random_range(0..3))
        .map(|_| {
            let d = rng.random_range(2..4);
            if rng.random_bool(0.5) { WireType::quantum(d) } else { WireType::classical(d) }
        })
        .collect();
    let mut wires = ins.clone();
    let mut text = String::new();
    for k in 0..rng.random_range(1..4) {
        if wires.len() > 4 {
            break;
        }
        let (s, o) = layer(rng, ctx, &wires);
        let s = if s.contains('|') { format!("({s})") } else { s };
        if k > 0 {
            text.push_str(" ; ");
        }
        text.push_str(&s);
        wires = o;
    }
    if rng.random_bool(0.2) {
        text = format!("dagger({text})");
        return (text, wires, ins);
    }
    (text, ins, wires)
}

fn tensor_line(rng: &mut Rng) -> (String, Vec<usize>, Vec<usize>) {
    let dims = |rng: &mut Rng, max: usize| -> Vec<usize> { (0..rng.random_range(0..=max)).map(|_| rng.random_range(2..4)).collect() };
    let ins = dims(rng, 1);
    let outs = dims(rng, 2);
    let n: usize = ins.iter().chain(&outs).product();
    let data: Vec<String> = (0..n).map(|_| complex(rng)).collect();
    let fmt = |v: &[usize]| format!("[{}]", v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "));
    (format!("tensor {} -> {} [{}]", fmt(&ins), fmt(&outs), data.join(", ")), ins, outs)
}

/// Source text of a random document that parses without errors.
pub fn random_source(rng: &mut Rng) -> String {
    let mut ctx = Ctx { aliases: Vec::new(), tensors: Vec::new(), diagrams: Vec::new() };
    let mut out = String::new();
    for k in 0..rng.random_range(0..3) {
        let d = rng.random_range(2..4);
        let (kind, t) = if rng.random_bool(0.5) { ("quantum", WireType::quantum(d)) } else { ("classical", WireType::classical(d)) };
        out.push_str(&format!("ty{k} = {kind} {d}\n"));
        ctx.aliases.push((format!("ty{k}"), t));
    }
    for k in 0..rng.random_range(0..3) {
        let (line, ins, outs) = tensor_line(rng);
        out.push_str(&format!("t{k} = {line}\n"));
        ctx.tensors.push((format!("t{k}"), ins, outs));
    }
    for k in 0..rng.random_range(1..5) {
        let name = format!("d{k}");
        let (ins, outs) = match rng.random_range(0..4) {
            0 => {
                let d: Diagram = if rng.random_bool(0.5) {
                    let mut cfg = SpiderDiagramConfig::new(rng.random_range(2..4));
                    cfg.max_nodes = 4;
                    cfg.max_edges = 6;
                    random_spider_diagram(rng, &cfg)
                } else {
                    let (dim, inputs) = (rng.random_range(2..4), rng.random_range(0..3));
                    random_plain_diagram(rng, dim, inputs, 4, 4)
                };
                out.push_str(&print_diagram(&name, &d));
                (d.inputs().to_vec(), d.outputs().to_vec())
            }
            1 if !ctx.diagrams.is_empty() => {
                let (a, ai, ao) = ctx.diagrams.choose(rng).expect("non-empty").clone();
                let (b, bi, bo) = ctx.diagrams.choose(rng).expect("non-empty").clone();
                let (text, ins, outs) = if ao == bi && rng.random_bool(0.5) {
                    (format!("{a} ; {b}"), ai, bo)
                } else {
                    (format!("{a} | ({b})"), [ai, bi].concat(), [ao, bo].concat())
                };
                out.push_str(&format!("{name} = {text}\n"));
                (ins, outs)
            }
            2 if !ctx.diagrams.is_empty() => {
                let (a, ai, ao) = ctx.diagrams.choose(rng).expect("non-empty").clone();
                let (text, ins, outs) = match rng.random_range(0..3) {
                    0 => (format!("dagger({a})"), ao, ai),
                    1 => (format!("transpose({a})"), ao, ai),
                    _ => (format!("conj({a})"), ai, ao),
                };
                out.push_str(&format!("{name} = {text}\n"));
                (ins, outs)
            }
            _ => {
                let (text, ins, outs) = expr(rng, &ctx);
                out.push_str(&format!("{name} = {text}\n"));
                (ins, outs)
            }
        };
        ctx.diagrams.push((name, ins, outs));
    }
    out
}
