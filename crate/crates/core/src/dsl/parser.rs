use std::collections::{BTreeMap, HashMap};

use super::lexer::{lex, Tok, Token};
use super::{
    Decl, DeclBody, DiagramDoc, Expr, GenExpr, GraphExpr, ParseError, ParseErrors, PhaseLit, PortRef, SourceSpan, SpiderOpts,
    UnaryOp,
};
use crate::diagram::{
    compose_par, compose_seq, conjugate, dagger, discard, double, transpose, BoxGen, Diagram, DiagramError, Edge, Endpoint,
    Generator, Heads, NodeId, Spider, WireType,
};
use crate::phases::PhaseVector;
use crate::tensor::Tensor;
use crate::C64;

type PResult<T> = Result<T, ParseError>;

const KEYWORDS: &[&str] = &[
    "spider", "id", "cup", "cap", "swap", "measure", "encode", "discard", "delete", "copy", "decohere", "phase", "box", "scalar",
    "empty", "graph", "dagger", "double", "transpose", "conj", "classical", "quantum", "tensor", "pi",
];

#[derive(Clone)]
enum Binding {
    Type(WireType),
    Tensor(Tensor),
    Diagram(Diagram),
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a str,
    env: HashMap<String, Binding>,
}

pub(crate) fn parse(text: &str, file: &str) -> Result<DiagramDoc, ParseErrors> {
    let toks = lex(text, file).map_err(|e| ParseErrors(vec![e]))?;
    let mut p = Parser { toks, pos: 0, file, env: HashMap::new() };
    let mut doc = DiagramDoc::default();
    let mut errors = Vec::new();
    loop {
        p.skip_newlines();
        if p.peek() == &Tok::Eof {
            break;
        }
        let start = p.pos;
        match p.decl() {
            Ok(decl) => {
                let binding = match &decl.body {
                    DeclBody::Type(t) => Binding::Type(*t),
                    DeclBody::Tensor(t) => Binding::Tensor(t.clone()),
                    DeclBody::Diagram { value, .. } => Binding::Diagram(value.clone()),
                };
                p.env.insert(decl.name.clone(), binding);
                doc.decls.push(decl);
            }
            Err(e) => {
                errors.push(e);
                p.recover(start);
            }
        }
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(ParseErrors(errors))
    }
}

fn builtin_type(name: &str) -> Option<WireType> {
    let (kind, digits) = name.split_at(1);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    let d: usize = digits.parse().ok()?;
    match kind {
        "c" => Some(WireType::classical(d)),
        "q" => Some(WireType::quantum(d)),
        _ => None,
    }
}

fn numbered(ident: &str, prefix: &str) -> Option<u64> {
    let digits = ident.strip_prefix(prefix)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn types_text(ts: &[WireType]) -> String { format!("[{}]", ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")) }

impl Parser<'_> {
    fn peek(&self) -> &Tok { &self.toks[self.pos].tok }

    fn peek_at(&self, k: usize) -> &Tok { &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok }

    fn span(&self) -> SourceSpan { self.span_of(self.pos) }

    fn span_of(&self, i: usize) -> SourceSpan {
        let t = &self.toks[i];
        SourceSpan { file: self.file.to_string(), line: t.line, column: t.column }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn skip_newlines(&mut self) {
        while self.peek() == &Tok::Newline {
            self.pos += 1;
        }
    }

    /// Skip past the declaration starting at `start`, keeping track of braces
    /// so that a broken graph block is skipped whole.
    fn recover(&mut self, start: usize) {
        let error_pos = self.pos;
        self.pos = start;
        let mut depth = 0i64;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Sym("{") => depth += 1,
                Tok::Sym("}") => depth -= 1,
                Tok::Newline if depth <= 0 && self.pos >= error_pos => {
                    self.pos += 1;
                    return;
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn err<T>(&self, what: &str) -> PResult<T> {
        Err(ParseError::syntax(self.span(), format!("expected {what}, found {}", self.peek().describe())))
    }

    fn is_sym(&self, s: &str) -> bool { matches!(self.peek(), Tok::Sym(x) if *x == s) }

    fn is_kw(&self, s: &str) -> bool { matches!(self.peek(), Tok::Ident(x) if x == s) }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("`{s}`"))
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        let hit = self.is_kw(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(what),
        }
    }

    fn int(&mut self, what: &str) -> PResult<usize> {
        match *self.peek() {
            Tok::Int(n) => {
                self.pos += 1;
                usize::try_from(n).map_err(|_| ParseError::syntax(self.span_of(self.pos - 1), format!("{what} is too large")))
            }
            _ => self.err(what),
        }
    }

    fn positive(&mut self, what: &str) -> PResult<usize> {
        let span = self.span();
        let n = self.int(what)?;
        if n == 0 {
            return Err(ParseError::syntax(span, format!("{what} must be positive")));
        }
        Ok(n)
    }

    fn end_of_line(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Newline | Tok::Eof => {
                self.bump();
                Ok(())
            }
            _ => self.err("end of line"),
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        let span = self.span();
        let name = self.ident("a declaration name")?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(ParseError::syntax(span, format!("`{name}` is a keyword")));
        }
        if self.env.contains_key(&name) {
            return Err(ParseError::syntax(span, format!("`{name}` is already declared")));
        }
        self.expect_sym("=")?;
        let body = if (self.is_kw("classical") || self.is_kw("quantum")) && matches!(self.peek_at(1), Tok::Int(_)) {
            let quantum = self.ident("a wire kind")? == "quantum";
            let d = self.positive("a dimension")?;
            DeclBody::Type(if quantum { WireType::quantum(d) } else { WireType::classical(d) })
        } else if self.eat_kw("tensor") {
            DeclBody::Tensor(self.tensor_literal()?)
        } else {
            let (expr, value) = self.expr()?;
            DeclBody::Diagram { expr, value }
        };
        self.end_of_line()?;
        Ok(Decl { name, body })
    }

    fn dims(&mut self) -> PResult<Vec<usize>> {
        self.expect_sym("[")?;
        let mut out = Vec::new();
        if !self.is_sym("]") {
            loop {
                out.push(self.positive("a dimension")?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("]")?;
        Ok(out)
    }

    fn tensor_literal(&mut self) -> PResult<Tensor> {
        let span = self.span();
        let ins = self.dims()?;
        self.expect_sym("->")?;
        let outs = self.dims()?;
        self.expect_sym("[")?;
        let mut data = Vec::new();
        self.skip_newlines();
        if !self.is_sym("]") {
            loop {
                data.push(self.complex()?);
                self.skip_newlines();
                if !self.eat_sym(",") {
                    break;
                }
                self.skip_newlines();
            }
        }
        self.expect_sym("]")?;
        let n = data.len();
        Tensor::new(&ins, &outs, data).map_err(|_| {
            let want: usize = ins.iter().chain(&outs).product();
            ParseError::syntax(span, format!("tensor of shape {ins:?} -> {outs:?} needs {want} entries, found {n}"))
        })
    }

    fn real(&mut self) -> PResult<f64> {
        let neg = self.eat_sym("-");
        let x = match *self.peek() {
            Tok::Int(n) => n as f64,
            Tok::Float(x) => x,
            _ => return self.err("a number"),
        };
        self.pos += 1;
        Ok(if neg { -x } else { x })
    }

    fn complex(&mut self) -> PResult<C64> {
        if self.eat_sym("(") {
            let re = self.real()?;
            self.expect_sym(",")?;
            let im = self.real()?;
            self.expect_sym(")")?;
            Ok(C64::new(re, im))
        } else {
            Ok(C64::new(self.real()?, 0.0))
        }
    }

    fn angle(&mut self) -> PResult<f64> {
        let neg = self.eat_sym("-");
        let mut x = self.angle_factor()?;
        loop {
            if self.eat_sym("*") {
                x *= self.angle_factor()?;
            } else if self.eat_sym("/") {
                x /= self.angle_factor()?;
            } else {
                break;
            }
        }
        Ok(if neg { -x } else { x })
    }

    fn angle_factor(&mut self) -> PResult<f64> {
        if self.eat_kw("pi") {
            return Ok(std::f64::consts::PI);
        }
        match *self.peek() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(n as f64)
            }
            Tok::Float(x) => {
                self.pos += 1;
                Ok(x)
            }
            _ => self.err("an angle"),
        }
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if !self.is_sym(")") {
            loop {
                out.push(item(self)?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn resolve_type(&self, name: &str, span: &SourceSpan) -> PResult<WireType> {
        match self.env.get(name) {
            Some(Binding::Type(t)) => Ok(*t),
            Some(_) => Err(ParseError::unknown(span.clone(), format!("`{name}` is not a wire type"))),
            None => builtin_type(name).ok_or_else(|| ParseError::unknown(span.clone(), format!("unknown wire type `{name}`"))),
        }
    }

    fn type_name(&mut self) -> PResult<String> {
        let span = self.span();
        let name = self.ident("a wire type")?;
        self.resolve_type(&name, &span)?;
        Ok(name)
    }

    fn type_list(&mut self) -> PResult<Vec<String>> {
        self.expect_sym("[")?;
        let mut out = Vec::new();
        if !self.is_sym("]") {
            loop {
                out.push(self.type_name()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("]")?;
        Ok(out)
    }

    fn types(&self, names: &[String], span: &SourceSpan) -> PResult<Vec<WireType>> {
        names.iter().map(|n| self.resolve_type(n, span)).collect()
    }

    fn expr(&mut self) -> PResult<(Expr, Diagram)> {
        let (mut e, mut d) = self.par()?;
        while self.is_sym(";") {
            let span = self.span();
            self.pos += 1;
            let (e2, d2) = self.par()?;
            d = compose_seq(&d, &d2).map_err(|_| {
                ParseError::boundary(
                    span,
                    format!("cannot compose outputs {} with inputs {}", types_text(d.outputs()), types_text(d2.inputs())),
                )
            })?;
            e = Expr::Seq(Box::new(e), Box::new(e2));
        }
        Ok((e, d))
    }

    fn par(&mut self) -> PResult<(Expr, Diagram)> {
        let (mut e, mut d) = self.atom()?;
        while self.eat_sym("|") {
            let (e2, d2) = self.atom()?;
            d = compose_par(&d, &d2);
            e = Expr::Par(Box::new(e), Box::new(e2));
        }
        Ok((e, d))
    }

    fn atom(&mut self) -> PResult<(Expr, Diagram)> {
        let span = self.span();
        if self.eat_sym("(") {
            let inner = self.expr()?;
            self.expect_sym(")")?;
            return Ok(inner);
        }
        let name = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.err("a diagram"),
        };
        let unary = match name.as_str() {
            "dagger" => Some(UnaryOp::Dagger),
            "double" => Some(UnaryOp::Double),
            "transpose" => Some(UnaryOp::Transpose),
            "conj" => Some(UnaryOp::Conjugate),
            _ => None,
        };
        if let Some(op) = unary {
            self.pos += 1;
            self.expect_sym("(")?;
            let (e, d) = self.expr()?;
            self.expect_sym(")")?;
            let d = match op {
                UnaryOp::Dagger => dagger(&d),
                UnaryOp::Transpose => transpose(&d),
                UnaryOp::Conjugate => conjugate(&d),
                UnaryOp::Double => double(&d)
                    .map_err(|_| ParseError::boundary(span, "only diagrams on classical wires can be doubled".into()))?,
            };
            return Ok((Expr::Unary(op, Box::new(e)), d));
        }
        if name == "graph" {
            self.pos += 1;
            let (g, d) = self.graph(span)?;
            return Ok((Expr::Graph(g), d));
        }
        if KEYWORDS.contains(&name.as_str()) {
            let g = self.generator()?;
            let d = self.elaborate(&g, &span)?;
            return Ok((Expr::Gen(g), d));
        }
        self.pos += 1;
        match self.env.get(&name) {
            Some(Binding::Diagram(d)) => Ok((Expr::Ref(name), d.clone())),
            Some(_) => Err(ParseError::unknown(span, format!("`{name}` is not a diagram"))),
            None => Err(ParseError::unknown(span, format!("unknown diagram `{name}`"))),
        }
    }

    fn spider_opts(&mut self) -> PResult<SpiderOpts> {
        let mut opts = SpiderOpts::default();
        loop {
            if self.eat_kw("single") {
                opts.heads = Some(Heads::Single);
            } else if self.eat_kw("double") {
                opts.heads = Some(Heads::Double);
            } else if self.eat_kw("fourier") {
                opts.fourier = true;
            } else if self.eat_kw("onb") {
                opts.fourier = false;
            } else if self.is_kw("phase") && self.peek_at(1) == &Tok::Sym("(") {
                self.pos += 2;
                opts.phase = Some(PhaseLit::Angles(self.list(Self::angle)?));
            } else if self.is_kw("phasor") && self.peek_at(1) == &Tok::Sym("(") {
                self.pos += 2;
                opts.phase = Some(PhaseLit::Phasor(self.list(Self::complex)?));
            } else {
                return Ok(opts);
            }
        }
    }

    fn generator(&mut self) -> PResult<GenExpr> {
        let kw = self.ident("a generator")?;
        Ok(match kw.as_str() {
            "spider" => {
                let first = self.int("a number of inputs or a dimension")?;
                if self.eat_sym("->") {
                    let m = self.int("a number of outputs")?;
                    self.expect_sym("@")?;
                    let ty = self.type_name()?;
                    GenExpr::SpiderShort { n: first, m, ty, opts: self.spider_opts()? }
                } else if self.is_sym("[") {
                    let ins = self.type_list()?;
                    self.expect_sym("->")?;
                    let outs = self.type_list()?;
                    GenExpr::Spider { dim: first, ins, outs, opts: self.spider_opts()? }
                } else {
                    return self.err("`->` or a list of wire types");
                }
            }
            "id" => {
                if self.is_sym("[") {
                    GenExpr::Id(self.type_list()?)
                } else {
                    GenExpr::Id(vec![self.type_name()?])
                }
            }
            "cup" => GenExpr::Cup(self.type_name()?),
            "cap" => GenExpr::Cap(self.type_name()?),
            "swap" => {
                let a = self.type_name()?;
                GenExpr::Swap(a, self.type_name()?)
            }
            "measure" => GenExpr::Measure(self.positive("a dimension")?),
            "encode" => GenExpr::Encode(self.positive("a dimension")?),
            "discard" => GenExpr::Discard(self.positive("a dimension")?),
            "delete" => GenExpr::Delete(self.positive("a dimension")?),
            "copy" => GenExpr::Copy(self.positive("a dimension")?),
            "decohere" => GenExpr::Decohere(self.positive("a dimension")?),
            "phase" => {
                self.expect_sym("(")?;
                GenExpr::Phase(self.list(Self::angle)?)
            }
            "box" => {
                let tensor = self.ident("a tensor name")?;
                let doubled = self.eat_kw("doubled");
                let label = if self.eat_kw("as") {
                    match self.bump() {
                        Tok::Str(s) => Some(s),
                        _ => {
                            self.pos -= 1;
                            return self.err("a quoted box label");
                        }
                    }
                } else {
                    None
                };
                let sig = if self.eat_sym(":") {
                    let ins = self.type_list()?;
                    self.expect_sym("->")?;
                    Some((ins, self.type_list()?))
                } else {
                    None
                };
                GenExpr::Box { tensor, doubled, label, sig }
            }
            "scalar" => GenExpr::Scalar(self.complex()?),
            "empty" => GenExpr::Empty,
            _ => {
                self.pos -= 1;
                return self.err("a generator");
            }
        })
    }

    fn phase_vector(&self, lit: &PhaseLit, span: &SourceSpan) -> PResult<PhaseVector> {
        let r = match lit {
            PhaseLit::Angles(a) => PhaseVector::from_angles(a),
            PhaseLit::Phasor(c) => PhaseVector::from_components(c),
        };
        r.map_err(|e| ParseError::syntax(span.clone(), format!("invalid phase: {e}")))
    }

    fn elaborate(&self, g: &GenExpr, span: &SourceSpan) -> PResult<Diagram> {
        let bad = |e: DiagramError| ParseError::boundary(span.clone(), e.to_string());
        let spider = |dim: usize, ins: Vec<WireType>, outs: Vec<WireType>, opts: &SpiderOpts| -> PResult<Diagram> {
            let legs: Vec<_> = ins.iter().chain(&outs).collect();
            let default = if !legs.is_empty() && legs.iter().all(|t| t.is_quantum()) { Heads::Double } else { Heads::Single };
            let phase = opts.phase.as_ref().map(|p| self.phase_vector(p, span)).transpose()?;
            let s = Spider::new(opts.family(), dim, opts.heads.unwrap_or(default), ins, outs, phase).map_err(bad)?;
            Ok(Diagram::spider(s))
        };
        Ok(match g {
            GenExpr::SpiderShort { n, m, ty, opts } => {
                let t = self.resolve_type(ty, span)?;
                spider(t.dim(), vec![t; *n], vec![t; *m], opts)?
            }
            GenExpr::Spider { dim, ins, outs, opts } => {
                if *dim == 0 {
                    return Err(ParseError::syntax(span.clone(), "spider dimension must be positive".into()));
                }
                spider(*dim, self.types(ins, span)?, self.types(outs, span)?, opts)?
            }
            GenExpr::Id(ts) => Diagram::identity(&self.types(ts, span)?),
            GenExpr::Cup(t) => Diagram::cup(self.resolve_type(t, span)?),
            GenExpr::Cap(t) => Diagram::cap(self.resolve_type(t, span)?),
            GenExpr::Swap(a, b) => Diagram::swap(self.resolve_type(a, span)?, self.resolve_type(b, span)?),
            GenExpr::Measure(d) => Diagram::measure(*d),
            GenExpr::Encode(d) => Diagram::encode(*d),
            GenExpr::Discard(d) => discard(WireType::quantum(*d)).map_err(bad)?,
            GenExpr::Delete(d) => Diagram::delete(*d),
            GenExpr::Copy(d) => Diagram::copy(*d),
            GenExpr::Decohere(d) => Diagram::decoherence(*d),
            GenExpr::Phase(angles) => Diagram::phase_gate(&self.phase_vector(&PhaseLit::Angles(angles.clone()), span)?),
            GenExpr::Box { tensor, doubled, label, sig } => {
                let payload = match self.env.get(tensor) {
                    Some(Binding::Tensor(t)) => t.clone(),
                    Some(_) => return Err(ParseError::unknown(span.clone(), format!("`{tensor}` is not a tensor"))),
                    None => return Err(ParseError::unknown(span.clone(), format!("unknown tensor `{tensor}`"))),
                };
                let name = label.clone().unwrap_or_else(|| tensor.clone());
                match (doubled, sig) {
                    (true, None) => Diagram::boxed(BoxGen::doubled(name, payload)),
                    (true, Some(_)) => {
                        return Err(ParseError::syntax(span.clone(), "a doubled box takes its wire types from the tensor".into()))
                    }
                    (false, None) => Diagram::boxed(BoxGen::classical(name, payload)),
                    (false, Some((ins, outs))) => {
                        let b = BoxGen::plain(name, payload, self.types(ins, span)?, self.types(outs, span)?).map_err(bad)?;
                        Diagram::boxed(b)
                    }
                }
            }
            GenExpr::Scalar(z) => Diagram::scalar(*z),
            GenExpr::Empty => Diagram::empty(),
        })
    }

    fn port(&mut self) -> PResult<(PortRef, SourceSpan)> {
        let span = self.span();
        let name = self.ident("a port such as `in0`, `out1` or `n2.0`")?;
        let port = if let Some(k) = numbered(&name, "in") {
            PortRef::Input(k as usize)
        } else if let Some(k) = numbered(&name, "out") {
            PortRef::Output(k as usize)
        } else if let Some(id) = numbered(&name, "n").and_then(|n| u32::try_from(n).ok()) {
            self.expect_sym(".")?;
            PortRef::Node(id, self.int("a port number")?)
        } else {
            return Err(ParseError::syntax(span, format!("`{name}` is not a port")));
        };
        Ok((port, span))
    }

    fn graph(&mut self, span: SourceSpan) -> PResult<(GraphExpr, Diagram)> {
        let ins = self.type_list()?;
        self.expect_sym("->")?;
        let outs = self.type_list()?;
        self.expect_sym("{")?;
        let in_types = self.types(&ins, &span)?;
        let out_types = self.types(&outs, &span)?;
        let mut g = GraphExpr { ins, outs, nodes: Vec::new(), wires: Vec::new() };
        let mut nodes: BTreeMap<NodeId, Generator> = BTreeMap::new();
        let mut edges = Vec::new();
        loop {
            self.skip_newlines();
            if self.eat_sym("}") {
                break;
            }
            let line_span = self.span();
            if matches!(self.peek_at(1), Tok::Sym("=")) {
                let name = self.ident("a node name")?;
                let id = numbered(&name, "n")
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| ParseError::syntax(line_span.clone(), format!("node names look like `n0`, found `{name}`")))?;
                self.pos += 1;
                let gen_span = self.span();
                let gen = self.generator()?;
                let d = self.elaborate(&gen, &gen_span)?;
                let single = d.nodes().next().map(|(_, x)| x.clone()).filter(|_| d.node_count() == 1);
                let node = single.ok_or_else(|| {
                    ParseError::syntax(gen_span.clone(), "a graph node must be a single generator".into())
                })?;
                if nodes.insert(NodeId(id), node).is_some() {
                    return Err(ParseError::syntax(line_span, format!("node `{name}` is declared twice")));
                }
                g.nodes.push((id, gen));
            } else {
                let (src, src_span) = self.port()?;
                self.expect_sym("->")?;
                let (tgt, tgt_span) = self.port()?;
                let src_end = match src {
                    PortRef::Input(k) => Endpoint::Input(k),
                    PortRef::Node(n, p) => Endpoint::Out(NodeId(n), p),
                    PortRef::Output(_) => return Err(ParseError::syntax(src_span, "a wire cannot start at an output".into())),
                };
                let tgt_end = match tgt {
                    PortRef::Output(k) => Endpoint::Output(k),
                    PortRef::Node(n, p) => Endpoint::In(NodeId(n), p),
                    PortRef::Input(_) => return Err(ParseError::syntax(tgt_span, "a wire cannot end at an input".into())),
                };
                let ty = match src_end {
                    Endpoint::Input(k) => in_types.get(k).copied(),
                    Endpoint::Out(n, p) => nodes.get(&n).and_then(|x| x.outputs().get(p).copied()),
                    _ => None,
                }
                .ok_or_else(|| ParseError::unknown(src_span, "wire starts at an undeclared port".into()))?;
                edges.push(Edge { src: src_end, tgt: tgt_end, ty });
                g.wires.push((src, tgt));
            }
            if !self.is_sym("}") {
                self.end_of_line()?;
            }
        }
        let next_id = nodes.keys().map(|n| n.0 + 1).max().unwrap_or(0);
        let d = Diagram::from_raw(nodes, edges, in_types, out_types, next_id);
        d.validate().map_err(|e| ParseError::boundary(span, e.to_string()))?;
        Ok((g, d))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, ParseErrorKind};

    #[test]
    fn recovers_after_a_broken_graph() {
        let src = "a = graph [] -> [c2] {\n  n0 = bogus\n}\nb = id c2\nc = nope\n";
        let errs = parse(src).unwrap_err().0;
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].span.line, 2);
        assert_eq!(errs[1].kind, ParseErrorKind::UnknownName);
        assert_eq!(errs[1].span.line, 5);
    }

    #[test]
    fn dangling_graph_port_is_a_boundary_error() {
        let errs = parse("a = graph [c2] -> [] {\n}\n").unwrap_err().0;
        assert_eq!(errs[0].kind, ParseErrorKind::BoundaryMismatch);
    }

    #[test]
    fn keywords_cannot_be_declared() {
        let errs = parse("spider = id c2\n").unwrap_err().0;
        assert_eq!(errs[0].kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn declared_types_and_angles() {
        let doc = parse("w = quantum 3\np = spider 1 -> 1 @ w phase(0, -pi/3, 2*pi/3)\n").unwrap();
        assert_eq!(doc.diagram("p").unwrap().inputs()[0].to_string(), "q3");
    }
}
