//! The `.sdg` text format for diagrams.
//!
//! A document is a sequence of newline-terminated declarations binding
//! names to wire types, tensors or diagrams. Diagrams are written as
//! expressions over generators, with `;` for sequential and `|` for
//! parallel composition, or as explicit `graph` blocks listing nodes and
//! wires. The grammar is documented in `GRAMMAR.md` next to this crate.

mod dot;
mod gen;
mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::diagram::{Diagram, Family, Heads, WireType};
use crate::tensor::Tensor;
use crate::C64;

pub use dot::export_dot;
pub use gen::random_source;
pub use printer::{diagram_to_doc, print, print_diagram};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result { write!(f, "{}:{}:{}", self.file, self.line, self.column) }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownName,
    BoundaryMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {kind:?}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseError {
    pub(crate) fn syntax(span: SourceSpan, message: String) -> Self { Self { kind: ParseErrorKind::Syntax, message, span } }

    pub(crate) fn unknown(span: SourceSpan, message: String) -> Self {
        Self { kind: ParseErrorKind::UnknownName, message, span }
    }

    pub(crate) fn boundary(span: SourceSpan, message: String) -> Self {
        Self { kind: ParseErrorKind::BoundaryMismatch, message, span }
    }
}

/// All errors of a failed parse, in source order.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ParseErrors(pub Vec<ParseError>);

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Dagger,
    Double,
    Transpose,
    Conjugate,
}

impl UnaryOp {
    pub(crate) fn keyword(self) -> &'static str {
        match self {
            Self::Dagger => "dagger",
            Self::Double => "double",
            Self::Transpose => "transpose",
            Self::Conjugate => "conj",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhaseLit {
    /// Radians.
    Angles(Vec<f64>),
    /// Unit-modulus components.
    Phasor(Vec<C64>),
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpiderOpts {
    pub heads: Option<Heads>,
    pub fourier: bool,
    pub phase: Option<PhaseLit>,
}

impl SpiderOpts {
    pub(crate) fn family(&self) -> Family { if self.fourier { Family::Fourier } else { Family::Onb } }
}

/// One generator as written. Wire types are kept as the names used in the
/// source.
#[derive(Clone, Debug, PartialEq)]
pub enum GenExpr {
    /// `spider N -> M @ T`.
    SpiderShort { n: usize, m: usize, ty: String, opts: SpiderOpts },
    /// `spider D [T, ..] -> [T, ..]`.
    Spider { dim: usize, ins: Vec<String>, outs: Vec<String>, opts: SpiderOpts },
    Id(Vec<String>),
    Cup(String),
    Cap(String),
    Swap(String, String),
    Measure(usize),
    Encode(usize),
    Discard(usize),
    Delete(usize),
    Copy(usize),
    Decohere(usize),
    /// Quantum phase gate from angles.
    Phase(Vec<f64>),
    Box { tensor: String, doubled: bool, label: Option<String>, sig: Option<(Vec<String>, Vec<String>)> },
    Scalar(C64),
    Empty,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PortRef {
    Input(usize),
    Output(usize),
    Node(u32, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphExpr {
    pub ins: Vec<String>,
    pub outs: Vec<String>,
    pub nodes: Vec<(u32, GenExpr)>,
    pub wires: Vec<(PortRef, PortRef)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// `a ; b`: `a` first.
    Seq(Box<Expr>, Box<Expr>),
    Par(Box<Expr>, Box<Expr>),
    Ref(String),
    Unary(UnaryOp, Box<Expr>),
    Gen(GenExpr),
    Graph(GraphExpr),
}

#[derive(Clone, Debug)]
pub enum DeclBody {
    Type(WireType),
    Tensor(Tensor),
    Diagram { expr: Expr, value: Diagram },
}

impl PartialEq for DeclBody {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Type(a), Self::Type(b)) => a == b,
            (Self::Tensor(a), Self::Tensor(b)) => a == b,
            (Self::Diagram { expr: e1, value: v1 }, Self::Diagram { expr: e2, value: v2 }) => {
                e1 == e2 && v1.canonical_dump() == v2.canonical_dump()
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub name: String,
    pub body: DeclBody,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagramDoc {
    pub decls: Vec<Decl>,
}

impl DiagramDoc {
    pub fn diagram(&self, name: &str) -> Option<&Diagram> {
        self.decls.iter().rev().find(|d| d.name == name).and_then(|d| match &d.body {
            DeclBody::Diagram { value, .. } => Some(value),
            _ => None,
        })
    }

    /// The last diagram declared, the conventional entry point of a file.
    pub fn main_diagram(&self) -> Option<(&str, &Diagram)> {
        self.decls.iter().rev().find_map(|d| match &d.body {
            DeclBody::Diagram { value, .. } => Some((d.name.as_str(), value)),
            _ => None,
        })
    }

    pub fn diagram_names(&self) -> Vec<&str> {
        self.decls.iter().filter(|d| matches!(d.body, DeclBody::Diagram { .. })).map(|d| d.name.as_str()).collect()
    }
}

/// Parse a document; `file` labels error spans.
pub fn parse_named(text: &str, file: &str) -> Result<DiagramDoc, ParseErrors> { parser::parse(text, file) }

pub fn parse(text: &str) -> Result<DiagramDoc, ParseErrors> { parse_named(text, "<input>") }

/// Whether two diagrams have the same nodes (with ids), edges and boundary.
pub fn structurally_equal(a: &Diagram, b: &Diagram) -> bool { a.canonical_dump() == b.canonical_dump() }

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::isomorphic;
    use crate::tensor::evaluate;
    use crate::NumericTolerance;

    #[test]
    fn short_spider() {
        let doc = parse("s = spider 2 -> 1 @ c2\n").unwrap();
        let d = doc.diagram("s").unwrap();
        assert!(isomorphic(d, &Diagram::classical_spider(2, 1, 2), NumericTolerance::default()));
    }

    #[test]
    fn malformed_spider_points_at_end_of_line() {
        let errs = parse("x = spider 2 ->\n").unwrap_err().0;
        assert_eq!(errs[0].kind, ParseErrorKind::Syntax);
        assert_eq!((errs[0].span.line, errs[0].span.column), (1, 16));
    }

    #[test]
    fn teleport_skeleton_parses() {
        let src = "q2 = quantum 2\ntele = cup q2 | id q2 ; id q2 | measure 2 | id q2\n";
        let doc = parse(src).unwrap();
        let d = doc.diagram("tele").unwrap();
        assert_eq!(d.inputs(), &[WireType::quantum(2)]);
        assert_eq!(d.outputs(), &[WireType::quantum(2), WireType::classical(2), WireType::quantum(2)]);
    }

    #[test]
    fn unknown_and_mismatch_errors_have_spans() {
        let errs = parse("a = id q2 ; spider 1 -> 1 @ c2\nb = foo\n").unwrap_err().0;
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].kind, ParseErrorKind::BoundaryMismatch);
        assert_eq!((errs[0].span.line, errs[0].span.column), (1, 11));
        assert_eq!(errs[1].kind, ParseErrorKind::UnknownName);
        assert_eq!((errs[1].span.line, errs[1].span.column), (2, 5));
    }

    #[test]
    fn phase_round_trip_is_exact() {
        let doc = parse("g = spider 1 -> 1 @ q2 phase(0, pi/2)\n").unwrap();
        let again = parse(&print(&doc)).unwrap();
        assert_eq!(doc, again);
    }

    #[test]
    fn graph_of_ghz_round_trips() {
        let ghz = Diagram::quantum_spider(0, 3, 2);
        let text = print_diagram("ghz", &ghz);
        let doc = parse(&text).unwrap();
        assert!(structurally_equal(doc.diagram("ghz").unwrap(), &ghz));
        assert_eq!(parse(&print(&doc)).unwrap(), doc);
    }

    #[test]
    fn tensor_box_evaluates_to_payload() {
        let doc = parse("m = tensor [2] -> [2] [1, 2, 3, (0, 1)]\nf = box m\n").unwrap();
        let t = evaluate(doc.diagram("f").unwrap()).unwrap();
        assert_eq!(t.data()[3], C64::new(0.0, 1.0));
    }
}
