//! Equational lemmas: two-sided laws checked for soundness but never
//! applied by the engine.

use rand::Rng as _;

use super::{RewriteRule, RuleKind};
use crate::diagram::{compose_par, compose_seq, discard, BoxGen, Diagram, Family, Heads, Spider, WireType};
use crate::random::Rng;
use crate::tensor::EqualityMode;

macro_rules! lemma {
    ($name:literal, $law:literal, $mode:expr, $sample:path) => {
        RewriteRule { name: $name, law: $law, mode: $mode, kind: RuleKind::Lemma { sample: $sample } }
    };
}

pub static LEMMAS: &[RewriteRule] = &[
    lemma!("frobenius", "comultiplication beside a wire then multiplication equals multiplication then comultiplication", EqualityMode::Strict, frobenius),
    lemma!("special", "multiplication after comultiplication is a wire", EqualityMode::Strict, special),
    lemma!("commutative", "multiplication ignores the order of its inputs", EqualityMode::Strict, commutative),
    lemma!("unit", "multiplying by the unit is a wire", EqualityMode::Strict, unit),
    lemma!("associative", "both bracketings of a triple product agree", EqualityMode::Strict, associative),
    lemma!("encode-discard", "encoding then discarding is deleting", EqualityMode::Strict, encode_discard),
    lemma!("measure-delete", "measuring then deleting is discarding", EqualityMode::Strict, measure_delete),
    lemma!("measure-encode", "encoding then measuring is a classical wire", EqualityMode::Strict, measure_encode),
    lemma!("anti-special-separation", "for the W algebra, multiplication after comultiplication separates into counit-dagger after unit-dagger", EqualityMode::UpToScalar, anti_special),
];

/// A random spider generator: single-headed on classical wires or doubled
/// on quantum wires, in either family, with the given arity.
struct Kind {
    family: Family,
    wire: WireType,
}

impl Kind {
    fn random(rng: &mut Rng, dim: usize) -> Self {
        let family = if rng.random_bool(0.5) { Family::Onb } else { Family::Fourier };
        let wire = if rng.random_bool(0.5) { WireType::quantum(dim) } else { WireType::classical(dim) };
        Self { family, wire }
    }

    fn spider(&self, n: usize, m: usize) -> Diagram {
        let heads = if self.wire.is_quantum() { Heads::Double } else { Heads::Single };
        Diagram::spider(
            Spider::new(self.family, self.wire.dim(), heads, vec![self.wire; n], vec![self.wire; m], None)
                .expect("uniform legs"),
        )
    }

    fn id(&self) -> Diagram { Diagram::identity(&[self.wire]) }
}

fn seq(a: &Diagram, b: &Diagram) -> Diagram { compose_seq(a, b).expect("lemma sides compose") }

fn frobenius(rng: &mut Rng, dim: usize) -> (Diagram, Diagram) {
    let k = Kind::random(rng, dim);
    let lhs = seq(&compose_par(&k.spider(1, 2), &k.id()), &compose_par(&k.id(), &k.spider(2, 1)));
    (lhs, seq(&k.spider(2, 1), &k.spider(1, 2)))
}

fn special(rng: &mut Rng, dim: usize) -> (Diagram, Diagram) {
    let k = Kind::random(rng, dim);
    (seq(&k.spider(1, 2), &k.spider(2, 1)), k.id())
}

fn commutative(rng: &mut Rng, dim: usize) -> (Diagram, Diagram) {
    let k = Kind::random(rng, dim);
    (seq(&Diagram::swap(k.wire, k.wire), &k.spider(2, 1)), k.spider(2, 1))
}

fn unit(rng: &mut Rng, dim: usize) -> (Diagram, Diagram) {
    let k = Kind::random(rng, dim);
    (seq(&compose_par(&k.spider(0, 1), &k.id()), &k.spider(2, 1)), k.id())
}

fn associative(rng: &mut Rng, dim: usize) -> (Diagram, Diagram) {
    let k = Kind::random(rng, dim);
    let lhs = seq(&compose_par(&k.spider(2, 1), &k.id()), &k.spider(2, 1));
    let rhs = seq(&compose_par(&k.id(), &k.spider(2, 1)), &k.spider(2, 1));
    (lhs, rhs)
}

fn encode_discard(_: &mut Rng, dim: usize) -> (Diagram, Diagram) {
    let q = WireType::quantum(dim);
    (seq(&Diagram::encode(dim), &discard(q).expect("quantum")), Diagram::delete(dim))
}

fn measure_delete(_: &mut Rng, dim: usize) -> (Diagram, Diagram) {
    let q = WireType::quantum(dim);
    (seq(&Diagram::measure(dim), &Diagram::delete(dim)), discard(q).expect("quantum"))
}

fn measure_encode(_: &mut Rng, dim: usize) -> (Diagram, Diagram) {
    (seq(&Diagram::encode(dim), &Diagram::measure(dim)), Diagram::identity(&[WireType::classical(dim)]))
}

/// The W algebra is defined on qubits only; `dim` is ignored.
fn anti_special(_: &mut Rng, _dim: usize) -> (Diagram, Diagram) {
    let w = crate::entanglement::w_candidate();
    let b = |name: &str, t: &crate::Tensor| Diagram::boxed(BoxGen::classical(name, t.clone()));
    let lhs = seq(&b("δ", &w.comult), &b("μ", &w.mult));
    let rhs = seq(&b("η†", &w.unit.dagger()), &b("ε†", &w.counit.dagger()));
    (lhs, rhs)
}
