//! Rewriting of diagrams towards a normal form.
//!
//! Oriented rules are tried in a fixed priority order. Every rule strictly
//! decreases the lexicographic [`measure`], so normalisation terminates
//! whatever strategy picks the next match. Lemma rules are equalities that
//! the engine does not apply but whose soundness is checked alongside.

mod lemmas;
mod rules;
mod surgery;

use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagram::{isomorphic, Diagram, Generator, NodeId};
use crate::random::{seeded, Rng};
use crate::tensor::{evaluate, numeric_deviation, EqualityMode, NumericTolerance, TensorError};

pub use rules::{canonical_zero, is_canonical_zero};

pub type FindFn = fn(&Diagram, NodeId) -> Option<Vec<NodeId>>;
pub type ApplyFn = fn(&Diagram, &[NodeId]) -> Option<Diagram>;
pub type SampleFn = fn(&mut Rng, usize) -> Diagram;
pub type PairFn = fn(&mut Rng, usize) -> (Diagram, Diagram);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewriteError {
    #[error("rule {rule} does not match at nodes {nodes:?}")]
    InvalidMatch { rule: String, nodes: Vec<u32> },
    #[error("rule {0} is a lemma and cannot be applied")]
    NotOriented(String),
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("trace diverges at step {step}: expected {expected}, found {found}")]
    ReplayMismatch { step: usize, expected: String, found: String },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub type RewriteResult<T> = Result<T, RewriteError>;

#[derive(Clone, Copy)]
pub enum RuleKind {
    /// Applied by the engine, left to right.
    Oriented { find: FindFn, apply: ApplyFn, sample: SampleFn },
    /// Checked for soundness only.
    Lemma { sample: PairFn },
}

#[derive(Clone, Copy)]
pub struct RewriteRule {
    pub name: &'static str,
    /// The law in words.
    pub law: &'static str,
    /// Equality the two sides satisfy.
    pub mode: EqualityMode,
    pub kind: RuleKind,
}

impl std::fmt::Debug for RewriteRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result { f.write_str(self.name) }
}

/// Nodes a rule matched, in the order its applier expects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub rule: &'static str,
    pub nodes: Vec<NodeId>,
}

impl RewriteRule {
    pub fn is_oriented(&self) -> bool { matches!(self.kind, RuleKind::Oriented { .. }) }

    pub fn find_at(&self, d: &Diagram, n: NodeId) -> Option<Match> {
        match self.kind {
            RuleKind::Oriented { find, .. } => find(d, n).map(|nodes| Match { rule: self.name, nodes }),
            RuleKind::Lemma { .. } => None,
        }
    }

    /// Every match, anchored at nodes in increasing id order.
    pub fn find_all(&self, d: &Diagram) -> Vec<Match> { d.node_ids().into_iter().filter_map(|n| self.find_at(d, n)).collect() }

    /// A random instance `(lhs, rhs)` of the rule at dimension `dim`. For an
    /// oriented rule the left side is sampled and the first match rewritten.
    pub fn instance(&self, rng: &mut Rng, dim: usize) -> (Diagram, Diagram) {
        match self.kind {
            RuleKind::Lemma { sample } => sample(rng, dim),
            RuleKind::Oriented { sample, .. } => {
                for _ in 0..1000 {
                    let lhs = sample(rng, dim);
                    let m = self.find_all(&lhs).into_iter().next().unwrap_or_else(|| panic!("{} sampler missed", self.name));
                    let rhs = apply_rule(&lhs, self, &m).expect("fresh match applies");
                    if evaluate(&lhs).is_ok() && evaluate(&rhs).is_ok() {
                        return (lhs, rhs);
                    }
                }
                panic!("{} sampler produced no evaluable instance", self.name)
            }
        }
    }
}

macro_rules! oriented {
    ($name:literal, $law:literal, $find:path, $apply:path, $sample:path) => {
        RewriteRule {
            name: $name,
            law: $law,
            mode: EqualityMode::Strict,
            kind: RuleKind::Oriented { find: $find, apply: $apply, sample: $sample },
        }
    };
}

use rules as r;

/// Oriented rules in priority order.
pub static RULES: &[RewriteRule] = &[
    oriented!("zero-collapse", "a diagram containing the scalar 0 equals the canonical zero diagram of its type", r::find_zero, r::apply_zero, r::sample_zero),
    oriented!("swap-elim", "a swap is two crossing wires", r::find_swap, r::apply_swap, r::sample_swap),
    oriented!("yank", "a cup joined to a cap straightens to a wire, or closes to the loop scalar", r::find_yank, r::apply_yank, r::sample_yank),
    oriented!("cup-to-spider", "a cup is the two-output spider", r::find_cup, r::apply_cup, r::sample_cup),
    oriented!("cap-to-spider", "a cap is the two-input spider", r::find_cap, r::apply_cap, r::sample_cap),
    oriented!("legless-spider", "a spider without legs is a scalar", r::find_legless, r::apply_legless, r::sample_legless),
    oriented!("self-loop", "a wire from a spider back to itself can be removed", r::find_self_loop, r::apply_self_loop, r::sample_self_loop),
    oriented!("spider-fusion", "two connected unphased spiders of the same kind fuse", r::find_spider_fusion, r::apply_spider_fusion, r::sample_spider_fusion),
    oriented!("phase-fusion", "two connected spiders of the same kind fuse and their phases multiply", r::find_phase_fusion, r::apply_phase_fusion, r::sample_phase_fusion),
    oriented!("bastard-fusion", "a single-headed spider absorbs a connected doubled spider and its phase", r::find_mixed_fusion, r::apply_mixed_fusion, r::sample_mixed_fusion),
    oriented!("identity-removal", "an unphased one-in one-out spider is a plain wire", r::find_identity, r::apply_identity, r::sample_identity),
    oriented!("copy", "a basis value meeting a single-headed spider is copied onto every other leg", r::find_copy, r::apply_copy, r::sample_copy),
    oriented!("state-effect", "a state followed by an effect is their inner product", r::find_state_effect, r::apply_state_effect, r::sample_state_effect),
    oriented!("controlled-unitary-cancel", "a controlled unitary after its adjoint, on both wires, is the control dimension times a wire", r::find_controlled, r::apply_controlled, r::sample_controlled),
    oriented!("scalar-merge", "two scalars multiply", r::find_scalar_merge, r::apply_scalar_merge, r::sample_scalar_merge),
    oriented!("scalar-unit", "the scalar 1 can be dropped", r::find_scalar_unit, r::apply_scalar_unit, r::sample_scalar_unit),
];

pub use lemmas::LEMMAS;

/// Look up an oriented rule or lemma by name.
pub fn rule(name: &str) -> Option<&'static RewriteRule> { RULES.iter().chain(LEMMAS).find(|r| r.name == name) }

pub fn apply_rule(d: &Diagram, rule: &RewriteRule, m: &Match) -> RewriteResult<Diagram> {
    let RuleKind::Oriented { apply, .. } = rule.kind else {
        return Err(RewriteError::NotOriented(rule.name.into()));
    };
    apply(d, &m.nodes).ok_or_else(|| RewriteError::InvalidMatch {
        rule: rule.name.into(),
        nodes: m.nodes.iter().map(|n| n.0).collect(),
    })
}

/// Lexicographic termination measure: not-canonical-zero flag, structural
/// node count (cups, caps, swaps), spider count, node count, edge count.
pub type Measure = [usize; 5];

pub fn measure(d: &Diagram) -> Measure {
    let structural = d.nodes().filter(|(_, g)| g.is_structural()).count();
    let spiders = d.nodes().filter(|(_, g)| matches!(g, Generator::Spider(_))).count();
    [usize::from(!is_canonical_zero(d)), structural, spiders, d.node_count(), d.edge_count()]
}

/// First 16 hex digits of the SHA-256 of the canonical dump.
pub fn diagram_hash(d: &Diagram) -> String {
    let digest = Sha256::digest(d.canonical_dump().as_bytes());
    digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: String,
    pub nodes: Vec<u32>,
    /// Hash of the diagram after the step.
    pub hash: String,
    /// Measure of the diagram after the step.
    pub measure: Measure,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteTrace {
    pub initial_hash: String,
    pub initial_measure: Measure,
    pub steps: Vec<TraceStep>,
}

impl RewriteTrace {
    pub fn len(&self) -> usize { self.steps.len() }

    pub fn is_empty(&self) -> bool { self.steps.is_empty() }

    /// Whether the measure drops strictly at every step.
    pub fn measure_decreases(&self) -> bool {
        let mut prev = self.initial_measure;
        self.steps.iter().all(|s| {
            let ok = s.measure < prev;
            prev = s.measure;
            ok
        })
    }
}

/// How the next match is chosen.
pub enum Strategy {
    /// Highest-priority rule first, lowest anchor node first.
    Deterministic,
    /// Uniformly among all current matches of all rules.
    Random(Box<Rng>),
}

impl Strategy {
    pub fn random(seed: u64) -> Self { Self::Random(Box::new(seeded(seed))) }

    fn pick(&mut self, d: &Diagram) -> Option<(&'static RewriteRule, Match)> {
        match self {
            Self::Deterministic => RULES.iter().find_map(|r| r.find_all(d).into_iter().next().map(|m| (r, m))),
            Self::Random(rng) => {
                let all: Vec<(&'static RewriteRule, Match)> =
                    RULES.iter().flat_map(|r| r.find_all(d).into_iter().map(move |m| (r, m))).collect();
                if all.is_empty() {
                    return None;
                }
                let k = rng.random_range(0..all.len());
                all.into_iter().nth(k)
            }
        }
    }
}

/// Normalise with the deterministic strategy.
pub fn normalize(d: &Diagram) -> (Diagram, RewriteTrace) { normalize_with(d, &mut Strategy::Deterministic) }

pub fn normalize_with(d: &Diagram, strategy: &mut Strategy) -> (Diagram, RewriteTrace) {
    let mut cur = d.clone();
    let mut trace = RewriteTrace { initial_hash: diagram_hash(d), initial_measure: measure(d), steps: Vec::new() };
    while let Some((rule, m)) = strategy.pick(&cur) {
        cur = apply_rule(&cur, rule, &m).expect("matches found on the current diagram apply");
        trace.steps.push(TraceStep {
            rule: rule.name.into(),
            nodes: m.nodes.iter().map(|n| n.0).collect(),
            hash: diagram_hash(&cur),
            measure: measure(&cur),
        });
    }
    (cur, trace)
}

/// Re-run a trace from `d`, checking every intermediate hash.
pub fn replay(d: &Diagram, trace: &RewriteTrace) -> RewriteResult<Diagram> {
    let start = diagram_hash(d);
    if start != trace.initial_hash {
        return Err(RewriteError::ReplayMismatch { step: 0, expected: trace.initial_hash.clone(), found: start });
    }
    let mut cur = d.clone();
    for (k, step) in trace.steps.iter().enumerate() {
        let r = rule(&step.rule).ok_or_else(|| RewriteError::UnknownRule(step.rule.clone()))?;
        let m = Match { rule: r.name, nodes: step.nodes.iter().map(|&n| NodeId(n)).collect() };
        cur = apply_rule(&cur, r, &m)?;
        let h = diagram_hash(&cur);
        if h != step.hash {
            return Err(RewriteError::ReplayMismatch { step: k + 1, expected: step.hash.clone(), found: h });
        }
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RewriteVerdict {
    pub equal: bool,
    /// The normal forms differed and the answer came from numeric evaluation.
    pub delegated: bool,
    pub normal_forms_isomorphic: bool,
    /// Numeric deviation, present when delegated.
    pub deviation: Option<f64>,
}

/// Decide equality by comparing normal forms, falling back to numeric
/// evaluation when they are not isomorphic.
pub fn rewrite_equal(d1: &Diagram, d2: &Diagram, tol: NumericTolerance) -> RewriteResult<RewriteVerdict> {
    if d1.inputs() != d2.inputs() || d1.outputs() != d2.outputs() {
        return Err(RewriteError::BoundaryMismatch(format!(
            "{:?} -> {:?} against {:?} -> {:?}",
            d1.inputs(),
            d1.outputs(),
            d2.inputs(),
            d2.outputs()
        )));
    }
    let (n1, _) = normalize(d1);
    let (n2, _) = normalize(d2);
    if isomorphic(&n1, &n2, tol) {
        return Ok(RewriteVerdict { equal: true, delegated: false, normal_forms_isomorphic: true, deviation: None });
    }
    let deviation = numeric_deviation(d1, d2, tol)?;
    Ok(RewriteVerdict {
        equal: deviation.is_some_and(|x| x <= tol.absolute),
        delegated: true,
        normal_forms_isomorphic: false,
        deviation,
    })
}

/// Deviation between the two sides of one rule instance.
pub fn soundness_deviation(lhs: &Diagram, rhs: &Diagram, mode: EqualityMode, tol: f64) -> RewriteResult<Option<f64>> {
    let (a, b) = (evaluate(lhs)?, evaluate(rhs)?);
    Ok(a.deviation(&b, mode, tol))
}

/// The rule catalog as a markdown table.
pub fn catalog_markdown() -> String {
    let mut s = String::from("# Rewrite rules\n\n");
    s.push_str("Oriented rules, in the priority order used by the deterministic strategy.\n\n");
    s.push_str("| # | rule | law | equality |\n|---|---|---|---|\n");
    for (k, r) in RULES.iter().enumerate() {
        let _ = writeln!(s, "| {} | `{}` | {} | {} |", k + 1, r.name, r.law, r.mode);
    }
    s.push_str("\nLemmas, checked for soundness but never applied.\n\n");
    s.push_str("| rule | law | equality |\n|---|---|---|\n");
    for r in LEMMAS {
        let _ = writeln!(s, "| `{}` | {} | {} |", r.name, r.law, r.mode);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{compose_seq, WireType};
    use crate::tensor::numeric_equal;

    fn sound(rule: &RewriteRule, seed: u64) {
        let mut rng = seeded(seed);
        for dim in [2, 3] {
            for _ in 0..10 {
                let (lhs, rhs) = rule.instance(&mut rng, dim);
                lhs.validate().unwrap();
                rhs.validate().unwrap();
                let dev = soundness_deviation(&lhs, &rhs, rule.mode, 1e-9).unwrap();
                assert!(dev.is_some_and(|x| x <= 1e-9), "{} unsound: {dev:?}\n{lhs}\n{rhs}", rule.name);
            }
        }
    }

    #[test]
    fn every_rule_is_sound_on_a_few_instances() {
        for (k, r) in RULES.iter().chain(LEMMAS).enumerate() {
            sound(r, k as u64);
        }
    }

    #[test]
    fn oriented_rules_decrease_measure() {
        let mut rng = seeded(11);
        for r in RULES {
            for dim in [2, 3] {
                let (lhs, rhs) = r.instance(&mut rng, dim);
                assert!(measure(&rhs) < measure(&lhs), "{}", r.name);
            }
        }
    }

    #[test]
    fn measure_then_encode_normalises_to_wire() {
        let d = compose_seq(&Diagram::encode(2), &Diagram::measure(2)).unwrap();
        let (nf, trace) = normalize(&d);
        assert!(isomorphic(&nf, &Diagram::identity(&[WireType::classical(2)]), NumericTolerance::default()));
        assert!(trace.measure_decreases());
        assert_eq!(replay(&d, &trace).unwrap(), nf);
    }

    #[test]
    fn invalid_match_is_rejected() {
        let d = Diagram::copy(2);
        let n = d.node_ids()[0];
        let r = rule("swap-elim").unwrap();
        let err = apply_rule(&d, r, &Match { rule: r.name, nodes: vec![n] }).unwrap_err();
        assert!(matches!(err, RewriteError::InvalidMatch { .. }));
    }

    #[test]
    fn tampered_trace_fails_replay() {
        let d = compose_seq(&Diagram::copy(2), &Diagram::classical_spider(2, 1, 2)).unwrap();
        let (_, mut trace) = normalize(&d);
        trace.steps[0].hash = "0000000000000000".into();
        assert!(matches!(replay(&d, &trace), Err(RewriteError::ReplayMismatch { step: 1, .. })));
    }

    #[test]
    fn rewrite_equal_rejects_boundary_mismatch() {
        let r = rewrite_equal(&Diagram::copy(2), &Diagram::delete(2), NumericTolerance::default());
        assert!(matches!(r, Err(RewriteError::BoundaryMismatch(_))));
    }

    #[test]
    fn random_strategy_reaches_isomorphic_normal_form() {
        let mut rng = seeded(5);
        let d = crate::random::random_spider_diagram(&mut rng, &crate::random::SpiderDiagramConfig::new(2));
        let (a, _) = normalize(&d);
        let (b, t) = normalize_with(&d, &mut Strategy::random(9));
        assert!(t.measure_decreases());
        assert!(isomorphic(&a, &b, NumericTolerance::default()));
        assert!(numeric_equal(&a, &d, NumericTolerance::default()).unwrap());
    }
}
