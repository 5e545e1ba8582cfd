//! Teleportation, dense coding and entanglement swapping built from a
//! classically controlled unitary, with numeric verifiers.
//!
//! Every protocol uses the same Bell measurement: the adjoint of the
//! controlled unitary, read as a process emitting the control, followed by a
//! cap. Its outcome `i` is the effect `<Φ| (U_i† ⊗ 1) / √D`, a basis
//! measurement exactly when the branches are orthogonal in the trace inner
//! product.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cq::{CqError, CqProcess, ProbDist};
use crate::diagram::{compose_par, compose_seq, dagger, discard, BoxGen, Diagram, DiagramError, WireType};
use crate::entanglement::{is_entangled_2q, partial_transpose_min_eigenvalue, EntanglementError};
use crate::linalg::{isometry_defect, weyl, CMatrix};
use crate::rewrite::{normalize, replay, RewriteError, RewriteTrace};
use crate::tensor::{evaluate, EqualityMode, NumericTolerance, Tensor, TensorError};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("control dimension {control} does not match D^2 = {expected}")]
    DimMismatch { control: usize, expected: usize },
    #[error("invalid branches: {0}")]
    InvalidBranches(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Cq(#[from] CqError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

pub type ProtocolResult<T> = Result<T, ProtocolError>;

/// A quantum process on `q D` selected by a classical control `c k`.
#[derive(Clone, Debug)]
pub struct ControlledUnitary {
    process: CqProcess,
    branches: Vec<CMatrix>,
}

/// The plain payload of a controlled process: branch `i` holds `U_i ⊗ conj(U_i)`.
fn controlled_box(name: &str, branches: &[CMatrix]) -> BoxGen {
    let d = branches[0].nrows();
    let q = d * d;
    let mut data = Vec::with_capacity(branches.len() * q * q);
    for u in branches {
        let doubled = u.kronecker(&u.map(|z| z.conj()));
        data.extend_from_slice(Tensor::from_matrix(&doubled, &[q], &[q]).expect("square").data());
    }
    let payload = Tensor::new(&[branches.len(), q], &[q], data).expect("shape fits");
    BoxGen::plain(name, payload, vec![WireType::classical(branches.len()), WireType::quantum(d)], vec![WireType::quantum(d)])
        .expect("legs fit payload")
}

impl ControlledUnitary {
    /// Branches must be square unitaries of one size.
    pub fn new(branches: Vec<CMatrix>) -> ProtocolResult<Self> {
        let first = branches.first().ok_or_else(|| ProtocolError::InvalidBranches("no branches".into()))?;
        let d = first.nrows();
        for (i, u) in branches.iter().enumerate() {
            if u.nrows() != d || u.ncols() != d {
                return Err(ProtocolError::InvalidBranches(format!("branch {i} is not {d}x{d}")));
            }
            let defect = isometry_defect(u).max(isometry_defect(&u.adjoint()));
            if defect > 1e-9 {
                return Err(ProtocolError::InvalidBranches(format!("branch {i} is not unitary (defect {defect:.3e})")));
            }
        }
        let process = CqProcess::new(Diagram::boxed(controlled_box("U", &branches)))?;
        Ok(Self { process, branches })
    }

    /// Generalised Pauli corrections on `C^d`: branch `i = b*d + a` is `X^a Z^b`.
    pub fn pauli(d: usize) -> Self {
        let branches = (0..d * d).map(|i| weyl(d, i % d, i / d)).collect();
        Self::new(branches).expect("Weyl operators are unitary")
    }

    pub fn process(&self) -> &CqProcess { &self.process }

    pub fn diagram(&self) -> &Diagram { self.process.diagram() }

    pub fn branches(&self) -> &[CMatrix] { &self.branches }

    pub fn dim(&self) -> usize { self.branches[0].nrows() }

    pub fn control_dim(&self) -> usize { self.branches.len() }

    /// The controlled process with branches `U_i†`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.branches.iter().map(|u| u.adjoint()).collect()).expect("adjoints of unitaries")
    }

    fn check_teleport_dims(&self) -> ProtocolResult<()> {
        let expected = self.dim() * self.dim();
        if self.control_dim() != expected {
            return Err(ProtocolError::DimMismatch { control: self.control_dim(), expected });
        }
        Ok(())
    }

    /// Copying the control into `first` then `second` gives deleting beside
    /// a quantum wire.
    fn law(&self, first: &Self, second: &Self, tol: f64) -> ProtocolResult<Claim> {
        let (k, d) = (self.control_dim(), self.dim());
        let (c, q) = (WireType::classical(k), WireType::quantum(d));
        let lhs = seq(&compose_par(&Diagram::copy(k), &Diagram::identity(&[q])), &compose_par(&Diagram::identity(&[c]), first.diagram()))?;
        let lhs = seq(&lhs, second.diagram())?;
        let rhs = compose_par(&Diagram::delete(k), &Diagram::identity(&[q]));
        claim_eq("", &lhs, &rhs, EqualityMode::Strict, tol)
    }

    /// Both controlled-unitary equations: `U_i` then `U_i†` and `U_i†` then
    /// `U_i`, with the same control copied to each.
    pub fn check_laws(&self, tol: f64) -> ProtocolResult<Vec<Claim>> {
        let adj = self.adjoint();
        let mut a = self.law(self, &adj, tol)?;
        a.name = "controlled-unitary: U then U-dagger".into();
        let mut b = self.law(&adj, self, tol)?;
        b.name = "controlled-unitary: U-dagger then U".into();
        Ok(vec![a, b])
    }
}

/// One named equality or predicate checked by a verifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    /// `strict`, `up-to-scalar` or `predicate`.
    pub mode: String,
    /// Largest entrywise deviation; absent when the two sides could not be
    /// compared or the claim is a predicate.
    pub deviation: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub dim: usize,
    pub control_dim: usize,
    pub tolerance: f64,
    pub claims: Vec<Claim>,
    pub passed: bool,
    /// Rewrite trace taking the protocol diagram to its normal form.
    pub trace: Option<RewriteTrace>,
    /// Whether the trace replays to a diagram isomorphic to the expected one.
    pub trace_closes: Option<bool>,
}

impl ProtocolReport {
    fn new(protocol: &str, cu: &ControlledUnitary, tol: f64, claims: Vec<Claim>) -> Self {
        let passed = claims.iter().all(|c| c.passed);
        Self {
            protocol: protocol.into(),
            dim: cu.dim(),
            control_dim: cu.control_dim(),
            tolerance: tol,
            claims,
            passed,
            trace: None,
            trace_closes: None,
        }
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> { self.claims.iter().find(|c| c.name == name) }

    pub fn max_deviation(&self) -> f64 { self.claims.iter().filter_map(|c| c.deviation).fold(0.0, f64::max) }
}

fn seq(a: &Diagram, b: &Diagram) -> ProtocolResult<Diagram> { Ok(compose_seq(a, b)?) }

fn par_all(parts: &[Diagram]) -> Diagram { parts.iter().fold(Diagram::empty(), |acc, p| compose_par(&acc, p)) }

fn id(types: &[WireType]) -> Diagram { Diagram::identity(types) }

fn claim_eq(name: &str, lhs: &Diagram, rhs: &Diagram, mode: EqualityMode, tol: f64) -> ProtocolResult<Claim> {
    let deviation = evaluate(lhs)?.deviation(&evaluate(rhs)?, mode, tol);
    let mode = match mode {
        EqualityMode::Strict => "strict",
        EqualityMode::UpToScalar => "up-to-scalar",
    };
    Ok(Claim { name: name.into(), mode: mode.into(), deviation, passed: deviation.is_some_and(|x| x <= tol) })
}

fn predicate(name: &str, passed: bool, deviation: Option<f64>) -> Claim {
    Claim { name: name.into(), mode: "predicate".into(), deviation, passed }
}

fn causal_claim(name: &str, d: &Diagram, tol: f64) -> ProtocolResult<Claim> {
    let deviation = CqProcess::new(d.clone())?.causality_deviation();
    Ok(predicate(name, deviation.is_some_and(|x| x <= tol), deviation))
}

/// The normalised Bell state on two `q D` wires.
pub fn bell_state(d: usize) -> Diagram {
    compose_par(&Diagram::scalar(C64::new(1.0 / d as f64, 0.0)), &Diagram::cup(WireType::quantum(d)))
}

/// The maximally mixed state on `q D`.
pub fn maximally_mixed(d: usize) -> Diagram {
    let q = WireType::quantum(d);
    let unnormalised = compose_seq(&Diagram::cup(q), &compose_par(&id(&[q]), &discard(q).expect("quantum"))).expect("cup feeds");
    compose_par(&Diagram::scalar(C64::new(1.0 / d as f64, 0.0)), &unnormalised)
}

/// The Bell measurement `[q D, q D] -> [c k]` built from `cu`.
pub fn bell_measurement(cu: &ControlledUnitary) -> Diagram {
    let (d, k) = (cu.dim(), cu.control_dim());
    let q = WireType::quantum(d);
    let emit = compose_par(&dagger(cu.diagram()), &id(&[q]));
    let close = compose_par(&id(&[WireType::classical(k)]), &Diagram::cap(q));
    let m = compose_seq(&emit, &close).expect("emit feeds cap");
    compose_par(&Diagram::scalar(C64::new(1.0 / d as f64, 0.0)), &m)
}

/// Teleportation `q D -> q D`: Bell state on the second and third wires,
/// Bell measurement on the first two, correction on the third.
pub fn build_teleportation(cu: &ControlledUnitary) -> ProtocolResult<Diagram> {
    cu.check_teleport_dims()?;
    teleportation_body(cu, true)
}

fn teleportation_body(cu: &ControlledUnitary, correct: bool) -> ProtocolResult<Diagram> {
    let d = cu.dim();
    let (q, c) = (WireType::quantum(d), WireType::classical(cu.control_dim()));
    let prepared = compose_par(&id(&[q]), &bell_state(d));
    let measured = seq(&prepared, &compose_par(&bell_measurement(cu), &id(&[q])))?;
    let last = if correct { cu.diagram().clone() } else { compose_par(&Diagram::delete(c.dim()), &id(&[q])) };
    seq(&measured, &last)
}

pub fn verify_teleportation(cu: &ControlledUnitary, tol: f64) -> ProtocolResult<ProtocolReport> {
    let diagram = build_teleportation(cu)?;
    let (d, k) = (cu.dim(), cu.control_dim());
    let (q, c) = (WireType::quantum(d), WireType::classical(k));
    let mut claims = vec![claim_eq("teleported state equals input", &diagram, &id(&[q]), EqualityMode::Strict, tol)?];

    let m = bell_measurement(cu);
    let round_trip = seq(&dagger(&m), &m)?;
    let mut basis = claim_eq("Bell measurement is a basis measurement", &round_trip, &id(&[c]), EqualityMode::Strict, tol)?;
    basis.passed &= CqProcess::new(m.clone())?.causality_deviation().is_some_and(|x| x <= tol);
    claims.push(basis);

    let unused = teleportation_body(cu, false)?;
    let mixed = compose_par(&discard(q)?, &maximally_mixed(d));
    claims.push(claim_eq("without the outcome the output is maximally mixed", &unused, &mixed, EqualityMode::Strict, tol)?);

    let uniform = seq(&ProbDist::uniform(k).state(), &Diagram::copy(k))?;
    let uniform = seq(&compose_par(&uniform, &id(&[q])), &compose_par(&id(&[c]), cu.diagram()))?;
    let uniform = seq(&uniform, cu.adjoint().diagram())?;
    claims.push(claim_eq("uniform control cancels", &uniform, &id(&[q]), EqualityMode::Strict, tol)?);
    claims.extend(cu.check_laws(tol)?);
    claims.push(causal_claim("protocol is causal", &diagram, tol)?);

    let (normal, trace) = normalize(&diagram);
    let replayed = replay(&diagram, &trace)?;
    let closes = crate::diagram::isomorphic(&replayed, &id(&[q]), NumericTolerance::strict(tol))
        && crate::diagram::isomorphic(&normal, &replayed, NumericTolerance::strict(tol));
    claims.push(predicate("rewriting closes to the identity", closes, None));
    let mut report = ProtocolReport::new("teleport", cu, tol, claims);
    report.trace = Some(trace);
    report.trace_closes = Some(closes);
    Ok(report)
}

/// Dense coding `c D² -> c D²` over a shared two-wire quantum resource.
pub fn build_dense_coding(cu: &ControlledUnitary) -> ProtocolResult<Diagram> {
    build_dense_coding_with(cu, &bell_state(cu.dim()))
}

/// Dense coding with `shared` in place of the Bell state.
pub fn build_dense_coding_with(cu: &ControlledUnitary, shared: &Diagram) -> ProtocolResult<Diagram> {
    cu.check_teleport_dims()?;
    let q = WireType::quantum(cu.dim());
    let c = WireType::classical(cu.control_dim());
    if !shared.inputs().is_empty() || shared.outputs() != [q, q] {
        return Err(ProtocolError::InvalidBranches("shared resource must be a state on two quantum wires".into()));
    }
    let encoded = seq(&compose_par(&id(&[c]), shared), &compose_par(cu.diagram(), &id(&[q])))?;
    seq(&encoded, &bell_measurement(cu))
}

pub fn verify_dense_coding(cu: &ControlledUnitary, tol: f64) -> ProtocolResult<ProtocolReport> {
    verify_dense_coding_with(cu, &bell_state(cu.dim()), tol)
}

pub fn verify_dense_coding_with(cu: &ControlledUnitary, shared: &Diagram, tol: f64) -> ProtocolResult<ProtocolReport> {
    let diagram = build_dense_coding_with(cu, shared)?;
    let c = WireType::classical(cu.control_dim());
    let claims = vec![
        claim_eq("message arrives unchanged", &diagram, &id(&[c]), EqualityMode::Strict, tol)?,
        causal_claim("protocol is causal", &diagram, tol)?,
    ];
    Ok(ProtocolReport::new("dense-coding", cu, tol, claims))
}

/// Options for the entanglement-swapping diagram.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SwapOptions {
    /// Apply the controlled correction on `2b`.
    pub correct: bool,
    /// Expose a copy of the outcome as the first output.
    pub expose_outcome: bool,
}

impl Default for SwapOptions {
    fn default() -> Self { Self { correct: true, expose_outcome: false } }
}

/// Entanglement swapping. Two Bell pairs `1a 1b` and `2a 2b`; the middle
/// pair `1b 2a` is measured non-destructively in the Bell basis and left
/// in `Φ`, and the outcome corrects `2b`. Outputs are `[1a, 1b, 2a, 2b]`,
/// preceded by the outcome when exposed.
pub fn build_entanglement_swap(cu: &ControlledUnitary) -> ProtocolResult<Diagram> {
    build_entanglement_swap_with(cu, SwapOptions::default())
}

pub fn build_entanglement_swap_with(cu: &ControlledUnitary, opts: SwapOptions) -> ProtocolResult<Diagram> {
    cu.check_teleport_dims()?;
    let (d, k) = (cu.dim(), cu.control_dim());
    let (q, c) = (WireType::quantum(d), WireType::classical(k));
    let pairs = compose_par(&bell_state(d), &bell_state(d));
    // [1a, 1b, 2a, 2b] -> [1a, c, 2b]
    let measure = par_all(&[id(&[q]), bell_measurement(cu), id(&[q])]);
    // Re-prepare Φ on the middle pair. The outcome probability is already
    // carried by the measurement, so Φ enters normalised.
    let prepare = par_all(&[id(&[q, c]), bell_state(d), id(&[q])]);
    let state = seq(&seq(&pairs, &measure)?, &prepare)?;
    // [1a, c, 1b, 2a, 2b]: route c next to 2b.
    let route = par_all(&[id(&[q]), Diagram::swap(c, q), id(&[q, q])]);
    let route = seq(&route, &par_all(&[id(&[q, q]), Diagram::swap(c, q), id(&[q])]))?;
    let state = seq(&state, &route)?;
    // [1a, 1b, 2a, c, 2b]
    let copied = opts.expose_outcome && opts.correct;
    let fan = if copied { Diagram::copy(k) } else { id(&[c]) };
    let state = seq(&state, &par_all(&[id(&[q, q, q]), fan, id(&[q])]))?;
    let last = match (opts.correct, opts.expose_outcome) {
        (true, _) => cu.diagram().clone(),
        (false, true) => id(&[c, q]),
        (false, false) => compose_par(&Diagram::delete(k), &id(&[q])),
    };
    let keep = if copied { vec![q, q, q, c] } else { vec![q, q, q] };
    let mut state = seq(&state, &compose_par(&id(&keep), &last))?;
    if opts.expose_outcome {
        // Move the outcome from position 3 to the front.
        for pos in (0..3).rev() {
            state = seq(&state, &par_all(&[id(&vec![q; pos]), Diagram::swap(q, c), id(&vec![q; 3 - pos])]))?;
        }
    }
    Ok(state)
}

/// The expected swapped state: `Φ` on `1a 2b` and on `1b 2a`.
pub fn crossed_bell_pairs(d: usize) -> Diagram {
    let q = WireType::quantum(d);
    // Φ(1a,2b) ⊗ Φ(1b,2a) in order [1a, 2b, 1b, 2a], then route to [1a, 1b, 2a, 2b].
    let pairs = compose_par(&bell_state(d), &bell_state(d));
    let r1 = par_all(&[id(&[q]), Diagram::swap(q, q), id(&[q])]);
    let r2 = par_all(&[id(&[q, q]), Diagram::swap(q, q)]);
    let r3 = par_all(&[id(&[q]), Diagram::swap(q, q), id(&[q])]);
    [r1, r2, r3].iter().fold(pairs, |acc, r| compose_seq(&acc, r).expect("four wires"))
}

/// Keep only outputs `keep` of a state on quantum wires, discarding the rest.
fn marginal(state: &Diagram, keep: &[usize]) -> ProtocolResult<Diagram> {
    let layer = par_all(
        &state
            .outputs()
            .iter()
            .enumerate()
            .map(|(i, &t)| if keep.contains(&i) { Ok(id(&[t])) } else { Ok(discard(t)?) })
            .collect::<ProtocolResult<Vec<_>>>()?,
    );
    seq(state, &layer)
}

/// The `1a 2b` state after plugging outcome `i` into the exposed outcome,
/// renormalised, with its probability.
pub fn conditioned_outer_pair(swap: &Diagram, i: usize) -> ProtocolResult<(CqProcess, f64)> {
    let k = swap.outputs()[0].dim();
    let effect = dagger(&Diagram::classical_value(i, k));
    let rest = swap.outputs()[1..].to_vec();
    let picked = seq(swap, &compose_par(&effect, &id(&rest)))?;
    let outer = marginal(&picked, &[0, 3])?;
    let p = evaluate(&seq(&outer, &par_all(&[discard(rest[0])?, discard(rest[3])?]))?)?.data()[0].re;
    let normalised = compose_par(&Diagram::scalar(C64::new(1.0 / p, 0.0)), &outer);
    Ok((CqProcess::new(normalised)?, p))
}

/// Entanglement witness usable at any dimension: negative partial transpose.
/// For two qubits this is exact and delegates to the decision procedure.
fn entangled(state: &CqProcess, tol: f64) -> ProtocolResult<(bool, f64)> {
    let min = partial_transpose_min_eigenvalue(state)?;
    let dims: Vec<usize> = state.diagram().outputs().iter().map(|w| w.dim()).collect();
    if dims[0] * dims[1] <= 6 {
        return Ok((is_entangled_2q(state)?, min));
    }
    Ok((min < -tol, min))
}

pub fn verify_entanglement_swap(cu: &ControlledUnitary, tol: f64) -> ProtocolResult<ProtocolReport> {
    let d = cu.dim();
    let diagram = build_entanglement_swap(cu)?;
    let mut claims = vec![
        claim_eq("entanglement is swapped", &diagram, &crossed_bell_pairs(d), EqualityMode::UpToScalar, tol)?,
        causal_claim("protocol is causal", &diagram, tol)?,
    ];
    let exposed = build_entanglement_swap_with(cu, SwapOptions { correct: true, expose_outcome: true })?;
    let mut all = true;
    let mut worst: f64 = f64::NEG_INFINITY;
    for i in 0..cu.control_dim() {
        let (state, p) = conditioned_outer_pair(&exposed, i)?;
        if p <= tol {
            continue;
        }
        let (ent, min) = entangled(&state, tol)?;
        all &= ent;
        worst = worst.max(min);
    }
    claims.push(predicate("1a-2b entangled for every outcome", all, Some(worst)));
    Ok(ProtocolReport::new("entanglement-swap", cu, tol, claims))
}

/// Protocol names accepted by [`verify_protocol`].
pub const PROTOCOLS: [&str; 3] = ["teleport", "dense-coding", "entanglement-swap"];

pub fn verify_protocol(name: &str, cu: &ControlledUnitary, tol: f64) -> ProtocolResult<Option<ProtocolReport>> {
    Ok(match name {
        "teleport" => Some(verify_teleportation(cu, tol)?),
        "dense-coding" => Some(verify_dense_coding(cu, tol)?),
        "entanglement-swap" => Some(verify_entanglement_swap(cu, tol)?),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    const TOL: f64 = 1e-9;

    #[test]
    fn pauli_fixture_order() {
        let cu = ControlledUnitary::pauli(2);
        let x = weyl(2, 1, 0);
        let z = weyl(2, 0, 1);
        assert_eq!(cu.branches()[1], x);
        assert_eq!(cu.branches()[2], z);
        assert_eq!(cu.branches()[3], &x * &z);
    }

    #[test]
    fn laws_hold_for_pauli() {
        for d in [2, 3] {
            assert!(ControlledUnitary::pauli(d).check_laws(TOL).unwrap().iter().all(|c| c.passed));
        }
    }

    #[test]
    fn bell_effects_match_direct_matrices() {
        // Outcome i on |x y> equals |<Φ|(U_i† ⊗ 1)|xy>|^2 / D.
        let cu = ControlledUnitary::pauli(2);
        let m = evaluate(&bell_measurement(&cu)).unwrap();
        for (i, u) in cu.branches().iter().enumerate() {
            for x in 0..2 {
                for y in 0..2 {
                    // (U_i† ⊗ 1)|xy> = Σ_j conj(U_i[x][j]) |j y>; <Φ| keeps j = y.
                    let amp = u[(x, y)].conj();
                    let expect = amp.norm_sqr() / 2.0;
                    let idx = [(x * 2 + x), (y * 2 + y), i];
                    assert!((m.get(&idx) - c(expect)).norm() < 1e-12, "outcome {i} on |{x}{y}>");
                }
            }
        }
    }

    #[test]
    fn wrong_control_dimension() {
        let cu = ControlledUnitary::new(vec![weyl(2, 0, 0); 3]).unwrap();
        assert!(matches!(build_teleportation(&cu), Err(ProtocolError::DimMismatch { control: 3, expected: 4 })));
    }

    #[test]
    fn non_unitary_branch_rejected() {
        let mut m = weyl(2, 0, 0);
        m[(0, 0)] = c(2.0);
        assert!(ControlledUnitary::new(vec![m]).is_err());
    }
}
