//! Entanglement of bipartite states and SLOCC classes of three qubits.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::Serialize;
use thiserror::Error;

use crate::cq::{CqError, CqProcess};
use crate::diagram::{compose_par, compose_seq, BoxGen, Diagram, WireKind, WireType};
use crate::linalg::{c, hermitian_eigenvalues, random_invertible, singular_values, CMatrix};
use crate::random::Rng;
use crate::tensor::{evaluate, NumericTolerance, Tensor, TensorError};
use crate::C64;

const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("process is not causal")]
    NotCausal,
    #[error("wrong signature: {0}")]
    WrongSignature(String),
    #[error("state has norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("axiom {0} fails")]
    AxiomFailure(String),
    #[error(transparent)]
    Cq(#[from] CqError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub type EntanglementResult<T> = Result<T, EntanglementError>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SloccClass {
    SeparableAbc,
    BiseparableA,
    BiseparableB,
    BiseparableC,
    W,
    Ghz,
}

impl SloccClass {
    pub const ALL: [SloccClass; 6] =
        [Self::SeparableAbc, Self::BiseparableA, Self::BiseparableB, Self::BiseparableC, Self::W, Self::Ghz];

    pub fn label(&self) -> &'static str {
        match self {
            Self::SeparableAbc => "Separable-ABC",
            Self::BiseparableA => "Biseparable-A|BC",
            Self::BiseparableB => "Biseparable-B|AC",
            Self::BiseparableC => "Biseparable-C|AB",
            Self::W => "W",
            Self::Ghz => "GHZ",
        }
    }
}

impl fmt::Display for SloccClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result { f.write_str(self.label()) }
}

impl FromStr for SloccClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|c| c.label() == s).ok_or_else(|| format!("unknown SLOCC class {s}"))
    }
}

fn single_quantum_output_from_classical(p: &CqProcess) -> Option<(usize, WireType)> {
    match (p.diagram().inputs(), p.diagram().outputs()) {
        ([i], [o]) if i.kind() == WireKind::Classical && o.is_quantum() => Some((i.dim(), *o)),
        _ => None,
    }
}

/// The state `Σ_i (1/D) phi1(i) ⊗ phi2(i)`: both processes fed from the
/// classical cup weighted by `1/D`.
pub fn make_disentangled(phi1: &CqProcess, phi2: &CqProcess) -> EntanglementResult<CqProcess> {
    let sig = |p: &CqProcess| {
        single_quantum_output_from_classical(p)
            .ok_or_else(|| EntanglementError::WrongSignature("expected one classical input and one quantum output".into()))
    };
    let ((d1, _), (d2, _)) = (sig(phi1)?, sig(phi2)?);
    if d1 != d2 {
        return Err(EntanglementError::WrongSignature(format!("control dimensions {d1} and {d2} differ")));
    }
    let tol = NumericTolerance::default();
    if !phi1.is_causal(tol) || !phi2.is_causal(tol) {
        return Err(EntanglementError::NotCausal);
    }
    let w = WireType::classical(d1);
    let cup = compose_par(&Diagram::scalar(c(1.0 / d1 as f64)), &Diagram::cup(w));
    let d = compose_seq(&cup, &compose_par(phi1.diagram(), phi2.diagram())).expect("classical cup feeds both");
    Ok(CqProcess::new(d)?)
}

/// A doubled pure state on two quantum wires from its amplitudes, indexed
/// `a * db + b`.
pub fn pure_bipartite(amplitudes: &[C64], da: usize, db: usize) -> EntanglementResult<CqProcess> {
    let t = Tensor::new(&[], &[da, db], amplitudes.to_vec())?;
    Ok(CqProcess::new(Diagram::boxed(BoxGen::doubled("psi", t)))?)
}

fn bipartite_dims(state: &CqProcess) -> EntanglementResult<(usize, usize)> {
    match (state.diagram().inputs(), state.diagram().outputs()) {
        ([], [a, b]) if a.is_quantum() && b.is_quantum() => Ok((a.dim(), b.dim())),
        _ => Err(EntanglementError::WrongSignature("expected a state on two quantum wires".into())),
    }
}

/// The density matrix of a bipartite state, rows `a1 * db + b1`, columns
/// `a2 * db + b2`.
pub fn bipartite_density(state: &CqProcess) -> EntanglementResult<CMatrix> {
    let (da, db) = bipartite_dims(state)?;
    let t = state.tensor().data();
    Ok(DMatrix::from_fn(da * db, da * db, |r, col| {
        let (a1, b1, a2, b2) = (r / db, r % db, col / db, col % db);
        t[(a1 * da + a2) * db * db + b1 * db + b2]
    }))
}

/// Smallest eigenvalue of the partial transpose on the second party.
pub fn partial_transpose_min_eigenvalue(state: &CqProcess) -> EntanglementResult<f64> {
    let (_, db) = bipartite_dims(state)?;
    let rho = bipartite_density(state)?;
    let n = rho.nrows();
    let pt = DMatrix::from_fn(n, n, |r, col| {
        let (a1, b1, a2, b2) = (r / db, r % db, col / db, col % db);
        rho[(a1 * db + b2, a2 * db + b1)]
    });
    Ok(hermitian_eigenvalues(&pt)[0])
}

/// Partial-transpose test; exact for qubit-qubit and qubit-qutrit states,
/// refused for anything larger.
pub fn is_entangled_2q(state: &CqProcess) -> EntanglementResult<bool> {
    let (da, db) = bipartite_dims(state)?;
    if da * db > 6 {
        return Err(EntanglementError::WrongSignature(format!(
            "partial-transpose test is only exact up to 2x3, got {da}x{db}"
        )));
    }
    if !state.is_causal(NumericTolerance::default()) {
        return Err(EntanglementError::NotCausal);
    }
    Ok(partial_transpose_min_eigenvalue(state)? < -TOL)
}

/// Decohere quantum output `leg` of a state.
pub fn decohere_output(state: &CqProcess, leg: usize) -> EntanglementResult<CqProcess> {
    let outs = state.diagram().outputs();
    let t = *outs.get(leg).ok_or_else(|| EntanglementError::WrongSignature(format!("no output {leg}")))?;
    if !t.is_quantum() {
        return Err(EntanglementError::WrongSignature(format!("output {leg} is classical")));
    }
    let layer = outs.iter().enumerate().fold(Diagram::empty(), |acc, (k, &w)| {
        let g = if k == leg { Diagram::decoherence(w.dim()) } else { Diagram::identity(&[w]) };
        compose_par(&acc, &g)
    });
    Ok(state.then(&layer)?)
}

/// Rank of the reduced density matrix of the first party.
pub fn reduced_rank(state: &CqProcess) -> EntanglementResult<usize> {
    let (da, db) = bipartite_dims(state)?;
    let rho = bipartite_density(state)?;
    let reduced = DMatrix::from_fn(da, da, |a1, a2| (0..db).map(|b| rho[(a1 * db + b, a2 * db + b)]).sum());
    let scale = reduced.iter().map(|z: &C64| z.norm()).fold(0.0, f64::max).max(1.0);
    Ok(hermitian_eigenvalues(&reduced).iter().filter(|&&l| l > TOL * scale).count())
}

fn amplitudes3(psi: &Tensor) -> EntanglementResult<[C64; 8]> {
    if psi.n_inputs() != 0 || psi.len() != 8 || psi.out_shape().iter().any(|&s| s != 2 && s != 4 && s != 8) {
        return Err(EntanglementError::ShapeMismatch(format!(
            "expected a three-qubit state, got {:?} -> {:?}",
            psi.in_shape(),
            psi.out_shape()
        )));
    }
    let mut a = [C64::new(0.0, 0.0); 8];
    a.copy_from_slice(psi.data());
    Ok(a)
}

/// Cayley hyperdeterminant of a three-qubit amplitude vector indexed `4a + 2b + c`.
pub fn hyperdeterminant(a: &[C64; 8]) -> C64 {
    let [a000, a001, a010, a011, a100, a101, a110, a111] = *a;
    let sq = |x: C64| x * x;
    sq(a000) * sq(a111) + sq(a001) * sq(a110) + sq(a010) * sq(a101) + sq(a100) * sq(a011)
        - 2.0
            * (a000 * a111 * a011 * a100
                + a000 * a111 * a101 * a010
                + a000 * a111 * a110 * a001
                + a011 * a100 * a101 * a010
                + a011 * a100 * a110 * a001
                + a101 * a010 * a110 * a001)
        + 4.0 * (a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100)
}

/// The 3-tangle `4 |Det|`.
pub fn three_tangle(psi: &Tensor) -> EntanglementResult<f64> { Ok(4.0 * hyperdeterminant(&amplitudes3(psi)?).norm()) }

/// Rank of the single-party reduced state of `party` in a three-qubit vector.
fn local_rank(a: &[C64; 8], party: usize) -> usize {
    let m = DMatrix::from_fn(2, 4, |r, col| {
        let (x, y) = (col >> 1, col & 1);
        let idx = match party {
            0 => (r << 2) | (x << 1) | y,
            1 => (x << 2) | (r << 1) | y,
            _ => (x << 2) | (y << 1) | r,
        };
        a[idx]
    });
    singular_values(&m).iter().filter(|&&s| s > TOL).count()
}

/// Classify a normalised three-qubit state by its local ranks and 3-tangle.
pub fn slocc_classify_3q(psi: &Tensor) -> EntanglementResult<SloccClass> {
    let a = amplitudes3(psi)?;
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > TOL {
        return Err(EntanglementError::NotNormalized(norm));
    }
    let ranks: Vec<usize> = (0..3).map(|p| local_rank(&a, p)).collect();
    let ones: Vec<usize> = (0..3).filter(|&p| ranks[p] <= 1).collect();
    Ok(match ones.as_slice() {
        [] => {
            if 4.0 * hyperdeterminant(&a).norm() > TOL {
                SloccClass::Ghz
            } else {
                SloccClass::W
            }
        }
        [0] => SloccClass::BiseparableA,
        [1] => SloccClass::BiseparableB,
        [2] => SloccClass::BiseparableC,
        _ => SloccClass::SeparableAbc,
    })
}

/// Apply one local operator per party to a state vector with one output
/// index per party.
pub fn apply_locals(psi: &Tensor, locals: &[CMatrix]) -> EntanglementResult<Tensor> {
    if psi.n_inputs() != 0 || locals.len() != psi.n_outputs() {
        return Err(EntanglementError::ShapeMismatch(format!(
            "{} local operators for a state with {} parties",
            locals.len(),
            psi.n_outputs()
        )));
    }
    for (k, (l, &d)) in locals.iter().zip(psi.out_shape()).enumerate() {
        if l.ncols() != d {
            return Err(EntanglementError::ShapeMismatch(format!("local {k} acts on dimension {}, party has {d}", l.ncols())));
        }
    }
    let big = locals.iter().skip(1).fold(locals[0].clone(), |acc, l| acc.kronecker(l));
    let v = DMatrix::from_column_slice(psi.len(), 1, psi.data());
    let out_shape: Vec<usize> = locals.iter().map(|l| l.nrows()).collect();
    Ok(Tensor::new(&[], &out_shape, (big * v).iter().copied().collect())?)
}

/// Distance between the directions of two vectors, minimised over a global
/// phase; `None` if either vector vanishes.
fn ray_distance(a: &[C64], b: &[C64]) -> Option<f64> {
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if na <= TOL || nb <= TOL {
        return None;
    }
    let inner: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { c(1.0) };
    Some(a.iter().zip(b).map(|(x, y)| (x / na * phase - y / nb).norm()).fold(0.0, f64::max))
}

/// Whether `(L_1 ⊗ … ⊗ L_n) psi` equals `target` up to a non-zero scalar.
pub fn slocc_convert_check(psi: &Tensor, target: &Tensor, locals: &[CMatrix]) -> EntanglementResult<bool> {
    let image = apply_locals(psi, locals)?;
    if image.out_shape() != target.out_shape() || target.n_inputs() != 0 {
        return Err(EntanglementError::ShapeMismatch(format!(
            "image has shape {:?}, target {:?}",
            image.out_shape(),
            target.shape()
        )));
    }
    Ok(ray_distance(image.data(), target.data()).is_some_and(|d| d <= TOL))
}

/// Randomised search for locals converting `psi` into `target`. Draws
/// random invertible and rank-one operators; a `None` answer proves nothing.
pub fn slocc_search(psi: &Tensor, target: &Tensor, trials: usize, rng: &mut Rng) -> EntanglementResult<Option<Vec<CMatrix>>> {
    let dims_in = psi.out_shape().to_vec();
    let dims_out = target.out_shape().to_vec();
    if dims_in.len() != dims_out.len() {
        return Err(EntanglementError::ShapeMismatch("party counts differ".into()));
    }
    for _ in 0..trials {
        let locals: Vec<CMatrix> = dims_in
            .iter()
            .zip(&dims_out)
            .map(|(&di, &dout)| {
                if di == dout && rng.random_bool(0.5) {
                    random_invertible(di, rng)
                } else {
                    let (r, col) = (rng.random_range(0..dout), rng.random_range(0..di));
                    DMatrix::from_fn(dout, di, |x, y| if x == r && y == col { c(1.0) } else { c(0.0) })
                }
            })
            .collect();
        if slocc_convert_check(psi, target, &locals)? {
            return Ok(Some(locals));
        }
    }
    Ok(None)
}

/// Tensors of a candidate commutative Frobenius algebra on a plain wire.
#[derive(Clone, Debug)]
pub struct FrobeniusCandidate {
    /// `[d, d] -> [d]`.
    pub mult: Tensor,
    /// `[] -> [d]`.
    pub unit: Tensor,
    /// `[d] -> [d, d]`.
    pub comult: Tensor,
    /// `[d] -> []`.
    pub counit: Tensor,
}

impl FrobeniusCandidate {
    /// The ONB spider family's generators.
    pub fn spider(d: usize) -> Self {
        let t = |n, m| evaluate(&Diagram::classical_spider(n, m, d)).expect("small spider");
        Self { mult: t(2, 1), unit: t(0, 1), comult: t(1, 2), counit: t(1, 0) }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            mult: Tensor::zeros(&[d, d], &[d]),
            unit: Tensor::zeros(&[], &[d]),
            comult: Tensor::zeros(&[d], &[d, d]),
            counit: Tensor::zeros(&[d], &[]),
        }
    }

    pub fn dim(&self) -> usize { self.unit.len() }
}

/// The W algebra on a qubit: unit `|0>`, `μ(|1>,|1>) = 0`, comultiplication
/// `|0> ↦ |01> + |10>`, `|1> ↦ |11>`, counit `<1|`.
pub fn w_candidate() -> FrobeniusCandidate {
    let (o, z) = (1.0, 0.0);
    // mult rows are inputs 00, 01, 10, 11; columns outputs 0, 1
    let mult = Tensor::from_real(&[2, 2], &[2], &[o, z, z, o, z, o, z, z]).expect("2x2 -> 2");
    let comult = Tensor::from_real(&[2], &[2, 2], &[z, o, o, z, z, z, z, o]).expect("2 -> 2x2");
    FrobeniusCandidate {
        mult,
        unit: Tensor::from_real(&[], &[2], &[o, z]).expect("state"),
        comult,
        counit: Tensor::from_real(&[2], &[], &[z, o]).expect("effect"),
    }
}

#[derive(Clone, Debug)]
pub struct AntiSpiderFamily {
    pub generators: FrobeniusCandidate,
    /// `(δ ⊗ id) ∘ δ ∘ η`, normalised.
    pub three_leg_state: Tensor,
    pub three_leg_class: SloccClass,
    /// Class of the ONB spider's normalised three-leg state.
    pub spider_class: SloccClass,
}

fn three_leg_state(g: &FrobeniusCandidate) -> EntanglementResult<Tensor> {
    let b = |name: &str, t: &Tensor| Diagram::boxed(BoxGen::classical(name, t.clone()));
    let w = WireType::classical(g.dim());
    let d = compose_seq(&b("η", &g.unit), &b("δ", &g.comult))
        .and_then(|x| compose_seq(&x, &compose_par(&b("δ", &g.comult), &Diagram::identity(&[w]))))
        .expect("arities fit");
    let t = evaluate(&d)?;
    let n = t.frobenius_norm();
    Ok(if n > 0.0 { t.scale(c(1.0 / n)) } else { t })
}

/// Check a candidate against the commutative Frobenius laws (strict) and
/// the anti-special law `μ ∘ δ ∝ ε† ∘ η†` (up to a non-zero scalar), then
/// classify its three-leg state.
pub fn register_anti_spider(g: FrobeniusCandidate) -> EntanglementResult<AntiSpiderFamily> {
    let d = g.dim();
    if d != 2 {
        return Err(EntanglementError::ShapeMismatch(format!("anti-spiders are registered on qubits, got dimension {d}")));
    }
    let shapes_ok = g.mult.in_shape() == [d, d]
        && g.mult.out_shape() == [d]
        && g.unit.in_shape().is_empty()
        && g.comult.in_shape() == [d]
        && g.comult.out_shape() == [d, d]
        && g.counit.in_shape() == [d]
        && g.counit.out_shape().is_empty();
    if !shapes_ok {
        return Err(EntanglementError::ShapeMismatch("generator shapes do not fit one wire".into()));
    }
    let w = WireType::classical(d);
    let b = |name: &str, t: &Tensor| Diagram::boxed(BoxGen::classical(name, t.clone()));
    let (mu, eta, delta, eps) = (b("μ", &g.mult), b("η", &g.unit), b("δ", &g.comult), b("ε", &g.counit));
    let id = Diagram::identity(&[w]);
    let seq = |x: &Diagram, y: &Diagram| compose_seq(x, y).expect("arities fit");
    let par = compose_par;
    let laws: Vec<(&str, Diagram, Diagram, NumericTolerance)> = vec![
        ("unit", seq(&par(&eta, &id), &mu), id.clone(), NumericTolerance::strict(TOL)),
        ("unit", seq(&par(&id, &eta), &mu), id.clone(), NumericTolerance::strict(TOL)),
        ("counit", seq(&delta, &par(&eps, &id)), id.clone(), NumericTolerance::strict(TOL)),
        ("counit", seq(&delta, &par(&id, &eps)), id.clone(), NumericTolerance::strict(TOL)),
        ("associativity", seq(&par(&mu, &id), &mu), seq(&par(&id, &mu), &mu), NumericTolerance::strict(TOL)),
        ("coassociativity", seq(&delta, &par(&delta, &id)), seq(&delta, &par(&id, &delta)), NumericTolerance::strict(TOL)),
        ("commutativity", seq(&Diagram::swap(w, w), &mu), mu.clone(), NumericTolerance::strict(TOL)),
        ("cocommutativity", seq(&delta, &Diagram::swap(w, w)), delta.clone(), NumericTolerance::strict(TOL)),
        ("frobenius", seq(&par(&delta, &id), &par(&id, &mu)), seq(&mu, &delta), NumericTolerance::strict(TOL)),
        ("frobenius", seq(&par(&id, &delta), &par(&mu, &id)), seq(&mu, &delta), NumericTolerance::strict(TOL)),
        (
            "anti-special",
            seq(&delta, &mu),
            seq(&b("η†", &g.unit.dagger()), &b("ε†", &g.counit.dagger())),
            NumericTolerance::up_to_scalar(TOL),
        ),
    ];
    for (name, lhs, rhs, tol) in laws {
        let (l, r) = (evaluate(&lhs)?, evaluate(&rhs)?);
        let nonzero = l.max_abs() > TOL && r.max_abs() > TOL;
        if !nonzero || !l.approx_eq(&r, tol) {
            return Err(EntanglementError::AxiomFailure(name.into()));
        }
    }
    let state = three_leg_state(&g)?;
    let three_leg_class = slocc_classify_3q(&state)?;
    let spider_class = slocc_classify_3q(&three_leg_state(&FrobeniusCandidate::spider(2))?)?;
    Ok(AntiSpiderFamily { generators: g, three_leg_state: state, three_leg_class, spider_class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::weyl;

    fn r(x: f64) -> C64 { c(x) }

    fn state3(v: &[f64]) -> Tensor { Tensor::from_real(&[], &[2, 2, 2], v).unwrap() }

    #[test]
    fn bell_is_entangled_with_half_negative_eigenvalue() {
        let s = 0.5f64.sqrt();
        let bell = pure_bipartite(&[r(s), r(0.0), r(0.0), r(s)], 2, 2).unwrap();
        assert!(is_entangled_2q(&bell).unwrap());
        assert!((partial_transpose_min_eigenvalue(&bell).unwrap() + 0.5).abs() < 1e-12);
        let dec = decohere_output(&bell, 0).unwrap();
        assert!(!is_entangled_2q(&dec).unwrap());
    }

    #[test]
    fn encoded_correlation_matches_decohered_bell() {
        let e = CqProcess::new(Diagram::encode(2)).unwrap();
        let mixed = make_disentangled(&e, &e).unwrap();
        let rho = bipartite_density(&mixed).unwrap();
        let mut expect = CMatrix::zeros(4, 4);
        expect[(0, 0)] = r(0.5);
        expect[(3, 3)] = r(0.5);
        assert!((rho - &expect).norm() < 1e-12);
        let s = 0.5f64.sqrt();
        let bell = pure_bipartite(&[r(s), r(0.0), r(0.0), r(s)], 2, 2).unwrap();
        let dec = bipartite_density(&decohere_output(&bell, 1).unwrap()).unwrap();
        assert!((dec - expect).norm() < 1e-12);
    }

    #[test]
    fn refuses_large_systems() {
        let v = vec![r(1.0 / 3.0); 9];
        let st = pure_bipartite(&v, 3, 3).unwrap();
        assert!(matches!(is_entangled_2q(&st), Err(EntanglementError::WrongSignature(_))));
    }

    #[test]
    fn make_disentangled_rejects_non_causal() {
        let e = CqProcess::new(compose_par(&Diagram::scalar(r(2.0)), &Diagram::encode(2))).unwrap();
        assert_eq!(make_disentangled(&e, &e).unwrap_err(), EntanglementError::NotCausal);
    }

    #[test]
    fn fixture_classes() {
        let s = 0.5f64.sqrt();
        let ghz = state3(&[s, 0., 0., 0., 0., 0., 0., s]);
        assert_eq!(slocc_classify_3q(&ghz).unwrap(), SloccClass::Ghz);
        assert!((three_tangle(&ghz).unwrap() - 1.0).abs() < 1e-12);
        let t = 1.0 / 3f64.sqrt();
        let w = state3(&[0., t, t, 0., t, 0., 0., 0.]);
        assert_eq!(slocc_classify_3q(&w).unwrap(), SloccClass::W);
        assert!(three_tangle(&w).unwrap() < 1e-12);
        let a_bc = state3(&[s, 0., 0., s, 0., 0., 0., 0.]);
        assert_eq!(slocc_classify_3q(&a_bc).unwrap(), SloccClass::BiseparableA);
        let prod = state3(&[1., 0., 0., 0., 0., 0., 0., 0.]);
        assert_eq!(slocc_classify_3q(&prod).unwrap(), SloccClass::SeparableAbc);
        assert!(matches!(slocc_classify_3q(&state3(&[1., 1., 0., 0., 0., 0., 0., 0.])), Err(EntanglementError::NotNormalized(_))));
    }

    #[test]
    fn cup_converts_to_product() {
        let cup = Tensor::from_real(&[], &[2, 2], &[1., 0., 0., 1.]).unwrap();
        let target = Tensor::from_real(&[], &[2, 2], &[1., 0., 0., 0.]).unwrap();
        let p0 = CMatrix::from_row_slice(2, 2, &[r(1.), r(0.), r(0.), r(0.)]);
        let l2 = CMatrix::from_row_slice(2, 2, &[r(1.), r(1.), r(0.), r(0.)]);
        assert!(slocc_convert_check(&cup, &target, &[p0, l2]).unwrap());
        let id = CMatrix::identity(2, 2);
        assert!(slocc_convert_check(&cup, &cup, &[id.clone(), weyl(2, 0, 0)]).unwrap());
        assert!(matches!(slocc_convert_check(&cup, &cup, &[id]), Err(EntanglementError::ShapeMismatch(_))));
    }

    #[test]
    fn w_candidate_registers_and_spider_does_not() {
        let fam = register_anti_spider(w_candidate()).unwrap();
        assert_eq!(fam.three_leg_class, SloccClass::W);
        assert_eq!(fam.spider_class, SloccClass::Ghz);
        assert_eq!(
            register_anti_spider(FrobeniusCandidate::spider(2)).unwrap_err(),
            EntanglementError::AxiomFailure("anti-special".into())
        );
        assert_eq!(
            register_anti_spider(FrobeniusCandidate::zero(2)).unwrap_err(),
            EntanglementError::AxiomFailure("unit".into())
        );
    }

    #[test]
    fn labels_round_trip() {
        for c in SloccClass::ALL {
            assert_eq!(c.label().parse::<SloccClass>().unwrap(), c);
        }
    }
}
