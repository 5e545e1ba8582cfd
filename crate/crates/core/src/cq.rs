//! Classical-quantum processes: causality, purity, stochasticity,
//! measurements, Naimark dilation and mixing.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::diagram::{compose_par, compose_seq, discard, BoxGen, Diagram, DiagramError, WireKind, WireType};
use crate::linalg::{c, isometry_defect, psd_sqrt, singular_values, CMatrix};
use crate::tensor::{evaluate, NumericTolerance, Tensor, TensorError};
use crate::C64;

/// Relative threshold on the second singular value for the purity test.
pub const PURITY_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CqError {
    #[error("wrong signature: {0}")]
    WrongSignature(String),
    #[error("process is not causal")]
    NotCausal,
    #[error("distribution does not have full support")]
    NoFullSupport,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

pub type CqResult<T> = Result<T, CqError>;

/// A probability distribution on `d` outcomes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbDist {
    weights: Vec<f64>,
}

impl ProbDist {
    pub fn new(weights: Vec<f64>) -> CqResult<Self> {
        if weights.is_empty() {
            return Err(CqError::InvalidDistribution("no outcomes".into()));
        }
        if weights.iter().any(|&w| w < -1e-12 || !w.is_finite()) {
            return Err(CqError::InvalidDistribution("negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(CqError::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(Self { weights: weights.into_iter().map(|w| w.max(0.0)).collect() })
    }

    pub fn uniform(d: usize) -> Self { Self { weights: vec![1.0 / d as f64; d] } }

    pub fn dim(&self) -> usize { self.weights.len() }

    pub fn weights(&self) -> &[f64] { &self.weights }

    pub fn full_support(&self) -> bool { self.weights.iter().all(|&w| w > 1e-12) }

    /// Entrywise inverse `1/p_i`, defined under full support.
    pub fn inverse(&self) -> CqResult<Vec<f64>> {
        if !self.full_support() {
            return Err(CqError::NoFullSupport);
        }
        Ok(self.weights.iter().map(|w| 1.0 / w).collect())
    }

    /// The distribution as a classical state diagram.
    pub fn state(&self) -> Diagram {
        Diagram::boxed(BoxGen::classical("p", Tensor::state(self.weights.iter().map(|&w| c(w)).collect())))
    }
}

/// A diagram together with its evaluated tensor.
#[derive(Clone, Debug)]
pub struct CqProcess {
    diagram: Diagram,
    tensor: Tensor,
}

impl CqProcess {
    pub fn new(diagram: Diagram) -> CqResult<Self> {
        let tensor = evaluate(&diagram)?;
        Ok(Self { diagram, tensor })
    }

    /// A process given directly by its tensor, wrapped in a single box.
    pub fn from_tensor(name: &str, t: Tensor, inputs: Vec<WireType>, outputs: Vec<WireType>) -> CqResult<Self> {
        Self::new(Diagram::boxed(BoxGen::plain(name, t, inputs, outputs)?))
    }

    /// The doubled pure process `f ⊗ conj(f)` for a matrix `f` on quantum
    /// wires of the given dimensions.
    pub fn pure(name: &str, m: &CMatrix) -> CqResult<Self> {
        let t = Tensor::from_matrix(m, &[m.ncols()], &[m.nrows()])?;
        Self::new(Diagram::boxed(BoxGen::doubled(name, t)))
    }

    /// A doubled pure state from a vector.
    pub fn pure_state(name: &str, v: &[C64]) -> CqResult<Self> {
        Self::new(Diagram::boxed(BoxGen::doubled(name, Tensor::state(v.to_vec()))))
    }

    pub fn diagram(&self) -> &Diagram { &self.diagram }

    pub fn tensor(&self) -> &Tensor { &self.tensor }

    pub fn into_diagram(self) -> Diagram { self.diagram }

    pub fn then(&self, next: &Diagram) -> CqResult<Self> { Self::new(compose_seq(&self.diagram, next)?) }

    pub fn has_classical_boundary(&self) -> bool {
        self.diagram.inputs().iter().chain(self.diagram.outputs()).any(|w| w.kind() == WireKind::Classical)
    }

    /// Discarding and deleting all outputs equals doing so to all inputs.
    pub fn is_causal(&self, tol: NumericTolerance) -> bool {
        self.causality_deviation().is_some_and(|dev| dev <= tol.absolute)
    }

    pub fn causality_deviation(&self) -> Option<f64> {
        let lhs = compose_seq(&self.diagram, &ground(self.diagram.outputs())).ok()?;
        let lhs = evaluate(&lhs).ok()?;
        let rhs = evaluate(&ground(self.diagram.inputs())).ok()?;
        lhs.max_abs_diff(&rhs)
    }

    /// Rank one Choi matrix. Only defined for processes on quantum wires.
    pub fn is_pure(&self) -> CqResult<bool> {
        if self.has_classical_boundary() {
            return Err(CqError::WrongSignature("purity needs quantum boundaries only".into()));
        }
        let s = singular_values(&choi_matrix(&self.tensor, &self.boundary_dims()));
        Ok(!s.is_empty() && s[0] > 0.0 && s.get(1).is_none_or(|&x| x <= PURITY_THRESHOLD * s[0]))
    }

    fn boundary_dims(&self) -> Vec<usize> { self.diagram.inputs().iter().chain(self.diagram.outputs()).map(|w| w.dim()).collect() }

    fn classical_matrix(&self) -> CqResult<CMatrix> {
        if self.has_quantum_boundary() {
            return Err(CqError::WrongSignature("expected classical boundaries only".into()));
        }
        Ok(self.tensor.to_matrix())
    }

    pub fn has_quantum_boundary(&self) -> bool {
        self.diagram.inputs().iter().chain(self.diagram.outputs()).any(|w| w.is_quantum())
    }

    /// Column-stochastic: real non-negative entries with unit column sums.
    pub fn is_stochastic(&self, tol: f64) -> CqResult<bool> {
        let m = self.classical_matrix()?;
        let entries_ok = m.iter().all(|z| z.re >= -1e-12 && z.im.abs() <= tol);
        let sums_ok = m.column_iter().all(|col| (col.iter().map(|z| z.re).sum::<f64>() - 1.0).abs() <= tol);
        Ok(entries_ok && sums_ok)
    }

    /// A function: stochastic with a single 1 in each column.
    pub fn is_deterministic(&self, tol: f64) -> CqResult<bool> {
        if !self.is_stochastic(tol)? {
            return Ok(false);
        }
        let m = self.classical_matrix()?;
        Ok(m.column_iter().all(|col| {
            let ones = col.iter().filter(|z| (*z - c(1.0)).norm() <= tol).count();
            let zeros = col.iter().filter(|z| z.norm() <= tol).count();
            ones == 1 && ones + zeros == col.len()
        }))
    }
}

/// Discard each quantum wire and delete each classical one.
pub fn ground(types: &[WireType]) -> Diagram {
    types.iter().fold(Diagram::empty(), |acc, &t| {
        let effect = match t.kind() {
            WireKind::Quantum => discard(t).expect("quantum wire"),
            WireKind::Classical => Diagram::delete(t.dim()),
        };
        compose_par(&acc, &effect)
    })
}

/// Choi-style matrix of a tensor on quantum wires: rows index the kets of
/// every boundary wire, columns the bras.
pub fn choi_matrix(t: &Tensor, dims: &[usize]) -> CMatrix {
    let kets: usize = dims.iter().product();
    let mut m = CMatrix::zeros(kets, kets);
    let shape = t.shape().to_vec();
    let mut idx = vec![0usize; shape.len()];
    for &z in t.data() {
        let (mut r, mut col) = (0, 0);
        for (k, &x) in idx.iter().enumerate() {
            r = r * dims[k] + x / dims[k];
            col = col * dims[k] + x % dims[k];
        }
        m[(r, col)] = z;
        for k in (0..shape.len()).rev() {
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    m
}

/// Density matrix of a state on one quantum wire.
pub fn density_matrix(state: &Tensor, d: usize) -> CMatrix {
    DMatrix::from_fn(d, d, |i, j| state.data()[i * d + j])
}

/// Born-rule probabilities of measuring a one-wire quantum state.
pub fn born_rule(state: &CqProcess) -> CqResult<Vec<f64>> {
    let d = state.diagram();
    if !d.inputs().is_empty() || d.outputs().len() != 1 || !d.outputs()[0].is_quantum() {
        return Err(CqError::WrongSignature("expected a state on one quantum wire".into()));
    }
    let dim = d.outputs()[0].dim();
    let measured = state.then(&Diagram::measure(dim))?;
    Ok(measured.tensor().data().iter().map(|z| z.re).collect())
}

/// Encode after measure.
pub fn decoherence(d: usize) -> CqProcess {
    CqProcess::new(compose_seq(&Diagram::measure(d), &Diagram::encode(d)).expect("types agree")).expect("small")
}

/// Bring a one-quantum-input, classical-plus-quantum-output process into the
/// output order `[classical, quantum]`.
fn nondemolition_shape(p: &CqProcess) -> CqResult<(Diagram, usize, usize)> {
    let d = p.diagram();
    let sig = || CqError::WrongSignature("expected q -> c, q".into());
    if d.inputs().len() != 1 || !d.inputs()[0].is_quantum() || d.outputs().len() != 2 {
        return Err(sig());
    }
    let (o0, o1) = (d.outputs()[0], d.outputs()[1]);
    let ordered = match (o0.kind(), o1.kind()) {
        (WireKind::Classical, WireKind::Quantum) => d.clone(),
        (WireKind::Quantum, WireKind::Classical) => compose_seq(d, &Diagram::swap(o0, o1))?,
        _ => return Err(sig()),
    };
    let (c_dim, q) = (ordered.outputs()[0].dim(), ordered.outputs()[1]);
    if q != d.inputs()[0] {
        return Err(CqError::WrongSignature("quantum output must match the input".into()));
    }
    Ok((ordered, c_dim, q.dim()))
}

#[derive(Clone, Debug, Serialize)]
pub struct VnReport {
    pub projection_deviation: f64,
    pub causality_deviation: f64,
    pub pass: bool,
}

/// The projection postulate (measuring twice equals measuring once and
/// copying the outcome) together with causality.
pub fn vn_measurement_report(p: &CqProcess, tol: NumericTolerance) -> CqResult<VnReport> {
    let (nd, c_dim, q_dim) = nondemolition_shape(p)?;
    let cw = WireType::classical(c_dim);
    let twice = compose_seq(&nd, &compose_par(&Diagram::identity(&[cw]), &nd))?;
    let copied = compose_seq(&nd, &compose_par(&Diagram::copy(c_dim), &Diagram::identity(&[WireType::quantum(q_dim)])))?;
    let dev = evaluate(&twice)?.deviation(&evaluate(&copied)?, tol.mode, tol.absolute).unwrap_or(f64::INFINITY);
    let causal = p.causality_deviation().unwrap_or(f64::INFINITY);
    Ok(VnReport { projection_deviation: dev, causality_deviation: causal, pass: dev <= tol.absolute && causal <= tol.absolute })
}

pub fn is_vn_measurement(p: &CqProcess, tol: NumericTolerance) -> CqResult<bool> { Ok(vn_measurement_report(p, tol)?.pass) }

/// Non-demolition measurement in the basis given by the columns of `u`:
/// `û† ; measure-and-keep ; û`.
pub fn rotated_nondemolition(u: &CMatrix) -> CqProcess {
    let d = u.nrows();
    let ub = CqProcess::pure("U", u).expect("unitary fits").into_diagram();
    let udag = CqProcess::pure("U†", &u.adjoint()).expect("unitary fits").into_diagram();
    let nd = compose_seq(&udag, &Diagram::nondemolition(d)).expect("types agree");
    let out = compose_par(&Diagram::identity(&[WireType::classical(d)]), &ub);
    CqProcess::new(compose_seq(&nd, &out).expect("types agree")).expect("small")
}

/// Non-demolition instrument `ρ ↦ Σ_k |k> ⊗ K_k ρ K_k†` from Kraus maps.
pub fn instrument_from_kraus(kraus: &[CMatrix]) -> CqResult<CqProcess> {
    let k = kraus.len();
    let (dout, din) = kraus.first().map(|m| (m.nrows(), m.ncols())).ok_or_else(|| CqError::WrongSignature("no Kraus maps".into()))?;
    // indices: in (d_in^2), out classical k, out quantum (d_out^2)
    let mut data = vec![c(0.0); din * din * k * dout * dout];
    for (kk, m) in kraus.iter().enumerate() {
        for a in 0..din {
            for b in 0..din {
                for x in 0..dout {
                    for y in 0..dout {
                        let idx = ((a * din + b) * k + kk) * dout * dout + x * dout + y;
                        data[idx] = m[(x, a)] * m[(y, b)].conj();
                    }
                }
            }
        }
    }
    let t = Tensor::new(&[din * din], &[k, dout * dout], data)?;
    CqProcess::from_tensor("instrument", t, vec![WireType::quantum(din)], vec![WireType::classical(k), WireType::quantum(dout)])
}

/// Demolition measurement `ρ ↦ Σ_k Tr(E_k ρ) |k>` from POVM effects.
pub fn povm_from_effects(effects: &[CMatrix]) -> CqResult<CqProcess> {
    let k = effects.len();
    let d = effects.first().map(|m| m.nrows()).ok_or_else(|| CqError::WrongSignature("no effects".into()))?;
    let mut data = vec![c(0.0); d * d * k];
    for (kk, e) in effects.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                data[(i * d + j) * k + kk] = e[(j, i)];
            }
        }
    }
    let t = Tensor::new(&[d * d], &[k], data)?;
    CqProcess::from_tensor("povm", t, vec![WireType::quantum(d)], vec![WireType::classical(k)])
}

/// Read back POVM effects `E_k[j][i] = T[i*d+j][k]` from a demolition
/// measurement.
pub fn effects_of(povm: &CqProcess) -> CqResult<Vec<CMatrix>> {
    let d = povm.diagram();
    if d.inputs().len() != 1 || !d.inputs()[0].is_quantum() || d.outputs().len() != 1 || d.outputs()[0].is_quantum() {
        return Err(CqError::WrongSignature("expected q -> c".into()));
    }
    let (dim, k) = (d.inputs()[0].dim(), d.outputs()[0].dim());
    let t = povm.tensor();
    Ok((0..k).map(|kk| DMatrix::from_fn(dim, dim, |j, i| t.data()[(i * dim + j) * k + kk])).collect())
}

#[derive(Clone, Debug)]
pub struct NaimarkDilation {
    /// The isometry `V = Σ_k K_k ⊗ |k>` from the system into system plus
    /// ancilla, as a matrix.
    pub isometry: CMatrix,
    /// `V` doubled, as a diagram `q(d) -> q(d), q(k)`.
    pub isometry_diagram: Diagram,
    /// Discard the system, measure the ancilla.
    pub measurement: CqProcess,
    /// The isometry followed by the measurement.
    pub composite: CqProcess,
    pub isometry_defect: f64,
    pub reconstruction_deviation: f64,
}

/// Realise a causal demolition POVM as an isometry followed by a
/// non-degenerate measurement of an ancilla.
pub fn naimark_dilate(povm: &CqProcess) -> CqResult<NaimarkDilation> {
    let effects = effects_of(povm)?;
    if !povm.is_causal(NumericTolerance::default()) {
        return Err(CqError::NotCausal);
    }
    let d = effects[0].nrows();
    let k = effects.len();
    let kraus: Vec<CMatrix> = effects
        .iter()
        .map(|e| psd_sqrt(e).ok_or_else(|| CqError::WrongSignature("effect is not positive".into())))
        .collect::<CqResult<_>>()?;
    // rows: system index s, ancilla index a, as s * k + a
    let v = DMatrix::from_fn(d * k, d, |r, col| kraus[r % k][(r / k, col)]);
    let t = Tensor::from_matrix(&v, &[d], &[d, k])?;
    let isometry_diagram = Diagram::boxed(BoxGen::doubled("V", t));
    let meas = compose_par(&discard(WireType::quantum(d))?, &Diagram::measure(k));
    let measurement = CqProcess::new(meas.clone())?;
    let composite = CqProcess::new(compose_seq(&isometry_diagram, &meas)?)?;
    let reconstruction_deviation = composite.tensor().max_abs_diff(povm.tensor()).unwrap_or(f64::INFINITY);
    Ok(NaimarkDilation {
        isometry_defect: isometry_defect(&v),
        isometry: v,
        isometry_diagram,
        measurement,
        composite,
        reconstruction_deviation,
    })
}

/// Controlled process whose first input is a classical control selecting
/// the branch.
pub fn controlled_from_branches(branches: &[CqProcess]) -> CqResult<CqProcess> {
    let first = branches.first().ok_or_else(|| CqError::WrongSignature("no branches".into()))?;
    let (ins, outs) = (first.diagram().inputs().to_vec(), first.diagram().outputs().to_vec());
    if branches.iter().any(|b| b.diagram().inputs() != ins.as_slice() || b.diagram().outputs() != outs.as_slice()) {
        return Err(CqError::WrongSignature("branches have different signatures".into()));
    }
    let k = branches.len();
    let data: Vec<C64> = branches.iter().flat_map(|b| b.tensor().data().iter().copied()).collect();
    let in_shape: Vec<usize> = std::iter::once(k).chain(ins.iter().map(|w| w.index_size())).collect();
    let out_shape: Vec<usize> = outs.iter().map(|w| w.index_size()).collect();
    let t = Tensor::new(&in_shape, &out_shape, data)?;
    let inputs = std::iter::once(WireType::classical(k)).chain(ins).collect();
    CqProcess::from_tensor("ctrl", t, inputs, outs)
}

/// Feed a distribution into the classical control (the first input).
pub fn mix(controlled: &CqProcess, p: &ProbDist) -> CqResult<CqProcess> {
    if !p.full_support() {
        return Err(CqError::NoFullSupport);
    }
    let ins = controlled.diagram().inputs();
    if ins.first() != Some(&WireType::classical(p.dim())) {
        return Err(CqError::WrongSignature("first input must be a classical control of matching dimension".into()));
    }
    let feed = compose_par(&p.state(), &Diagram::identity(&ins[1..]));
    CqProcess::new(compose_seq(&feed, controlled.diagram())?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalReport {
    pub mixture_pure: bool,
    /// Largest deviation of a branch from the mixture.
    pub max_branch_deviation: f64,
    /// Whether the extremality property holds: a pure mixture has every
    /// branch equal to it.
    pub consistent: bool,
}

/// Mix the branches with `p` and test whether a pure result forces every
/// branch to equal the mixture.
pub fn check_purity_extremal(branches: &[CqProcess], p: &ProbDist, tol: f64) -> CqResult<ExtremalReport> {
    let mixture = mix(&controlled_from_branches(branches)?, p)?;
    let mixture_pure = mixture.is_pure()?;
    let max_branch_deviation = branches
        .iter()
        .map(|b| b.tensor().max_abs_diff(mixture.tensor()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let consistent = !mixture_pure || max_branch_deviation <= tol;
    Ok(ExtremalReport { mixture_pure, max_branch_deviation, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: NumericTolerance = NumericTolerance { absolute: 1e-9, mode: crate::EqualityMode::Strict };

    #[test]
    fn measure_and_encode_are_causal() {
        assert!(CqProcess::new(Diagram::measure(3)).unwrap().is_causal(TOL));
        assert!(CqProcess::new(Diagram::encode(3)).unwrap().is_causal(TOL));
    }

    #[test]
    fn unitary_is_causal_and_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = CqProcess::pure("U", &haar_unitary(3, &mut rng)).unwrap();
        assert!(u.is_causal(TOL));
        assert!(u.is_pure().unwrap());
    }

    #[test]
    fn decoherence_is_not_pure_and_idempotent() {
        let dec = decoherence(2);
        assert!(!dec.is_pure().unwrap());
        let twice = dec.then(dec.diagram()).unwrap();
        assert!(twice.tensor().approx_eq(dec.tensor(), TOL));
    }

    #[test]
    fn maximally_mixed_is_not_pure() {
        let mm = compose_par(&Diagram::scalar(c(0.5)), &crate::diagram::dagger(&discard(WireType::quantum(2)).unwrap()));
        let p = CqProcess::new(mm).unwrap();
        assert!(!p.is_pure().unwrap());
        assert!(p.is_causal(TOL));
    }

    #[test]
    fn purity_rejects_classical() {
        assert!(matches!(CqProcess::new(Diagram::measure(2)).unwrap().is_pure(), Err(CqError::WrongSignature(_))));
    }

    #[test]
    fn stochastic_matrix() {
        let t = Tensor::from_real(&[2], &[2], &[0.5, 0.5, 0.2, 0.8]).unwrap();
        let p = CqProcess::from_tensor("S", t, vec![WireType::classical(2)], vec![WireType::classical(2)]).unwrap();
        assert!(p.is_stochastic(1e-12).unwrap());
        assert!(!p.is_deterministic(1e-12).unwrap());
        let copy = CqProcess::new(Diagram::copy(3)).unwrap();
        assert!(copy.is_deterministic(1e-12).unwrap());
    }

    #[test]
    fn nondemolition_is_von_neumann() {
        let p = CqProcess::new(Diagram::nondemolition(3)).unwrap();
        assert!(is_vn_measurement(&p, TOL).unwrap());
    }

    #[test]
    fn trine_instrument_is_not_von_neumann() {
        let effects = trine();
        let kraus: Vec<CMatrix> = effects.iter().map(|e| psd_sqrt(e).unwrap()).collect();
        let p = instrument_from_kraus(&kraus).unwrap();
        let r = vn_measurement_report(&p, TOL).unwrap();
        assert!(r.causality_deviation < 1e-9);
        assert!(!r.pass);
    }

    fn trine() -> Vec<CMatrix> {
        (0..3)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / 3.0;
                let v = nalgebra::DVector::from_vec(vec![c((th / 2.0).cos()), c((th / 2.0).sin())]);
                &v * v.adjoint() * c(2.0 / 3.0)
            })
            .collect()
    }

    #[test]
    fn naimark_reconstructs_trine() {
        let povm = povm_from_effects(&trine()).unwrap();
        let n = naimark_dilate(&povm).unwrap();
        assert!(n.isometry_defect < 1e-9);
        assert!(n.reconstruction_deviation < 1e-9);
    }

    #[test]
    fn naimark_rejects_non_causal() {
        let e = vec![CMatrix::identity(2, 2) * c(2.0)];
        assert_eq!(naimark_dilate(&povm_from_effects(&e).unwrap()).unwrap_err(), CqError::NotCausal);
    }

    #[test]
    fn distribution_validation() {
        assert!(ProbDist::new(vec![0.5, 0.6]).is_err());
        assert!(!ProbDist::new(vec![1.0, 0.0]).unwrap().full_support());
        assert_eq!(ProbDist::uniform(4).weights(), &[0.25; 4]);
    }
}
