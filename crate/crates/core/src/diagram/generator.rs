//! Diagram generators and their dense tensors.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DiagramError, WireKind, WireType};
use crate::phases::PhaseVector;
use crate::tensor::{Tensor, TensorError, TensorResult, MAX_ENTRIES};
use crate::C64;

/// Which orthonormal basis a spider family copies.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// The computational basis `|0>, ..., |d-1>`.
    Onb,
    /// The discrete Fourier basis `F|i>`.
    Fourier,
}

impl Family {
    /// Basis vectors `b_i` as columns, `basis[i][x] = <x|b_i>`.
    pub fn basis(self, d: usize) -> Vec<Vec<C64>> {
        match self {
            Family::Onb => (0..d)
                .map(|i| (0..d).map(|x| if x == i { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect())
                .collect(),
            Family::Fourier => {
                let norm = 1.0 / (d as f64).sqrt();
                (0..d)
                    .map(|i| (0..d).map(|x| C64::from_polar(norm, TAU * (i * x) as f64 / d as f64)).collect())
                    .collect()
            }
        }
    }
}

/// Whether the ket and bra halves of a spider's quantum legs are fused into a
/// single head (bastard spiders: measure, encode, discard, decoherence) or
/// kept as two conjugate heads (doubled spiders).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Heads {
    Single,
    Double,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spider {
    family: Family,
    dim: usize,
    heads: Heads,
    inputs: Vec<WireType>,
    outputs: Vec<WireType>,
    phase: Option<PhaseVector>,
}

impl Spider {
    pub fn new(
        family: Family,
        dim: usize,
        heads: Heads,
        inputs: Vec<WireType>,
        outputs: Vec<WireType>,
        phase: Option<PhaseVector>,
    ) -> Result<Self, DiagramError> {
        if dim == 0 {
            return Err(DiagramError::InvalidGenerator("spider dimension must be positive".into()));
        }
        if let Some(leg) = inputs.iter().chain(&outputs).find(|w| w.dim() != dim) {
            return Err(DiagramError::InvalidGenerator(format!("spider of dimension {dim} has a leg of type {leg}")));
        }
        if heads == Heads::Double && inputs.iter().chain(&outputs).any(|w| w.kind() == WireKind::Classical) {
            return Err(DiagramError::InvalidGenerator("a doubled spider cannot have classical legs".into()));
        }
        if let Some(p) = &phase {
            if p.dim() != dim {
                return Err(DiagramError::InvalidGenerator(format!(
                    "phase of dimension {} on a spider of dimension {dim}",
                    p.dim()
                )));
            }
        }
        let phase = phase.filter(|p| !p.is_unit(1e-12));
        Ok(Self { family, dim, heads, inputs, outputs, phase })
    }

    /// Plain (single-wire) spider with `n` inputs and `m` outputs.
    pub fn classical(n: usize, m: usize, d: usize) -> Self {
        let w = WireType::classical(d);
        Self::new(Family::Onb, d, Heads::Single, vec![w; n], vec![w; m], None).expect("valid legs")
    }

    /// Doubled spider on quantum legs.
    pub fn quantum(n: usize, m: usize, d: usize) -> Self {
        let w = WireType::quantum(d);
        Self::new(Family::Onb, d, Heads::Double, vec![w; n], vec![w; m], None).expect("valid legs")
    }

    /// Single-headed spider with arbitrary leg kinds.
    pub fn bastard(d: usize, inputs: Vec<WireType>, outputs: Vec<WireType>) -> Result<Self, DiagramError> {
        Self::new(Family::Onb, d, Heads::Single, inputs, outputs, None)
    }

    pub fn with_phase(self, phase: PhaseVector) -> Result<Self, DiagramError> {
        Self::new(self.family, self.dim, self.heads, self.inputs, self.outputs, Some(phase))
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn family(&self) -> Family { self.family }

    pub fn dim(&self) -> usize { self.dim }

    pub fn heads(&self) -> Heads { self.heads }

    pub fn inputs(&self) -> &[WireType] { &self.inputs }

    pub fn outputs(&self) -> &[WireType] { &self.outputs }

    pub fn phase(&self) -> Option<&PhaseVector> { self.phase.as_ref() }

    pub fn arity(&self) -> usize { self.inputs.len() + self.outputs.len() }

    pub fn is_plain(&self) -> bool {
        self.heads == Heads::Single && self.inputs.iter().chain(&self.outputs).all(|w| w.kind() == WireKind::Classical)
    }

    pub(crate) fn dagger(&self) -> Self {
        Self {
            family: self.family,
            dim: self.dim,
            heads: self.heads,
            inputs: self.outputs.clone(),
            outputs: self.inputs.clone(),
            phase: self.phase.as_ref().map(PhaseVector::inverse),
        }
    }

    fn tensor(&self) -> TensorResult<Tensor> {
        let in_shape: Vec<usize> = self.inputs.iter().map(WireType::index_size).collect();
        let out_shape: Vec<usize> = self.outputs.iter().map(WireType::index_size).collect();
        let size: usize = in_shape.iter().chain(&out_shape).product();
        if size > MAX_ENTRIES {
            return Err(TensorError::TooLarge(size));
        }
        let d = self.dim;
        let one = C64::new(1.0, 0.0);
        let phase = |i: usize| self.phase.as_ref().map_or(one, |p| p.components()[i]);
        let mut data = vec![C64::new(0.0, 0.0); size];
        let legs: Vec<(WireKind, bool)> = self
            .inputs
            .iter()
            .map(|w| (w.kind(), true))
            .chain(self.outputs.iter().map(|w| (w.kind(), false)))
            .collect();

        if self.family == Family::Onb {
            let shape: Vec<usize> = in_shape.iter().chain(&out_shape).copied().collect();
            let mut put = |i: usize, j: usize, v: C64| {
                let idx: Vec<usize> = legs
                    .iter()
                    .map(|(kind, _)| match kind {
                        WireKind::Classical => i,
                        WireKind::Quantum => i * d + j,
                    })
                    .collect();
                data[crate::tensor::flat_index(&shape, &idx)] += v;
            };
            match self.heads {
                Heads::Single => (0..d).for_each(|i| put(i, i, phase(i))),
                Heads::Double => {
                    for i in 0..d {
                        for j in 0..d {
                            put(i, j, phase(i) * phase(j).conj());
                        }
                    }
                }
            }
            return Tensor::new(&in_shape, &out_shape, data);
        }

        let basis = self.family.basis(d);
        let leg_vector = |kind: WireKind, is_input: bool, i: usize, j: usize| -> Vec<C64> {
            let (bi, bj) = (&basis[i], &basis[j]);
            match (kind, is_input) {
                (WireKind::Classical, false) => bi.clone(),
                (WireKind::Classical, true) => bi.iter().map(|z| z.conj()).collect(),
                (WireKind::Quantum, false) => {
                    (0..d * d).map(|x| bi[x / d] * bj[x % d].conj()).collect()
                }
                (WireKind::Quantum, true) => {
                    (0..d * d).map(|x| bi[x / d].conj() * bj[x % d]).collect()
                }
            }
        };
        let pairs: Vec<(usize, usize, C64)> = match self.heads {
            Heads::Single => (0..d).map(|i| (i, i, phase(i))).collect(),
            Heads::Double => (0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, phase(i) * phase(j).conj()))
                .collect(),
        };
        for (i, j, coeff) in pairs {
            let mut acc = vec![coeff];
            for &(kind, is_input) in &legs {
                let v = leg_vector(kind, is_input, i, j);
                acc = acc.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
            }
            for (x, y) in data.iter_mut().zip(acc) {
                *x += y;
            }
        }
        Tensor::new(&in_shape, &out_shape, data)
    }
}

/// How a box payload is interpreted.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    /// The payload is the tensor itself, indexed by the legs' index sizes.
    Plain,
    /// The payload `f` is indexed by base dimensions and the box denotes
    /// `f ⊗ conj(f)` on quantum legs.
    Doubled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxGen {
    name: String,
    inputs: Vec<WireType>,
    outputs: Vec<WireType>,
    payload: Tensor,
    flavor: Flavor,
}

impl BoxGen {
    pub fn plain(name: impl Into<String>, payload: Tensor, inputs: Vec<WireType>, outputs: Vec<WireType>) -> Result<Self, DiagramError> {
        let expect_in: Vec<usize> = inputs.iter().map(WireType::index_size).collect();
        let expect_out: Vec<usize> = outputs.iter().map(WireType::index_size).collect();
        if payload.in_shape() != expect_in.as_slice() || payload.out_shape() != expect_out.as_slice() {
            return Err(DiagramError::InvalidGenerator(format!(
                "payload shape {:?}->{:?} does not match legs {:?}->{:?}",
                payload.in_shape(),
                payload.out_shape(),
                expect_in,
                expect_out
            )));
        }
        Ok(Self { name: name.into(), inputs, outputs, payload, flavor: Flavor::Plain })
    }

    /// A plain box on classical legs sized by the payload.
    pub fn classical(name: impl Into<String>, payload: Tensor) -> Self {
        let inputs = payload.in_shape().iter().map(|&d| WireType::classical(d)).collect();
        let outputs = payload.out_shape().iter().map(|&d| WireType::classical(d)).collect();
        Self::plain(name, payload, inputs, outputs).expect("legs derived from payload")
    }

    /// A doubled box `f ⊗ conj(f)` on quantum legs sized by the payload.
    pub fn doubled(name: impl Into<String>, payload: Tensor) -> Self {
        let inputs = payload.in_shape().iter().map(|&d| WireType::quantum(d)).collect();
        let outputs = payload.out_shape().iter().map(|&d| WireType::quantum(d)).collect();
        Self { name: name.into(), inputs, outputs, payload, flavor: Flavor::Doubled }
    }

    pub fn name(&self) -> &str { &self.name }

    pub fn inputs(&self) -> &[WireType] { &self.inputs }

    pub fn outputs(&self) -> &[WireType] { &self.outputs }

    pub fn payload(&self) -> &Tensor { &self.payload }

    pub fn flavor(&self) -> Flavor { self.flavor }

    pub(crate) fn dagger(&self) -> Self {
        let name = match self.name.strip_suffix('†') {
            Some(base) => base.to_string(),
            None => format!("{}†", self.name),
        };
        Self {
            name,
            inputs: self.outputs.clone(),
            outputs: self.inputs.clone(),
            payload: self.payload.dagger(),
            flavor: self.flavor,
        }
    }

    fn tensor(&self) -> TensorResult<Tensor> {
        match self.flavor {
            Flavor::Plain => Ok(self.payload.clone()),
            Flavor::Doubled => double_payload(&self.payload),
        }
    }
}

/// `f ⊗ conj(f)` with each leg's ket and bra indices merged as `ket * d + bra`.
pub fn double_payload(p: &Tensor) -> TensorResult<Tensor> {
    let base: Vec<usize> = p.shape().to_vec();
    let doubled: Vec<usize> = base.iter().map(|d| d * d).collect();
    let size: usize = doubled.iter().product();
    if size > MAX_ENTRIES {
        return Err(TensorError::TooLarge(size));
    }
    let n = p.len();
    let mut data = vec![C64::new(0.0, 0.0); size];
    let base_strides = crate::tensor::strides(&base);
    let dbl_strides = crate::tensor::strides(&doubled);
    // split a flat base index into per-leg components once
    let split: Vec<Vec<usize>> = (0..n)
        .map(|flat| base_strides.iter().zip(&base).map(|(s, d)| (flat / s) % d).collect())
        .collect();
    for (k, ket) in split.iter().enumerate() {
        let a = p.data()[k];
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        for (b, bra) in split.iter().enumerate() {
            let idx: usize = ket
                .iter()
                .zip(bra)
                .zip(&base)
                .zip(&dbl_strides)
                .map(|(((x, y), d), s)| (x * d + y) * s)
                .sum();
            data[idx] = a * p.data()[b].conj();
        }
    }
    Tensor::new(&doubled[..p.n_inputs()], &doubled[p.n_inputs()..], data)
}

/// One node of a diagram.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Spider(Spider),
    Box(BoxGen),
    Cup(WireType),
    Cap(WireType),
    Swap(WireType, WireType),
    Scalar(C64),
}

impl Generator {
    pub fn inputs(&self) -> Vec<WireType> {
        match self {
            Self::Spider(s) => s.inputs.clone(),
            Self::Box(b) => b.inputs.clone(),
            Self::Cup(_) | Self::Scalar(_) => Vec::new(),
            Self::Cap(w) => vec![*w, *w],
            Self::Swap(a, b) => vec![*a, *b],
        }
    }

    pub fn outputs(&self) -> Vec<WireType> {
        match self {
            Self::Spider(s) => s.outputs.clone(),
            Self::Box(b) => b.outputs.clone(),
            Self::Cap(_) | Self::Scalar(_) => Vec::new(),
            Self::Cup(w) => vec![*w, *w],
            Self::Swap(a, b) => vec![*b, *a],
        }
    }

    pub fn as_spider(&self) -> Option<&Spider> {
        match self {
            Self::Spider(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_box(&self) -> Option<&BoxGen> {
        match self {
            Self::Box(b) => Some(b),
            _ => None,
        }
    }

    /// Legs within one direction may be permuted without changing the value.
    pub fn is_leg_symmetric(&self) -> bool { matches!(self, Self::Spider(_) | Self::Cup(_) | Self::Cap(_)) }

    pub fn is_structural(&self) -> bool { matches!(self, Self::Cup(_) | Self::Cap(_) | Self::Swap(..)) }

    pub fn dagger(&self) -> Self {
        match self {
            Self::Spider(s) => Self::Spider(s.dagger()),
            Self::Box(b) => Self::Box(b.dagger()),
            Self::Cup(w) => Self::Cap(*w),
            Self::Cap(w) => Self::Cup(*w),
            Self::Swap(a, b) => Self::Swap(*b, *a),
            Self::Scalar(z) => Self::Scalar(z.conj()),
        }
    }

    /// The doubled counterpart of a plain generator.
    pub fn double(&self) -> Result<Self, DiagramError> {
        let q = |w: &WireType| -> Result<WireType, DiagramError> {
            match w.kind() {
                WireKind::Classical => Ok(WireType::quantum(w.dim())),
                WireKind::Quantum => Err(DiagramError::NotPlain),
            }
        };
        Ok(match self {
            Self::Spider(s) => {
                if !s.is_plain() {
                    return Err(DiagramError::NotPlain);
                }
                Self::Spider(Spider {
                    family: s.family,
                    dim: s.dim,
                    heads: Heads::Double,
                    inputs: s.inputs.iter().map(q).collect::<Result<_, _>>()?,
                    outputs: s.outputs.iter().map(q).collect::<Result<_, _>>()?,
                    phase: s.phase.clone(),
                })
            }
            Self::Box(b) => {
                if b.flavor != Flavor::Plain {
                    return Err(DiagramError::NotPlain);
                }
                Self::Box(BoxGen {
                    name: b.name.clone(),
                    inputs: b.inputs.iter().map(q).collect::<Result<_, _>>()?,
                    outputs: b.outputs.iter().map(q).collect::<Result<_, _>>()?,
                    payload: b.payload.clone(),
                    flavor: Flavor::Doubled,
                })
            }
            Self::Cup(w) => Self::Cup(q(w)?),
            Self::Cap(w) => Self::Cap(q(w)?),
            Self::Swap(a, b) => Self::Swap(q(a)?, q(b)?),
            Self::Scalar(z) => Self::Scalar(C64::new(z.norm_sqr(), 0.0)),
        })
    }

    /// Dense tensor over the generator's ports, inputs then outputs.
    pub fn tensor(&self) -> TensorResult<Tensor> {
        match self {
            Self::Spider(s) => s.tensor(),
            Self::Box(b) => b.tensor(),
            Self::Cup(w) | Self::Cap(w) => {
                let n = w.index_size();
                let mut data = vec![C64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    data[i * n + i] = C64::new(1.0, 0.0);
                }
                if matches!(self, Self::Cup(_)) {
                    Tensor::new(&[], &[n, n], data)
                } else {
                    Tensor::new(&[n, n], &[], data)
                }
            }
            Self::Swap(a, b) => {
                let (na, nb) = (a.index_size(), b.index_size());
                let mut data = vec![C64::new(0.0, 0.0); na * nb * nb * na];
                // indices: in a, in b, out b, out a
                for x in 0..na {
                    for y in 0..nb {
                        let idx = ((x * nb + y) * nb + y) * na + x;
                        data[idx] = C64::new(1.0, 0.0);
                    }
                }
                Tensor::new(&[na, nb], &[nb, na], data)
            }
            Self::Scalar(z) => Ok(Tensor::scalar(*z)),
        }
    }

    /// Short human-readable label used by the listing and DOT exporters.
    pub fn label(&self) -> String {
        match self {
            Self::Spider(s) => {
                let mut l = String::new();
                if s.family == Family::Fourier {
                    l.push_str("F ");
                }
                let kind = match (s.heads, s.is_plain()) {
                    (Heads::Double, _) => "q-spider",
                    (Heads::Single, true) => "spider",
                    (Heads::Single, false) => "bastard",
                };
                l.push_str(kind);
                if let Some(p) = &s.phase {
                    l.push_str(&format!(" {p}"));
                }
                l
            }
            Self::Box(b) => match b.flavor {
                Flavor::Plain => b.name.clone(),
                Flavor::Doubled => format!("^{}", b.name),
            },
            Self::Cup(_) => "cup".into(),
            Self::Cap(_) => "cap".into(),
            Self::Swap(..) => "swap".into(),
            Self::Scalar(z) => format!("{z}"),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ws: &[WireType]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            Self::Spider(s) => {
                write!(f, "spider [{}] -> [{}]", list(&s.inputs), list(&s.outputs))?;
                if s.heads == Heads::Single && !s.is_plain() {
                    write!(f, " single")?;
                }
                if s.family == Family::Fourier {
                    write!(f, " fourier")?;
                }
                if let Some(p) = &s.phase {
                    write!(f, " {p}")?;
                }
                Ok(())
            }
            Self::Box(b) => {
                let flavor = if b.flavor == Flavor::Doubled { " doubled" } else { "" };
                write!(f, "box {}{} [{}] -> [{}]", b.name, flavor, list(&b.inputs), list(&b.outputs))
            }
            Self::Cup(w) => write!(f, "cup {w}"),
            Self::Cap(w) => write!(f, "cap {w}"),
            Self::Swap(a, b) => write!(f, "swap {a} {b}"),
            Self::Scalar(z) => write!(f, "scalar {z}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 { C64::new(x, 0.0) }

    #[test]
    fn copy_spider_is_diagonal_copy() {
        let t = Generator::Spider(Spider::classical(1, 2, 2)).tensor().unwrap();
        let m = t.to_matrix();
        assert_eq!(m.nrows(), 4);
        assert_eq!(m[(0, 0)], re(1.0));
        assert_eq!(m[(3, 1)], re(1.0));
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn fourier_spider_copies_fourier_basis() {
        let d = 3;
        let s = Spider::classical(1, 2, d).with_family(Family::Fourier);
        let m = Generator::Spider(s).tensor().unwrap().to_matrix();
        for b in Family::Fourier.basis(d) {
            let v = nalgebra::DVector::from_vec(b.clone());
            let vv = v.kronecker(&v);
            assert!((&m * &v - vv).norm() < 1e-12);
        }
    }

    #[test]
    fn doubled_spider_matches_doubled_plain_tensor() {
        let plain = Generator::Spider(Spider::classical(1, 2, 2)).tensor().unwrap();
        let q = Generator::Spider(Spider::quantum(1, 2, 2)).tensor().unwrap();
        assert_eq!(double_payload(&plain).unwrap(), q);
    }

    #[test]
    fn double_payload_of_basis_state() {
        let v = Tensor::from_real(&[], &[2], &[1.0, 0.0]).unwrap();
        let dv = double_payload(&v).unwrap();
        assert_eq!(dv.data(), &[re(1.0), re(0.0), re(0.0), re(0.0)]);
    }

    #[test]
    fn zero_leg_spiders_are_dimension_scalars() {
        let single = Generator::Spider(Spider::classical(0, 0, 3)).tensor().unwrap();
        assert_eq!(single.as_scalar(), Some(re(3.0)));
        let double = Generator::Spider(Spider::quantum(0, 0, 3)).tensor().unwrap();
        assert_eq!(double.as_scalar(), Some(re(9.0)));
    }

    #[test]
    fn rejects_doubled_spider_with_classical_leg() {
        let r = Spider::new(Family::Onb, 2, Heads::Double, vec![WireType::classical(2)], vec![], None);
        assert!(r.is_err());
    }

    #[test]
    fn box_dagger_toggles_name() {
        let b = BoxGen::classical("M", Tensor::from_real(&[2], &[2], &[1., 2., 3., 4.]).unwrap());
        assert_eq!(b.dagger().name(), "M†");
        assert_eq!(b.dagger().dagger(), b);
    }
}
