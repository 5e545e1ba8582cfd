//! Phase states, phase spiders and the phase group.
//!
//! For a spider family of dimension `d` the phase group is realised as the
//! `(d-1)`-torus: vectors of unit-modulus complex numbers with component 0
//! pinned to 1, multiplied componentwise.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cq::CqProcess;
use crate::diagram::{compose_par, compose_seq, Diagram, Spider};
use crate::tensor::{evaluate, NumericTolerance, Tensor};
use crate::C64;

const MODULUS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error("phase vectors of dimensions {0} and {1} cannot be combined")]
    DimMismatch(usize, usize),
    #[error("phase component {0} has modulus {1}, expected 1")]
    NotUnitModulus(usize, f64),
    #[error("a phase vector needs at least one component")]
    Empty,
    #[error("the diagram does not evaluate to a phase state")]
    NotPhaseState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseVector {
    components: Vec<C64>,
}

impl PhaseVector {
    /// The group unit, all components 1.
    pub fn unit(d: usize) -> Self {
        assert!(d >= 1);
        Self { components: vec![C64::new(1.0, 0.0); d] }
    }

    /// `e^{i θ_k}` for each angle, rescaled so that component 0 is 1.
    pub fn from_angles(angles: &[f64]) -> Result<Self, PhaseError> {
        let first = *angles.first().ok_or(PhaseError::Empty)?;
        Ok(Self { components: angles.iter().map(|&t| C64::from_polar(1.0, t - first)).collect() })
    }

    /// Unit-modulus components, rescaled so that component 0 is 1.
    pub fn from_components(cs: &[C64]) -> Result<Self, PhaseError> {
        let first = *cs.first().ok_or(PhaseError::Empty)?;
        for (k, c) in cs.iter().enumerate() {
            if (c.norm() - 1.0).abs() > MODULUS_TOL {
                return Err(PhaseError::NotUnitModulus(k, c.norm()));
            }
        }
        if first == C64::new(1.0, 0.0) {
            return Ok(Self { components: cs.to_vec() });
        }
        let g = first.conj();
        let mut components: Vec<C64> = cs.iter().map(|c| c * g).collect();
        components[0] = C64::new(1.0, 0.0);
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize { self.components.len() }

    pub fn components(&self) -> &[C64] { &self.components }

    /// Angles in `(-π, π]`, the first always 0.
    pub fn angles(&self) -> Vec<f64> { self.components.iter().map(|c| c.arg()).collect() }

    /// Group product: componentwise multiplication.
    pub fn sum(&self, other: &Self) -> Result<Self, PhaseError> {
        if self.dim() != other.dim() {
            return Err(PhaseError::DimMismatch(self.dim(), other.dim()));
        }
        Ok(Self { components: self.components.iter().zip(&other.components).map(|(a, b)| a * b).collect() })
    }

    /// Group inverse: componentwise conjugate.
    pub fn inverse(&self) -> Self { Self { components: self.components.iter().map(|c| c.conj()).collect() } }

    pub fn is_unit(&self, tol: f64) -> bool { self.components.iter().all(|c| (c - 1.0).norm() <= tol) }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.components.iter().zip(&other.components).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// The unnormalised state `Σ_i α_i |i>`.
    pub fn plain_state(&self) -> Tensor { Tensor::state(self.components.clone()) }

    /// The doubled phase state as a diagram: a phased quantum spider `0 -> 1`.
    pub fn state_diagram(&self) -> Diagram {
        Diagram::spider(Spider::quantum(0, 1, self.dim()).with_phase(self.clone()).expect("dimensions agree"))
    }
}

impl fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let angles: Vec<String> = self.angles().iter().map(|a| format!("{a:?}")).collect();
        write!(f, "phase({})", angles.join(", "))
    }
}

/// Extract the phase of a quantum state on one wire if it is pure and
/// unbiased for the computational basis: measuring it gives a uniform
/// distribution up to scale.
pub fn is_phase_state(psi: &CqProcess) -> Option<PhaseVector> {
    let d = psi.diagram();
    if !d.inputs().is_empty() || d.outputs().len() != 1 || !d.outputs()[0].is_quantum() {
        return None;
    }
    let dim = d.outputs()[0].dim();
    if !psi.is_pure().ok()? {
        return None;
    }
    let rho = psi.tensor().to_matrix();
    // rho as a d x d density matrix: index ket * d + bra
    let born: Vec<f64> = (0..dim).map(|i| rho[(i * dim + i, 0)].re).collect();
    let p0 = born[0];
    if p0 <= crate::DEFAULT_TOL || born.iter().any(|&p| (p - p0).abs() > crate::DEFAULT_TOL * p0.max(1.0)) {
        return None;
    }
    // row 0 of rho holds psi_0 conj(psi_i); its conjugate gives psi_i up to
    // the common factor conj(psi_0)
    let comps: Vec<C64> = (0..dim).map(|i| rho[(i, 0)].conj() / p0).collect();
    let comps: Vec<C64> = comps.iter().map(|c| c / c.norm()).collect();
    PhaseVector::from_components(&comps).ok()
}

/// The phase of the state obtained by fusing two phase states with a `2 -> 1`
/// quantum spider.
pub fn phase_sum_diagrammatic(a: &PhaseVector, b: &PhaseVector) -> Result<PhaseVector, PhaseError> {
    if a.dim() != b.dim() {
        return Err(PhaseError::DimMismatch(a.dim(), b.dim()));
    }
    let both = compose_par(&a.state_diagram(), &b.state_diagram());
    let fused = compose_seq(&both, &Diagram::quantum_spider(2, 1, a.dim())).expect("arity fits");
    let p = CqProcess::new(fused).map_err(|_| PhaseError::NotPhaseState)?;
    is_phase_state(&p).ok_or(PhaseError::NotPhaseState)
}

/// The quantum phase gate carrying `a`.
pub fn phase_gate(a: &PhaseVector) -> CqProcess { CqProcess::new(Diagram::phase_gate(a)).expect("gate is small") }

#[derive(Clone, Debug, Serialize)]
pub struct GhzPhaseReport {
    /// Deviation between the locally phased GHZ state and GHZ carrying the
    /// group sum.
    pub fusion_deviation: f64,
    /// Largest deviation over all permutations of the three phases.
    pub permutation_deviation: f64,
    /// Deviation of the fully measured state from the unphased one.
    pub measured_deviation: f64,
    pub pass: bool,
}

fn ghz_with_gates(ps: [&PhaseVector; 3]) -> Diagram {
    let ghz = Diagram::quantum_spider(0, 3, 2);
    let gates = compose_par(&compose_par(&Diagram::phase_gate(ps[0]), &Diagram::phase_gate(ps[1])), &Diagram::phase_gate(ps[2]));
    compose_seq(&ghz, &gates).expect("three qubit legs")
}

/// Check that phase gates on the legs of a qubit GHZ state fuse into one
/// phase carrying the group sum, that the result ignores the order of the
/// three phases, and that measuring every leg forgets them.
pub fn ghz_phase_fusion_demo(a: &PhaseVector, b: &PhaseVector, c: &PhaseVector, tol: f64) -> Result<GhzPhaseReport, PhaseError> {
    for p in [a, b, c] {
        if p.dim() != 2 {
            return Err(PhaseError::DimMismatch(2, p.dim()));
        }
    }
    let total = a.sum(b)?.sum(c)?;
    let eval = |d: &Diagram| evaluate(d).expect("three qubits fit");
    let lhs = eval(&ghz_with_gates([a, b, c]));
    let fused = Diagram::spider(Spider::quantum(0, 3, 2).with_phase(total).expect("dimension 2"));
    let rhs = eval(&fused);
    let fusion_deviation = lhs.max_abs_diff(&rhs).unwrap_or(f64::INFINITY);
    let perms: [[&PhaseVector; 3]; 6] = [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
    let permutation_deviation = perms
        .iter()
        .map(|p| eval(&ghz_with_gates(*p)).max_abs_diff(&lhs).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let measure3 = compose_par(&compose_par(&Diagram::measure(2), &Diagram::measure(2)), &Diagram::measure(2));
    let measured = eval(&compose_seq(&ghz_with_gates([a, b, c]), &measure3).expect("three legs"));
    let plain = eval(&compose_seq(&Diagram::quantum_spider(0, 3, 2), &measure3).expect("three legs"));
    let measured_deviation = measured.max_abs_diff(&plain).unwrap_or(f64::INFINITY);
    let pass = fusion_deviation <= tol && permutation_deviation <= tol && measured_deviation <= tol;
    Ok(GhzPhaseReport { fusion_deviation, permutation_deviation, measured_deviation, pass })
}

/// Whether `(1/d)` times the doubled phase state is causal.
pub fn scaled_phase_state_is_causal(a: &PhaseVector) -> bool {
    let scaled = compose_par(&Diagram::scalar(C64::new(1.0 / a.dim() as f64, 0.0)), &a.state_diagram());
    CqProcess::new(scaled).map(|p| p.is_causal(NumericTolerance::default())).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauge_pins_first_component() {
        let p = PhaseVector::from_angles(&[0.5, 1.0]).unwrap();
        assert!((p.components()[0] - 1.0).norm() < 1e-15);
        assert!((p.angles()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_unit_modulus() {
        let r = PhaseVector::from_components(&[C64::new(1.0, 0.0), C64::new(0.5, 0.0)]);
        assert!(matches!(r, Err(PhaseError::NotUnitModulus(1, _))));
    }

    #[test]
    fn inverse_cancels() {
        let p = PhaseVector::from_angles(&[0.0, 0.3, -2.0]).unwrap();
        assert!(p.sum(&p.inverse()).unwrap().is_unit(1e-15));
    }

    #[test]
    fn sum_rejects_dim_mismatch() {
        assert_eq!(PhaseVector::unit(2).sum(&PhaseVector::unit(3)), Err(PhaseError::DimMismatch(2, 3)));
    }

    #[test]
    fn extract_phase_state() {
        let p = PhaseVector::from_angles(&[0.0, PI / 3.0]).unwrap();
        let got = is_phase_state(&CqProcess::new(p.state_diagram()).unwrap()).unwrap();
        assert!(got.approx_eq(&p, 1e-12));
    }

    #[test]
    fn classical_value_is_not_a_phase_state() {
        let v = crate::diagram::double(&Diagram::classical_value(0, 2)).unwrap();
        assert!(is_phase_state(&CqProcess::new(v).unwrap()).is_none());
    }

    #[test]
    fn diagrammatic_sum_matches_componentwise() {
        let a = PhaseVector::from_angles(&[0.0, 0.7]).unwrap();
        let b = PhaseVector::from_angles(&[0.0, 1.1]).unwrap();
        let s = phase_sum_diagrammatic(&a, &b).unwrap();
        assert!(s.approx_eq(&PhaseVector::from_angles(&[0.0, 1.8]).unwrap(), 1e-9));
    }

    #[test]
    fn scaled_phase_state_is_causal_but_bare_is_not() {
        let a = PhaseVector::from_angles(&[0.0, 0.4]).unwrap();
        assert!(scaled_phase_state_is_causal(&a));
        let bare = CqProcess::new(a.state_diagram()).unwrap();
        assert!(!bare.is_causal(NumericTolerance::default()));
    }
}
