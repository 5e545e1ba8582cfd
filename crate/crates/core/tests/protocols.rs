use cqdiag::cq::CqProcess;
use cqdiag::diagram::{compose_par, compose_seq, discard};
use cqdiag::entanglement::{bipartite_density, reduced_rank};
use cqdiag::linalg::{c, weyl, CMatrix};
use cqdiag::protocols::*;
use cqdiag::rewrite::rule;
use cqdiag::tensor::evaluate;
use cqdiag::{Diagram, WireType, C64};

const TOL: f64 = 1e-9;

fn print_failures(r: &ProtocolReport) -> String {
    r.claims.iter().filter(|c| !c.passed).map(|c| format!("{} ({:?})", c.name, c.deviation)).collect::<Vec<_>>().join(", ")
}

#[test]
fn teleportation_passes_for_pauli_corrections() {
    for d in [2, 3] {
        let r = verify_teleportation(&ControlledUnitary::pauli(d), TOL).unwrap();
        assert!(r.passed, "d={d}: {}", print_failures(&r));
        assert_eq!(r.trace_closes, Some(true));
        let trace = r.trace.as_ref().unwrap();
        let rules: Vec<&str> = trace.steps.iter().map(|s| s.rule.as_str()).collect();
        assert!(rules.contains(&"yank") && rules.contains(&"controlled-unitary-cancel"), "{rules:?}");
        assert!(trace.steps.iter().all(|s| rule(&s.rule).is_some()));
    }
}

#[test]
fn teleportation_with_identity_branches_fails() {
    let cu = ControlledUnitary::new(vec![weyl(2, 0, 0); 4]).unwrap();
    let r = verify_teleportation(&cu, TOL).unwrap();
    assert!(!r.passed);
    let basis = r.claim("Bell measurement is a basis measurement").unwrap();
    assert!(!basis.passed);
    assert!(basis.deviation.unwrap() > 0.5);
}

#[test]
fn qutrit_corrections_are_orthogonal() {
    // Brute force: Tr(U_i† U_j) = 3 δ_ij for the nine shift/clock products.
    let cu = ControlledUnitary::pauli(3);
    for (i, a) in cu.branches().iter().enumerate() {
        for (j, b) in cu.branches().iter().enumerate() {
            let tr = (a.adjoint() * b).trace();
            let want = if i == j { 3.0 } else { 0.0 };
            assert!((tr - c(want)).norm() < 1e-12, "{i},{j}");
        }
    }
}

#[test]
fn teleport_output_matches_direct_simulation() {
    // Independent state-vector simulation of standard qubit teleportation.
    let cu = ControlledUnitary::pauli(2);
    let t = evaluate(&build_teleportation(&cu).unwrap()).unwrap();
    let bell = [c(1.0 / 2f64.sqrt()), c(0.0), c(0.0), c(1.0 / 2f64.sqrt())];
    for x in 0..2 {
        let mut psi = [c(0.0); 2];
        psi[x] = c(1.0);
        // |ψ>|Φ+> projected onto Bell vectors (U_i ⊗ 1)|Φ+>, corrected by U_i.
        let mut rho = CMatrix::zeros(2, 2);
        for u in cu.branches() {
            let mut out = [c(0.0); 2];
            for a in 0..2 {
                for b in 0..2 {
                    let beta = (0..2).map(|j| u[(a, j)] * bell[j * 2 + b]).sum::<C64>();
                    for cc in 0..2 {
                        out[cc] += beta.conj() * psi[a] * bell[b * 2 + cc];
                    }
                }
            }
            let corrected: Vec<C64> = (0..2).map(|r| (0..2).map(|k| u[(r, k)] * out[k]).sum()).collect();
            for r in 0..2 {
                for k in 0..2 {
                    rho[(r, k)] += corrected[r] * corrected[k].conj();
                }
            }
        }
        for r in 0..2 {
            for k in 0..2 {
                let got = t.get(&[x * 2 + x, r * 2 + k]);
                assert!((got - rho[(r, k)]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn dense_coding_is_the_classical_identity() {
    for d in [2, 3] {
        let r = verify_dense_coding(&ControlledUnitary::pauli(d), TOL).unwrap();
        assert!(r.passed, "d={d}: {}", print_failures(&r));
    }
}

#[test]
fn dense_coding_without_entanglement_is_uniform() {
    let cu = ControlledUnitary::pauli(2);
    let mixed = compose_par(&maximally_mixed(2), &maximally_mixed(2));
    let r = verify_dense_coding_with(&cu, &mixed, TOL).unwrap();
    assert!(!r.passed);
    let t = evaluate(&build_dense_coding_with(&cu, &mixed).unwrap()).unwrap();
    assert!(t.data().iter().all(|z| (z - c(0.25)).norm() < 1e-12));
}

#[test]
fn entanglement_swap_gives_crossed_pairs() {
    for d in [2, 3] {
        let r = verify_entanglement_swap(&ControlledUnitary::pauli(d), TOL).unwrap();
        assert!(r.passed, "d={d}: {}", print_failures(&r));
    }
}

fn outer_pair_after(opts: SwapOptions) -> Diagram {
    let cu = ControlledUnitary::pauli(2);
    build_entanglement_swap_with(&cu, opts).unwrap()
}

#[test]
fn uncorrected_outcome_zero_is_maximally_entangled() {
    let swap = outer_pair_after(SwapOptions { correct: false, expose_outcome: true });
    let (state, p) = conditioned_outer_pair(&swap, 0).unwrap();
    assert!((p - 0.25).abs() < 1e-12);
    // Pure with maximally mixed marginal: Bell up to a local unitary.
    assert!(state.is_pure().unwrap());
    assert_eq!(reduced_rank(&state).unwrap(), 2);
    let rho = bipartite_density(&state).unwrap();
    let marginal = CMatrix::from_fn(2, 2, |a1, a2| (0..2).map(|b| rho[(a1 * 2 + b, a2 * 2 + b)]).sum());
    assert!((marginal - CMatrix::identity(2, 2) * c(0.5)).norm() < 1e-12);
}

#[test]
fn deleting_the_outcome_leaves_outer_pair_maximally_mixed() {
    let swap = outer_pair_after(SwapOptions { correct: false, expose_outcome: false });
    let q = WireType::quantum(2);
    let layer = compose_par(&compose_par(&Diagram::identity(&[q]), &discard(q).unwrap()), &compose_par(&discard(q).unwrap(), &Diagram::identity(&[q])));
    let outer = CqProcess::new(compose_seq(&swap, &layer).unwrap()).unwrap();
    let rho = bipartite_density(&outer).unwrap();
    assert!((rho - CMatrix::identity(4, 4) * c(0.25)).norm() < 1e-12);
}

#[test]
fn control_dimension_is_checked_everywhere() {
    let cu = ControlledUnitary::new(vec![weyl(3, 0, 0), weyl(3, 1, 0), weyl(3, 2, 0)]).unwrap();
    assert!(matches!(build_dense_coding(&cu), Err(ProtocolError::DimMismatch { .. })));
    assert!(matches!(build_entanglement_swap(&cu), Err(ProtocolError::DimMismatch { .. })));
}
