//! Acceptance suite: one pass/fail line per criterion. Exits non-zero if
//! any criterion fails.

use std::path::PathBuf;
use std::time::Instant;

use cqdiag::cli::run;
use cqdiag::cq::{
    born_rule, check_purity_extremal, is_vn_measurement, naimark_dilate, povm_from_effects, rotated_nondemolition, CqProcess,
    ProbDist,
};
use cqdiag::diagram::{compose_par, compose_seq, discard, isomorphic, BoxGen, WireType};
use cqdiag::dsl::{parse, parse_named, print, random_source};
use cqdiag::entanglement::{
    apply_locals, bipartite_density, decohere_output, is_entangled_2q, partial_transpose_min_eigenvalue, slocc_classify_3q, SloccClass,
};
use cqdiag::linalg::{c, ginibre, haar_unitary, psd_sqrt, random_invertible, random_unit_vector, CMatrix};
use cqdiag::phases::{ghz_phase_fusion_demo, phase_sum_diagrammatic, PhaseVector};
use cqdiag::protocols::{build_entanglement_swap_with, verify_protocol, ControlledUnitary, SwapOptions, PROTOCOLS};
use cqdiag::random::{random_equal_variant, random_mutation, random_phase, random_spider_diagram, seeded, Rng, SpiderDiagramConfig};
use cqdiag::rewrite::{normalize, rewrite_equal, soundness_deviation, LEMMAS, RULES};
use cqdiag::tensor::{evaluate, numeric_equal, NumericTolerance, Tensor};
use cqdiag::{Diagram, C64};
use rand::Rng as _;

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome);

fn strict() -> NumericTolerance { NumericTolerance::strict(TOL) }

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> { if ok { Ok(()) } else { Err(msg()) } }

fn dev(a: &Diagram, b: &Diagram) -> f64 {
    evaluate(a).unwrap().max_abs_diff(&evaluate(b).unwrap()).unwrap_or(f64::INFINITY)
}

fn rule_soundness() -> Outcome {
    let mut rng = seeded(1);
    let mut worst = 0.0f64;
    let mut count = 0;
    for r in RULES.iter().chain(LEMMAS) {
        for dim in [2, 3] {
            for k in 0..50 {
                let (lhs, rhs) = r.instance(&mut rng, dim);
                let d = soundness_deviation(&lhs, &rhs, r.mode, TOL).map_err(|e| format!("{}: {e}", r.name))?;
                let d = d.ok_or_else(|| format!("{} d={dim} #{k}: shapes differ", r.name))?;
                ensure(d <= TOL, || format!("{} d={dim} #{k}: deviation {d:.3e}", r.name))?;
                worst = worst.max(d);
                count += 1;
            }
        }
    }
    Ok(format!("{} rules and lemmas, {count} instances, max deviation {worst:.1e}", RULES.len() + LEMMAS.len()))
}

fn spider_completeness() -> Outcome {
    let mut rng = seeded(2);
    let (mut agree, mut equal_pairs, mut drawn) = (0, 0, 0);
    while agree < 200 {
        drawn += 1;
        ensure(drawn < 2000, || "too few evaluable pairs".into())?;
        let mut cfg = SpiderDiagramConfig::new(if drawn % 2 == 0 { 2 } else { 3 });
        cfg.max_nodes = 8;
        cfg.max_edges = 8;
        let d1 = random_spider_diagram(&mut rng, &cfg);
        let v = random_equal_variant(&mut rng, &d1, 3);
        let d2 = if rng.random_bool(0.5) { v } else { random_mutation(&mut rng, &v) };
        let Ok(numeric) = numeric_equal(&d1, &d2, strict()) else { continue };
        let by_normal_form = isomorphic(&normalize(&d1).0, &normalize(&d2).0, strict());
        let verdict = rewrite_equal(&d1, &d2, strict()).map_err(|e| e.to_string())?;
        ensure(by_normal_form == numeric && verdict.equal == numeric, || {
            format!("pair {drawn}: numeric {numeric}, normal forms {by_normal_form}, rewrite_equal {}", verdict.equal)
        })?;
        equal_pairs += usize::from(numeric);
        agree += 1;
    }
    Ok(format!("200/200 pairs agree ({equal_pairs} equal, {} unequal; {drawn} drawn)", 200 - equal_pairs))
}

fn classicality() -> Outcome {
    let mut rng = seeded(3);
    for d in [2, 3, 5] {
        let q = WireType::quantum(d);
        let cw = WireType::classical(d);
        let checks = [
            ("discard after encode is delete", compose_seq(&Diagram::encode(d), &discard(q).unwrap()).unwrap(), Diagram::delete(d)),
            ("delete after measure is discard", compose_seq(&Diagram::measure(d), &Diagram::delete(d)).unwrap(), discard(q).unwrap()),
            ("measure after encode is the identity", compose_seq(&Diagram::encode(d), &Diagram::measure(d)).unwrap(), Diagram::identity(&[cw])),
            ("decoherence is idempotent", compose_seq(&Diagram::decoherence(d), &Diagram::decoherence(d)).unwrap(), Diagram::decoherence(d)),
        ];
        for (name, a, b) in checks {
            let x = dev(&a, &b);
            ensure(x <= TOL, || format!("d={d}: {name} deviates by {x:.3e}"))?;
        }
        ensure(!CqProcess::new(Diagram::decoherence(d)).unwrap().is_pure().unwrap(), || format!("d={d}: decoherence reported pure"))?;
        for _ in 0..20 {
            let v = random_unit_vector(d, &mut rng);
            let p = born_rule(&CqProcess::pure_state("psi", v.as_slice()).unwrap()).map_err(|e| e.to_string())?;
            let bad = p.iter().zip(v.iter()).any(|(pi, vi)| (pi - vi.norm_sqr()).abs() > TOL) || (p.iter().sum::<f64>() - 1.0).abs() > TOL;
            ensure(!bad, || format!("d={d}: Born probabilities {p:?} differ from |v_i|^2"))?;
        }
    }
    Ok("d = 2, 3, 5: ground laws, round trip, Born rule, decoherence".into())
}

fn random_povm(rng: &mut Rng, d: usize, k: usize) -> Vec<CMatrix> {
    let gs: Vec<CMatrix> = (0..k).map(|_| ginibre(d, d, rng)).collect();
    let s: CMatrix = gs.iter().map(|g| g.adjoint() * g).fold(CMatrix::zeros(d, d), |a, b| a + b);
    let r = psd_sqrt(&s).unwrap().try_inverse().unwrap();
    gs.iter().map(|g| &r * g.adjoint() * g * &r).collect()
}

fn measurements() -> Outcome {
    let mut rng = seeded(4);
    for d in [2, 3, 5] {
        let nd = CqProcess::new(Diagram::nondemolition(d)).unwrap();
        ensure(is_vn_measurement(&nd, strict()).unwrap(), || format!("ONB measurement d={d}"))?;
    }
    for k in 0..50 {
        let d = 2 + k % 2;
        let m = rotated_nondemolition(&haar_unitary(d, &mut rng));
        ensure(is_vn_measurement(&m, strict()).unwrap(), || format!("rotated measurement #{k}"))?;
    }
    let s = 3f64.sqrt() / 2.0;
    let trine: Vec<CMatrix> = [(1.0, 0.0), (-0.5, s), (-0.5, -s)]
        .iter()
        .map(|&(x, y)| {
            let v = nalgebra::DVector::from_vec(vec![c(x), c(y)]);
            &v * v.adjoint() * c(2.0 / 3.0)
        })
        .collect();
    let mut povms = vec![trine];
    for k in 0..20 {
        let d = 2 + k % 2;
        povms.push(random_povm(&mut rng, d, 2 + k % 3));
    }
    let mut worst = 0.0f64;
    for (k, effects) in povms.iter().enumerate() {
        let n = naimark_dilate(&povm_from_effects(effects).unwrap()).map_err(|e| format!("POVM {k}: {e}"))?;
        ensure(n.isometry_defect <= TOL && n.reconstruction_deviation <= TOL, || {
            format!("POVM {k}: defect {:.3e}, reconstruction {:.3e}", n.isometry_defect, n.reconstruction_deviation)
        })?;
        worst = worst.max(n.isometry_defect).max(n.reconstruction_deviation);
    }
    Ok(format!("53 projective measurements; trine + 20 random POVMs dilated, max deviation {worst:.1e}"))
}

fn protocols() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2, 3] {
        let cu = ControlledUnitary::pauli(d);
        for name in PROTOCOLS {
            let r = verify_protocol(name, &cu, TOL).map_err(|e| e.to_string())?.expect("known protocol");
            let failed: Vec<&str> = r.claims.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            ensure(r.passed, || format!("{name} D={d}: {failed:?}"))?;
            worst = worst.max(r.max_deviation());
            if name == "teleport" {
                ensure(r.trace_closes == Some(true), || format!("teleport D={d}: trace does not close"))?;
            }
        }
        let swap = build_entanglement_swap_with(&cu, SwapOptions { correct: false, expose_outcome: false }).unwrap();
        let q = WireType::quantum(d);
        let keep_outer = compose_par(
            &compose_par(&Diagram::identity(&[q]), &discard(q).unwrap()),
            &compose_par(&discard(q).unwrap(), &Diagram::identity(&[q])),
        );
        let rho = bipartite_density(&CqProcess::new(compose_seq(&swap, &keep_outer).unwrap()).unwrap()).unwrap();
        let x = (rho - CMatrix::identity(d * d, d * d) * c(1.0 / (d * d) as f64)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        ensure(x <= TOL, || format!("swap D={d} without the outcome: outer pair deviates from maximally mixed by {x:.3e}"))?;
        worst = worst.max(x);
    }
    Ok(format!("teleport, dense-coding, entanglement-swap at D = 2, 3; max deviation {worst:.1e}"))
}

fn weights(rng: &mut Rng, k: usize) -> ProbDist {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    ProbDist::new(w.iter().map(|x| x / s).collect()).unwrap()
}

fn mixing() -> Outcome {
    let mut rng = seeded(6);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let d = 2 + k % 2;
        let f = CqProcess::pure("f", &haar_unitary(d, &mut rng)).unwrap();
        let n = rng.random_range(2..5);
        let r = check_purity_extremal(&vec![f; n], &weights(&mut rng, n), TOL).unwrap();
        ensure(r.mixture_pure && r.consistent, || format!("engineered mixture {k}: pure {}, deviation {:.3e}", r.mixture_pure, r.max_branch_deviation))?;
        worst = worst.max(r.max_branch_deviation);
    }
    for k in 0..100 {
        let d = 2 + k % 2;
        let n = rng.random_range(2..5);
        let branches: Vec<CqProcess> = (0..n).map(|_| CqProcess::pure("f", &haar_unitary(d, &mut rng)).unwrap()).collect();
        let r = check_purity_extremal(&branches, &weights(&mut rng, n), TOL).unwrap();
        ensure(!r.mixture_pure && r.consistent, || format!("random mixture {k} reported pure"))?;
    }
    Ok(format!("100 pure mixtures (max branch deviation {worst:.1e}); 100 impure mixtures flagged"))
}

fn random_2q_state(rng: &mut Rng, pure: bool) -> CqProcess {
    if pure {
        let v = random_unit_vector(4, rng);
        return CqProcess::new(Diagram::boxed(BoxGen::doubled("psi", Tensor::new(&[], &[2, 2], v.iter().copied().collect()).unwrap())))
            .unwrap();
    }
    let v = random_unit_vector(8, rng);
    let psi = Diagram::boxed(BoxGen::doubled("psi", Tensor::new(&[], &[2, 2, 2], v.iter().copied().collect()).unwrap()));
    let q = WireType::quantum(2);
    CqProcess::new(compose_seq(&psi, &compose_par(&Diagram::identity(&[q, q]), &discard(q).unwrap())).unwrap()).unwrap()
}

fn three_qubit(amps: &[(usize, f64)]) -> Tensor {
    let n = amps.iter().map(|a| a.1 * a.1).sum::<f64>().sqrt();
    let mut v = vec![C64::new(0.0, 0.0); 8];
    for &(i, a) in amps {
        v[i] = c(a / n);
    }
    Tensor::new(&[], &[2, 2, 2], v).unwrap()
}

fn entanglement() -> Outcome {
    let mut rng = seeded(7);
    let mut entangled_before = 0;
    for k in 0..100 {
        let state = random_2q_state(&mut rng, k % 2 == 0);
        entangled_before += usize::from(is_entangled_2q(&state).unwrap());
        let dec = decohere_output(&state, k % 2).unwrap();
        let min_eig = partial_transpose_min_eigenvalue(&dec).unwrap();
        ensure(!is_entangled_2q(&dec).unwrap() && min_eig >= -TOL, || format!("state {k}: entangled after decoherence ({min_eig:.3e})"))?;
    }
    let fixtures = [
        (three_qubit(&[(0, 1.0), (7, 1.0)]), SloccClass::Ghz),
        (three_qubit(&[(1, 1.0), (2, 1.0), (4, 1.0)]), SloccClass::W),
        (three_qubit(&[(0, 1.0), (3, 1.0)]), SloccClass::BiseparableA),
        (three_qubit(&[(0, 1.0), (5, 1.0)]), SloccClass::BiseparableB),
        (three_qubit(&[(0, 1.0), (6, 1.0)]), SloccClass::BiseparableC),
        (three_qubit(&[(0, 1.0)]), SloccClass::SeparableAbc),
    ];
    for (psi, class) in &fixtures {
        let got = slocc_classify_3q(psi).unwrap();
        ensure(got == *class, || format!("fixture {class} labelled {got}"))?;
        for k in 0..100 {
            let locals: Vec<CMatrix> = (0..3).map(|_| random_invertible(2, &mut rng)).collect();
            let moved = apply_locals(psi, &locals).unwrap();
            let moved = moved.scale(c(1.0 / moved.frobenius_norm()));
            let got = slocc_classify_3q(&moved).unwrap();
            ensure(got == *class, || format!("{class} moved to {got} by local operation {k}"))?;
        }
    }
    Ok(format!("0/100 entangled after decoherence ({entangled_before} before); 6 classes stable under 100 local operations each"))
}

fn phases() -> Outcome {
    let mut rng = seeded(8);
    let mut worst = 0.0f64;
    for d in [2, 3, 4] {
        let e = PhaseVector::unit(d);
        for k in 0..100 {
            let (a, b, cc) = (random_phase(&mut rng, d), random_phase(&mut rng, d), random_phase(&mut rng, d));
            let ab = a.sum(&b).unwrap();
            let exact = ab.sum(&cc).unwrap().approx_eq(&a.sum(&b.sum(&cc).unwrap()).unwrap(), 1e-15)
                && ab.approx_eq(&b.sum(&a).unwrap(), 0.0)
                && a.sum(&e).unwrap().approx_eq(&a, 0.0)
                && a.sum(&a.inverse()).unwrap().is_unit(1e-15);
            ensure(exact, || format!("d={d} #{k}: group axioms"))?;
            let diag = phase_sum_diagrammatic(&a, &b).unwrap();
            ensure(diag.approx_eq(&ab, TOL), || format!("d={d} #{k}: diagrammatic sum"))?;
        }
    }
    let mut erased = 0;
    for k in 0..50 {
        let (a, b, cc) = (random_phase(&mut rng, 2), random_phase(&mut rng, 2), random_phase(&mut rng, 2));
        let r = ghz_phase_fusion_demo(&a, &b, &cc, TOL).unwrap();
        ensure(r.fusion_deviation <= TOL && r.permutation_deviation <= TOL, || format!("GHZ triple {k}: {r:?}"))?;
        erased += usize::from(r.measured_deviation <= TOL);
        worst = worst.max(r.fusion_deviation).max(r.permutation_deviation).max(r.measured_deviation);
    }
    ensure(erased == 50, || format!("measuring erased the phases in {erased}/50 trials"))?;
    Ok(format!("group axioms at d = 2, 3, 4; 50 GHZ triples fuse and permute; phases erased 50/50; max deviation {worst:.1e}"))
}

fn dsl() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "sdg"))
        .collect();
    files.sort();
    for f in &files {
        let doc = parse_named(&std::fs::read_to_string(f).unwrap(), &f.display().to_string()).map_err(|e| e.to_string())?;
        ensure(parse(&print(&doc)).ok().as_ref() == Some(&doc), || format!("{} does not round-trip", f.display()))?;
    }
    let mut rng = seeded(9);
    for k in 0..500 {
        let src = random_source(&mut rng);
        let doc = parse(&src).map_err(|e| format!("random document {k}: {e}"))?;
        ensure(parse(&print(&doc)).ok().as_ref() == Some(&doc), || format!("random document {k} does not round-trip"))?;
    }
    let fixture = |name: &str| dir.join(name).display().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["--json".into(), "--seed".into(), "17".into(), "phase-demo".into()],
        vec!["--trace".into(), "verify-protocol".into(), "teleport".into(), "--dim".into(), "3".into()],
        vec!["--seed".into(), "5".into(), "verify-protocol".into(), "dense-coding".into(), "--corrections".into(), "random".into()],
        vec!["--trace".into(), "normalize".into(), fixture("teleport.sdg")],
        vec!["--json".into(), "naimark".into(), fixture("trine.sdg")],
        vec!["render".into(), fixture("ghz.sdg")],
    ];
    for args in &runs {
        let argv = || std::iter::once("cqdiag".to_string()).chain(args.iter().cloned());
        let (a, b) = (run(argv()), run(argv()));
        ensure(a == b, || format!("cqdiag {} differs between runs", args.join(" ")))?;
    }
    Ok(format!("{} fixtures and 500 random documents round-trip; {} CLI runs repeat bit for bit", files.len(), runs.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("rule soundness", rule_soundness),
        ("spider completeness", spider_completeness),
        ("classicality", classicality),
        ("measurement", measurements),
        ("protocols", protocols),
        ("mixing and extremality", mixing),
        ("entanglement", entanglement),
        ("phases", phases),
        ("dsl", dsl),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {} {name}: {detail} ({secs:.2}s)", k + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {} {name}: {detail} ({secs:.2}s)", k + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
