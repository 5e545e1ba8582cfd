use cqdiag::diagram::isomorphic;
use cqdiag::random::{random_equal_variant, random_mutation, random_spider_diagram, seeded, SpiderDiagramConfig};
use cqdiag::rewrite::normalize;
use cqdiag::tensor::numeric_equal;
use cqdiag::NumericTolerance;
use rand::Rng;

/// Normal-form isomorphism agrees with numeric equality on random pairs of
/// spider diagrams, without delegating to evaluation.
#[test]
fn normal_forms_decide_spider_equality() {
    let mut rng = seeded(2024);
    let tol = NumericTolerance::strict(1e-9);
    let mut disagreements = Vec::new();
    for k in 0..200 {
        let dim = if k % 2 == 0 { 2 } else { 3 };
        let mut cfg = SpiderDiagramConfig::new(dim);
        cfg.max_edges = 8;
        let d1 = random_spider_diagram(&mut rng, &cfg);
        let v = random_equal_variant(&mut rng, &d1, 3);
        let d2 = match rng.random_range(0..3) {
            0 => v,
            1 => random_mutation(&mut rng, &v),
            _ => random_equal_variant(&mut rng, &v, 2),
        };
        let numeric = match numeric_equal(&d1, &d2, tol) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let iso = isomorphic(&normalize(&d1).0, &normalize(&d2).0, tol);
        if iso != numeric {
            disagreements.push((k, numeric, d1, d2));
        }
    }
    for (k, numeric, d1, d2) in &disagreements {
        eprintln!("pair {k}: numeric {numeric}\n{d1}\n{d2}\n{}\n{}", normalize(d1).0, normalize(d2).0);
    }
    assert!(disagreements.is_empty(), "{} disagreements", disagreements.len());
}
