use cqdiag::dsl::{parse, print, print_diagram, random_source, structurally_equal};
use cqdiag::random::{random_plain_diagram, random_spider_diagram, seeded, SpiderDiagramConfig};
use rand::Rng as _;

#[test]
fn five_hundred_random_documents_round_trip() {
    let mut rng = seeded(0x5d9);
    for i in 0..500 {
        let src = random_source(&mut rng);
        let doc = parse(&src).unwrap_or_else(|e| panic!("document {i} failed to parse:\n{src}\n{e}"));
        let printed = print(&doc);
        let again = parse(&printed).unwrap_or_else(|e| panic!("printed document {i} failed to parse:\n{printed}\n{e}"));
        assert_eq!(doc, again, "document {i}:\n{src}");
        assert_eq!(print(&again), printed);
    }
}

#[test]
fn random_diagrams_survive_print_and_parse() {
    let mut rng = seeded(77);
    for i in 0..200 {
        let dim = rng.random_range(2..4);
        let d = if i % 2 == 0 {
            let mut cfg = SpiderDiagramConfig::new(dim);
            cfg.phase_prob = 0.6;
            random_spider_diagram(&mut rng, &cfg)
        } else {
            let inputs = rng.random_range(0..3);
            random_plain_diagram(&mut rng, dim, inputs, 6, 4)
        };
        let doc = parse(&print_diagram("x", &d)).unwrap();
        assert!(structurally_equal(doc.diagram("x").unwrap(), &d), "diagram {i}");
    }
}
