//! Fixture corpus, golden files and the command line. Set `CQDIAG_BLESS=1`
//! to regenerate the generated fixture, `rules.md` and golden reports
//! (with `--test-threads=1`, since other tests read those files).

use std::path::PathBuf;

use cqdiag::cli::{run, CliOutput};
use cqdiag::dsl::{parse_named, print, print_diagram, structurally_equal};
use cqdiag::protocols::{build_teleportation, verify_protocol, ControlledUnitary, ProtocolReport, PROTOCOLS};
use cqdiag::rewrite::catalog_markdown;

const TOL: f64 = 1e-9;

fn path(rel: &str) -> PathBuf { PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel) }

fn p(rel: &str) -> String { path(rel).display().to_string() }

fn bless() -> bool { std::env::var_os("CQDIAG_BLESS").is_some() }

fn golden_text(rel: &str, fresh: &str) -> String {
    if bless() {
        std::fs::write(path(rel), fresh).unwrap();
    }
    std::fs::read_to_string(path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}; run with CQDIAG_BLESS=1"))
}

fn cli(args: &[&str]) -> CliOutput { run(std::iter::once("cqdiag").chain(args.iter().copied())) }

#[test]
fn every_fixture_parses_and_round_trips() {
    for entry in std::fs::read_dir(path("fixtures")).unwrap() {
        let file = entry.unwrap().path();
        if file.extension().and_then(|e| e.to_str()) != Some("sdg") {
            continue;
        }
        let text = std::fs::read_to_string(&file).unwrap();
        let doc = parse_named(&text, &file.display().to_string()).unwrap_or_else(|e| panic!("{e}"));
        let again = parse_named(&print(&doc), "printed").unwrap();
        assert_eq!(doc, again, "{}", file.display());
    }
}

#[test]
fn teleport_fixture_is_the_library_protocol() {
    let d = build_teleportation(&ControlledUnitary::pauli(2)).unwrap();
    let fresh = format!("# Qubit teleportation with Pauli corrections.\n{}", print_diagram("teleport", &d));
    let text = golden_text("fixtures/teleport.sdg", &fresh);
    let doc = parse_named(&text, "teleport.sdg").unwrap();
    assert!(structurally_equal(doc.diagram("teleport").unwrap(), &d));
}

#[test]
fn rules_catalog_is_current() {
    assert_eq!(golden_text("rules.md", &catalog_markdown()), catalog_markdown());
}

#[test]
fn golden_protocol_reports() {
    for name in PROTOCOLS {
        for d in [2, 3] {
            let rel = format!("golden/{name}_d{d}.json");
            let report = verify_protocol(name, &ControlledUnitary::pauli(d), TOL).unwrap().unwrap();
            let fresh = serde_json::to_string_pretty(&report).unwrap() + "\n";
            let golden: ProtocolReport = serde_json::from_str(&golden_text(&rel, &fresh)).unwrap();
            assert!(golden.passed && report.passed, "{rel}");
            assert_eq!((golden.protocol.as_str(), golden.dim, golden.control_dim), (report.protocol.as_str(), report.dim, report.control_dim));
            assert_eq!(golden.claims.len(), report.claims.len(), "{rel}");
            for (g, r) in golden.claims.iter().zip(&report.claims) {
                assert_eq!((&g.name, &g.mode, g.passed), (&r.name, &r.mode, r.passed), "{rel}");
                for dev in [g.deviation, r.deviation].into_iter().flatten() {
                    assert!(dev <= TOL, "{rel}: {} deviates by {dev}", g.name);
                }
            }
            assert_eq!(golden.trace, report.trace, "{rel}: rewrite trace changed");
            assert_eq!(golden.trace_closes, report.trace_closes);
        }
    }
}

#[test]
fn verdict_exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["check-causal", &p("fixtures/ghz.sdg")], 0),
        (&["check-causal", &p("fixtures/causal.sdg")], 1),
        (&["check-causal", &format!("{}#dephase", p("fixtures/causal.sdg"))], 0),
        (&["check-vn", &p("fixtures/vn_measurement.sdg")], 0),
        (&["check-vn", &p("fixtures/not_vn.sdg")], 1),
        (&["naimark", &p("fixtures/trine.sdg")], 0),
        (&["check-equal", &p("fixtures/equal_lhs.sdg"), &p("fixtures/equal_rhs.sdg")], 1),
        (&["check-equal", "--mode", "up-to-scalar", &p("fixtures/equal_lhs.sdg"), &p("fixtures/equal_rhs.sdg")], 0),
        (&["check-equal", &p("fixtures/teleport.sdg"), &p("fixtures/identity.sdg")], 0),
        (&["check-equal", &p("fixtures/bell.sdg"), &p("fixtures/identity.sdg")], 2),
        (&["verify-protocol", "teleport", "--dim", "3"], 0),
        (&["verify-protocol", "teleport", "--corrections", "identity"], 1),
        (&["verify-protocol", "dense-coding", "--corrections", "random", "--seed", "4"], 1),
        (&["verify-protocol", "bogus"], 2),
        (&["verify-protocol", "teleport", "--dim", "7"], 2),
        (&["eval", &p("fixtures/missing.sdg")], 2),
        (&["phase-demo", "--seed", "11"], 0),
        (&["--tol", "-1", "phase-demo"], 2),
    ];
    for (args, code) in cases {
        let out = cli(args);
        assert_eq!(out.code, *code, "{args:?}\nstdout: {}\nstderr: {}", out.stdout, out.stderr);
    }
}

#[test]
fn classify_slocc_reports_w() {
    let out = cli(&["classify-slocc", &p("fixtures/w.txt")]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "W\n"));
    let out = cli(&["classify-slocc", "--state", "|000> + |111>"]);
    assert_eq!(out.stdout, "GHZ\n");
    assert_eq!(cli(&["classify-slocc", "--state", "|00> + |11>"]).code, 2);
}

#[test]
fn parse_errors_carry_spans() {
    let dir = std::env::temp_dir().join(format!("cqdiag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.sdg");
    std::fs::write(&bad, "a = id c2\nb = a ; measure 2\nc = nope\n").unwrap();
    let out = cli(&["eval", &bad.display().to_string()]);
    assert_eq!(out.code, 2);
    let f = bad.display().to_string();
    assert!(out.stderr.contains(&format!("{f}:2:")), "{}", out.stderr);
    assert!(out.stderr.contains(&format!("{f}:3:")), "{}", out.stderr);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    let runs: &[&[&str]] = &[
        &["--json", "--trace", "verify-protocol", "entanglement-swap", "--dim", "3"],
        &["--trace", "normalize", &p("fixtures/teleport.sdg")],
        &["--json", "eval", &p("fixtures/trine.sdg")],
        &["render", &p("fixtures/teleport.sdg")],
        &["--json", "phase-demo", "--seed", "5"],
        &["--json", "naimark", &p("fixtures/trine.sdg")],
    ];
    for args in runs {
        let a = cli(args);
        let b = cli(args);
        assert_eq!(a, b, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn normal_form_output_parses_back() {
    let out = cli(&["normalize", &p("fixtures/teleport.sdg")]);
    assert_eq!(out.code, 0);
    let doc = parse_named(&out.stdout, "stdout").unwrap();
    let id = parse_named("id_q2 = id q2\n", "id").unwrap();
    assert!(cqdiag::diagram::isomorphic(doc.diagram("teleport").unwrap(), id.diagram("id_q2").unwrap(), cqdiag::tensor::NumericTolerance::strict(TOL)));
}

#[test]
fn render_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("cqdiag-render-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("ghz.dot");
    let out = cli(&["render", &p("fixtures/ghz.sdg"), "-o", &target.display().to_string()]);
    assert_eq!(out.code, 0);
    assert!(std::fs::read_to_string(&target).unwrap().starts_with("digraph diagram {"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn grammar_examples_parse() {
    let text = std::fs::read_to_string(path("GRAMMAR.md")).unwrap();
    let blocks: Vec<&str> = text.split("```").skip(1).step_by(2).filter(|b| !b.contains(":=")).collect();
    assert!(blocks.len() >= 2);
    for b in blocks {
        parse_named(b.trim_start_matches('\n'), "GRAMMAR.md").unwrap_or_else(|e| panic!("{e}\n{b}"));
    }
}
