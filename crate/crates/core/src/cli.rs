//! The `cqdiag` command line. [`run`] is the whole program minus process
//! I/O, so it can be driven from tests.
//!
//! Exit codes: 0 for success or a true verdict, 1 for a false verdict, 2 for
//! usage, input or evaluation errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::cq::{effects_of, naimark_dilate, vn_measurement_report, CqProcess};
use crate::dsl::{export_dot, parse_named, print_diagram, DiagramDoc};
use crate::entanglement::slocc_classify_3q;
use crate::linalg::haar_unitary;
use crate::phases::ghz_phase_fusion_demo;
use crate::protocols::{verify_protocol, ControlledUnitary, PROTOCOLS};
use crate::random::{random_phase, seeded};
use crate::rewrite::{normalize, rewrite_equal, RewriteTrace};
use crate::tensor::{evaluate, to_columnar, EqualityMode, NumericTolerance, Tensor};
use crate::{Diagram, C64};

#[derive(Debug, Parser)]
#[command(name = "cqdiag", version, about = "Rewrite, evaluate and verify classical-quantum spider diagrams")]
struct Cli {
    /// Absolute tolerance for numeric comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Equality notion for comparisons.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Strict)]
    mode: ModeArg,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Print rewrite traces.
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strict,
    UpToScalar,
}

impl From<ModeArg> for EqualityMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => EqualityMode::Strict,
            ModeArg::UpToScalar => EqualityMode::UpToScalar,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Corrections {
    /// Generalised Paulis `X^a Z^b`.
    Pauli,
    /// Every branch the identity.
    Identity,
    /// Haar-random branches drawn from `--seed`.
    Random,
}

/// Diagram arguments are `FILE` for the last diagram in the file, or
/// `FILE#NAME` for a named one.
#[derive(Debug, Subcommand)]
enum Command {
    /// Rewrite a diagram to normal form.
    Normalize { diagram: String },
    /// Evaluate a diagram to its tensor.
    Eval { diagram: String },
    /// Decide whether two diagrams denote the same process.
    CheckEqual { left: String, right: String },
    /// Check that discarding all outputs equals discarding all inputs.
    CheckCausal { diagram: String },
    /// Check the projection postulate for a non-demolition measurement.
    CheckVn { diagram: String },
    /// Dilate a demolition POVM into an isometry and a measurement.
    Naimark { diagram: String },
    /// Classify a three-qubit state up to SLOCC.
    ClassifySlocc {
        /// A ket sum such as `|001> + |010> + |100>`.
        #[arg(long, conflicts_with = "file")]
        state: Option<String>,
        /// A file holding a ket sum.
        file: Option<PathBuf>,
    },
    /// Verify teleport, dense-coding or entanglement-swap.
    VerifyProtocol {
        protocol: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = Corrections::Pauli)]
        corrections: Corrections,
    },
    /// Fuse random phases on the legs of a GHZ state.
    PhaseDemo,
    /// Write a Graphviz rendering of a diagram.
    Render {
        diagram: String,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// What a run printed and how it ended.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn usage(msg: String) -> Self { Self { code: 2, stdout: String::new(), stderr: msg } }
}

struct Ctx {
    tol: f64,
    mode: EqualityMode,
    seed: u64,
    json: bool,
    trace: bool,
    out: String,
}

type CmdResult = Result<bool, String>;

/// Run with the given arguments, including the program name.
pub fn run<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { CliOutput::usage(text) } else { CliOutput { code: 0, stdout: text, stderr: String::new() } };
        }
    };
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return CliOutput::usage("error: --tol must be a non-negative number\n".into());
    }
    let mut ctx = Ctx { tol: cli.tol, mode: cli.mode.into(), seed: cli.seed, json: cli.json, trace: cli.trace, out: String::new() };
    let result = match &cli.command {
        Command::Normalize { diagram } => normalize_cmd(&mut ctx, diagram),
        Command::Eval { diagram } => eval_cmd(&mut ctx, diagram),
        Command::CheckEqual { left, right } => check_equal(&mut ctx, left, right),
        Command::CheckCausal { diagram } => check_causal(&mut ctx, diagram),
        Command::CheckVn { diagram } => check_vn(&mut ctx, diagram),
        Command::Naimark { diagram } => naimark(&mut ctx, diagram),
        Command::ClassifySlocc { state, file } => classify(&mut ctx, state.as_deref(), file.as_deref()),
        Command::VerifyProtocol { protocol, dim, corrections } => verify(&mut ctx, protocol, *dim, *corrections),
        Command::PhaseDemo => phase_demo(&mut ctx),
        Command::Render { diagram, output } => render(&mut ctx, diagram, output.as_deref()),
    };
    match result {
        Ok(verdict) => CliOutput { code: if verdict { 0 } else { 1 }, stdout: ctx.out, stderr: String::new() },
        Err(msg) => CliOutput { code: 2, stdout: ctx.out, stderr: format!("error: {msg}\n") },
    }
}

impl Ctx {
    fn tolerance(&self) -> NumericTolerance { NumericTolerance { mode: self.mode, absolute: self.tol } }

    fn emit_json(&mut self, v: &impl Serialize) {
        self.out.push_str(&serde_json::to_string_pretty(v).expect("serialisable"));
        self.out.push('\n');
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }
}

fn load_doc(path: &Path) -> Result<DiagramDoc, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_named(&text, &path.display().to_string()).map_err(|e| e.to_string())
}

fn load_diagram(arg: &str) -> Result<(String, Diagram), String> {
    let (file, name) = match arg.rsplit_once('#') {
        Some((f, n)) => (f, Some(n)),
        None => (arg, None),
    };
    let doc = load_doc(Path::new(file))?;
    match name {
        Some(n) => doc.diagram(n).map(|d| (n.to_string(), d.clone())).ok_or_else(|| format!("{file}: no diagram named `{n}`")),
        None => doc.main_diagram().map(|(n, d)| (n.to_string(), d.clone())).ok_or_else(|| format!("{file}: no diagram declared")),
    }
}

fn load_process(arg: &str) -> Result<CqProcess, String> {
    let (_, d) = load_diagram(arg)?;
    CqProcess::new(d).map_err(|e| e.to_string())
}

fn fmt_dev(x: Option<f64>) -> String { x.map_or_else(|| "n/a".into(), |v| format!("{v:.3e}")) }

fn trace_text(t: &RewriteTrace) -> String {
    let mut s = format!("trace: {} steps from {}\n", t.len(), t.initial_hash);
    for (i, step) in t.steps.iter().enumerate() {
        let nodes: Vec<String> = step.nodes.iter().map(|n| format!("n{n}")).collect();
        let _ = writeln!(s, "  {:>3}  {:<26} [{}] -> {}", i + 1, step.rule, nodes.join(", "), step.hash);
    }
    s
}

fn normalize_cmd(ctx: &mut Ctx, arg: &str) -> CmdResult {
    let (name, d) = load_diagram(arg)?;
    let (nf, trace) = normalize(&d);
    let text = print_diagram(&name, &nf);
    if ctx.json {
        let mut v = json!({ "name": name, "normal_form": text, "steps": trace.len() });
        if ctx.trace {
            v["trace"] = serde_json::to_value(&trace).expect("serialisable");
        }
        ctx.emit_json(&v);
    } else {
        ctx.out.push_str(&text);
        if ctx.trace {
            ctx.out.push_str(&trace_text(&trace));
        }
    }
    Ok(true)
}

fn tensor_json(t: &Tensor) -> serde_json::Value {
    json!({
        "in_shape": t.in_shape(),
        "out_shape": t.out_shape(),
        "data": t.data().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    })
}

fn eval_cmd(ctx: &mut Ctx, arg: &str) -> CmdResult {
    let (_, d) = load_diagram(arg)?;
    let t = evaluate(&d).map_err(|e| e.to_string())?;
    if ctx.json {
        ctx.emit_json(&tensor_json(&t));
    } else {
        ctx.out.push_str(&to_columnar(&t));
    }
    Ok(true)
}

fn check_equal(ctx: &mut Ctx, left: &str, right: &str) -> CmdResult {
    let (_, a) = load_diagram(left)?;
    let (_, b) = load_diagram(right)?;
    let verdict = rewrite_equal(&a, &b, ctx.tolerance()).map_err(|e| e.to_string())?;
    if ctx.json {
        let mut v = serde_json::to_value(&verdict).expect("serialisable");
        if ctx.trace {
            v["left_trace"] = serde_json::to_value(normalize(&a).1).expect("serialisable");
            v["right_trace"] = serde_json::to_value(normalize(&b).1).expect("serialisable");
        }
        ctx.emit_json(&v);
    } else {
        ctx.line(if verdict.equal { "equal" } else { "not equal" });
        ctx.line(format!("normal forms isomorphic: {}", verdict.normal_forms_isomorphic));
        ctx.line(format!("numeric deviation: {}", fmt_dev(verdict.deviation)));
        if ctx.trace {
            let (ta, tb) = (trace_text(&normalize(&a).1), trace_text(&normalize(&b).1));
            ctx.out.push_str(&ta);
            ctx.out.push_str(&tb);
        }
    }
    Ok(verdict.equal)
}

fn check_causal(ctx: &mut Ctx, arg: &str) -> CmdResult {
    let p = load_process(arg)?;
    let dev = p.causality_deviation();
    let pass = dev.is_some_and(|x| x <= ctx.tol);
    if ctx.json {
        ctx.emit_json(&json!({ "causal": pass, "deviation": dev }));
    } else {
        ctx.line(if pass { "causal" } else { "not causal" });
        ctx.line(format!("deviation: {}", fmt_dev(dev)));
    }
    Ok(pass)
}

fn check_vn(ctx: &mut Ctx, arg: &str) -> CmdResult {
    let p = load_process(arg)?;
    let r = vn_measurement_report(&p, ctx.tolerance()).map_err(|e| e.to_string())?;
    if ctx.json {
        ctx.emit_json(&r);
    } else {
        ctx.line(if r.pass { "von Neumann measurement" } else { "not a von Neumann measurement" });
        ctx.line(format!("projection deviation: {:.3e}", r.projection_deviation));
        ctx.line(format!("causality deviation: {:.3e}", r.causality_deviation));
    }
    Ok(r.pass)
}

fn naimark(ctx: &mut Ctx, arg: &str) -> CmdResult {
    let p = load_process(arg)?;
    let effects = effects_of(&p).map_err(|e| e.to_string())?;
    let n = naimark_dilate(&p).map_err(|e| e.to_string())?;
    let pass = n.isometry_defect <= ctx.tol && n.reconstruction_deviation <= ctx.tol;
    if ctx.json {
        let v = json!({
            "outcomes": effects.len(),
            "isometry_rows": n.isometry.nrows(),
            "isometry_cols": n.isometry.ncols(),
            "isometry_defect": n.isometry_defect,
            "reconstruction_deviation": n.reconstruction_deviation,
            "pass": pass,
        });
        ctx.emit_json(&v);
    } else {
        ctx.line(format!("{} outcomes, isometry {}x{}", effects.len(), n.isometry.nrows(), n.isometry.ncols()));
        ctx.line(format!("isometry defect: {:.3e}", n.isometry_defect));
        ctx.line(format!("reconstruction deviation: {:.3e}", n.reconstruction_deviation));
        ctx.line(if pass { "dilation reconstructs the POVM" } else { "dilation failed" });
    }
    Ok(pass)
}

/// Parse a ket sum such as `0.5 |001> - (0, 1) |110>`. A closing `|` is
/// accepted in place of `>`.
pub fn parse_ket_sum(text: &str) -> Result<(usize, Vec<C64>), String> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut terms: Vec<(String, C64)> = Vec::new();
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_ws(&mut i);
        if i >= chars.len() {
            break;
        }
        let mut sign = 1.0;
        if chars[i] == '+' || chars[i] == '-' {
            if chars[i] == '-' {
                sign = -1.0;
            }
            i += 1;
            skip_ws(&mut i);
        } else if !terms.is_empty() {
            return Err(format!("expected `+` or `-` at character {}", i + 1));
        }
        let mut coeff = C64::new(1.0, 0.0);
        if i < chars.len() && chars[i] == '(' {
            let end = chars[i..].iter().position(|&c| c == ')').ok_or("unclosed `(`")? + i;
            let inner: String = chars[i + 1..end].iter().collect();
            let (re, im) = inner.split_once(',').ok_or("complex coefficients are written `(re, im)`")?;
            let p = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number `{}`", s.trim()));
            coeff = C64::new(p(re)?, p(im)?);
            i = end + 1;
        } else {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || matches!(chars[i], '.' | 'e' | 'E')) {
                i += 1;
            }
            if i > start {
                let s: String = chars[start..i].iter().collect();
                coeff = C64::new(s.parse().map_err(|_| format!("bad number `{s}`"))?, 0.0);
            }
        }
        skip_ws(&mut i);
        if i < chars.len() && chars[i] == '*' {
            i += 1;
            skip_ws(&mut i);
        }
        if i >= chars.len() || chars[i] != '|' {
            return Err(format!("expected a ket `|...>` at character {}", i + 1));
        }
        i += 1;
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let label: String = chars[start..i].iter().collect();
        if i >= chars.len() || !(chars[i] == '>' || chars[i] == '|') {
            return Err(format!("unterminated ket at character {}", start));
        }
        i += 1;
        if label.is_empty() {
            return Err("empty ket".into());
        }
        terms.push((label, coeff * sign));
    }
    let n = terms.first().ok_or("no terms")?.0.len();
    if terms.iter().any(|(l, _)| l.len() != n) {
        return Err("kets have different lengths".into());
    }
    if terms.iter().any(|(l, _)| l.chars().any(|c| c != '0' && c != '1')) {
        return Err("only qubit kets are supported".into());
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for (l, z) in terms {
        amps[usize::from_str_radix(&l, 2).expect("binary digits")] += z;
    }
    Ok((n, amps))
}

fn classify(ctx: &mut Ctx, state: Option<&str>, file: Option<&Path>) -> CmdResult {
    let text = match (state, file) {
        (Some(s), _) => s.to_string(),
        (None, Some(f)) => std::fs::read_to_string(f).map_err(|e| format!("{}: {e}", f.display()))?,
        (None, None) => return Err("give --state or a file".into()),
    };
    let (n, mut amps) = parse_ket_sum(text.trim())?;
    if n != 3 {
        return Err(format!("expected a three-qubit state, got {n} qubits"));
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err("the zero vector has no class".into());
    }
    for z in &mut amps {
        *z /= norm;
    }
    let psi = Tensor::new(&[], &[2, 2, 2], amps).map_err(|e| e.to_string())?;
    let class = slocc_classify_3q(&psi).map_err(|e| e.to_string())?;
    let tangle = crate::entanglement::three_tangle(&psi).map_err(|e| e.to_string())?;
    if ctx.json {
        ctx.emit_json(&json!({ "class": class.label(), "three_tangle": tangle }));
    } else {
        ctx.line(class.label());
    }
    Ok(true)
}

fn verify(ctx: &mut Ctx, protocol: &str, dim: usize, corrections: Corrections) -> CmdResult {
    if !PROTOCOLS.contains(&protocol) {
        return Err(format!("unknown protocol `{protocol}`; expected one of {}", PROTOCOLS.join(", ")));
    }
    if !(2..=3).contains(&dim) {
        return Err("--dim must be 2 or 3".into());
    }
    let cu = match corrections {
        Corrections::Pauli => Ok(ControlledUnitary::pauli(dim)),
        Corrections::Identity => ControlledUnitary::new(vec![crate::linalg::CMatrix::identity(dim, dim); dim * dim]),
        Corrections::Random => {
            let mut rng = seeded(ctx.seed);
            ControlledUnitary::new((0..dim * dim).map(|_| haar_unitary(dim, &mut rng)).collect())
        }
    }
    .map_err(|e| e.to_string())?;
    let mut report = verify_protocol(protocol, &cu, ctx.tol).map_err(|e| e.to_string())?.expect("known protocol");
    if !ctx.trace {
        report.trace = None;
    }
    if ctx.json {
        ctx.emit_json(&report);
    } else {
        ctx.line(format!("{} (D = {}, {} outcomes): {}", report.protocol, report.dim, report.control_dim, if report.passed { "PASS" } else { "FAIL" }));
        for c in &report.claims {
            ctx.line(format!("  [{}] {:<50} {:<13} {}", if c.passed { "ok" } else { "!!" }, c.name, c.mode, fmt_dev(c.deviation)));
        }
        if let Some(t) = &report.trace {
            ctx.out.push_str(&trace_text(t));
        }
    }
    Ok(report.passed)
}

fn phase_demo(ctx: &mut Ctx) -> CmdResult {
    let mut rng = seeded(ctx.seed);
    let (a, b, c) = (random_phase(&mut rng, 2), random_phase(&mut rng, 2), random_phase(&mut rng, 2));
    let r = ghz_phase_fusion_demo(&a, &b, &c, ctx.tol).map_err(|e| e.to_string())?;
    let angles = |p: &crate::PhaseVector| p.angles()[1];
    if ctx.json {
        ctx.emit_json(&json!({ "phases": [angles(&a), angles(&b), angles(&c)], "report": r }));
    } else {
        ctx.line(format!("phases: {:.6} {:.6} {:.6}", angles(&a), angles(&b), angles(&c)));
        ctx.line(format!("fusion deviation: {:.3e}", r.fusion_deviation));
        ctx.line(format!("permutation deviation: {:.3e}", r.permutation_deviation));
        ctx.line(format!("measured deviation: {:.3e}", r.measured_deviation));
        ctx.line(if r.pass { "PASS" } else { "FAIL" });
    }
    Ok(r.pass)
}

fn render(ctx: &mut Ctx, arg: &str, output: Option<&Path>) -> CmdResult {
    let (_, d) = load_diagram(arg)?;
    let dot = export_dot(&d);
    match output {
        Some(p) => {
            std::fs::write(p, &dot).map_err(|e| format!("{}: {e}", p.display()))?;
            if ctx.json {
                ctx.emit_json(&json!({ "written": p.display().to_string() }));
            }
        }
        None => ctx.out.push_str(&dot),
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ket_sums() {
        let (n, a) = parse_ket_sum("0.577 |001>+|010>+|100|").unwrap();
        assert_eq!(n, 3);
        assert_eq!(a[1], C64::new(0.577, 0.0));
        assert_eq!(a[4], C64::new(1.0, 0.0));
        let (_, b) = parse_ket_sum("|000> - (0, 2)|111>").unwrap();
        assert_eq!(b[7], C64::new(0.0, -2.0));
        assert!(parse_ket_sum("|0> |1>").is_err());
        assert!(parse_ket_sum("|01> + |1>").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["cqdiag", "frobnicate"]).code, 2);
        assert_eq!(run(["cqdiag", "verify-protocol", "teleport", "--mode", "loose"]).code, 2);
        assert_eq!(run(["cqdiag", "--help"]).code, 0);
    }

    #[test]
    fn slocc_from_string() {
        let out = run(["cqdiag", "classify-slocc", "--state", "0.577 |001>+|010>+|100|"]);
        assert_eq!((out.code, out.stdout.as_str()), (0, "W\n"));
    }
}
