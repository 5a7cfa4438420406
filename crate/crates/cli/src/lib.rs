//! Command dispatch for the `hyperq` binary.
//!
//! Every command produces a [`CommandResult`] carrying both a plain-text
//! rendering and a JSON record with the same exact values. Rationals appear
//! in JSON as `{"num": "..", "den": ".."}` strings so no precision is lost;
//! infinite shadows are `{"infinity": "+"}` or `{"infinity": "-"}`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{BufRead, IsTerminal, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hyperq::coding::GermPredicate;
use hyperq::exprlang::{self, Kind, Mode, ParseError};
use hyperq::extnum::{extnum_order, Neutrix};
use hyperq::germfield::{ExtendedShadow, Poly, Valuation};
use hyperq::hull::{self, HullSequence, StdMetricStructure, DEFAULT_CHECKS};
use hyperq::loeb::{self, TimeLine};
use hyperq::strucmodel::{self, ModelError, SweepConfig, SweepReport};
use hyperq::{Germ, Q};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug)]
pub struct CommandResult {
    pub status: Status,
    pub exit_code: i32,
    pub text: String,
    pub json: Value,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            serde_json::to_string_pretty(&self.json).expect("serializable")
        } else {
            self.text.clone()
        }
    }
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

#[derive(Debug)]
enum Failure {
    Parse(String),
    Domain(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Syntax(..) | ModelError::Missing(_) => Failure::Parse(e.to_string()),
            other => domain(other),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "hyperq", version, about = "Exact computation with hyperrational germs")]
struct Cli {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate a germ expression or a condition.
    Eval { expr: String },
    /// Standard part of a germ, or an infinity marker.
    Shadow { expr: String },
    /// Order-of-magnitude class of a germ.
    Classify { expr: String },
    /// Loeb measure of a set on [0, 1], or the limit of a σ-family file.
    Measure {
        set: Option<String>,
        #[arg(long, value_name = "FILE")]
        sigma: Option<PathBuf>,
        #[arg(long)]
        depth: Option<u64>,
    },
    /// Nonstandard hulls of built-in metric spaces.
    Hull {
        #[command(subcommand)]
        op: HullCmd,
    },
    /// Evaluate an external number, optionally comparing it with another.
    Ext {
        expr: String,
        #[arg(long, value_name = "EXPR")]
        compare: Option<String>,
    },
    /// Exhaustive finite ultrapower checks.
    Oracle {
        #[arg(long)]
        index_size: usize,
        #[arg(long)]
        carrier_size: usize,
        #[arg(long)]
        depth: usize,
        /// Check a single model file instead of sweeping.
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        /// Also range over a unary relation on each carrier.
        #[arg(long)]
        unary: bool,
    },
    /// Read commands from standard input, one per line.
    Repl,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Space {
    Rat,
    Nat,
    Vec,
}

#[derive(Subcommand, Debug)]
enum HullCmd {
    /// Canonical hull point; vector components are separated by `;`.
    Point {
        expr: String,
        #[arg(long, value_enum, default_value = "rat")]
        space: Space,
    },
    Dist {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "rat")]
        space: Space,
    },
    Approachable {
        expr: String,
        #[arg(long, value_enum, default_value = "rat")]
        space: Space,
    },
    /// Limit of a standard Cauchy family `F(k, w)` with modulus `slope*j + offset`.
    Limit {
        family: String,
        #[arg(long)]
        slope: u64,
        #[arg(long)]
        offset: u64,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = DEFAULT_CHECKS)]
        checks: u64,
        #[arg(long, value_enum, default_value = "rat")]
        space: Space,
    },
}

fn rational(q: &Q) -> Value {
    json!({"num": q.numer().to_string(), "den": q.denom().to_string()})
}

fn poly(p: &Poly<Q>) -> Value {
    Value::Array(p.coeffs().iter().map(rational).collect())
}

fn germ(g: &Germ) -> Value {
    json!({"text": g.to_string(), "numerator": poly(g.numer()), "denominator": poly(g.denom())})
}

fn shadow_parts(s: &ExtendedShadow<Q>) -> (String, Value) {
    match s {
        ExtendedShadow::Finite(q) => (q.to_string(), rational(q)),
        ExtendedShadow::PosInf => ("+inf".into(), json!({"infinity": "+"})),
        ExtendedShadow::NegInf => ("-inf".into(), json!({"infinity": "-"})),
    }
}

fn count(n: u128) -> Value {
    u64::try_from(n).map(Value::from).unwrap_or_else(|_| Value::from(n.to_string()))
}

fn parse_germ(text: &str) -> Result<Germ, Failure> {
    let (e, kind) = exprlang::parse_kind(text, Mode::Germ)?;
    if kind != Kind::Value {
        return Err(Failure::Parse(format!("`{text}` is a condition, not a germ")));
    }
    exprlang::to_germ(&e).map_err(domain)
}

fn components(text: &str) -> Result<Vec<Germ>, Failure> {
    text.split(';').map(|c| parse_germ(c.trim())).collect()
}

fn structure(space: Space, dim: usize) -> StdMetricStructure {
    match space {
        Space::Rat => StdMetricStructure::RationalsAbs,
        Space::Nat => StdMetricStructure::NaturalsDiscrete,
        Space::Vec => StdMetricStructure::RationalsVector(dim),
    }
}

fn texts(v: &[Germ]) -> Value {
    Value::Array(v.iter().map(|g| Value::from(g.to_string())).collect())
}

type Output = Result<(String, Value), Failure>;

fn eval(expr: &str) -> Output {
    let (e, kind) = exprlang::parse_kind(expr, Mode::Germ)?;
    if kind == Kind::Condition {
        let b = exprlang::to_bool(&e).map_err(domain)?;
        return Ok((b.to_string(), json!({"type": "bool", "value": b})));
    }
    let g = exprlang::to_germ(&e).map_err(domain)?;
    Ok((g.to_string(), json!({"type": "germ", "value": germ(&g)})))
}

fn shadow(expr: &str) -> Output {
    let (text, value) = shadow_parts(&parse_germ(expr)?.shadow());
    Ok((text, json!({"shadow": value})))
}

fn classify(expr: &str) -> Output {
    let g = parse_germ(expr)?;
    let c = g.classify();
    let valuation = match g.valuation() {
        Valuation::Bottom => Value::Null,
        Valuation::Order(v) => Value::from(v),
    };
    Ok((
        c.name().to_string(),
        json!({
            "class": c.name(),
            "limited": c.is_limited(),
            "infinitesimal": c.is_infinitesimal(),
            "standard": c.is_standard(),
            "valuation": valuation,
        }),
    ))
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn measure(set: Option<&str>, sigma: Option<&PathBuf>, depth: Option<u64>) -> Output {
    if let Some(path) = sigma {
        let schema = exprlang::parse_sigma(&read(path)?)?;
        let depth = depth
            .or(schema.depth)
            .ok_or_else(|| domain("no depth given: pass --depth or add a `depth:` line"))?;
        let cert = loeb::sigma_limit(&schema.family, depth).map_err(domain)?;
        let mut text = String::new();
        for (k, v) in &cert.partial {
            writeln!(text, "k = {k}: {v}").expect("string write");
        }
        write!(text, "limit: {}", cert.limit).expect("string write");
        let partial: Vec<Value> =
            cert.partial.iter().map(|(k, v)| json!({"k": k, "value": rational(v)})).collect();
        return Ok((
            text,
            json!({
                "mode": cert.mode.to_string(),
                "start": schema.family.start,
                "depth": depth,
                "partial": partial,
                "closed_form": cert.closed_form.to_string(),
                "limit": rational(&cert.limit),
            }),
        ));
    }
    let Some(set) = set else {
        return Err(domain("give a set expression or --sigma FILE"));
    };
    let e = exprlang::parse(set, Mode::Set)?;
    let pred: GermPredicate<Q> = exprlang::to_predicate(&e).map_err(domain)?;
    let x = loeb::internal_set(&pred, &TimeLine::default()).map_err(domain)?;
    let m = loeb::measure(&x);
    let standard = x.pieces().iter().all(|p| p.lo.is_constant() && p.hi.is_constant());
    Ok((
        m.loeb.to_string(),
        json!({
            "set": x.to_string(),
            "loeb": rational(&m.loeb),
            "lower": m.lower.to_string(),
            "upper": m.upper.to_string(),
            "standard": standard,
        }),
    ))
}

fn hull_cmd(op: &HullCmd) -> Output {
    match op {
        HullCmd::Point { expr, space } => {
            let v = components(expr)?;
            let s = structure(*space, v.len());
            let p = hull::hull_point(s, &v).map_err(domain)?;
            Ok((
                p.to_string(),
                json!({
                    "space": s.to_string(),
                    "representative": texts(&p.representative),
                    "canonical": texts(&p.canonical),
                    "approachable": hull::approachable(s, &v),
                }),
            ))
        }
        HullCmd::Dist { a, b, space } => {
            let (u, v) = (components(a)?, components(b)?);
            let p = hull::hull_point(structure(*space, u.len()), &u).map_err(domain)?;
            let q = hull::hull_point(structure(*space, v.len()), &v).map_err(domain)?;
            let d = hull::hull_dist(&p, &q).map_err(domain)?;
            Ok((d.to_string(), json!({"distance": rational(&d)})))
        }
        HullCmd::Approachable { expr, space } => {
            let v = components(expr)?;
            let b = hull::approachable(structure(*space, v.len()), &v);
            Ok((b.to_string(), json!({"approachable": b})))
        }
        HullCmd::Limit { family, slope, offset, start, checks, space } => {
            let fam = family
                .split(';')
                .map(|c| {
                    let e = exprlang::parse(c.trim(), Mode::Family)?;
                    exprlang::to_bivariate(&e).map_err(domain)
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let seq = HullSequence {
                structure: structure(*space, fam.len()),
                family: fam,
                slope: *slope,
                offset: *offset,
                start: *start,
            };
            let lim = hull::hull_limit(&seq, *checks).map_err(domain)?;
            let rows: Vec<Value> = lim
                .checks
                .iter()
                .map(|(j, k, d)| json!({"j": j, "k": k, "distance": rational(d)}))
                .collect();
            Ok((lim.point.to_string(), json!({"canonical": texts(&lim.point.canonical), "checks": rows})))
        }
    }
}

fn neutrix(n: Neutrix) -> Value {
    match n {
        Neutrix::Zero => json!({"kind": "zero", "grade": null, "text": n.to_string()}),
        Neutrix::All => json!({"kind": "all", "grade": null, "text": n.to_string()}),
        Neutrix::Graded(k) => json!({"kind": "graded", "grade": k, "text": n.to_string()}),
    }
}

fn ext(expr: &str, compare: Option<&str>) -> Output {
    let value = |s: &str| -> Result<hyperq::ExternalNumber, Failure> {
        let e = exprlang::parse(s, Mode::Ext)?;
        exprlang::to_ext(&e).map_err(domain)
    };
    let x = value(expr)?;
    let record = |x: &hyperq::ExternalNumber| {
        json!({"text": x.to_string(), "center": germ(x.center()), "neutrix": neutrix(x.neutrix())})
    };
    match compare {
        None => Ok((x.to_string(), json!({"value": record(&x)}))),
        Some(other) => {
            let y = value(other)?;
            let ord = extnum_order(&x, &y);
            Ok((ord.to_string(), json!({"left": record(&x), "right": record(&y), "order": ord.to_string()})))
        }
    }
}

fn report_text(r: &SweepReport) -> String {
    let mut t = String::new();
    writeln!(t, "models: {}", r.models).expect("string write");
    writeln!(t, "formulas: {}", r.formulas).expect("string write");
    writeln!(t, "instances: {}", r.instances).expect("string write");
    writeln!(t, "evaluations: {}", r.evaluations).expect("string write");
    writeln!(t, "mismatches: {}", r.mismatches.len()).expect("string write");
    for m in r.mismatches.iter().take(10) {
        writeln!(t, "  {} | {} | params {:?}", m.model, m.formula, m.params).expect("string write");
    }
    t
}

fn report_json(r: &SweepReport) -> Value {
    let mismatches: Vec<Value> = r
        .mismatches
        .iter()
        .map(|m| {
            json!({
                "model": m.model,
                "formula": m.formula,
                "params": m.params,
                "quotient": m.quotient,
                "pointwise_set": m.pointwise_set,
            })
        })
        .collect();
    json!({
        "models": r.models,
        "formulas": count(r.formulas),
        "instances": count(r.instances),
        "evaluations": r.evaluations,
        "isomorphism_mismatches": r.isomorphism_mismatches,
        "ill_defined": r.ill_defined,
        "mismatches": mismatches,
        "passed": r.passed(),
    })
}

fn oracle(k: usize, c: usize, depth: usize, model: Option<&PathBuf>, unary: bool) -> Output {
    let (mut text, mut value, passed) = match model {
        Some(path) => {
            let parsed = strucmodel::parse_model(&read(path)?)?;
            if parsed.index.size() > k || parsed.structure.size() > c {
                return Err(domain(format!(
                    "model has |I| = {} and carrier {}, beyond --index-size {k} --carrier-size {c}",
                    parsed.index.size(),
                    parsed.structure.size()
                )));
            }
            let r = strucmodel::check_model(&parsed.structure, parsed.index, depth)?;
            let up = strucmodel::ultrapower_quotient(&parsed.structure, parsed.index)?;
            let setops = strucmodel::setop_check(&up);
            let mut text = report_text(&r);
            writeln!(text, "set operations: {} pairs, {} failures", setops.pairs_checked, setops.failures.len())
                .expect("string write");
            let mut value = report_json(&r);
            value["setops"] = json!({"pairs_checked": setops.pairs_checked, "failures": setops.failures});
            let ok = r.passed() && setops.failures.is_empty();
            (text, value, ok)
        }
        None => {
            let r = strucmodel::sweep(SweepConfig { max_index: k, max_carrier: c, max_depth: depth, unary })?;
            (report_text(&r), report_json(&r), r.passed())
        }
    };
    text.push_str(if passed { "result: pass" } else { "result: FAIL" });
    value["passed"] = Value::from(passed);
    if !passed {
        return Err(Failure::Domain(format!("oracle found disagreements\n{text}")));
    }
    Ok((text, value))
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Eval { .. } => "eval",
        Cmd::Shadow { .. } => "shadow",
        Cmd::Classify { .. } => "classify",
        Cmd::Measure { .. } => "measure",
        Cmd::Hull { .. } => "hull",
        Cmd::Ext { .. } => "ext",
        Cmd::Oracle { .. } => "oracle",
        Cmd::Repl => "repl",
    }
}

fn failed(command: &str, code: i32, msg: &str) -> CommandResult {
    let first = msg.lines().next().unwrap_or("").to_string();
    CommandResult {
        status: Status::Error,
        exit_code: code,
        text: String::new(),
        json: json!({"command": command, "status": "error", "exit_code": code, "error": msg}),
        diagnostics: vec![format!("error: {first}")],
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if !e.use_stderr() {
                // help and version requests
                return CommandResult {
                    status: Status::Ok,
                    exit_code: 0,
                    text: rendered.trim_end().to_string(),
                    json: json!({"command": "help", "status": "ok", "text": rendered}),
                    diagnostics: Vec::new(),
                };
            }
            let line = rendered.lines().next().unwrap_or("invalid usage").trim_start_matches("error: ");
            return failed("usage", EXIT_USAGE, line);
        }
    };
    let name = command_name(&cli.cmd);
    let out = match &cli.cmd {
        Cmd::Eval { expr } => eval(expr),
        Cmd::Shadow { expr } => shadow(expr),
        Cmd::Classify { expr } => classify(expr),
        Cmd::Measure { set, sigma, depth } => measure(set.as_deref(), sigma.as_ref(), *depth),
        Cmd::Hull { op } => hull_cmd(op),
        Cmd::Ext { expr, compare } => ext(expr, compare.as_deref()),
        Cmd::Oracle { index_size, carrier_size, depth, model, unary } => {
            oracle(*index_size, *carrier_size, *depth, model.as_ref(), *unary)
        }
        Cmd::Repl => {
            let stdin = std::io::stdin();
            let prompt = stdin.is_terminal();
            let mut stdout = std::io::stdout();
            run_repl(stdin.lock(), &mut stdout, cli.json, prompt).map_err(domain).map(|_| (String::new(), json!({})))
        }
    };
    match out {
        Ok((text, mut value)) => {
            value["command"] = Value::from(name);
            value["status"] = Value::from("ok");
            CommandResult { status: Status::Ok, exit_code: 0, text, json: value, diagnostics: Vec::new() }
        }
        Err(Failure::Parse(m)) => failed(name, EXIT_PARSE, &m),
        Err(Failure::Domain(m)) => failed(name, EXIT_DOMAIN, &m),
    }
}

const COMMANDS: [&str; 7] = ["eval", "shadow", "classify", "measure", "hull", "ext", "oracle"];

/// Runs one command per input line; a line that does not start with a
/// command name is evaluated as an expression. No state carries over
/// between lines.
pub fn run_repl<R: BufRead, W: Write>(input: R, out: &mut W, as_json: bool, prompt: bool) -> std::io::Result<()> {
    let show_prompt = |out: &mut W| -> std::io::Result<()> {
        if prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        Ok(())
    };
    show_prompt(out)?;
    for line in input.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed == "quit" || trimmed == "exit" {
            break;
        }
        if !trimmed.is_empty() {
            let mut argv = vec!["hyperq".to_string()];
            let words = shlex::split(trimmed).unwrap_or_default();
            match words.first() {
                Some(w) if COMMANDS.contains(&w.as_str()) => argv.extend(words),
                _ => argv.extend(["eval".to_string(), trimmed.to_string()]),
            }
            if as_json {
                argv.push("--json".into());
            }
            let r = run_command(argv);
            if r.status == Status::Ok {
                writeln!(out, "{}", r.render(as_json))?;
            } else if as_json {
                writeln!(out, "{}", r.render(true))?;
            } else {
                for d in &r.diagnostics {
                    writeln!(out, "{d}")?;
                }
            }
        }
        show_prompt(out)?;
    }
    Ok(())
}
