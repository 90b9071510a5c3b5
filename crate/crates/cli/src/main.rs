//! `hurwitz`: validate Hurwitz tree files, check disk and annulus conditions, certify vertices,
//! search points and inspect boundary automorphisms.
//!
//! Exit codes: 0 pass or found, 1 fail, 2 unknown or exhausted, 3 input error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

use hurwitz_core::char_p_diff::GaloisField;
use hurwitz_core::document;
use hurwitz_core::hurwitz_tree::HurwitzTree;
use hurwitz_core::realizability::{
    self, Partition, PointShape, RealizabilityError, ResidueVector, VertexStatus, DEFAULT_BUDGET,
};
use hurwitz_core::theorems::{self, SearchOptions, TheoremError, Verdict};
use hurwitz_core::valued_field::{BoundaryAutomorphism, BoundaryKind, FieldError, Ramification, SeriesPrecision};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "hurwitz", version, about = "Hurwitz trees of order-p automorphisms of p-adic disks and annuli")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms H1-H7.
    Validate { file: PathBuf },
    /// Print d(s) for one vertex or all of them.
    Differente {
        file: PathBuf,
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Multiplicative / additive / étale classification.
    Classify {
        file: PathBuf,
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Disk conditions D1-D3.
    CheckDisk {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Annulus conditions C1-C4, fundamental chain and thickness.
    CheckAnnulus {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Leaf count, multiplicative fundamental vertices, leaf origins and concavity on an annulus tree.
    Structure { file: PathBuf },
    /// Type I / II / III classification for conductors below p.
    ConductorType { file: PathBuf },
    /// Criterion and differential certificate for one vertex.
    CertifyVertex {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Search a point of X*_e over F_{p^n}.
    SearchPoint {
        #[arg(long)]
        p: u32,
        /// Comma-separated residues, e.g. `4,4,1,-1,...`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        e: Vec<i64>,
        /// Annulus shape `m1,m2` instead of the disk shape.
        #[arg(long, value_delimiter = ',', value_name = "M1,M2")]
        annulus: Option<Vec<i64>>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Boundary normal form: order check, différente and profile.
    Boundary {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long, default_value_t = 1)]
        n: i64,
        /// Residue parameter for `mult-residue`.
        #[arg(long, default_value_t = 1)]
        h: i64,
        #[arg(long)]
        p: u32,
        #[arg(long = "N")]
        ram: u32,
        /// Number of monomials kept.
        #[arg(long, default_value_t = 24)]
        terms: i64,
        /// π-adic cutoff; defaults to 4N(p-1)+4.
        #[arg(long)]
        cutoff: Option<i64>,
        #[arg(long)]
        check_order: bool,
        /// Comma-separated ρ values, integers or fractions `a/b`.
        #[arg(long, value_delimiter = ',')]
        profile: Vec<String>,
    },
    /// Graphviz export.
    Dot { file: PathBuf },
    /// Check a partition fixture: adapted, maximal, size within the bound.
    Partitions { file: PathBuf },
}

#[derive(clap::Args, Clone, Copy)]
struct SearchArgs {
    /// Largest extension degree searched.
    #[arg(long = "nmax", default_value_t = 3)]
    n_max: u32,
    /// Candidate tuples examined before giving up.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

impl From<SearchArgs> for SearchOptions {
    fn from(a: SearchArgs) -> Self {
        SearchOptions { n_max: a.n_max, budget: a.budget }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    MultResidue,
    MultExact,
    Additive,
    DiskNormalForm,
}

/// Result of a command: exit code, JSON body and text rendering.
struct Outcome {
    code: u8,
    body: Value,
    text: String,
}

#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    // Usage errors are input errors (3); clap's own code 2 would read as "unknown".
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if std::env::args().any(|a| a == "--json") {
                println!("{}", json!({"schema": SCHEMA, "command": null, "exit_code": 3, "error": e.kind().to_string()}));
            }
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let name = command_name(&cli.command);
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                let mut body = out.body;
                if let Value::Object(map) = &mut body {
                    map.insert("schema".into(), json!(SCHEMA));
                    map.insert("command".into(), json!(name));
                    map.insert("exit_code".into(), json!(out.code));
                }
                println!("{}", serde_json::to_string_pretty(&body).unwrap());
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(InputError(msg)) => {
            if cli.json {
                println!("{}", json!({"schema": SCHEMA, "command": name, "exit_code": 3, "error": msg}));
            }
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Differente { .. } => "differente",
        Command::Classify { .. } => "classify",
        Command::CheckDisk { .. } => "check-disk",
        Command::CheckAnnulus { .. } => "check-annulus",
        Command::Structure { .. } => "structure",
        Command::ConductorType { .. } => "conductor-type",
        Command::CertifyVertex { .. } => "certify-vertex",
        Command::SearchPoint { .. } => "search-point",
        Command::Boundary { .. } => "boundary",
        Command::Dot { .. } => "dot",
        Command::Partitions { .. } => "partitions",
    }
}

fn load(path: &PathBuf) -> Result<(HurwitzTree, Vec<String>), InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let parsed = document::parse_tree_document(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let tree = parsed.document.to_tree().map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    Ok((tree, parsed.warnings))
}

fn vertex_list(t: &HurwitzTree, v: &Option<String>) -> Result<Vec<String>, InputError> {
    match v {
        Some(v) if !t.has_vertex(v) => Err(InputError(format!("unknown vertex `{v}`"))),
        Some(v) => Ok(vec![v.clone()]),
        None => Ok(t.vertices().to_vec()),
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::RealizableProved => 0,
        Verdict::ConditionsFailed(_) => 1,
        Verdict::ConditionsHoldRealizabilityUnknown => 2,
    }
}

fn status_name(s: &VertexStatus) -> &'static str {
    match s {
        VertexStatus::ProvedByCriterion => "ProvedByCriterion",
        VertexStatus::Certified { .. } => "Certified",
        VertexStatus::Unknown => "Unknown",
        VertexStatus::NotApplicable => "NotApplicable",
    }
}

/// Failed theorem preconditions (including an invalid tree) are check failures, not input errors.
fn theorem_failure(e: TheoremError) -> Result<Outcome, InputError> {
    match e {
        TheoremError::InvalidTree(_) | TheoremError::PreconditionFailed(_) => {
            Ok(Outcome { code: 1, body: json!({"error": e.to_string()}), text: format!("FAIL: {e}\n") })
        }
        other => Err(InputError(other.to_string())),
    }
}

fn run(cmd: Command) -> Result<Outcome, InputError> {
    match cmd {
        Command::Validate { file } => {
            let (t, warnings) = load(&file)?;
            let rep = t.validate();
            let mut text = String::new();
            for v in &rep.violations {
                writeln!(text, "{} at {}: {}", v.axiom, v.location, v.message).unwrap();
            }
            writeln!(text, "{}", if rep.is_valid() { "valid Hurwitz tree" } else { "INVALID" }).unwrap();
            Ok(Outcome {
                code: u8::from(!rep.is_valid()),
                body: json!({"valid": rep.is_valid(), "violations": rep.violations, "warnings": warnings}),
                text,
            })
        }
        Command::Differente { file, vertex } => {
            let (t, _) = load(&file)?;
            let mut rows = Vec::new();
            let mut text = String::new();
            for v in vertex_list(&t, &vertex)? {
                let d = t.differente(&v)?;
                writeln!(text, "{v}: {d}").unwrap();
                rows.push(json!({"vertex": v, "d": d.to_string()}));
            }
            Ok(Outcome { code: 0, body: json!({"vkp": t.vkp().to_string(), "differente": rows}), text })
        }
        Command::Classify { file, vertex } => {
            let (t, _) = load(&file)?;
            let mut rows = Vec::new();
            let mut text = String::new();
            for v in vertex_list(&t, &vertex)? {
                let k = t.classify_vertex(&v)?;
                writeln!(text, "{v}: {k:?}").unwrap();
                rows.push(json!({"vertex": v, "kind": k}));
            }
            Ok(Outcome { code: 0, body: json!({"vertices": rows}), text })
        }
        Command::CheckDisk { file, search } => {
            let (t, _) = load(&file)?;
            let rep = match theorems::check_disk(&t, search.into()) {
                Ok(r) => r,
                Err(e) => return theorem_failure(e),
            };
            let mut text = String::new();
            for c in [&rep.d1, &rep.d2] {
                writeln!(text, "{:?}: {}", c.condition, if c.passed { "pass" } else { "FAIL" }).unwrap();
                for f in &c.failures {
                    writeln!(text, "  {}: {}", f.location, f.message).unwrap();
                }
            }
            for v in &rep.d3 {
                writeln!(text, "D3 {}: {}", v.vertex, status_name(&v.status)).unwrap();
            }
            writeln!(text, "verdict: {:?}", rep.verdict).unwrap();
            Ok(Outcome { code: verdict_code(&rep.verdict), body: serde_json::to_value(&rep)?, text })
        }
        Command::CheckAnnulus { file, search } => {
            let (t, _) = load(&file)?;
            let rep = match theorems::check_annulus(&t, search.into()) {
                Ok(r) => r,
                Err(e) => return theorem_failure(e),
            };
            let mut text = String::new();
            for c in [&rep.c1, &rep.c2, &rep.c3] {
                writeln!(text, "{:?}: {}", c.condition, if c.passed { "pass" } else { "FAIL" }).unwrap();
                for f in &c.failures {
                    writeln!(text, "  {}: {}", f.location, f.message).unwrap();
                }
            }
            for v in &rep.c4 {
                writeln!(text, "C4 {}: {}", v.vertex, status_name(&v.status)).unwrap();
            }
            if let Some(chain) = &rep.fundamental_chain {
                writeln!(text, "fundamental chain: {}", chain.join(" -> ")).unwrap();
            }
            if let Some(e) = rep.thickness {
                writeln!(text, "thickness: {e}").unwrap();
            }
            writeln!(text, "verdict: {:?}", rep.verdict).unwrap();
            Ok(Outcome { code: verdict_code(&rep.verdict), body: serde_json::to_value(&rep)?, text })
        }
        Command::Structure { file } => {
            let (t, _) = load(&file)?;
            let rep = match theorems::annulus_structure_checks(&t) {
                Ok(r) => r,
                Err(e) => return theorem_failure(e),
            };
            let mut text = String::new();
            for c in &rep.checks {
                writeln!(text, "{}: {} ({})", c.name, if c.passed { "pass" } else { "FAIL" }, c.message).unwrap();
            }
            Ok(Outcome { code: u8::from(!rep.passed()), body: serde_json::to_value(&rep)?, text })
        }
        Command::ConductorType { file } => {
            let (t, _) = load(&file)?;
            let ct = match theorems::small_conductor_type(&t) {
                Ok(r) => r,
                Err(e) => return theorem_failure(e),
            };
            let mut text = format!("Type {:?} (m1 = {}, m2 = {}, e = {})\n", ct.ty, ct.m1, ct.m2, ct.thickness);
            for c in ct.epsilon_checks.iter().chain(&ct.shape_checks) {
                writeln!(text, "{}: {} ({})", c.name, if c.passed { "pass" } else { "FAIL" }, c.message).unwrap();
            }
            Ok(Outcome { code: u8::from(!ct.consistent()), body: serde_json::to_value(&ct)?, text })
        }
        Command::CertifyVertex { file, vertex, search } => {
            let (t, _) = load(&file)?;
            if !t.has_vertex(&vertex) {
                return Err(InputError(format!("unknown vertex `{vertex}`")));
            }
            match realizability::certify_vertex(&t, &vertex, search.n_max, search.budget) {
                Ok(o) => {
                    let code = match o.status {
                        VertexStatus::ProvedByCriterion | VertexStatus::Certified { .. } => 0,
                        VertexStatus::Unknown => 2,
                        VertexStatus::NotApplicable => 1,
                    };
                    let mut text = format!("{}: {}\n", vertex, status_name(&o.status));
                    if let Some(vv) = &o.residue_vector {
                        writeln!(text, "shape {:?}, e = {:?}, bound {}", vv.shape, vv.raw, vv.bound).unwrap();
                    }
                    if let (Some(part), Some(vv)) = (&o.witness_partition, &o.residue_vector) {
                        writeln!(text, "smallest maximal adapted partition: {:?}", realizability::block_values(part, &vv.raw)).unwrap();
                    }
                    if let VertexStatus::Certified { certificate } = &o.status {
                        let k = GaloisField::new(certificate.p, certificate.field_degree)?;
                        let pts: Vec<String> = certificate.point.iter().map(|x| k.format(*x)).collect();
                        writeln!(text, "over F_{}^{}: point ({}), u = {}", certificate.p, certificate.field_degree, pts.join(", "), certificate.u).unwrap();
                    }
                    Ok(Outcome { code, body: serde_json::to_value(&o)?, text })
                }
                Err(RealizabilityError::UnsupportedShape(m)) => Ok(Outcome {
                    code: 2,
                    body: json!({"vertex": vertex, "status": "Unknown", "unsupported": m}),
                    text: format!("{vertex}: Unknown (unsupported shape: {m})\n"),
                }),
                Err(e) => Err(e.into()),
            }
        }
        Command::SearchPoint { p, e, annulus, search } => {
            let rv = ResidueVector::new(p, &e)?;
            let shape = match annulus.as_deref() {
                None => PointShape::Disk,
                Some([m1, m2]) => {
                    if m1 + m2 != rv.len() as i64 || *m1 < 1 || *m2 < 1 {
                        return Err(InputError(format!("annulus shape needs m1, m2 >= 1 with m1 + m2 = {}", rv.len())));
                    }
                    PointShape::Annulus { m1: *m1, m2: *m2 }
                }
                Some(_) => return Err(InputError("--annulus takes two values".into())),
            };
            let out = realizability::search_point(&rv, shape, search.n_max, search.budget);
            let text = match &out.point {
                Some(pt) => {
                    let k = GaloisField::new(p, pt.n)?;
                    let coords: Vec<String> = pt.coords.iter().map(|x| k.format(*x)).collect();
                    let modulus = if pt.n > 1 { format!(" (x a root of {:?}, low degree first)", k.modulus()) } else { String::new() };
                    format!("point over F_{p}^{}{modulus}: ({})\n", pt.n, coords.join(", "))
                }
                None => format!(
                    "no point found ({} tuples examined{})\n",
                    out.tuples_examined,
                    if out.budget_exhausted { ", budget exhausted" } else { "" }
                ),
            };
            Ok(Outcome { code: if out.point.is_some() { 0 } else { 2 }, body: serde_json::to_value(&out)?, text })
        }
        Command::Boundary { kind, m, n, h, p, ram, terms, cutoff, check_order, profile } => {
            let field = Ramification::new(p, ram)?;
            let kind = match kind {
                KindArg::MultResidue => BoundaryKind::MultResidue { h },
                KindArg::MultExact => BoundaryKind::MultExact { m },
                KindArg::Additive => BoundaryKind::Additive { m, n },
                KindArg::DiskNormalForm => BoundaryKind::DiskNormalForm { m, n },
            };
            let precision = SeriesPrecision { terms, val_cutoff: cutoff.unwrap_or(4 * field.v_p() + 4) };
            let sigma = BoundaryAutomorphism::new(field, kind, precision)?;
            boundary_report(&sigma, check_order, &profile)
        }
        Command::Dot { file } => {
            let (t, _) = load(&file)?;
            let text = dot(&t);
            Ok(Outcome { code: 0, body: json!({"dot": text}), text })
        }
        Command::Partitions { file } => partitions(&file),
    }
}

fn parse_rho(s: &str) -> Result<Rational64, InputError> {
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse()?, b.trim().parse()?);
            if b == 0 {
                return Err(InputError(format!("rho `{s}` has zero denominator")));
            }
            Rational64::new(a, b)
        }
        None => Rational64::from_integer(s.parse()?),
    };
    Ok(r)
}

fn boundary_report(sigma: &BoundaryAutomorphism, check_order: bool, profile: &[String]) -> Result<Outcome, InputError> {
    let mut code = 0u8;
    let mut text = String::new();
    let mut body = json!({"kind": sigma.kind(), "p": sigma.field().p(), "N": sigma.field().ram()});
    let soft = |e: &FieldError| matches!(e, FieldError::PrecisionExhausted(_) | FieldError::OutsideConvergence(_) | FieldError::AllTermsTruncated);
    match sigma.boundary_differente() {
        Ok(d) => {
            writeln!(text, "boundary différente: {d}").unwrap();
            body["boundary_differente"] = json!(d);
        }
        Err(e) if soft(&e) => {
            code = 2;
            writeln!(text, "boundary différente: undecided ({e})").unwrap();
            body["boundary_differente"] = json!({"error": e.to_string()});
        }
        Err(e) => return Err(e.into()),
    }
    if check_order {
        match sigma.iterate_check_order_p() {
            Ok(ok) => {
                if !ok {
                    code = 1;
                }
                writeln!(text, "sigma^p = id: {}", if ok { "yes" } else { "NO" }).unwrap();
                body["order_p"] = json!(ok);
            }
            Err(e) if soft(&e) => {
                code = code.max(2);
                writeln!(text, "sigma^p = id: undecided ({e})").unwrap();
                body["order_p"] = json!({"error": e.to_string()});
            }
            Err(e) => return Err(e.into()),
        }
    }
    if !profile.is_empty() {
        let mut rows = Vec::new();
        for s in profile {
            let rho = parse_rho(s)?;
            match sigma.differente_profile(&[rho]) {
                Ok(v) => {
                    writeln!(text, "d(rho = {rho}) = {}", v[0]).unwrap();
                    rows.push(json!({"rho": rho.to_string(), "d": v[0].to_string()}));
                }
                Err(e) if soft(&e) => {
                    if code == 0 {
                        code = 2;
                    }
                    writeln!(text, "d(rho = {rho}): undecided ({e})").unwrap();
                    rows.push(json!({"rho": rho.to_string(), "error": e.to_string()}));
                }
                Err(e) => return Err(e.into()),
            }
        }
        body["profile"] = json!(rows);
    }
    Ok(Outcome { code, body, text })
}

fn dot(t: &HurwitzTree) -> String {
    let mut out = String::from("digraph hurwitz {\n");
    for v in t.vertices() {
        let kind = t.classify_vertex(v).unwrap();
        let d = t.differente(v).unwrap();
        writeln!(out, "  \"{v}\" [label=\"{v}\\nd={d} {kind:?}\"];").unwrap();
    }
    for e in t.edges() {
        writeln!(out, "  \"{}\" -> \"{}\" [label=\"{} eps={} m={} h={}\"];", e.from, e.to, e.id, e.eps, e.m, e.h).unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(serde::Deserialize)]
struct PartitionFixture {
    p: u32,
    cases: Vec<PartitionCase>,
}

#[derive(serde::Deserialize)]
struct PartitionCase {
    name: String,
    m: i64,
    bound: usize,
    e: Vec<i64>,
    partition: Vec<Vec<usize>>,
}

fn partitions(file: &PathBuf) -> Result<Outcome, InputError> {
    let text = std::fs::read_to_string(file).map_err(|e| InputError(format!("{}: {e}", file.display())))?;
    let fx: PartitionFixture = serde_json::from_str(&text)?;
    let mut rows = Vec::new();
    let mut out = String::new();
    let mut all = true;
    for c in &fx.cases {
        let e = ResidueVector::new(fx.p, &c.e)?;
        let part = Partition::new(c.partition.clone());
        let adapted = realizability::is_adapted(&part, &e)?;
        let maximal = adapted && realizability::is_maximal_adapted(&part, &e)?;
        let bound_ok = c.bound as i64 == c.m / fx.p as i64 + 1 && e.len() as i64 == c.m + 1;
        let small = part.len() <= c.bound;
        let criterion = realizability::criterion_small_partition(&e, c.bound)?;
        let ok = adapted && maximal && bound_ok && small && criterion;
        all &= ok;
        writeln!(
            out,
            "{}: {} (adapted {adapted}, maximal {maximal}, |P| = {} <= {} {small}, bound formula {bound_ok}, criterion {criterion})",
            c.name,
            if ok { "pass" } else { "FAIL" },
            part.len(),
            c.bound
        )
        .unwrap();
        rows.push(json!({"name": c.name, "passed": ok, "adapted": adapted, "maximal": maximal, "blocks": part.len(),
            "bound": c.bound, "bound_formula": bound_ok, "criterion": criterion}));
    }
    Ok(Outcome { code: u8::from(!all), body: json!({"cases": rows}), text: out })
}
