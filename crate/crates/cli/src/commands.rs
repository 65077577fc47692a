//! Argument definitions and the runner behind each subcommand.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use expanderlab::charsum::{self, CharSumError, CharSumResult, MultChar};
use expanderlab::classify::{self, ClassifyError, Refinement, StructureReport, Verdict};
use expanderlab::count::{self, CountError, CountReport};
use expanderlab::expansion::{self, ExpansionConstants, ExpansionError, SubsetSpec};
use expanderlab::field::{is_prime, FieldError, PrimeField};
use expanderlab::par::{self, ExecMode};
use expanderlab::regularity::{self, DefinableGraph, GraphKind, RegularityError};
use expanderlab::RatPoly;
use serde_json::{json, Value};
use thiserror::Error;

use crate::parse::{parse_poly, var_list};
use crate::report::{csv_float, to_csv, to_json, to_value};
use crate::spec::{parse_subset, SpecError};
use crate::suite;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Compute(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::ProbeDegenerate | ClassifyError::SeparationFailed => CliError::Compute(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ExpansionError> for CliError {
    fn from(e: ExpansionError) -> Self {
        match e {
            ExpansionError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<RegularityError> for CliError {
    fn from(e: RegularityError) -> Self {
        match e {
            RegularityError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            RegularityError::ConvergenceFailure(_) => CliError::Compute(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<CharSumError> for CliError {
    fn from(e: CharSumError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        match e {
            CountError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "expanderlab", version, about = "Structure classification and finite-field expansion experiments")]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true, env = "EXPANDERLAB_THREADS")]
    pub threads: Option<usize>,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact additive / multiplicative / composite classification over Q.
    Classify(ClassifyArgs),
    /// Image size and expander-class diagnostics for P(A, B) over GF(p).
    Expand(ExpandArgs),
    /// Spectral discrepancy certificate for a definable graph.
    Regularity(RegularityArgs),
    /// Character sums against their Weil-type bounds, one row per prime.
    Charsum(CharsumArgs),
    /// Point counts and density estimates.
    Count(CountArgs),
    /// Run the acceptance battery and write one report per criterion.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub poly: String,
    #[arg(long, default_value = "x,y")]
    pub vars: String,
    /// Read coefficients modulo this prime and lift them to centered integers first.
    #[arg(long)]
    pub p: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[arg(long)]
    pub poly: String,
    #[arg(long, default_value = "x,y")]
    pub vars: String,
    #[arg(long)]
    pub p: u64,
    #[arg(long = "setA", alias = "set-a")]
    pub set_a: Option<String>,
    #[arg(long = "setB", alias = "set-b")]
    pub set_b: Option<String>,
    /// Third set for the incidence count |{(a, b) : P(a, b) in C}|.
    #[arg(long = "setC", alias = "set-c")]
    pub set_c: Option<String>,
    #[arg(long, default_value_t = 4.0)]
    pub c_mod: f64,
    #[arg(long, default_value_t = 4.0)]
    pub c_weak: f64,
    #[arg(long, default_value_t = 8.0)]
    pub c_as: f64,
    /// Also report quadruple statistics.
    #[arg(long)]
    pub quadruples: bool,
    /// Tuples enumerated (exact when p^4 fits) or sampled.
    #[arg(long, default_value_t = expansion::DEFAULT_QUADRUPLE_BUDGET)]
    pub budget: u128,
    /// Seed for quadruple sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    QrDifference,
    QrProduct,
    PolyInQr,
    PolyLevelSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PartitionArg {
    Trivial,
    Qr,
}

#[derive(Args, Debug)]
pub struct RegularityArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub p: u64,
    /// Edge polynomial for the poly-* kinds.
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long, default_value = "v,w")]
    pub vars: String,
    /// Level set for poly-level-set, as a subset spec.
    #[arg(long)]
    pub level: Option<String>,
    #[arg(long, value_enum, default_value = "trivial")]
    pub partition: PartitionArg,
    /// Include the exact codegree histogram.
    #[arg(long)]
    pub codegrees: bool,
    /// Concentration radius in units of p^(1/2).
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SumKind {
    Additive,
    Gauss,
    Mult,
    Twisted,
}

#[derive(Args, Debug)]
pub struct CharsumArgs {
    #[arg(long, value_enum)]
    pub kind: SumKind,
    /// Single prime.
    #[arg(long, conflicts_with = "primes")]
    pub p: Option<u64>,
    /// Primes as `LO..HI` (odd primes in the range) or a comma list.
    #[arg(long)]
    pub primes: Option<String>,
    /// Phase polynomial for additive sums.
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long, default_value = "t")]
    pub var: String,
    /// Factor `POLY:EXPONENT` of a multiplicative sum; repeatable.
    #[arg(long = "factor")]
    pub factors: Vec<String>,
    /// Character order; must divide p - 1.
    #[arg(long, default_value_t = 2)]
    pub order: u64,
    /// Character exponent for twisted sums.
    #[arg(long, default_value_t = 1)]
    pub exponent: u64,
    /// Skip the irreducibility check for factors of degree above 3.
    #[arg(long)]
    pub assume_irreducible: bool,
    /// Summation set for twisted sums.
    #[arg(long)]
    pub set: Option<String>,
    /// Additive phase of a twisted sum.
    #[arg(long)]
    pub f: Option<String>,
    /// Multiplicative argument of a twisted sum.
    #[arg(long)]
    pub g: Option<String>,
    /// Constant in the twisted bound C p^(1/2).
    #[arg(long, default_value_t = charsum::DEFAULT_TWIST_CONSTANT)]
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountKind {
    Curve,
    Definable,
    Fibre,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long, value_enum)]
    pub kind: CountKind,
    #[arg(long)]
    pub poly: String,
    /// Variable names; defaults to `x,y`, or `x,t` for definable counts.
    #[arg(long)]
    pub vars: Option<String>,
    #[arg(long, conflicts_with = "prime_ladder")]
    pub p: Option<u64>,
    /// Comma-separated primes for a density sweep.
    #[arg(long)]
    pub prime_ladder: Option<String>,
    /// Expected leading constant for the Lang-Weil residual.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    /// Directory for the per-criterion reports.
    #[arg(long, default_value = "expanderlab-suite")]
    pub out_dir: PathBuf,
    /// Seed for the randomly generated corpora.
    #[arg(long, default_value_t = suite::DEFAULT_SEED)]
    pub seed: u64,
    /// Comma-separated criterion numbers; all by default.
    #[arg(long)]
    pub only: Option<String>,
}

/// A finished run: the report text and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn poly_arg(src: &str, vars: &[&str], flag: &str) -> Result<RatPoly, CliError> {
    if src.trim().is_empty() {
        return Err(CliError::Validation(format!("--{flag}: empty polynomial")));
    }
    parse_poly(src, vars).map_err(|e| CliError::Validation(format!("--{flag}: {}", e.render(src))))
}

fn names(spec: &str, arity: usize, flag: &str) -> Result<Vec<String>, CliError> {
    let v: Vec<String> = var_list(spec).into_iter().map(String::from).collect();
    if v.len() != arity {
        return Err(CliError::Validation(format!(
            "--{flag} needs {arity} variable names, got `{spec}`"
        )));
    }
    Ok(v)
}

fn field(p: u64) -> Result<PrimeField, CliError> {
    Ok(PrimeField::new(p)?)
}

fn positive(x: f64, flag: &str) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Validation(format!("--{flag} must be positive, got {x}")))
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        par::set_threads(n);
    }
    if cli.sequential {
        par::set_mode(ExecMode::Sequential);
    }
    let format = cli.format;
    let json_only = |name: &str| match format {
        Some(Format::Csv) => Err(CliError::Validation(format!("{name} has no CSV output"))),
        _ => Ok(()),
    };
    match &cli.command {
        Command::Classify(a) => {
            json_only("classify")?;
            run_classify(a).map(Outcome::ok)
        }
        Command::Expand(a) => {
            json_only("expand")?;
            run_expand(a).map(Outcome::ok)
        }
        Command::Regularity(a) => {
            json_only("regularity")?;
            run_regularity(a).map(Outcome::ok)
        }
        Command::Charsum(a) => run_charsum(a, format.unwrap_or(Format::Csv)).map(Outcome::ok),
        Command::Count(a) => run_count(a, format.unwrap_or(Format::Json)).map(Outcome::ok),
        Command::Suite(a) => {
            json_only("suite")?;
            run_suite(a)
        }
    }
}

pub fn classify_json(report: &StructureReport, input: &RatPoly, vars: &[&str]) -> Value {
    let mut out = json!({
        "input": input.to_string_with(vars),
        "verdict": report.verdict.name(),
        "verified": report.verified,
    });
    let m = out.as_object_mut().expect("object");
    match &report.verdict {
        Verdict::DegenerateOneVariable { variable } => {
            m.insert("variable".into(), json!(vars[*variable]));
        }
        Verdict::Additive { q, f, g } | Verdict::Multiplicative { q, f, g } => {
            m.insert("q".into(), json!(q.to_string_in("t")));
            m.insert("f".into(), json!(f.to_string_in(vars[0])));
            m.insert("g".into(), json!(g.to_string_in(vars[1])));
        }
        Verdict::NoStructure { witness, coeff } => {
            m.insert("witness".into(), json!(witness));
            m.insert("coeff".into(), json!(coeff.to_string()));
        }
        Verdict::Inconsistent { diagnostics } => {
            m.insert("diagnostics".into(), json!(diagnostics));
        }
    }
    let composite = report.composite.as_ref().map(|(h, s)| {
        json!({"outer": h.to_string_in("t"), "inner": s.to_string_with(vars)})
    });
    m.insert("composite".into(), composite.unwrap_or(Value::Null));
    let refinement = report.refinement.as_ref().map(|r| match r {
        Refinement::AffineImage { alpha, beta } => {
            json!({"kind": "affine-image", "alpha": alpha.to_string(), "beta": beta.to_string()})
        }
        Refinement::SharedRadical { radical } => {
            json!({"kind": "shared-radical", "radical": radical.to_string_in(vars[0])})
        }
    });
    m.insert("refinement".into(), refinement.unwrap_or(Value::Null));
    out
}

fn run_classify(a: &ClassifyArgs) -> Result<String, CliError> {
    let owned = names(&a.vars, 2, "vars")?;
    let vars: Vec<&str> = owned.iter().map(String::as_str).collect();
    let mut poly = poly_arg(&a.poly, &vars, "poly")?;
    if let Some(p) = a.p {
        poly = classify::lift_from_field(&poly, &field(p)?)?;
    }
    let report = classify::classify(&poly)?;
    let mut v = classify_json(&report, &poly, &vars);
    if let Some(p) = a.p {
        v["lifted_from"] = json!(p);
    }
    Ok(to_json(&v))
}

fn subset(flag: &str, src: &str) -> Result<SubsetSpec, CliError> {
    parse_subset(src).map_err(|e| CliError::Validation(format!("--{flag}: {e}")))
}

fn run_expand(a: &ExpandArgs) -> Result<String, CliError> {
    let f = field(a.p)?;
    let constants = ExpansionConstants {
        c_mod: positive(a.c_mod, "c-mod")?,
        c_weak: positive(a.c_weak, "c-weak")?,
        c_as: positive(a.c_as, "c-as")?,
    };
    let owned = names(&a.vars, 2, "vars")?;
    let vars: Vec<&str> = owned.iter().map(String::as_str).collect();
    let poly = poly_arg(&a.poly, &vars, "poly")?;
    let sets = match (&a.set_a, &a.set_b) {
        (Some(x), Some(y)) => Some((subset("setA", x)?, subset("setB", y)?)),
        (None, None) => None,
        _ => return Err(CliError::Validation("--setA and --setB go together".into())),
    };
    let set_c = a.set_c.as_deref().map(|s| subset("setC", s)).transpose()?;
    if sets.is_none() && !a.quadruples {
        return Err(CliError::Validation("nothing to do: give --setA/--setB or --quadruples".into()));
    }
    if set_c.is_some() && sets.is_none() {
        return Err(CliError::Validation("--setC needs --setA and --setB".into()));
    }
    let mut out = serde_json::Map::new();
    out.insert("poly".into(), json!(poly.to_string_with(&vars)));
    if let Some((sa, sb)) = &sets {
        let report = expansion::expansion_report(&poly, sa, sb, &f, constants)?;
        if let Value::Object(m) = to_value(&report) {
            out.extend(m);
        }
        if let Some(sc) = &set_c {
            let (xa, xb, xc) = (
                expansion::materialize(sa, &f)?,
                expansion::materialize(sb, &f)?,
                expansion::materialize(sc, &f)?,
            );
            let inc = expansion::triple_incidence(&poly, &xa, &xb, &xc, &f)?;
            out.insert("incidence".into(), to_value(&inc));
        }
    }
    if a.quadruples {
        let q = expansion::quadruple_count(&poly, &f, a.budget, a.seed)?;
        out.insert("quadruples".into(), to_value(&q));
    }
    Ok(to_json(&Value::Object(out)))
}

fn run_regularity(a: &RegularityArgs) -> Result<String, CliError> {
    let f = field(a.p)?;
    if !(a.k.is_finite() && a.k > 0.0) {
        return Err(CliError::Validation("--k must be positive".into()));
    }
    let owned = names(&a.vars, 2, "vars")?;
    let vars: Vec<&str> = owned.iter().map(String::as_str).collect();
    let poly = || {
        a.poly
            .as_deref()
            .ok_or_else(|| CliError::Validation("this graph kind needs --poly".into()))
            .and_then(|s| poly_arg(s, &vars, "poly"))
    };
    let kind = match a.kind {
        KindArg::QrDifference => GraphKind::QrDifference,
        KindArg::QrProduct => GraphKind::QrProduct,
        KindArg::PolyInQr => GraphKind::PolyInQr(poly()?),
        KindArg::PolyLevelSet => {
            let level = a
                .level
                .as_deref()
                .ok_or_else(|| CliError::Validation("poly-level-set needs --level".into()))?;
            let set = expansion::materialize(&subset("level", level)?, &f)?;
            GraphKind::PolyLevelSet(poly()?, set)
        }
    };
    let graph = DefinableGraph::new(kind, &f)?;
    let partition = match a.partition {
        PartitionArg::Trivial => regularity::trivial_partition(&f),
        PartitionArg::Qr => regularity::qr_partition(&f),
    };
    let cert = regularity::spectral_discrepancy(&graph, &partition)?;
    let mut v = to_value(&cert);
    if a.codegrees {
        v["codegrees"] = to_value(&regularity::codegree_stats(&graph, a.k)?);
    }
    Ok(to_json(&v))
}

/// Primes from `LO..HI` (odd primes, inclusive) or `p1,p2,...`.
pub fn prime_list(src: &str) -> Result<Vec<u64>, CliError> {
    let bad = |s: &str| CliError::Validation(format!("not a prime list: `{s}`"));
    let list: Vec<u64> = if let Some((lo, hi)) = src.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad(src))?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad(src))?;
        (lo.max(3)..=hi).filter(|&n| is_prime(n)).collect()
    } else {
        let v = src
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| bad(src)))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(n) = v.iter().find(|&&n| !is_prime(n)) {
            return Err(CliError::Validation(format!("{n} is not prime")));
        }
        v
    };
    if list.is_empty() {
        return Err(bad(src));
    }
    Ok(list)
}

fn primes(p: Option<u64>, list: Option<&str>, flag: &str) -> Result<Vec<u64>, CliError> {
    match (p, list) {
        (Some(p), None) => {
            field(p)?;
            Ok(vec![p])
        }
        (None, Some(s)) => prime_list(s),
        _ => Err(CliError::Validation(format!("give --p or --{flag}"))),
    }
}

fn factor_arg(src: &str, var: &str) -> Result<(RatPoly, u64), CliError> {
    let (poly, k) = src
        .rsplit_once(':')
        .ok_or_else(|| CliError::Validation(format!("--factor expects POLY:EXPONENT, got `{src}`")))?;
    let k = k
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("--factor exponent `{k}` is not an integer")))?;
    Ok((poly_arg(poly, &[var], "factor")?, k))
}

fn run_charsum(a: &CharsumArgs, format: Format) -> Result<String, CliError> {
    let ps = primes(a.p, a.primes.as_deref(), "primes")?;
    if !(a.c.is_finite() && a.c > 0.0) {
        return Err(CliError::Validation("--c must be positive".into()));
    }
    let var = a.var.as_str();
    let need = |v: &Option<String>, flag: &str| {
        v.as_deref()
            .ok_or_else(|| CliError::Validation(format!("this sum needs --{flag}")))
            .and_then(|s| poly_arg(s, &[var], flag))
    };
    let rows: Vec<(u64, Result<CharSumResult, f64>)> = match a.kind {
        SumKind::Gauss => ps.iter().map(|&p| Ok((p, Ok(charsum::gauss_sum(&field(p)?))))).collect::<Result<_, CliError>>()?,
        SumKind::Additive => {
            let poly = need(&a.poly, "poly")?;
            ps.iter()
                .map(|&p| Ok((p, Ok(charsum::additive_char_sum(&poly, &field(p)?)?))))
                .collect::<Result<_, CliError>>()?
        }
        SumKind::Mult => {
            if a.factors.is_empty() {
                return Err(CliError::Validation("mult sums need at least one --factor".into()));
            }
            let factors = a.factors.iter().map(|s| factor_arg(s, var)).collect::<Result<Vec<_>, _>>()?;
            ps.iter()
                .map(|&p| {
                    let r = charsum::mult_char_sum(&factors, a.order, &field(p)?, a.assume_irreducible);
                    match r {
                        Err(CharSumError::TrivialCharacterProduct(m)) => Ok((p, Err(m))),
                        r => Ok((p, Ok(r?))),
                    }
                })
                .collect::<Result<_, CliError>>()?
        }
        SumKind::Twisted => {
            let set = a
                .set
                .as_deref()
                .ok_or_else(|| CliError::Validation("twisted sums need --set".into()))?;
            let spec = subset("set", set)?;
            let (f, g) = (need(&a.f, "f")?, need(&a.g, "g")?);
            let chi = MultChar {
                order: a.order,
                exponent: a.exponent,
            };
            ps.iter()
                .map(|&p| {
                    let fld = field(p)?;
                    let elems = expansion::materialize(&spec, &fld)?;
                    Ok((p, Ok(charsum::twisted_definable_sum(&elems, &f, &g, chi, &fld, a.c)?)))
                })
                .collect::<Result<_, CliError>>()?
        }
    };
    Ok(match format {
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(p, r)| match r {
                    Ok(r) => vec![p.to_string(), csv_float(r.magnitude), csv_float(r.bound), r.satisfied.to_string()],
                    Err(m) => vec![p.to_string(), csv_float(*m), String::new(), String::new()],
                })
                .collect();
            to_csv(&["p", "magnitude", "bound", "satisfied"], &body)
        }
        Format::Json => {
            let body: Vec<Value> = rows
                .iter()
                .map(|(p, r)| match r {
                    Ok(r) => json!({"p": p, "magnitude": r.magnitude, "bound": r.bound, "satisfied": r.satisfied, "terms": r.terms}),
                    Err(m) => json!({"p": p, "magnitude": m, "bound": null, "satisfied": null}),
                })
                .collect();
            to_json(&body)
        }
    })
}

fn count_row(r: &CountReport) -> Vec<String> {
    vec![
        r.p.to_string(),
        r.n.to_string(),
        r.d.to_string(),
        csv_float(r.sigma_estimate),
        format!("{}/{}", r.sigma_rational.0, r.sigma_rational.1),
        r.resolved.to_string(),
        csv_float(r.residual),
        csv_float(r.lang_weil_residual),
    ]
}

fn run_count(a: &CountArgs, format: Format) -> Result<String, CliError> {
    let ps = primes(a.p, a.prime_ladder.as_deref(), "prime-ladder")?;
    if !a.c.is_finite() {
        return Err(CliError::Validation("--c must be finite".into()));
    }
    let default_vars = if a.kind == CountKind::Definable { "x,t" } else { "x,y" };
    let owned = names(a.vars.as_deref().unwrap_or(default_vars), 2, "vars")?;
    let vars: Vec<&str> = owned.iter().map(String::as_str).collect();
    let poly = poly_arg(&a.poly, &vars, "poly")?;
    if a.kind == CountKind::Fibre {
        if format == Format::Csv {
            let mut rows = Vec::new();
            for &p in &ps {
                let h = count::fibre_histogram(&poly, &field(p)?)?;
                rows.extend(h.counts.iter().enumerate().map(|(u, n)| vec![p.to_string(), u.to_string(), n.to_string()]));
            }
            return Ok(to_csv(&["p", "value", "count"], &rows));
        }
        let hs = ps
            .iter()
            .map(|&p| Ok(to_value(&count::fibre_histogram(&poly, &field(p)?)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        return Ok(to_json(&single_or_list(hs, &poly, &vars)));
    }
    let reports = ps
        .iter()
        .map(|&p| {
            let f = field(p)?;
            Ok(match a.kind {
                CountKind::Curve => count::plane_curve_count(&poly, &f, a.c)?,
                _ => count::definable_count(&poly, &f)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(match format {
        Format::Csv => to_csv(
            &["p", "n", "d", "sigma_estimate", "sigma", "resolved", "residual", "lang_weil_residual"],
            &reports.iter().map(count_row).collect::<Vec<_>>(),
        ),
        Format::Json => to_json(&single_or_list(reports.iter().map(to_value).collect(), &poly, &vars)),
    })
}

fn single_or_list(mut items: Vec<Value>, poly: &RatPoly, vars: &[&str]) -> Value {
    if items.len() == 1 {
        let mut v = items.remove(0);
        v["poly"] = json!(poly.to_string_with(vars));
        v
    } else {
        json!({"poly": poly.to_string_with(vars), "reports": items})
    }
}

fn run_suite(a: &SuiteArgs) -> Result<Outcome, CliError> {
    let ids: Vec<u8> = match &a.only {
        None => suite::CRITERIA.to_vec(),
        Some(s) => s
            .split(',')
            .map(|t| match t.trim().parse::<u8>() {
                Ok(n) if suite::CRITERIA.contains(&n) => Ok(n),
                _ => Err(CliError::Validation(format!("--only: no criterion `{t}`"))),
            })
            .collect::<Result<_, _>>()?,
    };
    std::fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", a.out_dir.display())))?;
    let mut lines = String::new();
    let mut summary = Vec::new();
    let mut all = true;
    for id in ids {
        let r = suite::run_criterion(id, a.seed)?;
        let path = a.out_dir.join(format!("criterion-{id:02}.json"));
        std::fs::write(&path, to_json(&r)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        lines.push_str(&r.line());
        lines.push('\n');
        all &= r.passed;
        summary.push(json!({"id": r.id, "title": r.title, "passed": r.passed}));
    }
    let path = a.out_dir.join("summary.json");
    std::fs::write(&path, to_json(&json!({"seed": a.seed, "criteria": summary})))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(Outcome {
        text: lines,
        code: if all { 0 } else { 1 },
    })
}
