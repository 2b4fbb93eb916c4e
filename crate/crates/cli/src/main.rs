//! Command-line front end for the `stable-ladder` evaluators.

mod record;
mod selftest;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use stable_ladder::diophantine::{estimate_exponent, REFERENCE_BETA};
use stable_ladder::kappa::{compare_methods, evaluate};
use stable_ladder::{
    classify_at, exit_transform, kappa_with, AlphaKind, Error, KappaQuery, MethodChoice, Quantity, StableParams,
    Tolerance,
};

use record::{fmt_f64, Emitter, OutputRecord, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "stable-ladder", version, about = "Ladder-process Laplace exponents of stable Levy processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate g(beta), and g'(beta) with --derivative.
    Eval(EvalArgs),
    /// Evaluate kappa(gamma, beta) or the exit-time transform.
    Kappa(KappaArgs),
    /// Sweep beta (and optionally gamma) over a linear grid.
    Table(TableArgs),
    /// Run every applicable method at one point and compare.
    Compare(EvalArgs),
    /// Continued fraction and conditioning of alpha.
    Classify(ClassifyArgs),
    /// Run the identity suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long, default_value = "auto", value_parser = parse_method)]
    method: MethodChoice,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_terms: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also evaluate g'(beta).
    #[arg(long)]
    derivative: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
}

#[derive(Args, Debug)]
struct KappaArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "transform")]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    gamma: f64,
    /// Evaluate 1/((theta + gamma) kappa(eta, gamma) kappa(eta, theta)).
    #[arg(long, num_args = 3, value_names = ["ETA", "GAMMA", "THETA"], allow_negative_numbers = true, conflicts_with = "beta")]
    transform: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    common: Common,
    /// First beta of the sweep.
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    /// Last beta of the sweep.
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    /// Number of beta values.
    #[arg(long)]
    steps: usize,
    /// Tabulate kappa at this gamma instead of g.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Sweep gamma as well: FROM TO STEPS.
    #[arg(long, num_args = 3, value_names = ["FROM", "TO", "STEPS"], conflicts_with = "gamma")]
    gamma_sweep: Option<Vec<f64>>,
    /// Compute rows on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Point at which series work is projected.
    #[arg(long, default_value_t = REFERENCE_BETA)]
    beta: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_terms: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Restrict to these groups (repeatable).
    #[arg(long, value_enum)]
    only: Vec<selftest::Group>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn parse_method(s: &str) -> Result<MethodChoice, String> {
    s.parse()
}

/// A run-level failure with its exit code.
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn usage(e: impl ToString) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Self {
            code: Status::of(&e).exit_code(),
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Kappa(a) => cmd_kappa(a),
        Command::Table(a) => cmd_table(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn tolerance(tol: f64, max_terms: usize) -> Result<Tolerance, Fail> {
    let d = Tolerance::default();
    Tolerance::new(tol, max_terms, d.max_quad_refinements).map_err(Fail::usage)
}

fn setup(c: &Common) -> Result<(StableParams, Tolerance), Fail> {
    let params = StableParams::new(c.alpha, c.rho)?;
    Ok((params, tolerance(c.tol, c.max_terms)?))
}

fn quantities(derivative: bool) -> &'static [Quantity] {
    if derivative {
        &[Quantity::G, Quantity::GPrime]
    } else {
        &[Quantity::G]
    }
}

/// Emit records and fold their statuses into one exit code.
fn emit_all(format: Format, records: &[OutputRecord]) -> Outcome {
    let stdout = io::stdout();
    let mut em = Emitter::new(format, stdout.lock());
    let mut code = 0;
    for r in records {
        em.emit(r)?;
        code = code.max(r.status.exit_code());
    }
    em.finish()?;
    Ok(code)
}

fn g_record(params: &StableParams, beta: f64, method: MethodChoice, tol: &Tolerance, q: Quantity) -> OutputRecord {
    let mut r = OutputRecord::new(params.alpha(), params.rho(), q.as_str(), method.to_string());
    r.beta = Some(beta);
    r.with_outcome(&evaluate(params, beta, method, tol, q))
}

fn kappa_record(params: &StableParams, gamma: f64, beta: f64, method: MethodChoice, tol: &Tolerance) -> OutputRecord {
    let mut r = OutputRecord::new(params.alpha(), params.rho(), "kappa", method.to_string());
    r.beta = Some(beta);
    r.gamma = Some(gamma);
    let outcome = KappaQuery::new(gamma, beta).and_then(|q| kappa_with(params, q, method, tol));
    r.with_outcome(&outcome)
}

fn cmd_eval(a: EvalArgs) -> Outcome {
    let c = &a.common;
    let (params, tol) = match setup(c) {
        Ok(v) => v,
        Err(f) => {
            let mut rec = OutputRecord::new(c.alpha, c.rho, Quantity::G.as_str(), c.method.to_string());
            rec.beta = Some(a.beta);
            rec.status = Status::InvalidParams;
            emit_all(c.format, &[rec])?;
            return Err(f);
        }
    };
    let outcomes: Vec<(Quantity, stable_ladder::Result<_>)> = quantities(c.derivative)
        .iter()
        .map(|&q| (q, evaluate(&params, a.beta, c.method, &tol, q)))
        .collect();
    let records: Vec<OutputRecord> = outcomes
        .iter()
        .map(|(q, outcome)| {
            let mut r = OutputRecord::new(params.alpha(), params.rho(), q.as_str(), c.method.to_string());
            r.beta = Some(a.beta);
            r.with_outcome(outcome)
        })
        .collect();
    let code = emit_all(c.format, &records)?;
    for (q, outcome) in &outcomes {
        if let Err(e) = outcome {
            eprintln!("error ({q}): {e}");
        }
    }
    Ok(code)
}

fn cmd_kappa(a: KappaArgs) -> Outcome {
    let c = &a.common;
    let (params, tol) = setup(c)?;
    let (record, outcome) = match &a.transform {
        Some(v) => {
            let (eta, gamma, theta) = (v[0], v[1], v[2]);
            let outcome = exit_transform(&params, eta, gamma, theta, c.method, &tol);
            let mut r = OutputRecord::new(params.alpha(), params.rho(), "exit_transform", c.method.to_string());
            r.eta = Some(eta);
            r.gamma = Some(gamma);
            r.theta = Some(theta);
            (r.with_outcome(&outcome), outcome)
        }
        None => {
            let beta = a.beta.expect("required by clap");
            let outcome = KappaQuery::new(a.gamma, beta).and_then(|q| kappa_with(&params, q, c.method, &tol));
            let mut r = OutputRecord::new(params.alpha(), params.rho(), "kappa", c.method.to_string());
            r.beta = Some(beta);
            r.gamma = Some(a.gamma);
            (r.with_outcome(&outcome), outcome)
        }
    };
    let code = emit_all(c.format, std::slice::from_ref(&record))?;
    if let Err(e) = outcome {
        eprintln!("error: {e}");
    }
    Ok(code)
}

/// `steps` evenly spaced points from `from` to `to` inclusive.
fn grid(name: &str, from: f64, to: f64, steps: usize) -> Result<Vec<f64>, Fail> {
    if steps == 0 || !from.is_finite() || !to.is_finite() || from > to || (steps == 1 && from != to) {
        return Err(Fail::usage(format!(
            "empty {name} range: from {from} to {to} in {steps} steps"
        )));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { to } else { from + h * i as f64 })
        .collect())
}

#[derive(Debug, Clone, Copy)]
enum Row {
    G { beta: f64, quantity: Quantity },
    Kappa { gamma: f64, beta: f64 },
}

fn cmd_table(a: TableArgs) -> Outcome {
    let c = &a.common;
    let betas = grid("beta", a.from, a.to, a.steps)?;
    let (params, tol) = setup(c)?;
    let gammas = match (&a.gamma_sweep, a.gamma) {
        (Some(v), _) => {
            let steps = v[2];
            if steps.fract() != 0.0 || steps < 0.0 {
                return Err(Fail::usage(format!("gamma steps must be a whole number, got {steps}")));
            }
            Some(grid("gamma", v[0], v[1], steps as usize)?)
        }
        (None, Some(g)) => Some(vec![g]),
        (None, None) => None,
    };
    let rows: Vec<Row> = match gammas {
        Some(gs) => gs
            .iter()
            .flat_map(|&gamma| betas.iter().map(move |&beta| Row::Kappa { gamma, beta }))
            .collect(),
        None => betas
            .iter()
            .flat_map(|&beta| {
                quantities(c.derivative)
                    .iter()
                    .map(move |&quantity| Row::G { beta, quantity })
            })
            .collect(),
    };
    let compute = |row: &Row| match *row {
        Row::G { beta, quantity } => g_record(&params, beta, c.method, &tol, quantity),
        Row::Kappa { gamma, beta } => kappa_record(&params, gamma, beta, c.method, &tol),
    };
    let records: Vec<OutputRecord> = if a.serial {
        rows.iter().map(compute).collect()
    } else {
        rows.par_iter().map(compute).collect()
    };
    emit_all(c.format, &records)
}

#[derive(Debug, Serialize)]
struct MethodEntry {
    method: String,
    value: Option<f64>,
    abs_error_bound: Option<f64>,
    terms_or_nodes_used: Option<usize>,
    status: String,
}

#[derive(Debug, Serialize)]
struct Comparison {
    alpha: f64,
    rho: f64,
    beta: f64,
    quantity: &'static str,
    methods: Vec<MethodEntry>,
    /// `|value_i - value_j|` over the methods that produced a value.
    delta: Vec<Vec<f64>>,
    max_delta: f64,
    agree: bool,
}

fn compare_one(params: &StableParams, beta: f64, tol: &Tolerance, quantity: Quantity) -> Comparison {
    let mut methods = Vec::new();
    let mut ok = Vec::new();
    for m in compare_methods(params, beta, tol, quantity) {
        let status = match &m.outcome {
            Ok(r) => {
                ok.push(*r);
                "ok".to_string()
            }
            Err(Error::NotApplicable { .. }) => continue,
            Err(Error::IllConditioned { .. }) => "skipped: ill-conditioned".to_string(),
            Err(e) => format!("failed: {e}"),
        };
        let r = m.outcome.as_ref().ok();
        methods.push(MethodEntry {
            method: m.method.to_string(),
            value: r.map(|r| r.value),
            abs_error_bound: r.map(|r| r.abs_error_bound),
            terms_or_nodes_used: r.map(|r| r.terms_or_nodes_used),
            status,
        });
    }
    let mut agree = methods.iter().all(|m| !m.status.starts_with("failed"));
    let mut max_delta = 0.0f64;
    let delta: Vec<Vec<f64>> = ok
        .iter()
        .map(|a| {
            ok.iter()
                .map(|b| {
                    let d = (a.value - b.value).abs();
                    max_delta = max_delta.max(d);
                    if d > a.abs_error_bound + b.abs_error_bound {
                        agree = false;
                    }
                    d
                })
                .collect()
        })
        .collect();
    Comparison {
        alpha: params.alpha(),
        rho: params.rho(),
        beta,
        quantity: quantity.as_str(),
        methods,
        delta,
        max_delta,
        agree,
    }
}

fn write_comparison(out: &mut impl Write, format: Format, cmp: &Comparison) -> io::Result<()> {
    let names: Vec<&str> = cmp
        .methods
        .iter()
        .filter(|m| m.value.is_some())
        .map(|m| m.method.as_str())
        .collect();
    match format {
        Format::Json => {
            let line = serde_json::to_string(cmp).map_err(io::Error::other)?;
            writeln!(out, "{line}")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec![cmp.quantity.to_string()];
            header.extend(names.iter().map(|s| s.to_string()));
            w.write_record(&header).map_err(io::Error::other)?;
            for (name, row) in names.iter().zip(&cmp.delta) {
                let mut rec = vec![name.to_string()];
                rec.extend(row.iter().map(|d| fmt_f64(*d)));
                w.write_record(&rec).map_err(io::Error::other)?;
            }
            let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
            out.write_all(&bytes)
        }
        Format::Text => {
            writeln!(
                out,
                "{}(alpha={}, rho={}, beta={})",
                cmp.quantity,
                fmt_f64(cmp.alpha),
                fmt_f64(cmp.rho),
                fmt_f64(cmp.beta)
            )?;
            for m in &cmp.methods {
                match m.value {
                    Some(v) => writeln!(
                        out,
                        "  {:<11} {:<22} +/- {:<24} [{} terms/nodes]",
                        m.method,
                        fmt_f64(v),
                        fmt_f64(m.abs_error_bound.unwrap_or(f64::NAN)),
                        m.terms_or_nodes_used.unwrap_or(0)
                    )?,
                    None => writeln!(out, "  {:<11} {}", m.method, m.status)?,
                }
            }
            if !names.is_empty() {
                write!(out, "  {:<11}", "|delta|")?;
                for n in &names {
                    write!(out, " {n:>11}")?;
                }
                writeln!(out)?;
                for (n, row) in names.iter().zip(&cmp.delta) {
                    write!(out, "  {n:<11}")?;
                    for d in row {
                        write!(out, " {d:>11.3e}")?;
                    }
                    writeln!(out)?;
                }
            }
            writeln!(
                out,
                "  {}: max |delta| = {}",
                if cmp.agree { "agree" } else { "DISAGREE" },
                fmt_f64(cmp.max_delta)
            )
        }
    }
}

fn cmd_compare(a: EvalArgs) -> Outcome {
    let c = &a.common;
    let (params, tol) = setup(c)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut code = 0;
    for &q in quantities(c.derivative) {
        let cmp = compare_one(&params, a.beta, &tol, q);
        write_comparison(&mut out, c.format, &cmp)?;
        if !cmp.agree {
            code = 2;
        }
    }
    out.flush()?;
    Ok(code)
}

fn cmd_classify(a: ClassifyArgs) -> Outcome {
    let tol = tolerance(a.tol, a.max_terms)?;
    let class = classify_at(a.alpha, a.beta, &tol)?;
    let exponent = estimate_exponent(&class.cf).ok();
    let (kind, p, q) = match class.kind {
        AlphaKind::Rational { p, q } => ("rational", Some(p), Some(q)),
        AlphaKind::Irrational { .. } => ("irrational", None, None),
        AlphaKind::IllConditioned { .. } => ("ill-conditioned", None, None),
    };
    let recommended = match class.kind {
        AlphaKind::Rational { .. } => "rational (g'), quadrature (g)",
        AlphaKind::Irrational { .. } => "series",
        AlphaKind::IllConditioned { .. } => "quadrature",
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match a.format {
        Format::Json => {
            let v = json!({
                "alpha": a.alpha,
                "beta": a.beta,
                "class": kind,
                "p": p,
                "q": q,
                "quotients": class.cf.quotients,
                "convergents": class.cf.convergents,
                "terminated": class.cf.terminated,
                "exponent_estimate": exponent,
                "recommended": recommended,
            });
            writeln!(out, "{v}")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["index", "quotient", "p", "q"]).map_err(Fail::usage)?;
            for (i, (a_i, (p, q))) in class.cf.quotients.iter().zip(&class.cf.convergents).enumerate() {
                w.write_record([i.to_string(), a_i.to_string(), p.to_string(), q.to_string()])
                    .map_err(Fail::usage)?;
            }
            out.write_all(&w.into_inner().map_err(|e| Fail::usage(e.to_string()))?)?;
        }
        Format::Text => {
            writeln!(out, "alpha        {}", fmt_f64(a.alpha))?;
            writeln!(out, "quotients    {:?}", class.cf.quotients)?;
            let conv: Vec<String> = class.cf.convergents.iter().map(|(p, q)| format!("{p}/{q}")).collect();
            writeln!(out, "convergents  {}", conv.join(", "))?;
            match exponent {
                Some(e) => writeln!(out, "exponent     {}", fmt_f64(e))?,
                None => writeln!(out, "exponent     -")?,
            }
            match (p, q) {
                (Some(p), Some(q)) => writeln!(out, "class        rational {p}/{q}")?,
                _ => writeln!(out, "class        {kind} (at beta = {})", fmt_f64(a.beta))?,
            }
            writeln!(out, "recommended  {recommended}")?;
        }
    }
    out.flush()?;
    Ok(0)
}

fn cmd_selftest(a: SelftestArgs) -> Outcome {
    tolerance(a.tol, Tolerance::default().max_terms)?;
    let checks = selftest::run(&a.only, a.tol);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut failed = 0;
    let mut csv_out = (a.format == Format::Csv).then(|| csv::Writer::from_writer(Vec::new()));
    if let Some(w) = csv_out.as_mut() {
        w.write_record(["group", "check", "residual", "allowed", "result"]).map_err(Fail::usage)?;
    }
    for c in &checks {
        let result = if c.passed() { "PASS" } else { "FAIL" };
        if !c.passed() {
            failed += 1;
        }
        let residual = c.residual.map(fmt_f64).unwrap_or_else(|| "error".into());
        match a.format {
            Format::Json => {
                let v = json!({
                    "group": c.group.as_str(),
                    "check": c.name,
                    "residual": c.residual,
                    "allowed": c.allowed,
                    "result": result,
                    "note": c.note,
                });
                writeln!(out, "{v}")?;
            }
            Format::Csv => {
                let w = csv_out.as_mut().expect("created above");
                w.write_record([c.group.as_str(), &c.name, &residual, &fmt_f64(c.allowed), result])
                    .map_err(Fail::usage)?;
            }
            Format::Text => {
                writeln!(
                    out,
                    "[{result}] {:<10} {:<48} residual {:<24} allowed {}{}",
                    c.group.as_str(),
                    c.name,
                    residual,
                    fmt_f64(c.allowed),
                    if c.note.is_empty() { String::new() } else { format!("  ({})", c.note) }
                )?;
            }
        }
    }
    if let Some(w) = csv_out {
        out.write_all(&w.into_inner().map_err(|e| Fail::usage(e.to_string()))?)?;
    }
    if a.format == Format::Text {
        writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len())?;
    }
    out.flush()?;
    Ok(if failed == 0 { 0 } else { 2 })
}
