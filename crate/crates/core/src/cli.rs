//! The `sumsq` command line.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive};
use serde_json::{json, Value};

use crate::arith::Factorization;
use crate::error::{Error, Result};
use crate::qseries::{cm_form, eisenstein_e, eisenstein_e1, eisenstein_e2, eta12_2z, theta_series, TruncatedSeries};
use crate::repnum::{r12, r_bruteforce, r_elementary, R12Context, RepQuery};
use crate::verify::{
    a3_table, elementarity_with_order, verify_range, ElementarityCertificate, Witness, DEFAULT_CHECK_ORDER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Largest m for which the series methods are run.
pub const SERIES_MAX_M: u64 = 20_000;
/// Largest n for which theta_n is expanded.
pub const SERIES_MAX_N: u32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "sumsq",
    version,
    about = "Exact counts of representations as sums of squares"
)]
pub struct Cli {
    /// Machine-readable output; errors go to stderr as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress notes on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute r_n(m).
    Compute {
        n: u32,
        /// Decimal integer, or b^e.
        m: String,
        /// Prime factorization of m, e.g. "2^3,5^1".
        #[arg(long)]
        factorization: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Formula)]
        method: Method,
    },
    /// Print a truncated q-expansion.
    Qexp {
        #[arg(value_enum)]
        form: Form,
        /// n for theta, the weight k for E, E1, E2 and C; unused for eta12.
        param: Option<u32>,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Decide elementarity of theta_n with a rechecked certificate.
    Verify {
        /// Inclusive range lo..hi; odd n are skipped.
        #[arg(long, conflicts_with = "n", required_unless_present = "n")]
        range: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        /// Number of q-coefficients the decomposition is checked against.
        #[arg(long, default_value_t = DEFAULT_CHECK_ORDER)]
        order: usize,
    },
    /// The table of a_3 = r_n(3) - c_3 for even n.
    Table {
        #[arg(long, default_value = "4..20")]
        range: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Time the methods on the same inputs after checking they agree.
    Bench {
        n: u32,
        /// Comma-separated list, e.g. "10^3,10^6,10^9".
        ms: String,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Method::Formula, Method::Series, Method::Brute])]
        methods: Vec<Method>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Formula,
    Series,
    Brute,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Formula => "formula",
            Method::Series => "series",
            Method::Brute => "brute",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Form {
    Theta,
    #[value(name = "E")]
    E,
    #[value(name = "E1")]
    E1,
    #[value(name = "E2")]
    E2,
    #[value(name = "C")]
    C,
    Eta12,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

/// Parses a non-negative integer written in decimal or as `b^e`.
pub fn parse_integer(s: &str) -> Result<BigInt> {
    let s = s.trim();
    let bad = || Error::Parse(format!("expected an integer or b^e, got {s:?}"));
    match s.split_once('^') {
        Some((b, e)) => {
            let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            Ok(Pow::pow(b, e))
        }
        None => BigInt::from_str(s).map_err(|_| bad()),
    }
}

/// Parses `lo..hi` (inclusive).
pub fn parse_range(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Parse(format!("expected a range lo..hi, got {s:?}"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(Error::InvalidParameter(format!("empty range {lo}..{hi}")));
    }
    Ok((lo, hi))
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("n must be even and positive, got {n}")));
    }
    Ok(())
}

fn small_m(m: &BigInt, limit: u64, what: &str) -> Result<usize> {
    m.to_u64()
        .filter(|&v| v <= limit)
        .map(|v| v as usize)
        .ok_or_else(|| Error::Guard(format!("{what} needs 0 <= m <= {limit}, got {m}")))
}

/// r_n(m) by one method. The factorization, if any, is only used by `Formula`.
pub fn compute(n: u32, m: &BigInt, factorization: Option<Factorization>, method: Method) -> Result<BigInt> {
    check_n(n)?;
    match method {
        Method::Formula if n <= 10 => {
            let q = match factorization {
                Some(f) => RepQuery::with_factorization(n, m.clone(), f)?,
                None => RepQuery::new(n, m.clone()),
            };
            r_elementary(&q)
        }
        Method::Formula if n == 12 => {
            let idx = small_m(m, SERIES_MAX_M, "r_12 (which expands eta^12(2z))")?;
            r12(m, &R12Context::new(idx)?)
        }
        Method::Formula => Err(Error::InvalidParameter(format!(
            "no formula for n = {n}; formula requires n <= 12 (use --method series or brute)"
        ))),
        Method::Series => {
            if n > SERIES_MAX_N {
                return Err(Error::Guard(format!("series method limited to n <= {SERIES_MAX_N}")));
            }
            let idx = small_m(m, SERIES_MAX_M, "series method")?;
            Ok(theta_series(n, idx)?
                .integer_coeff(idx)?
                .expect("theta has integer coefficients"))
        }
        Method::Brute => r_bruteforce(n, m),
    }
}

/// Parses the arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        quiet: cli.quiet,
        out,
        err,
    };
    match dispatch(&cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            ctx.error(&e);
            EXIT_USAGE
        }
    }
}

struct Ctx<'a> {
    json: bool,
    quiet: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn print(&mut self, s: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{s}");
    }

    fn print_json(&mut self, v: &Value) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
    }

    fn note(&mut self, s: impl std::fmt::Display) {
        if !self.quiet {
            let _ = writeln!(self.err, "note: {s}");
        }
    }

    fn error(&mut self, e: &Error) {
        if self.json {
            let _ = writeln!(self.err, "{}", json!({ "error": e.kind(), "message": e.to_string() }));
        } else {
            let _ = writeln!(self.err, "error: {e}");
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<i32> {
    match cmd {
        Command::Compute {
            n,
            m,
            factorization,
            method,
        } => cmd_compute(ctx, *n, m, factorization.as_deref(), *method),
        Command::Qexp { form, param, order } => cmd_qexp(ctx, *form, *param, *order),
        Command::Verify { range, n, order } => {
            let (lo, hi) = match (range, n) {
                (_, Some(n)) => {
                    check_n(*n)?;
                    (*n, *n)
                }
                (Some(r), None) => parse_range(r)?,
                (None, None) => unreachable!("clap requires one of --range, --n"),
            };
            cmd_verify(ctx, lo, hi, *order, n.is_some())
        }
        Command::Table { range, format } => {
            let (lo, hi) = parse_range(range)?;
            cmd_table(ctx, lo, hi, *format)
        }
        Command::Bench { n, ms, methods } => cmd_bench(ctx, *n, ms, methods),
    }
}

fn cmd_compute(ctx: &mut Ctx, n: u32, m: &str, factorization: Option<&str>, method: Method) -> Result<i32> {
    let m = parse_integer(m)?;
    let f = factorization.map(Factorization::from_str).transpose()?;
    if let Some(f) = &f {
        if f.value() != m {
            return Err(Error::InvalidFactorization(format!("{f} does not multiply out to {m}")));
        }
    }
    let source = match (&f, method) {
        (Some(_), _) => "supplied",
        (None, Method::Formula) if n <= 10 && m > BigInt::from(0) => "computed",
        _ => "not_used",
    };
    let start = Instant::now();
    let value = compute(n, &m, f, method)?;
    let elapsed = start.elapsed();
    if ctx.json {
        ctx.print_json(&json!({
            "n": n,
            "m": m.to_string(),
            "value": value.to_string(),
            "method": method.name(),
            "factorization": source,
            "elapsed_us": elapsed.as_micros() as u64,
        }));
    } else {
        ctx.print(value);
    }
    Ok(EXIT_OK)
}

fn build_series(form: Form, param: Option<u32>, order: usize) -> Result<(TruncatedSeries, Option<u32>)> {
    let need = |what: &str| param.ok_or_else(|| Error::InvalidParameter(format!("{what} needs a parameter")));
    Ok(match form {
        Form::Theta => (theta_series(need("theta")?, order)?, param),
        Form::E => (eisenstein_e(need("E")?, order)?, param),
        Form::E1 => (eisenstein_e1(need("E1")?, order)?, param),
        Form::E2 => (eisenstein_e2(need("E2")?, order)?, param),
        Form::C => (cm_form(need("C")?, order)?, param),
        Form::Eta12 => (eta12_2z(order)?, None),
    })
}

fn form_name(form: Form) -> &'static str {
    match form {
        Form::Theta => "theta",
        Form::E => "E",
        Form::E1 => "E1",
        Form::E2 => "E2",
        Form::C => "C",
        Form::Eta12 => "eta12",
    }
}

fn cmd_qexp(ctx: &mut Ctx, form: Form, param: Option<u32>, order: usize) -> Result<i32> {
    if order > SERIES_MAX_M as usize {
        return Err(Error::Guard(format!("order limited to {SERIES_MAX_M}")));
    }
    let (series, param) = build_series(form, param, order)?;
    if ctx.json {
        let s = series.to_json();
        ctx.print_json(&json!({
            "form": form_name(form),
            "param": param,
            "order": s.order,
            "coeffs": s.coeffs,
        }));
    } else {
        ctx.print(series.pretty());
    }
    Ok(EXIT_OK)
}

fn witness_text(cert: &ElementarityCertificate) -> String {
    let mut parts = Vec::new();
    for w in &cert.witnesses {
        match w {
            Witness::Decomposition { labels, coefficients } => {
                let terms: Vec<String> = coefficients
                    .iter()
                    .zip(labels)
                    .map(|(c, l)| {
                        if l.contains(' ') {
                            format!("({c})*({l})")
                        } else {
                            format!("({c})*{l}")
                        }
                    })
                    .collect();
                parts.push(format!("theta = {} to q^{}", terms.join(" + "), cert.checked_order));
            }
            Witness::Determinant(d) => parts.push(format!("det({}) = {}", d.kind.label(), d.value)),
            Witness::A3(row) => parts.push(format!("a3 = {}", row.a3)),
        }
    }
    parts.join(", ")
}

fn skip_note(ctx: &mut Ctx, lo: u32, hi: u32) {
    let odd: Vec<String> = (lo..=hi).filter(|n| n % 2 == 1).map(|n| n.to_string()).collect();
    if !odd.is_empty() {
        ctx.note(format!("skipping odd n: {}", odd.join(", ")));
    }
}

fn cmd_verify(ctx: &mut Ctx, lo: u32, hi: u32, order: usize, single: bool) -> Result<i32> {
    skip_note(ctx, lo, hi);
    let results = if single {
        vec![(lo, elementarity_with_order(lo, order))]
    } else {
        verify_range(lo, hi, order)
    };
    let mut code = EXIT_OK;
    let mut certs = Vec::new();
    for (n, r) in results {
        match r {
            Ok(cert) => certs.push(cert),
            Err(e @ Error::CertificateCheck(_)) => {
                ctx.error(&e);
                code = EXIT_VERIFY;
            }
            Err(e) => {
                ctx.note(format!("n = {n}: {e}"));
                ctx.error(&e);
                return Ok(EXIT_USAGE);
            }
        }
    }
    if ctx.json {
        let values: Vec<Value> = certs
            .iter()
            .map(|c| serde_json::to_value(c.to_json()).expect("serializable"))
            .collect();
        let v = if single && values.len() == 1 {
            values.into_iter().next().unwrap()
        } else {
            Value::Array(values)
        };
        ctx.print_json(&v);
    } else {
        for c in &certs {
            ctx.print(format!("n = {:<3} {:<15} {}", c.n, c.verdict.as_str(), witness_text(c)));
        }
    }
    Ok(code)
}

fn cmd_table(ctx: &mut Ctx, lo: u32, hi: u32, format: Format) -> Result<i32> {
    skip_note(ctx, lo, hi);
    let rows = a3_table(lo, hi)?;
    if ctx.json {
        let v: Vec<Value> = rows
            .iter()
            .map(|r| json!({ "n": r.n, "c3": r.c3.to_string(), "r3": r.r3.to_string(), "a3": r.a3.to_string() }))
            .collect();
        ctx.print_json(&Value::Array(v));
        return Ok(EXIT_OK);
    }
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| [r.n.to_string(), r.c3.to_string(), r.r3.to_string(), r.a3.to_string()])
        .collect();
    match format {
        Format::Csv => {
            ctx.print("n,c3,r3,a3");
            for c in &cells {
                ctx.print(c.join(","));
            }
        }
        Format::Text => {
            let header = ["n", "c3", "r_n(3)", "a3"];
            let w: Vec<usize> = (0..4)
                .map(|j| {
                    cells
                        .iter()
                        .map(|c| c[j].len())
                        .chain([header[j].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |c: [&str; 4]| {
                format!(
                    "{:>w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
                    c[0],
                    c[1],
                    c[2],
                    c[3],
                    w0 = w[0],
                    w1 = w[1],
                    w2 = w[2],
                    w3 = w[3]
                )
            };
            ctx.print(line(header));
            for c in &cells {
                ctx.print(line([&c[0], &c[1], &c[2], &c[3]]));
            }
        }
    }
    Ok(EXIT_OK)
}

/// Splits a bench m-list such as `[10^3, 10^6]` or `25,100`.
pub fn parse_m_list(s: &str) -> Result<Vec<BigInt>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    let ms: Vec<BigInt> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_integer)
        .collect::<Result<_>>()?;
    if ms.is_empty() {
        return Err(Error::Parse("empty m list".into()));
    }
    Ok(ms)
}

fn cmd_bench(ctx: &mut Ctx, n: u32, ms: &str, methods: &[Method]) -> Result<i32> {
    check_n(n)?;
    let ms = parse_m_list(ms)?;
    let mut rows = Vec::new();
    for m in &ms {
        let mut agreed: Option<(Method, BigInt)> = None;
        for &method in methods {
            let start = Instant::now();
            match compute(n, m, None, method) {
                Ok(v) => {
                    let us = start.elapsed().as_micros() as u64;
                    if let Some((first, prev)) = &agreed {
                        if *prev != v {
                            ctx.error(&Error::CertificateCheck(format!(
                                "r_{n}({m}): {} gives {prev}, {} gives {v}",
                                first.name(),
                                method.name()
                            )));
                            return Ok(EXIT_VERIFY);
                        }
                    } else {
                        agreed = Some((method, v.clone()));
                    }
                    rows.push((m.clone(), method, Ok((v, us))));
                }
                Err(e @ (Error::Guard(_) | Error::InvalidParameter(_) | Error::FactorizationRequired(_))) => {
                    rows.push((m.clone(), method, Err(e.to_string())));
                }
                Err(e) => return Err(e),
            }
        }
    }
    if ctx.json {
        let v: Vec<Value> = rows
            .iter()
            .map(|(m, method, r)| match r {
                Ok((v, us)) => {
                    json!({ "m": m.to_string(), "method": method.name(), "value": v.to_string(), "elapsed_us": us })
                }
                Err(reason) => json!({ "m": m.to_string(), "method": method.name(), "skipped": reason }),
            })
            .collect();
        ctx.print_json(&json!({ "n": n, "rows": v }));
    } else {
        ctx.print(format!(
            "{:>12}  {:<8}  {:>24}  {:>12}",
            "m", "method", "r_n(m)", "time (us)"
        ));
        for (m, method, r) in &rows {
            match r {
                Ok((v, us)) => ctx.print(format!("{:>12}  {:<8}  {:>24}  {:>12}", m, method.name(), v, us)),
                Err(reason) => ctx.print(format!("{:>12}  {:<8}  skipped: {reason}", m, method.name())),
            }
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("sumsq").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parse_helpers() {
        assert_eq!(parse_integer("10^3").unwrap(), BigInt::from(1000));
        assert_eq!(parse_integer(" 42 ").unwrap(), BigInt::from(42));
        assert!(parse_integer("x").is_err());
        assert_eq!(parse_range("4..20").unwrap(), (4, 20));
        assert_eq!(parse_range("4..=20").unwrap(), (4, 20));
        assert!(parse_range("20..4").is_err());
        assert_eq!(parse_m_list("[10^3, 10^6]").unwrap().len(), 2);
        assert!(parse_m_list("[]").is_err());
    }

    #[test]
    fn compute_examples() {
        assert_eq!(run_args(&["compute", "4", "2"]), (0, "24\n".into(), String::new()));
        assert_eq!(run_args(&["compute", "12", "3"]).1, "1760\n");
        assert_eq!(run_args(&["compute", "10", "1"]).1, "20\n");
        for method in ["series", "brute"] {
            assert_eq!(run_args(&["compute", "8", "2", "--method", method]).1, "112\n");
        }
    }

    #[test]
    fn compute_errors() {
        assert_eq!(run_args(&["compute", "5", "2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["compute", "14", "2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["compute", "4", "10^30"]).0, EXIT_USAGE);
        assert_eq!(
            run_args(&["compute", "4", "6", "--factorization", "2^1,5^1"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_args(&["compute", "4", "6", "--factorization", "2^1,3^1"]).1, "96\n");
        let (code, _, err) = run_args(&["--json", "compute", "20", "2", "--method", "brute"]);
        assert_eq!(code, EXIT_USAGE);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "guard_violation");
    }

    #[test]
    fn qexp_examples() {
        assert_eq!(run_args(&["qexp", "eta12", "--order", "3"]).1, "q - 12*q^3 + O(q^4)\n");
        assert_eq!(
            run_args(&["qexp", "E", "6", "--order", "2"]).1,
            "-1/504 + q + 33*q^2 + O(q^3)\n"
        );
        assert_eq!(run_args(&["qexp", "C", "7"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["qexp", "theta"]).0, EXIT_USAGE);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&[]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }
}
