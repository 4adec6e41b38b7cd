//! Command-line front end. Every command writes one record per line, as JSON
//! (the default) or CSV.

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::definiteness::{classify_region, is_nonneg_all_n, is_positive_all_n_with, DEFAULT_D0_SCAN};
use crate::determinant::{det_d_closed, det_d_eigenproduct, det_d_recurrence, DetResult, Method};
use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::ma1::{
    d0_points, in_domain, in_domain_d1, in_domain_d2, induced_params, l_n, limit_l, near_closure_d0,
    CumulantValue, Ma1Point, CLOSURE_TOL,
};
use crate::matrix::{build_d, PentaParams};
use crate::oracle::oracle_det;

/// Largest order accepted by the dense oracle.
pub const DENSE_MAX: usize = 5000;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandResult {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub method: Option<String>,
    pub case_id: Option<String>,
    pub wall_time_ns: u64,
}

impl CommandResult {
    fn new(command: &str) -> Self {
        CommandResult {
            command: command.to_string(),
            inputs: Map::new(),
            outputs: Map::new(),
            method: None,
            case_id: None,
            wall_time_ns: 0,
        }
    }

    fn input(mut self, key: &str, v: Value) -> Self {
        self.inputs.insert(key.to_string(), v);
        self
    }

    fn output(&mut self, key: &str, v: Value) {
        self.outputs.insert(key.to_string(), v);
    }

    /// Column name and cell text, nested objects flattened with `.`.
    pub fn flatten(&self) -> Vec<(String, String)> {
        let mut cols = vec![
            ("command".to_string(), self.command.clone()),
            ("method".to_string(), self.method.clone().unwrap_or_default()),
            ("case_id".to_string(), self.case_id.clone().unwrap_or_default()),
            ("wall_time_ns".to_string(), self.wall_time_ns.to_string()),
        ];
        flatten_into("inputs", &Value::Object(self.inputs.clone()), &mut cols);
        flatten_into("outputs", &Value::Object(self.outputs.clone()), &mut cols);
        cols
    }
}

fn flatten_into(prefix: &str, v: &Value, cols: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten_into(&format!("{prefix}.{k}"), x, cols);
            }
        }
        Value::String(s) => cols.push((prefix.to_string(), s.clone())),
        Value::Null => cols.push((prefix.to_string(), String::new())),
        other => cols.push((prefix.to_string(), other.to_string())),
    }
}

/// Finite floats as JSON numbers (shortest round-trip form); non-finite
/// values as the strings `inf`, `-inf` and `nan`.
pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::String("nan".to_string()),
        None if x > 0.0 => Value::String("inf".to_string()),
        None => Value::String("-inf".to_string()),
    }
}

pub fn log_scalar_json(v: LogScalar) -> Value {
    let (mantissa, exponent) = match v.mantissa_exponent10() {
        Some((m, e)) => (num(m), json!(e)),
        None => (num(0.0), json!(0)),
    };
    json!({
        "value": v.to_string(),
        "sign": v.sign(),
        "log_abs": num(v.log_abs()),
        "log10_abs": num(v.log10_abs()),
        "mantissa10": mantissa,
        "exponent10": exponent,
    })
}

fn cumulant_json(v: CumulantValue) -> Value {
    match v {
        CumulantValue::Finite(x) => num(x),
        CumulantValue::Infinite => Value::String("inf".to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "pentadiag", version, about = "Determinants and definiteness of pentadiagonal matrices with perturbed corners")]
pub struct Cli {
    /// Emit CSV instead of JSON lines.
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Determinant of D_n.
    Det(DetArgs),
    /// Definiteness domain of (p, q, r, s).
    Classify(ClassifyArgs),
    /// MA(1) cumulant generating function and its limit.
    Ma1(Ma1Args),
    /// Timing and reproduction runs.
    Bench(BenchArgs),
    /// Membership grids and D0 curve samples for plotting.
    Domain(DomainArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub p: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub s: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<PentaParams> {
        PentaParams::new(self.p, self.q, self.r, self.s)
    }

    fn json(&self) -> [(&'static str, Value); 4] {
        [("p", num(self.p)), ("q", num(self.q)), ("r", num(self.r)), ("s", num(self.s))]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetMethod {
    Closed,
    Recurrence,
    Eigen,
    Oracle,
    All,
}

#[derive(Debug, Args)]
pub struct DetArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Matrix order, at least 3; integral scientific notation such as 5e8 is accepted.
    #[arg(long, value_parser = parse_order)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: DetMethod,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Largest order scanned for null eigenvalues.
    #[arg(long, default_value_t = DEFAULT_D0_SCAN)]
    pub n_max: u64,
}

#[derive(Debug, Args)]
pub struct Ma1Args {
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub l1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub l2: f64,
    /// Finite order; without it the limit is reported.
    #[arg(long, value_parser = parse_order)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    /// Determinants of D_n at (p, q, r, s) = (5, -1, 1, 2).
    #[value(name = "1")]
    Det,
    /// L_n at phi = 1/3, lambda = (-1, -1).
    #[value(name = "2")]
    Cumulant,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "1")]
    pub table: Table,
    /// Comma-separated orders; defaults to the table's own.
    #[arg(long, value_delimiter = ',', value_parser = parse_order)]
    pub sizes: Vec<usize>,
    /// Timed repetitions after one warm-up; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Largest order timed with the recurrence.
    #[arg(long, value_parser = parse_order, default_value = "5000000")]
    pub recurrence_max: usize,
    /// Largest order timed with the dense oracle.
    #[arg(long, value_parser = parse_order, default_value = "2000")]
    pub dense_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Plane {
    /// (lambda1, lambda2) at fixed phi.
    Lambda,
    /// (s, q) at each of the given p values.
    Pqs,
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    #[arg(long, value_enum, default_value = "lambda")]
    pub plane: Plane,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0 / 3.0)]
    pub phi: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = -2.0)]
    pub x_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    pub x_max: f64,
    #[arg(long, default_value_t = 51)]
    pub x_steps: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = -3.0)]
    pub y_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 2.0)]
    pub y_max: f64,
    #[arg(long, default_value_t = 51)]
    pub y_steps: usize,
    /// Order of the D0 sample points (lambda plane); 0 disables them.
    #[arg(long, default_value_t = 200)]
    pub d0_n: usize,
    /// p values for the pqs plane.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    pub p_values: Vec<f64>,
}

/// Non-negative integer, also in integral scientific form (`5e8`).
fn parse_order(s: &str) -> std::result::Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= 1e15 => Ok(x as usize),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

fn elapsed_ns(t: Instant) -> u64 {
    t.elapsed().as_nanos() as u64
}

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    v[v.len() / 2]
}

/// Median wall time of `reps` timed calls after one warm-up, with the
/// warm-up result.
fn time_median<T, F: FnMut() -> Result<T>>(reps: usize, mut f: F) -> Result<(T, u64)> {
    let out = f()?;
    let mut times = Vec::with_capacity(reps.max(1));
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        f()?;
        times.push(elapsed_ns(t));
    }
    Ok((out, median(times)))
}

fn det_by(params: &PentaParams, n: usize, method: DetMethod) -> Result<DetResult> {
    match method {
        DetMethod::Closed => det_d_closed(params, n),
        DetMethod::Recurrence => Ok(det_d_recurrence(params, n)),
        DetMethod::Eigen => det_d_eigenproduct(params, n),
        DetMethod::Oracle => {
            if n > DENSE_MAX {
                return Err(Error::InvalidArgument(format!(
                    "the dense oracle is limited to n <= {DENSE_MAX}"
                )));
            }
            Ok(DetResult {
                value: oracle_det(&build_d(params, n)?),
                method: Method::Oracle,
                case_id: None,
            })
        }
        DetMethod::All => unreachable!("dispatched by the caller"),
    }
}

pub fn cmd_det(args: &DetArgs) -> Result<CommandResult> {
    let t = Instant::now();
    let params = args.params.params()?;
    if args.n < 3 {
        return Err(Error::OrderTooSmall {
            min: 3,
            got: args.n as u64,
        });
    }
    let mut rec = CommandResult::new("det").input("n", json!(args.n));
    for (k, v) in args.params.json() {
        rec = rec.input(k, v);
    }
    let n = args.n;
    if args.method == DetMethod::All {
        let mut methods = vec![DetMethod::Closed, DetMethod::Recurrence];
        if params.has_r_eq_p_minus_s() {
            methods.push(DetMethod::Eigen);
        }
        if n <= DENSE_MAX {
            methods.push(DetMethod::Oracle);
        }
        let mut results = Vec::new();
        let mut values = Map::new();
        for m in methods {
            let r = det_by(&params, n, m)?;
            values.insert(r.method.as_str().to_string(), log_scalar_json(r.value));
            results.push(r);
        }
        let mut worst: f64 = 0.0;
        for (i, a) in results.iter().enumerate() {
            for b in &results[i + 1..] {
                worst = worst.max(a.value.rel_value_diff(b.value));
            }
        }
        rec.case_id = results[0].case_id.map(|c| c.to_string());
        rec.output("determinant", log_scalar_json(results[0].value));
        rec.output("methods", Value::Object(values));
        rec.output("max_discrepancy", num(worst));
        rec.method = Some("all".to_string());
    } else {
        let r = det_by(&params, n, args.method)?;
        rec.case_id = r.case_id.map(|c| c.to_string());
        rec.method = Some(r.method.as_str().to_string());
        rec.output("determinant", log_scalar_json(r.value));
    }
    rec.wall_time_ns = elapsed_ns(t);
    Ok(rec)
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<CommandResult> {
    let t = Instant::now();
    let params = args.params.params()?;
    let mut rec = CommandResult::new("classify");
    for (k, v) in args.params.json() {
        rec = rec.input(k, v);
    }
    rec = rec.input("n_max", json!(args.n_max));
    let report = is_nonneg_all_n(&params)?;
    let (p, _, r, s) = params.parts();
    let mut region = report.region;
    let positive = if params.has_r_eq_p_minus_s() {
        let pos = is_positive_all_n_with(&params, args.n_max)?;
        region = pos.region;
        Value::Bool(pos.positive_all_n)
    } else {
        Value::Null
    };
    rec.output("region", json!(region.tag.as_str()));
    rec.output(
        "witness",
        match region.witness {
            Some(w) => json!({ "k": w.k, "n": w.n }),
            None => Value::Null,
        },
    );
    rec.output("admissible", json!(classify_region(&params)?.is_admissible()));
    rec.output("nonneg_all_n", json!(report.nonneg_all_n));
    rec.output("positive_all_n", positive);
    rec.output("requires_r_ge_p_minus_s", json!(report.requires_r_ge_p_minus_s));
    rec.output("r_ge_p_minus_s", json!(r >= p - s));
    rec.wall_time_ns = elapsed_ns(t);
    Ok(rec)
}

pub fn cmd_ma1(args: &Ma1Args) -> Result<CommandResult> {
    let t = Instant::now();
    let pt = Ma1Point::new(args.phi, args.l1, args.l2)?;
    let params = induced_params(&pt)?;
    let mut rec = CommandResult::new("ma1")
        .input("phi", num(args.phi))
        .input("l1", num(args.l1))
        .input("l2", num(args.l2));
    if let Some(n) = args.n {
        rec = rec.input("n", json!(n));
    }
    let (p, q, r, s) = params.parts();
    rec.output("p", num(p));
    rec.output("q", num(q));
    rec.output("r", num(r));
    rec.output("s", num(s));
    rec.output("in_d1", json!(in_domain_d1(&pt)));
    rec.output("in_d2", json!(in_domain_d2(&pt)));
    rec.output("near_closure_d0", json!(near_closure_d0(&pt, CLOSURE_TOL)));
    match args.n {
        Some(n) => {
            rec.output("l_n", cumulant_json(l_n(&pt, n)?));
            rec.method = Some(Method::ClosedForm.as_str().to_string());
        }
        None => rec.output("limit", cumulant_json(limit_l(&pt)?)),
    }
    rec.wall_time_ns = elapsed_ns(t);
    Ok(rec)
}

pub fn cmd_bench(args: &BenchArgs, emit: &mut dyn FnMut(CommandResult) -> Result<()>) -> Result<()> {
    match args.table {
        Table::Det => {
            let params = PentaParams::new(5.0, -1.0, 1.0, 2.0)?;
            let sizes = if args.sizes.is_empty() {
                vec![5, 5_000_000, 50_000_000, 500_000_000]
            } else {
                args.sizes.clone()
            };
            for n in sizes {
                if n < 3 {
                    return Err(Error::OrderTooSmall {
                        min: 3,
                        got: n as u64,
                    });
                }
                let t = Instant::now();
                let mut rec = CommandResult::new("bench")
                    .input("table", json!(1))
                    .input("n", json!(n))
                    .input("reps", json!(args.reps));
                let (r, closed_ns) = time_median(args.reps, || det_d_closed(&params, n))?;
                rec.case_id = r.case_id.map(|c| c.to_string());
                rec.method = Some(r.method.as_str().to_string());
                rec.output("determinant", log_scalar_json(r.value));
                rec.output("closed_ns", json!(closed_ns));
                let mut rec_ns = Value::Null;
                if n <= args.recurrence_max {
                    let (_, ns) = time_median(args.reps, || Ok(det_d_recurrence(&params, n)))?;
                    rec_ns = json!(ns);
                }
                rec.output("recurrence_ns", rec_ns);
                let (mut dense_ns, mut speedup) = (Value::Null, Value::Null);
                if n <= args.dense_max.min(DENSE_MAX) {
                    let (_, ns) = time_median(args.reps, || {
                        Ok(oracle_det(&build_d(&params, n)?))
                    })?;
                    dense_ns = json!(ns);
                    speedup = num(ns as f64 / closed_ns.max(1) as f64);
                }
                rec.output("dense_ns", dense_ns);
                rec.output("speedup_vs_dense", speedup);
                rec.wall_time_ns = elapsed_ns(t);
                emit(rec)?;
            }
        }
        Table::Cumulant => {
            let pt = Ma1Point::new(1.0 / 3.0, -1.0, -1.0)?;
            let sizes = if args.sizes.is_empty() {
                vec![5, 10, 50, 100, 500]
            } else {
                args.sizes.clone()
            };
            let limit = limit_l(&pt)?;
            for n in sizes {
                let t = Instant::now();
                let mut rec = CommandResult::new("bench")
                    .input("table", json!(2))
                    .input("n", json!(n))
                    .input("reps", json!(args.reps));
                let (v, ns) = time_median(args.reps, || l_n(&pt, n))?;
                rec.method = Some(Method::ClosedForm.as_str().to_string());
                rec.output("l_n", cumulant_json(v));
                rec.output("limit", cumulant_json(limit));
                rec.output(
                    "abs_gap",
                    match (v.value(), limit.value()) {
                        (Some(a), Some(b)) => num((a - b).abs()),
                        _ => Value::Null,
                    },
                );
                rec.output("closed_ns", json!(ns));
                rec.wall_time_ns = elapsed_ns(t);
                emit(rec)?;
            }
        }
    }
    Ok(())
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
fn axis(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

pub fn cmd_domain(args: &DomainArgs, emit: &mut dyn FnMut(CommandResult) -> Result<()>) -> Result<()> {
    let xs = axis(args.x_min, args.x_max, args.x_steps);
    let ys = axis(args.y_min, args.y_max, args.y_steps);
    match args.plane {
        Plane::Lambda => {
            for (j, &l2) in ys.iter().enumerate() {
                for (i, &l1) in xs.iter().enumerate() {
                    let t = Instant::now();
                    let pt = Ma1Point::new(args.phi, l1, l2)?;
                    let mut rec = CommandResult::new("domain")
                        .input("phi", num(args.phi))
                        .input("i", json!(i))
                        .input("j", json!(j))
                        .input("l1", num(l1))
                        .input("l2", num(l2));
                    rec.output("kind", json!("grid"));
                    rec.output("in_d1", json!(in_domain_d1(&pt)));
                    rec.output("in_d2", json!(in_domain_d2(&pt)));
                    rec.output("in_domain", json!(in_domain(&pt)));
                    rec.output("near_closure_d0", json!(near_closure_d0(&pt, CLOSURE_TOL)));
                    rec.wall_time_ns = elapsed_ns(t);
                    emit(rec)?;
                }
            }
            if !xs.is_empty() && !ys.is_empty() {
                for (k, (l1, l2)) in d0_points(args.phi, args.d0_n).into_iter().enumerate() {
                    let mut rec = CommandResult::new("domain")
                        .input("phi", num(args.phi))
                        .input("n", json!(args.d0_n))
                        .input("k", json!(k + 1));
                    rec.output("kind", json!("d0"));
                    rec.output("l1", num(l1));
                    rec.output("l2", num(l2));
                    emit(rec)?;
                }
            }
        }
        Plane::Pqs => {
            for &p in &args.p_values {
                for (j, &q) in ys.iter().enumerate() {
                    for (i, &s) in xs.iter().enumerate() {
                        let t = Instant::now();
                        let params = PentaParams::new(p, q, p - s, s)?;
                        let mut rec = CommandResult::new("domain")
                            .input("p", num(p))
                            .input("i", json!(i))
                            .input("j", json!(j))
                            .input("s", num(s))
                            .input("q", num(q));
                        let region = classify_region(&params)?;
                        rec.output("kind", json!("region"));
                        rec.output("region", json!(region.tag.as_str()));
                        rec.output("admissible", json!(region.is_admissible()));
                        rec.wall_time_ns = elapsed_ns(t);
                        emit(rec)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Writes records as JSON lines or CSV. CSV repeats the header whenever
/// the column set changes.
pub struct Sink<W: Write> {
    out: W,
    csv: bool,
    header: Option<Vec<String>>,
}

impl<W: Write> Sink<W> {
    pub fn new(out: W, csv: bool) -> Self {
        Sink {
            out,
            csv,
            header: None,
        }
    }

    pub fn write(&mut self, rec: &CommandResult) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidArgument(format!("write failed: {e}"));
        if !self.csv {
            let line = serde_json::to_string(rec)
                .map_err(|e| Error::Consistency(format!("serialization failed: {e}")))?;
            return writeln!(self.out, "{line}").map_err(io);
        }
        let cols = rec.flatten();
        let names: Vec<String> = cols.iter().map(|c| c.0.clone()).collect();
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Consistency(format!("csv failed: {e}"));
        if self.header.as_ref() != Some(&names) {
            w.write_record(&names).map_err(csv_err)?;
            self.header = Some(names);
        }
        w.write_record(cols.iter().map(|c| c.1.as_str())).map_err(csv_err)?;
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Consistency(format!("csv failed: {e}")))?;
        self.out.write_all(&bytes).map_err(io)
    }
}

/// Runs a parsed command line, streaming records into `out`.
pub fn run<W: Write>(cli: &Cli, out: W) -> Result<()> {
    let mut sink = Sink::new(out, cli.csv);
    let mut emit = |rec: CommandResult| sink.write(&rec);
    match &cli.command {
        Command::Det(a) => emit(cmd_det(a)?),
        Command::Classify(a) => emit(cmd_classify(a)?),
        Command::Ma1(a) => emit(cmd_ma1(a)?),
        Command::Bench(a) => cmd_bench(a, &mut emit),
        Command::Domain(a) => cmd_domain(a, &mut emit),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    if err.is_internal() {
        EXIT_INTERNAL
    } else {
        EXIT_INPUT
    }
}

/// Stdout that remembers whether the reader went away.
struct Pipe<'a, W: Write> {
    inner: W,
    closed: &'a std::cell::Cell<bool>,
}

impl<W: Write> Write for Pipe<'_, W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.inner.write(buf).inspect_err(|e| self.note(e))
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush().inspect_err(|e| self.note(e))
    }
}

impl<W: Write> Pipe<'_, W> {
    fn note(&self, e: &std::io::Error) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            self.closed.set(true);
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let closed = std::cell::Cell::new(false);
    let out = Pipe {
        inner: std::io::stdout().lock(),
        closed: &closed,
    };
    match run(&cli, out) {
        Ok(()) => ExitCode::SUCCESS,
        // `pentadiag ... | head` closes the pipe early; that is not a failure.
        Err(_) if closed.get() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
