//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use recdiv_core::ffzeros::{self, StressConfig};
use recdiv_core::numeric::relative_spread;
use recdiv_core::poly::{kronecker_statistic, IntPolynomial};
use recdiv_core::quotient::{self, CountMode, QuotientProblem};
use recdiv_core::recurrence::{CompanionRecurrence, Recurrence};
use recdiv_core::sieve::{self, SieveSystem};
use recdiv_core::wirsing::{self, MultFnSpec, Rule};

use crate::exec::RayonExecutor;
use crate::formats::{
    parse_count, parse_poly, poly_json, read_json, FfInstanceJson, Int, ProblemJson,
    RecurrenceJson, SieveSystemJson,
};
use crate::report::{render_csv, render_json, Metadata, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Help or version text; not an error for the exit code.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Input { path: String, message: String },
    #[error(transparent)]
    Core(#[from] recdiv_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 0 for help, 1 for domain and runtime errors, 2 for usage and input
    /// errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Help(_) => "help",
            CliError::Usage(_) => "usage",
            CliError::Input { .. } => "input",
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }

    /// `{"error": {"kind": .., "message": ..}, "exit_code": ..}`
    pub fn record(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.to_string() },
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "recdiv", version, about = "Divisibility sets of linear recurrence quotients")]
struct Cli {
    /// Worker threads; defaults to the available parallelism. Output does
    /// not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count n <= x with F(n)/G(n) in Z[1/S].
    CountQuotients(CountArgs),
    /// Split the members into sieve survivors and sieve hits.
    Split(SplitArgs),
    /// Weighted zero counts sum eta_f(p) log p / p against h log t.
    Kronecker(KroneckerArgs),
    /// Exact residue-sieve counts against x (log y / log x)^h.
    SieveCount(SieveArgs),
    /// Partial sums of a multiplicative function and its Euler constant.
    Wirsing(WirsingArgs),
    /// Zeros of sparse exponential sums over finite fields.
    Ffzeros(FfArgs),
    /// Prime tuples: admissibility, counts, singular series, quotient family.
    Hl(HlArgs),
    /// Primes where a value has multiplicative order below p^(1/4).
    OrderFilter(OrderArgs),
    /// Rerun the command recorded in a report header.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).multiple(false)))]
struct ProblemArgs {
    /// F = Fibonacci numbers.
    #[arg(long, group = "source")]
    fib: bool,
    /// F = Lucas sequence U(n+2) = a U(n+1) + b U(n), U(0) = 0, U(1) = 1.
    #[arg(long, group = "source", value_name = "A,B", value_parser = parse_pair, allow_hyphen_values = true)]
    lucas: Option<(i64, i64)>,
    /// The prime-tuple family for this tuple (G is implied).
    #[arg(long = "hl-family", group = "source", value_name = "TUPLE", value_delimiter = ',', value_parser = parse_count)]
    hl_family: Option<Vec<u64>>,
    /// Problem file {"F": .., "G": .., "invert_primes": ..}.
    #[arg(long, group = "source", value_name = "FILE")]
    problem: Option<PathBuf>,
    /// Recurrence file {"companion": ..} or {"exppoly": ..}.
    #[arg(long, group = "source", value_name = "FILE")]
    recurrence: Option<PathBuf>,
    /// G as `x`, a coefficient list low-to-high, or a JSON array (default x).
    #[arg(long, value_parser = parse_poly, allow_hyphen_values = true)]
    g: Option<IntPolynomial>,
    /// Primes inverted in the ring Z[1/S].
    #[arg(long = "invert-primes", value_delimiter = ',')]
    invert_primes: Vec<u64>,
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected A,B, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("invalid integer {t:?}"));
    Ok((p(a)?, p(b)?))
}

impl ProblemArgs {
    fn resolve(&self) -> Result<QuotientProblem, CliError> {
        let g = || self.g.clone().unwrap_or_else(IntPolynomial::x);
        if let Some(tuple) = &self.hl_family {
            if self.g.is_some() || !self.invert_primes.is_empty() {
                return Err(usage("--hl-family fixes G and S"));
            }
            return Ok(quotient::hl_family(tuple)?);
        }
        if let Some(path) = &self.problem {
            if self.g.is_some() || !self.invert_primes.is_empty() {
                return Err(usage("--problem already gives G and the inverted primes"));
            }
            let p: ProblemJson = read_json(path)?;
            let g = p.g.to_poly().map_err(|message| CliError::Input {
                path: path.display().to_string(),
                message,
            })?;
            return Ok(QuotientProblem::new(p.f.to_recurrence()?, g, &p.invert_primes)?);
        }
        let f: Recurrence = if self.fib {
            CompanionRecurrence::fibonacci().into()
        } else if let Some((a, b)) = self.lucas {
            CompanionRecurrence::lucas(a, b)?.into()
        } else if let Some(path) = &self.recurrence {
            read_json::<RecurrenceJson>(path)?.to_recurrence()?
        } else {
            return Err(usage("no problem given"));
        };
        Ok(QuotientProblem::new(f, g(), &self.invert_primes)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Exact up to 10^5, modular filter above.
    Auto,
    Exact,
    Filter,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_count)]
    x: Vec<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Report counts only.
    #[arg(long)]
    no_members: bool,
    /// Seed for the member sample beyond the size cap.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SplitArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_parser = parse_count)]
    x: u64,
    /// Override the lower end of the sieve range.
    #[arg(long, value_parser = parse_count, requires = "z")]
    y: Option<u64>,
    /// Override the upper end of the sieve range.
    #[arg(long, value_parser = parse_count, requires = "y")]
    z: Option<u64>,
}

#[derive(Args, Debug)]
struct KroneckerArgs {
    #[arg(long, value_parser = parse_poly, allow_hyphen_values = true)]
    poly: IntPolynomial,
    #[arg(long, value_delimiter = ',', value_parser = parse_count, default_value = "1e4,1e5,1e6")]
    samples: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ZArg {
    Fixed(u64),
    /// `floor(sqrt(x))` for each x.
    Sqrt,
}

fn parse_z(s: &str) -> Result<ZArg, String> {
    if s == "sqrt" {
        Ok(ZArg::Sqrt)
    } else {
        parse_count(s).map(ZArg::Fixed)
    }
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("sieve_source").required(true).multiple(false)))]
struct SieveArgs {
    /// The polynomial whose zeros form Omega_p.
    #[arg(long, group = "sieve_source", value_parser = parse_poly, allow_hyphen_values = true)]
    gtilde: Option<IntPolynomial>,
    /// A saved sieve system.
    #[arg(long, group = "sieve_source", value_name = "FILE")]
    system: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    roots: Vec<i64>,
    #[arg(long = "invert-primes", value_delimiter = ',')]
    invert_primes: Vec<u64>,
    #[arg(long, value_parser = parse_count)]
    y: Option<u64>,
    /// A number, or `sqrt` for floor(sqrt(x)) at each x.
    #[arg(long, value_parser = parse_z)]
    z: Option<ZArg>,
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_count)]
    x: Vec<u64>,
    /// Save the (last) system as JSON.
    #[arg(long, value_name = "FILE")]
    save_system: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WirsingArgs {
    /// unit, mu2_over_n, squarefree:K, geometric:K or omega_system:FILE.
    #[arg(long, default_value = "mu2_over_n")]
    function: String,
    /// Override the mean-value exponent.
    #[arg(long)]
    h: Option<u32>,
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_count)]
    x: Vec<u64>,
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    truncation: u64,
    /// Check the von Mangoldt identity for all n up to this bound.
    #[arg(long, value_parser = parse_count)]
    identity_check: Option<u64>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("ff_source").required(true).multiple(false)))]
struct FfArgs {
    /// Random instances against the bound.
    #[arg(long, group = "ff_source")]
    stress: bool,
    /// One instance file {"p", "k", "c", "a"}.
    #[arg(long, group = "ff_source", value_name = "FILE")]
    instance: Option<PathBuf>,
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "q-max", value_parser = parse_count, default_value = "4096")]
    q_max: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    r: Vec<usize>,
}

#[derive(Args, Debug)]
struct HlArgs {
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_count)]
    tuple: Vec<u64>,
    /// Thresholds for tuple counts and family counts.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    x: Vec<u64>,
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    truncation: u64,
}

#[derive(Args, Debug)]
struct OrderArgs {
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    roots: Vec<i64>,
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_count)]
    x: Vec<u64>,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    /// A JSON or CSV report.
    #[arg(long, value_name = "FILE")]
    from: PathBuf,
}

/// Drops `--threads` and `--out` with their values.
fn recorded_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if a == "--threads" || a == "--out" {
            skip = true;
            continue;
        }
        if a.starts_with("--threads=") || a.starts_with("--out=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

struct Ctx {
    exec: RayonExecutor,
    format: Format,
    args: Vec<String>,
}

impl Ctx {
    fn emit<T: Serialize>(&self, command: &str, seed: Option<u64>, result: &T, table: Table) -> Vec<u8> {
        let meta = Metadata::new(command, self.args.clone(), seed);
        match self.format {
            Format::Json => render_json(&meta, result),
            Format::Csv => render_csv(&meta, &table),
        }
    }
}

/// Runs one command; `argv` excludes the program name. Returns the report
/// bytes without writing them anywhere.
pub fn run(argv: &[String]) -> Result<Vec<u8>, CliError> {
    execute(argv, None).map(|(bytes, _)| bytes)
}

fn execute(argv: &[String], threads: Option<usize>) -> Result<(Vec<u8>, Option<PathBuf>), CliError> {
    let cli = Cli::try_parse_from(std::iter::once("recdiv".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| match e.kind() {
            clap::error::ErrorKind::DisplayHelp
            | clap::error::ErrorKind::DisplayVersion
            | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                CliError::Help(e.to_string())
            }
            _ => CliError::Usage(e.to_string().trim_end().to_string()),
        })?;
    let threads = threads.or(cli.threads);
    if threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    let ctx = Ctx {
        exec: RayonExecutor::new(threads).map_err(|e| CliError::Io(e.to_string()))?,
        format: cli.format,
        args: recorded_args(argv),
    };
    let bytes = match &cli.command {
        Command::CountQuotients(a) => count_quotients(&ctx, a)?,
        Command::Split(a) => split(&ctx, a)?,
        Command::Kronecker(a) => kronecker(&ctx, a)?,
        Command::SieveCount(a) => sieve_count(&ctx, a)?,
        Command::Wirsing(a) => wirsing_cmd(&ctx, a)?,
        Command::Ffzeros(a) => ffzeros_cmd(&ctx, a)?,
        Command::Hl(a) => hl(&ctx, a)?,
        Command::OrderFilter(a) => order_filter(&ctx, a)?,
        Command::Replay(a) => return replay(a, threads).map(|b| (b, cli.out.clone())),
    };
    Ok((bytes, cli.out.clone()))
}

/// Entry point for the binary: writes the report, or an error record on
/// standard error, and returns the exit code.
pub fn run_main(argv: impl IntoIterator<Item = OsString>) -> i32 {
    let argv: Vec<String> = argv
        .into_iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(&argv, None) {
        Ok((bytes, out)) => {
            let written = match out {
                Some(path) => std::fs::write(&path, &bytes),
                None => std::io::stdout().write_all(&bytes),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let err = CliError::Io(e.to_string());
                    eprintln!("{}", err.record());
                    err.exit_code()
                }
            }
        }
        Err(CliError::Help(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}

fn replay(a: &ReplayArgs, threads: Option<usize>) -> Result<Vec<u8>, CliError> {
    let bytes = std::fs::read(&a.from).map_err(|e| CliError::Input {
        path: a.from.display().to_string(),
        message: e.to_string(),
    })?;
    let meta = crate::report::read_metadata(&bytes).map_err(|message| CliError::Input {
        path: a.from.display().to_string(),
        message,
    })?;
    if meta.tool != "recdiv" || meta.command == "replay" {
        return Err(usage("the report was not written by a recdiv subcommand"));
    }
    if meta.schema_version != crate::report::SCHEMA_VERSION {
        return Err(usage(format!("unsupported schema version {}", meta.schema_version)));
    }
    execute(&meta.args, threads).map(|(b, _)| b)
}

#[derive(Serialize)]
struct ProblemOut {
    #[serde(rename = "F")]
    f: RecurrenceJson,
    #[serde(rename = "G")]
    g: Vec<Int>,
    invert_primes: Vec<u64>,
    #[serde(rename = "G_normalized")]
    g_normalized: Vec<Int>,
    h: usize,
    r: Option<usize>,
    caveats: Vec<&'static str>,
}

fn problem_out(p: &QuotientProblem) -> ProblemOut {
    ProblemOut {
        f: RecurrenceJson::from_recurrence(p.f()),
        g: poly_json(p.g()),
        invert_primes: p.invert_primes().to_vec(),
        g_normalized: poly_json(p.g_normalized()),
        h: p.h(),
        r: p.r(),
        caveats: p
            .caveats()
            .iter()
            .map(|c| match c {
                quotient::Caveat::CompanionOnly => "companion_only",
                quotient::Caveat::ConstantG => "constant_g",
            })
            .collect(),
    }
}

fn mode_name(m: CountMode) -> &'static str {
    match m {
        CountMode::Exact => "exact",
        CountMode::ModularFilter => "modular_filter",
    }
}

#[derive(Serialize)]
struct CountRow {
    x: u64,
    mode: &'static str,
    count: u64,
    h: usize,
    bound_shape: Option<f64>,
    ratio: Option<f64>,
    members: Option<Vec<u64>>,
    sample: Option<Vec<u64>>,
}

fn count_quotients(ctx: &Ctx, a: &CountArgs) -> Result<Vec<u8>, CliError> {
    let prob = a.problem.resolve()?;
    let mut rows = Vec::new();
    let mut table = Table::new(vec!["x", "mode", "count", "bound_shape", "ratio"]);
    for &x in &a.x {
        let mode = match a.mode {
            ModeArg::Exact => CountMode::Exact,
            ModeArg::Filter => CountMode::ModularFilter,
            ModeArg::Auto if x <= 100_000 => CountMode::Exact,
            ModeArg::Auto => CountMode::ModularFilter,
        };
        let r = quotient::count_n(&ctx.exec, &prob, x, mode, !a.no_members, a.seed)?;
        table.row(vec![
            x.into(),
            mode_name(mode).into(),
            r.count.into(),
            r.bound_shape.into(),
            r.ratio.into(),
        ]);
        rows.push(CountRow {
            x,
            mode: mode_name(mode),
            count: r.count,
            h: r.h,
            bound_shape: r.bound_shape,
            ratio: r.ratio,
            members: r.members,
            sample: r.sample,
        });
    }
    #[derive(Serialize)]
    struct Out {
        problem: ProblemOut,
        rows: Vec<CountRow>,
    }
    let out = Out {
        problem: problem_out(&prob),
        rows,
    };
    Ok(ctx.emit("count-quotients", Some(a.seed), &out, table))
}

fn split(ctx: &Ctx, a: &SplitArgs) -> Result<Vec<u8>, CliError> {
    let prob = a.problem.resolve()?;
    let range = a.y.zip(a.z);
    let r = quotient::split_diagnostic(&ctx.exec, &prob, a.x, range)?;
    #[derive(Serialize)]
    struct Row {
        p: u64,
        omega_size: usize,
        order: u64,
        hits: u64,
        explicit_bound: u64,
        shape: f64,
    }
    #[derive(Serialize)]
    struct Out {
        problem: ProblemOut,
        x: u64,
        y: u64,
        z: u64,
        r: usize,
        h: usize,
        overridden: bool,
        reachable: bool,
        count: u64,
        n1: u64,
        n2: u64,
        excluded_primes: usize,
        fitted_constant: f64,
        a_priori_constant: f64,
        explicit_ok: bool,
        dominated: bool,
        histogram: Vec<Row>,
    }
    let mut table = Table::new(vec!["p", "omega_size", "order", "hits", "explicit_bound", "shape"]);
    for (k, v) in [("x", r.x), ("y", r.y), ("z", r.z), ("count", r.count), ("n1", r.n1), ("n2", r.n2)] {
        table.note(k, v);
    }
    table.note("fitted_constant", r.fitted_constant);
    table.note("a_priori_constant", r.a_priori_constant);
    table.note("explicit_ok", if r.explicit_ok { "true" } else { "false" });
    table.note("dominated", if r.dominated { "true" } else { "false" });
    let histogram = r
        .histogram
        .iter()
        .map(|h| {
            table.row(vec![
                h.p.into(),
                h.omega_size.into(),
                h.order.into(),
                h.hits.into(),
                h.explicit_bound.into(),
                h.shape.into(),
            ]);
            Row {
                p: h.p,
                omega_size: h.omega_size,
                order: h.order,
                hits: h.hits,
                explicit_bound: h.explicit_bound,
                shape: h.shape,
            }
        })
        .collect();
    let out = Out {
        problem: problem_out(&prob),
        x: r.x,
        y: r.y,
        z: r.z,
        r: r.r,
        h: r.h,
        overridden: r.overridden,
        reachable: r.reachable,
        count: r.count,
        n1: r.n1,
        n2: r.n2,
        excluded_primes: r.excluded_primes,
        fitted_constant: r.fitted_constant,
        a_priori_constant: r.a_priori_constant,
        explicit_ok: r.explicit_ok,
        dominated: r.dominated,
        histogram,
    };
    Ok(ctx.emit("split", None, &out, table))
}

fn kronecker(ctx: &Ctx, a: &KroneckerArgs) -> Result<Vec<u8>, CliError> {
    let r = kronecker_statistic(&ctx.exec, &a.poly, &a.samples)?;
    #[derive(Serialize)]
    struct Row {
        t: u64,
        statistic: f64,
        residual: f64,
    }
    #[derive(Serialize)]
    struct Out {
        poly: Vec<Int>,
        h: usize,
        slope: Option<f64>,
        slope_error: Option<f64>,
        max_residual: f64,
        vanishing_primes: Vec<u64>,
        rows: Vec<Row>,
    }
    let mut table = Table::new(vec!["t", "statistic", "residual"]);
    table.note("h", r.h);
    table.note("slope", r.slope);
    table.note("slope_error", r.slope_error);
    table.note("max_residual", r.max_residual);
    let rows = r
        .rows
        .iter()
        .map(|row| {
            table.row(vec![row.t.into(), row.statistic.into(), row.residual.into()]);
            Row {
                t: row.t,
                statistic: row.statistic,
                residual: row.residual,
            }
        })
        .collect();
    let out = Out {
        poly: poly_json(&a.poly),
        h: r.h,
        slope: r.slope,
        slope_error: r.slope_error,
        max_residual: r.max_residual,
        vanishing_primes: r.vanishing_primes,
        rows,
    };
    Ok(ctx.emit("kronecker", None, &out, table))
}

fn sieve_count(ctx: &Ctx, a: &SieveArgs) -> Result<Vec<u8>, CliError> {
    let loaded = match &a.system {
        Some(path) => {
            if a.y.is_some() || a.z.is_some() || !a.roots.is_empty() || !a.invert_primes.is_empty() {
                return Err(usage("--system already fixes y, z, roots and inverted primes"));
            }
            Some(read_json::<SieveSystemJson>(path)?.to_system()?)
        }
        None => None,
    };
    let y = match &loaded {
        Some(s) => s.y,
        None => a.y.ok_or_else(|| usage("--y is required with --gtilde"))?,
    };
    let z_arg = match &loaded {
        Some(s) => ZArg::Fixed(s.z),
        None => a.z.ok_or_else(|| usage("--z is required with --gtilde"))?,
    };
    let build = |z: u64| -> Result<SieveSystem, CliError> {
        match &loaded {
            Some(s) => Ok(s.clone()),
            None => Ok(SieveSystem::build(
                a.gtilde.as_ref().expect("one source is required"),
                &a.roots,
                &a.invert_primes,
                y,
                z,
            )?),
        }
    };
    #[derive(Serialize)]
    struct Row {
        x: u64,
        z: u64,
        sieving_primes: usize,
        excluded_primes: usize,
        count: u64,
        bound_shape: Option<f64>,
        fitted_constant: Option<f64>,
    }
    let mut table = Table::new(vec!["x", "z", "count", "bound_shape", "fitted_constant"]);
    let mut rows: Vec<Row> = Vec::new();
    let mut last: Option<SieveSystem> = None;
    for &x in &a.x {
        let z = match z_arg {
            ZArg::Fixed(z) => z,
            ZArg::Sqrt => num_integer_sqrt(x),
        };
        let system = match last.take() {
            Some(s) if s.z == z => s,
            _ => build(z)?,
        };
        let h = system.h()? as u32;
        let count = sieve::sieved_count(&ctx.exec, x, &system)?;
        let shape = sieve::sieve_bound_shape(x as f64, y as f64, h).ok();
        let fitted = shape.map(|s| count as f64 / s);
        table.row(vec![x.into(), z.into(), count.into(), shape.into(), fitted.into()]);
        rows.push(Row {
            x,
            z,
            sieving_primes: system.primes.len(),
            excluded_primes: system.exclusions.len(),
            count,
            bound_shape: shape,
            fitted_constant: fitted,
        });
        last = Some(system);
    }
    let fitted: Option<Vec<f64>> = rows.iter().map(|r| r.fitted_constant).collect();
    let spread = fitted.and_then(|f| relative_spread(&f));
    let system = last.expect("--x is nonempty");
    if let Some(path) = &a.save_system {
        let json = serde_json::to_vec_pretty(&SieveSystemJson::from_system(&system)).unwrap();
        std::fs::write(path, json).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let h = system.h()?;
    table.note("y", y);
    table.note("h", h);
    table.note("fitted_spread", spread);
    #[derive(Serialize)]
    struct Out {
        gtilde: Vec<Int>,
        roots: Vec<i64>,
        invert_primes: Vec<u64>,
        y: u64,
        h: usize,
        rows: Vec<Row>,
        fitted_spread: Option<f64>,
    }
    let out = Out {
        gtilde: poly_json(&system.gtilde),
        roots: system.roots.clone(),
        invert_primes: system.invert_primes.clone(),
        y,
        h,
        rows,
        fitted_spread: spread,
    };
    Ok(ctx.emit("sieve-count", None, &out, table))
}

fn num_integer_sqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Catalog of multiplicative functions.
fn parse_function(name: &str) -> Result<MultFnSpec, CliError> {
    let bad = || usage(format!("unknown function {name:?}"));
    let numerator = |s: &str| s.parse::<i64>().map_err(|_| bad());
    Ok(match name.split_once(':') {
        None if name == "unit" => MultFnSpec::new(Rule::Unit, 0),
        None if name == "mu2_over_n" => MultFnSpec::mu2_over_n(),
        Some(("squarefree", k)) => {
            let k = numerator(k)?;
            MultFnSpec::new(Rule::SquarefreeReciprocal { numerator: k }, k.max(0) as u32)
        }
        Some(("geometric", k)) => {
            let k = numerator(k)?;
            MultFnSpec::new(Rule::GeometricReciprocal { numerator: k }, k.max(0) as u32)
        }
        Some(("omega_system", file)) => {
            let system = read_json::<SieveSystemJson>(Path::new(file))?.to_system()?;
            sieve::gy_from_system(&system)?
        }
        _ => return Err(bad()),
    })
}

fn wirsing_cmd(ctx: &Ctx, a: &WirsingArgs) -> Result<Vec<u8>, CliError> {
    let mut g = parse_function(&a.function)?;
    if let Some(h) = a.h {
        g.h = h;
    }
    let sums = wirsing::wirsing_sums(&ctx.exec, &g, &a.x)?;
    let cg = wirsing::euler_constant_cg(&g, g.h, a.truncation)?;
    let identity = match a.identity_check {
        Some(n) => Some(wirsing::lambda_identity_error(&g, n)?),
        None => None,
    };
    #[derive(Serialize)]
    struct Row {
        x: u64,
        sum: f64,
        abs_sum: f64,
        ratio: f64,
        ratio_over_cg: f64,
    }
    #[derive(Serialize)]
    struct Constant {
        value: f64,
        tail_bound: f64,
        truncation: u64,
    }
    #[derive(Serialize)]
    struct Identity {
        n_max: u64,
        max_relative_error: f64,
    }
    #[derive(Serialize)]
    struct Out {
        function: String,
        h: u32,
        rows: Vec<Row>,
        ratio_spread: Option<f64>,
        euler_constant: Constant,
        identity_check: Option<Identity>,
    }
    let mut table = Table::new(vec!["x", "sum", "abs_sum", "ratio", "ratio_over_cg"]);
    table.note("h", g.h as u64);
    table.note("c_g", cg.value);
    table.note("c_g_tail_bound", cg.tail_bound);
    table.note("truncation", cg.truncation);
    if let (Some(n), Some(e)) = (a.identity_check, identity) {
        table.note("identity_n_max", n);
        table.note("identity_max_error", e);
    }
    let rows: Vec<Row> = sums
        .iter()
        .map(|r| {
            let rel = r.ratio / cg.value;
            table.row(vec![r.x.into(), r.sum.into(), r.abs_sum.into(), r.ratio.into(), rel.into()]);
            Row {
                x: r.x,
                sum: r.sum,
                abs_sum: r.abs_sum,
                ratio: r.ratio,
                ratio_over_cg: rel,
            }
        })
        .collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let out = Out {
        function: a.function.clone(),
        h: g.h,
        ratio_spread: relative_spread(&ratios),
        rows,
        euler_constant: Constant {
            value: cg.value,
            tail_bound: cg.tail_bound,
            truncation: cg.truncation,
        },
        identity_check: a.identity_check.zip(identity).map(|(n_max, e)| Identity {
            n_max,
            max_relative_error: e,
        }),
    };
    Ok(ctx.emit("wirsing", None, &out, table))
}

fn ffzeros_cmd(ctx: &Ctx, a: &FfArgs) -> Result<Vec<u8>, CliError> {
    if let Some(path) = &a.instance {
        let j: FfInstanceJson = read_json(path)?;
        let inst = j.to_instance()?;
        let r = ffzeros::analyze(&ctx.exec, &inst)?;
        let proof = (r.r >= 1).then(|| {
            ffzeros::proof_form_bound(r.q, inst.field().characteristic(), r.r)
        });
        #[derive(Serialize)]
        struct Out {
            instance: FfInstanceJson,
            modulus: Vec<u64>,
            q: u64,
            r: usize,
            count: u64,
            n: Option<u64>,
            bound: Option<f64>,
            ratio: Option<f64>,
            proof_form_bound: Option<f64>,
        }
        let mut table = Table::new(vec!["q", "r", "count", "n", "bound", "ratio"]);
        table.row(vec![r.q.into(), r.r.into(), r.count.into(), r.n.into(), r.bound.into(), r.ratio.into()]);
        let out = Out {
            modulus: inst.field().modulus().to_vec(),
            instance: j,
            q: r.q,
            r: r.r,
            count: r.count,
            n: r.n,
            bound: r.bound,
            ratio: r.ratio,
            proof_form_bound: proof,
        };
        return Ok(ctx.emit("ffzeros", None, &out, table));
    }
    let config = StressConfig {
        trials: a.trials,
        seed: a.seed,
        q_max: a.q_max,
        r_values: a.r.clone(),
    };
    let rep = ffzeros::stress_lemma(&ctx.exec, &config)?;
    #[derive(Serialize)]
    struct Row {
        r: usize,
        trials: u64,
        max_ratio: f64,
        max_count: u64,
    }
    #[derive(Serialize)]
    struct Worst {
        trial: u64,
        instance: serde_json::Value,
    }
    #[derive(Serialize)]
    struct Out {
        trials: u64,
        q_max: u64,
        violations: u64,
        max_ratio: f64,
        worst: Option<Worst>,
        per_r: Vec<Row>,
    }
    let mut table = Table::new(vec!["r", "trials", "max_ratio", "max_count"]);
    table.note("trials", rep.trials);
    table.note("violations", rep.violations);
    table.note("max_ratio", rep.max_ratio);
    let per_r = rep
        .per_r
        .iter()
        .map(|row| {
            table.row(vec![row.r.into(), row.trials.into(), row.max_ratio.into(), row.max_count.into()]);
            Row {
                r: row.r,
                trials: row.trials,
                max_ratio: row.max_ratio,
                max_count: row.max_count,
            }
        })
        .collect();
    let out = Out {
        trials: rep.trials,
        q_max: a.q_max,
        violations: rep.violations,
        max_ratio: rep.max_ratio,
        worst: rep.worst.as_ref().map(|(t, s)| Worst {
            trial: *t,
            instance: serde_json::from_str(s).unwrap_or(serde_json::Value::String(s.clone())),
        }),
        per_r,
    };
    Ok(ctx.emit("ffzeros", Some(a.seed), &out, table))
}

fn hl(ctx: &Ctx, a: &HlArgs) -> Result<Vec<u8>, CliError> {
    let adm = quotient::admissible(&a.tuple)?;
    let series = if adm.admissible {
        Some(quotient::singular_series(&a.tuple, a.truncation)?)
    } else {
        None
    };
    let family = if adm.admissible && a.tuple.len() <= quotient::MAX_HL_H {
        Some(quotient::hl_family(&a.tuple)?)
    } else {
        None
    };
    #[derive(Serialize)]
    struct Row {
        x: u64,
        hl_count: u64,
        family_count: Option<u64>,
        hardy_littlewood_estimate: Option<f64>,
    }
    let mut table = Table::new(vec!["x", "hl_count", "family_count", "hardy_littlewood_estimate"]);
    let h = a.tuple.len() as f64;
    let mut rows = Vec::new();
    for &x in &a.x {
        let count = quotient::hl_count(&a.tuple, x)?;
        let family_count = match &family {
            Some(p) => Some(quotient::count_n(&ctx.exec, p, x, CountMode::ModularFilter, false, 0)?.count),
            None => None,
        };
        let estimate = series
            .as_ref()
            .filter(|_| x >= 3)
            .map(|s| s.value * x as f64 / (x as f64).ln().powf(h));
        table.row(vec![x.into(), count.into(), family_count.into(), estimate.into()]);
        rows.push(Row {
            x,
            hl_count: count,
            family_count,
            hardy_littlewood_estimate: estimate,
        });
    }
    table.note("admissible", if adm.admissible { "true" } else { "false" });
    table.note("witness", adm.witness);
    table.note("singular_series", series.as_ref().map(|s| s.value));
    #[derive(Serialize)]
    struct Series {
        value: f64,
        tail_bound: f64,
        truncation: u64,
    }
    #[derive(Serialize)]
    struct Out {
        tuple: Vec<u64>,
        admissible: bool,
        witness: Option<u64>,
        singular_series: Option<Series>,
        family: Option<ProblemOut>,
        rows: Vec<Row>,
    }
    let out = Out {
        tuple: a.tuple.clone(),
        admissible: adm.admissible,
        witness: adm.witness,
        singular_series: series.map(|s| Series {
            value: s.value,
            tail_bound: s.tail_bound,
            truncation: s.truncation,
        }),
        family: family.as_ref().map(problem_out),
        rows,
    };
    Ok(ctx.emit("hl", None, &out, table))
}

fn order_filter(ctx: &Ctx, a: &OrderArgs) -> Result<Vec<u8>, CliError> {
    #[derive(Serialize)]
    struct Row {
        x: u64,
        count: u64,
        ratio: f64,
    }
    let mut table = Table::new(vec!["x", "count", "ratio"]);
    let mut rows = Vec::new();
    for &x in &a.x {
        let r = sieve::count_excluded_small_order(&ctx.exec, &a.roots, x)?;
        table.row(vec![x.into(), r.count.into(), r.ratio.into()]);
        rows.push(Row {
            x,
            count: r.count,
            ratio: r.ratio,
        });
    }
    #[derive(Serialize)]
    struct Out {
        roots: Vec<i64>,
        rows: Vec<Row>,
    }
    let out = Out {
        roots: a.roots.clone(),
        rows,
    };
    Ok(ctx.emit("order-filter", None, &out, table))
}
