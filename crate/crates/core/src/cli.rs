//! The `kronrank` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse error,
//! 3 validation error, 4 resource limit.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bench;
use crate::closed_form::{closed_form_det, BreakdownReport};
use crate::error::{Error, Result};
use crate::expansion;
use crate::generator::{random_instance, Profile};
use crate::instance::KronRankOneInstance;
use crate::io::{instance_to_json, instance_to_string, parse_instance};
use crate::oracle::dense_cap_from_env;
use crate::permutation::{tuple_count, DEFAULT_TUPLE_LIMIT};
use crate::scalar::{Scalar, ScalarMode};
use crate::verify::{verify_instance, Corruption, VerificationRecord};
use crate::BigRational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Verification { .. } => EXIT_VERIFY_FAILED,
        Error::Parse(_) => EXIT_PARSE,
        Error::Shape(_) | Error::Bounds { .. } | Error::NonFinite { .. } => EXIT_VALIDATION,
        Error::Resource { .. } => EXIT_RESOURCE,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "kronrank",
    version,
    about = "Determinants of sums of Kronecker products with rank-one factors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate det(G) from its factors and print the breakdown.
    Compute(ComputeArgs),
    /// Compare the closed form with the dense oracle.
    Verify(VerifyArgs),
    /// Replay the permutation expansion checks.
    Expand(ExpandArgs),
    /// Write a generated instance as JSON.
    Generate(GenerateArgs),
    /// Time closed form against dense evaluation.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Instance JSON file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ScalarMode::Float)]
    pub mode: ScalarMode,
    #[arg(long)]
    pub json: bool,
    /// Include the parsed instance in the JSON output.
    #[arg(long)]
    pub echo: bool,
}

/// Inclusive range `a-b`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRange {
    pub lo: usize,
    pub hi: usize,
}

impl std::str::FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("invalid size {v:?}"));
        let (lo, hi) = match s.split_once('-') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => (parse(s)?, parse(s)?),
        };
        if lo == 0 || lo > hi {
            return Err(format!("invalid size range {s:?}"));
        }
        Ok(SizeRange { lo, hi })
    }
}

impl SizeRange {
    fn values(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorSpec {
    /// Number of terms N (value or inclusive range `a-b`).
    #[arg(long = "n", default_value = "2")]
    pub n: SizeRange,
    /// Size F of each A (value or inclusive range `a-b`).
    #[arg(long = "f", default_value = "2")]
    pub f: SizeRange,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, value_enum, default_value_t = Profile::Uniform)]
    pub profile: Profile,
}

impl GeneratorSpec {
    fn cases(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.n.values().flat_map(move |n| {
            self.f
                .values()
                .flat_map(move |f| (self.seed..self.seed.saturating_add(self.seeds)).map(move |s| (n, f, s)))
        })
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Instance JSON file; when absent, instances come from the generator flags.
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub spec: GeneratorSpec,
    #[arg(long, value_enum, default_value_t = ScalarMode::Float)]
    pub mode: ScalarMode,
    /// Largest NF for the dense oracle (default: $KRONRANK_DENSE_CAP or 4096).
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub json: bool,
    /// Emit every record, not just failures.
    #[arg(long)]
    pub all_records: bool,
    /// Debug: add DELTA (default 1) to entry ROW,COL of the materialized G.
    #[arg(long, value_name = "ROW,COL[,DELTA]", value_parser = parse_corruption)]
    pub debug_corrupt: Option<Corruption>,
}

fn parse_corruption(s: &str) -> std::result::Result<Corruption, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let idx = |v: &str| v.parse::<usize>().map_err(|_| format!("invalid index {v:?}"));
    match parts.as_slice() {
        [r, c] => Ok(Corruption {
            row: idx(r)?,
            col: idx(c)?,
            delta: 1.0,
        }),
        [r, c, d] => Ok(Corruption {
            row: idx(r)?,
            col: idx(c)?,
            delta: d.parse().map_err(|_| format!("invalid delta {d:?}"))?,
        }),
        _ => Err("expected ROW,COL or ROW,COL,DELTA".into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Detb,
    Cdiag,
    Sumdiag,
    Ypower,
    /// Sum of determinants of all column selections against det(G).
    Columns,
    FullLeibniz,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Detb,
        Check::Cdiag,
        Check::Sumdiag,
        Check::Ypower,
        Check::Columns,
        Check::FullLeibniz,
    ];
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Instance JSON file; when absent, the instance comes from the generator flags.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "n", default_value_t = 2)]
    pub n: usize,
    #[arg(long = "f", default_value_t = 2)]
    pub f: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Profile::IntegerSmall)]
    pub profile: Profile,
    /// Checks to run (default: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Vec<Check>,
    #[arg(long, value_enum, default_value_t = ScalarMode::Exact)]
    pub mode: ScalarMode,
    /// Largest number of permutation tuples to enumerate.
    #[arg(long, default_value_t = DEFAULT_TUPLE_LIMIT)]
    pub limit: u128,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long = "f")]
    pub f: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Profile::Uniform)]
    pub profile: Profile,
    #[arg(long, value_enum, default_value_t = ScalarMode::Float)]
    pub mode: ScalarMode,
    /// Output file (default: stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// One grid point: `S` means N = F = S, `NxF` sets both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint(pub usize, pub usize);

impl std::str::FromStr for GridPoint {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("invalid size {v:?}"));
        let (n, f) = match s.split_once(['x', 'X']) {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => (parse(s)?, parse(s)?),
        };
        if n == 0 || f == 0 {
            return Err("sizes must be positive".into());
        }
        Ok(GridPoint(n, f))
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Grid points, `S` (N = F = S) or `NxF`.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
    pub sizes: Vec<GridPoint>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        // the reader went away (e.g. `| head`); nothing left to report
        Err(Error::Parse(msg)) if msg == BROKEN_PIPE => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Compute(a) => match a.mode {
            ScalarMode::Float => compute::<f64>(a, out),
            ScalarMode::Exact => compute::<BigRational>(a, out),
        },
        Command::Verify(a) => match a.mode {
            ScalarMode::Float => verify::<f64>(a, out),
            ScalarMode::Exact => verify::<BigRational>(a, out),
        },
        Command::Expand(a) => match a.mode {
            ScalarMode::Float => expand::<f64>(a, out),
            ScalarMode::Exact => expand::<BigRational>(a, out),
        },
        Command::Generate(a) => generate(a, out),
        Command::Bench(a) => run_bench(a, out),
    }
}

const BROKEN_PIPE: &str = "I/O: broken pipe";

fn io_err(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        return Error::Parse(BROKEN_PIPE.into());
    }
    Error::Parse(format!("I/O: {e}"))
}

fn read_instance<T: Scalar>(path: &PathBuf) -> Result<KronRankOneInstance<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

fn resolve_cap(flag: Option<usize>) -> Result<usize> {
    match flag {
        Some(c) => Ok(c),
        None => dense_cap_from_env(),
    }
}

fn compute<T: Scalar>(a: &ComputeArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = read_instance::<T>(&a.input)?;
    let breakdown = closed_form_det(&inst);
    let report = BreakdownReport::new(&inst, &breakdown);
    if a.json {
        let mut v = serde_json::to_value(&report).expect("report serializes");
        if a.echo {
            v["instance"] = instance_to_json(&inst);
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("JSON")).map_err(io_err)?;
    } else {
        write_breakdown_text(&report, out).map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

fn fmt_factor(r: &crate::closed_form::FactorReport) -> String {
    let log = r
        .sign_log
        .log_abs()
        .map_or_else(|| "-inf".to_string(), |l| format!("{l:.12}"));
    let sign = match r.sign_log.sign() {
        0 => "0",
        1 => "+1",
        _ => "-1",
    };
    let mut s = format!("sign {sign} log_abs {log} value {:e}", r.value.value);
    if r.value.overflow {
        s.push_str(" [overflow]");
    }
    if r.value.underflow {
        s.push_str(" [underflow]");
    }
    if let Some(e) = &r.exact {
        s.push_str(&format!(" exact {e}"));
    }
    s
}

fn write_breakdown_text(r: &BreakdownReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "mode {} N {} F {}", r.mode, r.n, r.f)?;
    for (k, d) in r.det_a.iter().enumerate() {
        writeln!(out, "det A[{k}]: {}", fmt_factor(d))?;
    }
    writeln!(out, "det X: {}", fmt_factor(&r.det_x))?;
    writeln!(out, "det Y: {}", fmt_factor(&r.det_y))?;
    writeln!(out, "det G: {}", fmt_factor(&r.total))?;
    if !r.zero_factors.is_empty() {
        writeln!(out, "zero factors: {}", r.zero_factors.join(", "))?;
    }
    Ok(())
}

fn verify<T: Scalar>(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let cap = resolve_cap(a.cap)?;
    let mut records: Vec<VerificationRecord> = Vec::new();
    if let Some(path) = &a.input {
        let inst = read_instance::<T>(path)?;
        let mut rec = verify_instance(&inst, cap, a.debug_corrupt)?;
        rec.label = Some(path.display().to_string());
        records.push(rec);
    } else {
        for (n, f, _) in a.spec.cases() {
            crate::oracle::check_dense_cap(n * f, cap)?;
        }
        for (n, f, seed) in a.spec.cases() {
            let inst = random_instance::<T>(n, f, seed, a.spec.profile)?;
            let mut rec = verify_instance(&inst, cap, a.debug_corrupt)?;
            rec.label = Some(format!("{} N={n} F={f} seed={seed}", a.spec.profile));
            records.push(rec);
        }
    }

    let failed = records.iter().filter(|r| !r.passed).count();
    if a.json {
        let shown: Vec<&VerificationRecord> = records.iter().filter(|r| a.all_records || !r.passed).collect();
        let v = json!({
            "mode": T::MODE,
            "cap": cap,
            "total": records.len(),
            "passed": records.len() - failed,
            "failed": failed,
            "records": shown,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("JSON")).map_err(io_err)?;
    } else {
        for r in records.iter().filter(|r| a.all_records || !r.passed) {
            writeln!(
                out,
                "{} {}: closed {} | oracle {} | log_diff {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.label.as_deref().unwrap_or("-"),
                fmt_factor(&r.closed_form),
                fmt_factor(&r.oracle),
                r.log_diff.map_or_else(|| "inf".to_string(), |d| format!("{d:e}")),
            )
            .map_err(io_err)?;
        }
        writeln!(
            out,
            "{} of {} instances passed ({} mode)",
            records.len() - failed,
            records.len(),
            T::MODE
        )
        .map_err(io_err)?;
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: bool,
    /// Permutations, tuples, or Leibniz terms enumerated.
    pub count: u128,
    pub detail: String,
}

/// Runs one expansion check. A failed identity is reported in the outcome;
/// limits and shape problems are errors.
pub fn run_check<T: Scalar>(check: Check, inst: &KronRankOneInstance<T>, limit: u128) -> Result<CheckOutcome> {
    let outcome = match check {
        Check::Detb => expansion::check_b_columns_all(inst, limit).map(|c| (c, String::new())),
        Check::Cdiag => expansion::check_c_diag_all(inst, limit).map(|c| (c, String::new())),
        Check::Sumdiag => {
            expansion::sum_block_diagonal(inst, limit).map(|s| (s.tuples, format!("sum {}", s.sum.to_text())))
        }
        Check::Ypower => expansion::y_power_identity(inst.y(), inst.f(), limit)
            .map(|s| (s.tuples, format!("sum {}", s.sum.to_text()))),
        Check::Columns => {
            expansion::sum_column_selections(inst, limit).map(|s| (s.tuples, format!("sum {}", s.sum.to_text())))
        }
        Check::FullLeibniz => expansion::full_leibniz_check(inst).map(|c| {
            let terms = tuple_count(inst.nf(), 1).unwrap_or(u128::MAX);
            (terms, format!("det {}", c.leibniz.to_text()))
        }),
    };
    match outcome {
        Ok((count, detail)) => Ok(CheckOutcome {
            check,
            passed: true,
            count,
            detail,
        }),
        Err(Error::Verification { detail, .. }) => Ok(CheckOutcome {
            check,
            passed: false,
            count: 0,
            detail,
        }),
        Err(e) => Err(e),
    }
}

fn expand<T: Scalar>(a: &ExpandArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = match &a.input {
        Some(path) => read_instance::<T>(path)?,
        None => random_instance::<T>(a.n, a.f, a.seed, a.profile)?,
    };
    let checks: Vec<Check> = if a.checks.is_empty() {
        Check::ALL.to_vec()
    } else {
        a.checks.clone()
    };
    let outcomes = checks
        .iter()
        .map(|&c| run_check(c, &inst, a.limit))
        .collect::<Result<Vec<_>>>()?;
    let all_passed = outcomes.iter().all(|o| o.passed);
    if a.json {
        let v = json!({
            "mode": T::MODE,
            "N": inst.n(),
            "F": inst.f(),
            "checks": outcomes,
            "passed": all_passed,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("JSON")).map_err(io_err)?;
    } else {
        for o in &outcomes {
            let name = serde_json::to_value(o.check).expect("JSON");
            let line = format!(
                "{} {} count={} {}",
                if o.passed { "PASS" } else { "FAIL" },
                name.as_str().unwrap_or("?"),
                o.count,
                o.detail
            );
            writeln!(out, "{}", line.trim_end()).map_err(io_err)?;
        }
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<i32> {
    let text = match a.mode {
        ScalarMode::Float => instance_to_string(&random_instance::<f64>(a.n, a.f, a.seed, a.profile)?),
        ScalarMode::Exact => instance_to_string(&random_instance::<BigRational>(a.n, a.f, a.seed, a.profile)?),
    };
    match &a.output {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(io_err)?,
        None => writeln!(out, "{text}").map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

fn run_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let cap = resolve_cap(a.cap)?;
    let pairs: Vec<(usize, usize)> = a.sizes.iter().map(|g| (g.0, g.1)).collect();
    let rows = bench::run_grid(&pairs, a.reps, a.seed, cap)?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("JSON")).map_err(io_err)?;
    } else {
        bench::write_csv(&rows, out)?;
    }
    Ok(EXIT_OK)
}
