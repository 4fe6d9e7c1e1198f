//! The `sumprod` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sumprod_core::rug;
use sumprod_core::covering::{cover_pipeline, m_covered_check, CoveringCertificate, Variant};
use sumprod_core::io::{read_set_file, write_set};
use sumprod_core::sunit::{
    count_nondegenerate_solutions, parse_generators, quotient_graph, stabilization_scan,
    EquationInstance, ExponentBox, GroupSpec, QuotientGraph,
};
use sumprod_core::verify::{write_json_lines, write_summary_csv};
use sumprod_core::{
    Budget, CheckReport, Error, ExactRational, FamilySpec, PrimePool, DEFAULT_FACTOR_BOUND,
};

pub mod suites;
pub mod sweep;

use suites::{Inputs, Suite};

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "sumprod", version, about = "Exact sum-product and S-unit experiments")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random choice; recorded in all outputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest counter or intermediate set support.
    #[arg(long, global = true, default_value_t = Budget::default().max_support)]
    pub max_support: u128,
    /// Largest number of tuples or pairs one enumeration may visit.
    #[arg(long, global = true, default_value_t = Budget::default().max_enumeration)]
    pub max_enumeration: u128,
    /// Largest side of a dense count matrix.
    #[arg(long, global = true, default_value_t = Budget::default().max_matrix_dim)]
    pub max_matrix_dim: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a set file from a family.
    Gen(GenArgs),
    /// Exact growth counts and log-ratios of one set, as a CSV row.
    Stats(StatsArgs),
    /// Covering certificate for A (and B, default A).
    Cover(CoverArgs),
    /// Solution counts of a0 = a_1 z_1 + ... + a_m z_m over a boxed group.
    Sunit(SunitArgs),
    /// Run an inequality suite on set files or on seeded random sets.
    Verify(VerifyArgs),
    /// Exponent sweep over a family grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub family: GenFamily,
    /// Output set file (stdout if omitted).
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenFamily {
    /// {q, q^2, ..., q^n}
    Geometric {
        #[arg(long)]
        q: ExactRational,
        #[arg(long)]
        n: u32,
    },
    /// {p M^j : 1 <= p <= M, 1 <= j <= N}
    BalogWooley {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u32,
    },
    /// Random elements with at most k prime factors from a pool.
    Random {
        /// Comma-separated primes.
        #[arg(long, conflicts_with = "pool_size")]
        pool: Option<String>,
        /// Use the first this many primes.
        #[arg(long, default_value_t = 10)]
        pool_size: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        e_max: u32,
        #[arg(long)]
        size: usize,
        /// Positive integers only (exponents in [1, e_max]).
        #[arg(long)]
        integer: bool,
    },
    /// A family spec in JSON.
    Spec { path: PathBuf },
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub set: PathBuf,
    /// Comma-separated m values for |mA| and |A^(m)|.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub ms: Vec<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    pub a: PathBuf,
    pub b: Option<PathBuf>,
    /// Bound on the prime factors of elements of A (default: max over A).
    #[arg(long)]
    pub k: Option<usize>,
    /// Bound on the prime factors of elements of B (default: max over B).
    #[arg(long)]
    pub l: Option<usize>,
    /// 1: popular primes; 2: greedy chain.
    #[arg(long, default_value_t = 1)]
    pub variant: u8,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SunitArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a0: ExactRational,
    /// Comma-separated coefficients a_1..a_m.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: String,
    /// Comma-separated generators of the group.
    #[arg(long, allow_hyphen_values = true)]
    pub generators: String,
    /// Leave -1 out of the group.
    #[arg(long)]
    pub no_torsion: bool,
    /// Comma-separated exponent bounds H.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub h: Vec<u32>,
    /// Also write the solutions at the largest H as JSON.
    #[arg(long)]
    pub solutions: Option<PathBuf>,
    /// Also write the quotient graph on this set (with target --x) as JSON.
    #[arg(long, requires = "x")]
    pub quotient: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<ExactRational>,
    #[arg(long, requires = "quotient")]
    pub quotient_output: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Set files; random sets are used when none are given.
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    #[arg(long, default_value_t = 12)]
    pub max_size: usize,
    /// JSON lines of every report (stdout if omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// CSV summary (name, holds, lhs, rhs, params).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON list of family specs; the default grid is used if omitted.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,500")]
    pub sizes: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub ms: Vec<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Checks(Vec<CheckReport>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(Error::Json(e))
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Checks(_) => EXIT_CHECK_FAILED,
            Failure::Core(Error::CheckFailed(_)) => EXIT_CHECK_FAILED,
            Failure::Core(e) if e.is_budget() => EXIT_BUDGET,
            Failure::Core(_) => EXIT_INPUT,
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

impl Cli {
    pub fn budget(&self) -> sumprod_core::Result<Budget> {
        let b = Budget {
            max_support: self.max_support,
            max_enumeration: self.max_enumeration,
            max_matrix_dim: self.max_matrix_dim,
        };
        b.validate()?;
        Ok(b)
    }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Outcome {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Assertion-grade failures become exit code 1.
fn require_checks(reports: &[CheckReport]) -> Outcome {
    let failed: Vec<CheckReport> = reports.iter().filter(|r| !r.passes()).cloned().collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}

fn parse_list(text: &str) -> sumprod_core::Result<Vec<ExactRational>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn cmd_gen(args: &GenArgs, seed: u64) -> Outcome {
    let spec = match &args.family {
        GenFamily::Geometric { q, n } => FamilySpec::Geometric { q: q.clone(), n: *n },
        GenFamily::BalogWooley { m, n } => FamilySpec::BalogWooley { m: *m, n: *n },
        GenFamily::Random {
            pool,
            pool_size,
            k,
            e_max,
            size,
            integer,
        } => {
            let pool = match pool {
                Some(text) => {
                    let values = text
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<u64>()
                                .map_err(|_| Error::Parse(format!("not a prime: {s:?}")))
                        })
                        .collect::<sumprod_core::Result<Vec<u64>>>()?;
                    PrimePool::from_values(&values)?
                }
                None => PrimePool::first(*pool_size),
            };
            FamilySpec::RandomFewPrime {
                pool: pool.primes().to_vec(),
                k: *k,
                e_max: *e_max,
                size: *size,
                seed,
                integer_mode: *integer,
            }
        }
        GenFamily::Spec { path } => serde_json::from_reader(File::open(path)?)?,
    };
    let set = spec.generate()?;
    let mut out = sink(args.output.as_deref())?;
    write_set(&set, Some(spec.name()), Some(&spec.params()), Some(spec.seed().unwrap_or(seed)), &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_stats(args: &StatsArgs, seed: u64, budget: &Budget) -> Outcome {
    let loaded = read_set_file(&args.set)?;
    let spec = FamilySpec::Explicit {
        path: args.set.clone(),
    };
    let row = sweep::compute_row(&loaded.set, spec, &args.ms, budget)?;
    let mut record = sweep::record(&row, loaded.seed.unwrap_or(seed));
    if let Some(family) = &loaded.family {
        record[0] = family.clone();
    }
    if let Some(params) = &loaded.params {
        record[1] = params.clone();
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink(args.output.as_deref())?);
    w.write_record(sweep::header(&args.ms)).map_err(Error::from)?;
    w.write_record(record).map_err(Error::from)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CoverOutput<'a> {
    seed: u64,
    input_seeds: [Option<u64>; 2],
    variant: u8,
    all_hold: bool,
    a_prime_covered: bool,
    certificate: &'a CoveringCertificate,
}

fn cmd_cover(args: &CoverArgs, seed: u64, budget: &Budget) -> Outcome {
    let loaded_a = read_set_file(&args.a)?;
    let loaded_b = match &args.b {
        Some(p) => Some(read_set_file(p)?),
        None => None,
    };
    let input_seeds = [loaded_a.seed, loaded_b.as_ref().and_then(|l| l.seed)];
    let a = loaded_a.set;
    let b = match loaded_b {
        Some(l) => l.set,
        None => a.clone(),
    };
    let k = match args.k {
        Some(k) => k,
        None => a.max_omega()?.max(1),
    };
    let l = match args.l {
        Some(l) => l,
        None => b.max_omega()?.max(1),
    };
    let variant = Variant::from_number(args.variant)?;
    let cert = cover_pipeline(&a, &b, k, l, variant, budget)?;
    let a_prime = cert.a_prime_set().with_factorizations(DEFAULT_FACTOR_BOUND)?;
    let witness = m_covered_check(&a_prime, &cert.s, &cert.c_set())?;
    let mut checks = cert.checks.clone();
    checks.push(CheckReport::exact(
        "a_prime_covered",
        rug::Integer::from(witness.covered_count()),
        sumprod_core::Relation::Eq,
        rug::Integer::from(a_prime.len()),
    ));
    write_json(
        &CoverOutput {
            seed,
            input_seeds,
            variant: args.variant,
            all_hold: checks.iter().all(|c| c.passes()),
            a_prime_covered: witness.covered(),
            certificate: &cert,
        },
        args.output.as_deref(),
    )?;
    require_checks(&checks)
}

#[derive(Serialize)]
struct SolutionsOutput<'a> {
    seed: u64,
    h: u32,
    equation: &'a EquationInstance,
    group: &'a GroupSpec,
    nondegenerate: u128,
    degenerate: u128,
    solutions: &'a [Vec<ExactRational>],
}

#[derive(Serialize)]
struct QuotientOutput<'a> {
    seed: u64,
    h: u32,
    x: &'a ExactRational,
    graph: &'a QuotientGraph,
}

fn cmd_sunit(args: &SunitArgs, seed: u64, budget: &Budget) -> Outcome {
    let eq = EquationInstance::new(args.a0.clone(), parse_list(&args.coeffs)?)?;
    let spec = GroupSpec::new(parse_generators(&args.generators, DEFAULT_FACTOR_BOUND)?, !args.no_torsion)?;
    let scan = stabilization_scan(&eq, &spec, &args.h, budget)?;
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(sink(args.output.as_deref())?);
        w.write_record(["H", "nondegenerate_count", "degenerate_count", "seed"])
            .map_err(Error::from)?;
        for r in &scan.rows {
            w.write_record([r.h.to_string(), r.nondegenerate.to_string(), r.degenerate.to_string(), seed.to_string()])
                .map_err(Error::from)?;
        }
        w.flush()?;
    }
    let h_max = scan.rows.last().map_or(1, |r| r.h);
    if let Some(path) = &args.solutions {
        let count = count_nondegenerate_solutions(&eq, &spec, ExponentBox::new(h_max)?, budget)?;
        write_json(
            &SolutionsOutput {
                seed,
                h: h_max,
                equation: &eq,
                group: &spec,
                nondegenerate: count.nondegenerate,
                degenerate: count.degenerate,
                solutions: &count.solutions,
            },
            Some(path),
        )?;
    }
    if let (Some(path), Some(x)) = (&args.quotient, &args.x) {
        let b = read_set_file(path)?.set;
        let graph = quotient_graph(&b, &spec, ExponentBox::new(h_max)?, x, budget)?;
        write_json(
            &QuotientOutput {
                seed,
                h: h_max,
                x,
                graph: &graph,
            },
            args.quotient_output.as_deref(),
        )?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, seed: u64, budget: &Budget) -> Outcome {
    let inputs = if args.inputs.is_empty() {
        Inputs::Random {
            instances: args.instances,
            max_size: args.max_size,
            seed,
        }
    } else {
        Inputs::Files(
            args.inputs
                .iter()
                .map(|p| read_set_file(p).map(|l| l.set))
                .collect::<sumprod_core::Result<_>>()?,
        )
    };
    let reports = suites::run_suite(args.suite, &inputs, seed, budget)?;
    let mut out = sink(args.output.as_deref())?;
    write_json_lines(&reports, &mut out)?;
    out.flush()?;
    if let Some(path) = &args.summary {
        write_summary_csv(&reports, BufWriter::new(File::create(path)?))?;
    }
    require_checks(&reports)
}

fn cmd_sweep(args: &SweepArgs, seed: u64, budget: &Budget) -> Outcome {
    let grid: Vec<FamilySpec> = match &args.grid {
        Some(p) => serde_json::from_reader(File::open(p)?)?,
        None => sweep::default_grid(&args.sizes, seed),
    };
    let rows = sweep::run_sweep(&grid, &args.ms, budget)?;
    let mut out = sink(args.output.as_deref())?;
    sweep::write_csv(&rows, &args.ms, seed, &mut out)?;
    out.flush()?;
    Ok(())
}

fn dispatch(cli: &Cli) -> Outcome {
    let budget = cli.budget()?;
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, cli.seed),
        Command::Stats(a) => cmd_stats(a, cli.seed, &budget),
        Command::Cover(a) => cmd_cover(a, cli.seed, &budget),
        Command::Sunit(a) => cmd_sunit(a, cli.seed, &budget),
        Command::Verify(a) => cmd_verify(a, cli.seed, &budget),
        Command::Sweep(a) => cmd_sweep(a, cli.seed, &budget),
    }
}

/// Runs the parsed command inside a pool of the requested size.
pub fn run(cli: &Cli) -> Outcome {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidParameter("--threads must be positive".into()).into());
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn report_failure(f: &Failure) {
    let stderr = io::stderr();
    let mut err = stderr.lock();
    match f {
        Failure::Checks(reports) => {
            for r in reports {
                let _ = serde_json::to_writer(&mut err, &serde_json::json!({ "error": "check_failed", "report": r }));
                let _ = writeln!(err);
            }
        }
        Failure::Core(Error::CheckFailed(r)) => {
            let _ = serde_json::to_writer(&mut err, &serde_json::json!({ "error": "check_failed", "report": r }));
            let _ = writeln!(err);
        }
        Failure::Core(e) => {
            let kind = if e.is_budget() { "budget" } else { "input" };
            let _ = writeln!(err, "{}", serde_json::json!({ "error": kind, "message": e.to_string() }));
        }
    }
}

/// Parses arguments, runs, and maps the outcome to the documented exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report_failure(&f);
            ExitCode::from(f.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sumprod_core::Relation;

    #[test]
    fn failing_assertion_maps_to_one() {
        let bad = CheckReport::exact("demo", rug::Integer::from(3), Relation::Le, rug::Integer::from(2));
        let f = require_checks(&[bad.clone()]).unwrap_err();
        assert_eq!(f.exit_code(), EXIT_CHECK_FAILED);
        assert!(require_checks(&[bad.report_only()]).is_ok());
        let budget = Failure::Core(Error::BudgetExceeded { needed: 2, cap: 1 });
        assert_eq!(budget.exit_code(), EXIT_BUDGET);
        assert_eq!(Failure::Core(Error::Parse("x".into())).exit_code(), EXIT_INPUT);
    }
}
