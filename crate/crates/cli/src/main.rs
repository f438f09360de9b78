//! `treecount`: exact counts, tables, verification, sampling and OEIS
//! cross-checks for rooted labeled trees.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage error, 3 the oracle and
//! formula tables differ, 4 a download failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treecount::closed_form::{
    count_k_low, count_k_low_l_high, count_root_degree, count_with_root, formula_table, refined_count, sum_over_m,
    sum_over_root,
};
use treecount::config::Config;
use treecount::identities::{run_census_checks, run_suite, SuiteReport};
use treecount::oeis::{crosscheck, fetch_bfile, HttpTransport};
use treecount::sampler::{sample_zeng, RandomSource, TreeGivenK};
use treecount::{CensusTable, Error};

#[derive(Parser)]
#[command(name = "treecount", version, about = "Rooted labeled trees counted by root statistics")]
struct Cli {
    /// key = value settings file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// worker threads for enumeration and the identity suite
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one exact count.
    Count(CountArgs),
    /// Print the signature table for trees on n+1 vertices.
    Table(TableArgs),
    /// Run the identity suite and/or the census comparison.
    Verify(VerifyArgs),
    /// Draw uniform random trees as JSON lines.
    Sample(SampleArgs),
    /// Cross-check an OEIS b-file against the formulas.
    Oeis(OeisArgs),
}

/// Which count is printed depends on the flags given:
/// i,k,l,m: single signature; k: lower children only; i,k: root and lower
/// children; k,l: lower and higher children; i,k,l: summed over m;
/// k,l,m: summed over the root; --degree: children of the root.
#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    i: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// number of children of the root
    #[arg(long)]
    degree: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableSource {
    Oracle,
    Formula,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct TableArgs {
    /// trees have n+1 vertices
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "formula")]
    source: TableSource,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Census,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// largest n for the census comparison (trees on n+1 vertices)
    #[arg(long)]
    max_n: Option<u32>,
    /// print JSON instead of a table
    #[arg(long)]
    json: bool,
    #[arg(long)]
    sum1_n_max: Option<u32>,
    #[arg(long)]
    sum1_kl_max: Option<u32>,
    #[arg(long)]
    general_kl_max: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    general_mn_min: Option<i64>,
    #[arg(long)]
    general_mn_max: Option<i64>,
    #[arg(long)]
    chu_n_max: Option<u32>,
    #[arg(long)]
    abel_n_max: Option<u32>,
    #[arg(long)]
    sum2_n_max: Option<u32>,
    #[arg(long)]
    abel_spec_n_max: Option<u32>,
    #[arg(long)]
    chen_n_max: Option<u32>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: u32,
    /// lower-numbered children of the root
    #[arg(long)]
    k: u32,
    /// higher-numbered children of the root; switches to the subset sampler
    #[arg(long)]
    l: Option<u32>,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OeisArgs {
    #[arg(long)]
    id: String,
    /// complete triangle rows that must match
    #[arg(long, default_value_t = 8)]
    rows: u32,
    /// never touch the network; use the cache or the bundled copy
    #[arg(long)]
    offline: bool,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

enum Failure {
    Check,
    Usage(String),
    Mismatch,
    Fetch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check => 1,
            Failure::Usage(_) => 2,
            Failure::Mismatch => 3,
            Failure::Fetch(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Fetch(msg) => Failure::Fetch(msg),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Fetch(msg) => eprintln!("fetch failed: {msg}"),
                Failure::Check | Failure::Mismatch => {}
            }
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(threads) = cli.threads {
        config.set("threads", &threads.to_string())?;
    }
    match cli.command {
        Command::Count(args) => cmd_count(args),
        Command::Table(args) => cmd_table(args, &config),
        Command::Verify(args) => cmd_verify(args, config),
        Command::Sample(args) => cmd_sample(args),
        Command::Oeis(args) => cmd_oeis(args, &config),
    }
}

fn cmd_count(a: CountArgs) -> Outcome {
    let n = a.n;
    let too_big = |name: &str, v: u32| (v > n).then(|| Failure::Usage(format!("--{name} {v} exceeds --n {n}")));
    for (name, v) in [("k", a.k), ("l", a.l), ("m", a.m), ("degree", a.degree)] {
        if let Some(err) = v.and_then(|v| too_big(name, v)) {
            return Err(err);
        }
    }
    if let Some(i) = a.i {
        if i == 0 || i > n + 1 {
            return Err(Failure::Usage(format!("--i must lie in 1..={}", n + 1)));
        }
    }
    let value = match (a.i, a.k, a.l, a.m, a.degree) {
        (None, None, None, None, Some(d)) => count_root_degree(n, d)?,
        (Some(i), Some(k), Some(l), Some(m), None) => refined_count(n, i, k, l, m),
        (None, Some(k), None, None, None) => count_k_low(n, k)?,
        (Some(i), Some(k), None, None, None) => count_with_root(n, i, k)?,
        (None, Some(k), Some(l), None, None) => count_k_low_l_high(n, k, l)?,
        (Some(i), Some(k), Some(l), None, None) => sum_over_m(n, i, k, l)?,
        (None, Some(k), Some(l), Some(m), None) => sum_over_root(n, k, l, m)?,
        _ => {
            return Err(Failure::Usage(
                "give one of: --i --k --l --m | --k | --i --k | --k --l | --i --k --l | --k --l --m | --degree".into(),
            ))
        }
    };
    println!("{value}");
    Ok(())
}

fn print_table(table: &CensusTable, format: Format) {
    match format {
        Format::Csv => print!("{}", table.to_csv()),
        Format::Json => println!("{}", table.to_json()),
    }
}

fn cmd_table(a: TableArgs, config: &Config) -> Outcome {
    let n_vertices = a.n + 1;
    let oracle = config.oracle();
    match a.source {
        TableSource::Formula => print_table(&formula_table(n_vertices)?, a.format),
        TableSource::Oracle => print_table(&oracle.census(n_vertices)?, a.format),
        TableSource::Both => {
            let diff = oracle.census(n_vertices)?.diff(&formula_table(n_vertices)?);
            match a.format {
                Format::Csv => {
                    println!("i,k,l,m,oracle,formula");
                    for d in &diff {
                        let s = d.signature;
                        println!("{},{},{},{},{},{}", s.i, s.k, s.l, s.m, d.left, d.right);
                    }
                }
                Format::Json => {
                    let rows: Vec<String> = diff
                        .iter()
                        .map(|d| {
                            let s = d.signature;
                            format!(
                                "{{\"i\":{},\"k\":{},\"l\":{},\"m\":{},\"oracle\":{},\"formula\":{}}}",
                                s.i, s.k, s.l, s.m, d.left, d.right
                            )
                        })
                        .collect();
                    println!("[{}]", rows.join(","));
                }
            }
            if !diff.is_empty() {
                eprintln!("{} signatures differ", diff.len());
                return Err(Failure::Mismatch);
            }
        }
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs, mut config: Config) -> Outcome {
    let overrides: [(&str, Option<String>); 10] = [
        ("sum1_n_max", a.sum1_n_max.map(|v| v.to_string())),
        ("sum1_kl_max", a.sum1_kl_max.map(|v| v.to_string())),
        ("general_kl_max", a.general_kl_max.map(|v| v.to_string())),
        ("general_mn_min", a.general_mn_min.map(|v| v.to_string())),
        ("general_mn_max", a.general_mn_max.map(|v| v.to_string())),
        ("chu_n_max", a.chu_n_max.map(|v| v.to_string())),
        ("abel_n_max", a.abel_n_max.map(|v| v.to_string())),
        ("sum2_n_max", a.sum2_n_max.map(|v| v.to_string())),
        ("abel_spec_n_max", a.abel_spec_n_max.map(|v| v.to_string())),
        ("chen_n_max", a.chen_n_max.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            config.set(key, &value)?;
        }
    }
    let max_n = a.max_n.unwrap_or(config.census_n_max);

    let mut report: Option<SuiteReport> = None;
    if a.suite != Suite::Census {
        report = Some(run_suite(&config.suite));
    }
    if a.suite != Suite::Identities {
        let census = run_census_checks(max_n, &config.oracle())?;
        report = Some(match report {
            Some(r) => r.merge(census),
            None => census,
        });
    }
    let report = report.expect("at least one suite runs");
    if a.json {
        println!("{}", serde_json::to_string(&report).expect("reports serialize"));
    } else {
        print!("{}", report.to_table());
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_sample(a: SampleArgs) -> Outcome {
    let mut rng = RandomSource::new(a.seed);
    let mut out = String::new();
    match a.l {
        Some(l) => {
            for _ in 0..a.count {
                out.push_str(&sample_zeng(a.n, a.k, l, &mut rng)?.to_json());
                out.push('\n');
            }
        }
        None => {
            let sampler = TreeGivenK::new(a.n, a.k)?;
            for _ in 0..a.count {
                out.push_str(&sampler.sample(&mut rng)?.to_json());
                out.push('\n');
            }
        }
    }
    print!("{out}");
    Ok(())
}

fn cmd_oeis(a: OeisArgs, config: &Config) -> Outcome {
    let cache_dir = a.cache_dir.unwrap_or_else(|| config.cache_dir.clone());
    let transport = HttpTransport::default();
    let fetched = fetch_bfile(&a.id, Some(&cache_dir), a.offline, &transport)?;
    let report = crosscheck(&fetched.bfile, a.rows)?;
    println!("source: {}", fetched.source);
    println!("{report}");
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}
