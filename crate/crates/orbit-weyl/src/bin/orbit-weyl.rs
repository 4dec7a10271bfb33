//! Command-line front end: suite selection, deterministic runs, JSON/text
//! reports, and canonical operator dumps.
//!
//! Exit codes: 0 all requested checks pass, 1 at least one check failed,
//! 2 usage error (unknown family/rank/object/suite).

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbit_weyl::lie::Family;
use orbit_weyl::report::{dump, run, PairSampling, Suite, SuiteConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "orbit-weyl",
    version,
    about = "Exact verification of exotic order-4 differential operators on minimal nilpotent orbits"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and emit a report.
    Run(RunArgs),
    /// Print the canonical text form of a named object.
    Dump(DumpArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Algebra family: sl or so.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Rank parameter N of sl(N) or so(N).
    #[arg(long)]
    n: usize,
    /// RNG seed for the randomized sweeps (decimal or 0x-hex).
    #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated suite subset (default: all suites).
    #[arg(long, value_delimiter = ',')]
    suites: Option<Vec<String>>,
    /// Largest power of f_psi in the eigenvalue sweep.
    #[arg(long = "k-max", default_value_t = 8)]
    k_max: u32,
    /// Largest Gram-matrix degree.
    #[arg(long = "gram-max", default_value_t = 2)]
    gram_max: usize,
    /// Commutator pair coverage: `all` or a sample count.
    #[arg(long, default_value = "all")]
    pairs: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report real wall-clock times (breaks byte-for-byte determinism).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// One of: D0, A, B, C, S, f_psi, gram:<p>.
    #[arg(long)]
    object: String,
    /// Write the dump here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    match s {
        "sl" => Ok(Family::Sl),
        "so" => Ok(Family::So),
        "sp" => Err(
            "the sp family is excluded: its quartic invariant vanishes identically, so the \
             operator algebra on the minimal orbit is just the even part of a Weyl algebra"
                .to_string(),
        ),
        other => Err(format!("unknown family `{other}` (expected sl or so)")),
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).map_err(|e| e.to_string())
    } else {
        s.parse()
            .map_err(|e: std::num::ParseIntError| e.to_string())
    }
}

fn emit(path: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run(args) => {
            let mut cfg = SuiteConfig::new(args.common.family, args.common.n);
            cfg.seed = args.common.seed;
            cfg.k_max = args.k_max;
            cfg.gram_degree_max = args.gram_max;
            if let Some(names) = &args.suites {
                let mut suites = Vec::new();
                for name in names {
                    match Suite::parse(name) {
                        Some(s) => suites.push(s),
                        None => {
                            eprintln!("error: unknown suite `{name}`");
                            return ExitCode::from(2);
                        }
                    }
                }
                cfg.suites = suites;
            }
            cfg.pair_sampling = if args.pairs == "all" {
                PairSampling::All
            } else {
                match args.pairs.parse::<usize>() {
                    Ok(c) => PairSampling::Count(c),
                    Err(_) => {
                        eprintln!("error: --pairs expects `all` or a count");
                        return ExitCode::from(2);
                    }
                }
            };
            match run(&cfg, args.timings) {
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
                Ok(report) => {
                    let rendered = match args.format {
                        Format::Json => report.to_json(),
                        Format::Text => report.to_text(),
                    };
                    if let Err(e) = emit(&args.out, &rendered) {
                        eprintln!("error: cannot write report: {e}");
                        return ExitCode::from(2);
                    }
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
            }
        }
        Cmd::Dump(args) => {
            let cfg = {
                let mut c = SuiteConfig::new(args.common.family, args.common.n);
                c.seed = args.common.seed;
                c
            };
            match dump(&cfg, &args.object) {
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
                Ok(text) => {
                    if let Err(e) = emit(&args.out, &text) {
                        eprintln!("error: cannot write dump: {e}");
                        return ExitCode::from(2);
                    }
                    ExitCode::SUCCESS
                }
            }
        }
    }
}
