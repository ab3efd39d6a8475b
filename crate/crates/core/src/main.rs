use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Pow;

use supercong::fit::{family, fit_constant};
use supercong::registry::{parse, BUILTIN};
use supercong::runner::{emit, run, sieve_primes, Format, RunConfig};
use supercong::selftest;

#[derive(Parser)]
#[command(name = "supercong", version, about = "Check binomial-sum supercongruences prime by prime")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Verify registry entries over a prime range.
    Verify {
        /// Registry file; the built-in registry when omitted.
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Inclusive range `LO..HI`.
        #[arg(long, default_value = "5..1000")]
        primes: String,
        /// Glob over conjecture ids, e.g. `2.*`.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Recheck every case with the exact oracle below this prime.
        #[arg(long, default_value_t = 100)]
        oracle_below: u64,
        /// Also test stated mod-p cases modulo p^2.
        #[arg(long)]
        check_stronger: bool,
        /// Override every case's modulus exponent.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        power: Option<u32>,
        /// Record the current UNIX time in the report.
        #[arg(long)]
        timestamp: bool,
    },
    /// Recover the rational constant of a product family.
    Fit {
        #[arg(long)]
        family: String,
        /// Comma-separated list or inclusive range `LO..HI`.
        #[arg(long)]
        primes: String,
        /// Bound on numerator and denominator, e.g. `10^6`.
        #[arg(long, default_value = "10^12")]
        bound: String,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(lo)?, num(hi.trim_start_matches('='))?))
}

fn parse_primes(s: &str) -> Result<Vec<u64>, String> {
    if s.contains("..") {
        let (lo, hi) = parse_range(s)?;
        return Ok(sieve_primes(lo, hi));
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

fn parse_bound(s: &str) -> Result<BigInt, String> {
    let int = |t: &str| t.trim().parse::<BigInt>().map_err(|e| format!("`{t}`: {e}"));
    match s.split_once('^') {
        Some((b, e)) => {
            let e: u32 = e.trim().parse().map_err(|e| format!("exponent: {e}"))?;
            Ok(Pow::pow(int(b)?, e))
        }
        None => int(s),
    }
}

fn verify_cmd(
    registry: Option<PathBuf>,
    primes: &str,
    cfg: RunConfig,
    format: FormatArg,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let source = match registry {
        Some(path) => fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => BUILTIN.to_string(),
    };
    let reg = parse(&source).map_err(|e| format!("registry {e}"))?;
    let (lo, hi) = parse_range(primes)?;
    let cfg = RunConfig { lo, hi, ..cfg };
    let report = run(&reg, &source, &cfg).map_err(|e| e.to_string())?;
    let format = match format {
        FormatArg::Jsonl => Format::Jsonl,
        FormatArg::Csv => Format::Csv,
        FormatArg::Table => Format::Table,
    };
    let bytes = emit(&report, format);
    match out {
        Some(path) => fs::write(&path, &bytes).map_err(|e| format!("{}: {e}", path.display()))?,
        None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())?,
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify {
            registry,
            primes,
            filter,
            jobs,
            format,
            out,
            oracle_below,
            check_stronger,
            power,
            timestamp,
        } => {
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let timestamp = timestamp.then(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs())
                    .to_string()
            });
            let cfg = RunConfig {
                filter,
                power,
                oracle_below,
                jobs,
                check_stronger,
                timestamp,
                ..RunConfig::default()
            };
            verify_cmd(registry, &primes, cfg, format, out).unwrap_or_else(|e| {
                eprintln!("error: {e}");
                2
            })
        }
        Command::Fit {
            family: name,
            primes,
            bound,
        } => {
            let result = (|| -> Result<String, String> {
                let fam = family(&name).map_err(|e| e.to_string())?;
                let primes = parse_primes(&primes)?;
                let bound = parse_bound(&bound)?;
                let fit = fit_constant(&fam, &primes, &bound).map_err(|e| e.to_string())?;
                let (en, ed) = fam.expected;
                let agrees = fit.num == en.into() && fit.den == ed.into();
                Ok(format!(
                    "{}: c = {}/{} from primes {:?}, confirmed by {:?}; expected {en}/{ed}: {}",
                    fam.name,
                    fit.num,
                    fit.den,
                    fit.used,
                    fit.confirmed,
                    if agrees { "match" } else { "MISMATCH" }
                ))
            })();
            match result {
                Ok(line) => {
                    println!("{line}");
                    i32::from(line.ends_with("MISMATCH"))
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Command::Selftest => {
            let mut failed = false;
            for (name, result) in selftest::run_all(BUILTIN) {
                match result {
                    Ok(()) => println!("ok   {name}"),
                    Err(e) => {
                        failed = true;
                        println!("FAIL {name}: {e}");
                    }
                }
            }
            i32::from(failed)
        }
    };
    ExitCode::from(code as u8)
}
