use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use padlab::discrepancy::{discrepancy_exact, Witness};
use padlab::experiments::{
    emit_report, exit_code_for_error, run_experiment, write_report, Experiment, RawConfig,
};
use padlab::padic::{padic_abs_rational, Prime, ScaleParams};
use padlab::rational::{format_ratio, parse_ratio, parse_small_ratio};
use padlab::sequences::{parse_sequence, Exactness};
use padlab::statistics::pair_correlation_f;
use padlab::{Error, PadicInt, Result};

#[derive(Parser)]
#[command(name = "padlab", version, about = "Pair correlations and discrepancy in the p-adic integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean |F - 1| over seeds for i.i.d. uniform sequences
    RandomPpc(ExperimentArgs),
    /// F -> 1 for Kronecker sequences when alpha < 1
    KroneckerPpc(ExperimentArgs),
    /// F = 0 for Kronecker sequences when alpha = 1, s < 1
    KroneckerNonPpc(ExperimentArgs),
    /// N * D_N stays bounded
    DiscrepancyDecay(ExperimentArgs),
    /// D_N^2 <= E_{N^2} <= D_N on random instances
    BeerSandwich(ExperimentArgs),
    /// D_N decreases for a sequence with pair correlations
    PpcImpliesUd(ExperimentArgs),
    /// p-adic absolute value of b/c
    #[command(allow_negative_numbers = true)]
    Abs {
        b: BigInt,
        #[arg(default_value = "1")]
        c: BigInt,
        #[arg(long)]
        p: u64,
    },
    /// F statistic of a sequence file (stdin when no file is given)
    FStat {
        file: Option<PathBuf>,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        s: String,
        /// Use only the first N elements
        #[arg(long)]
        n: Option<usize>,
        /// Treat the stored values as exact rather than truncated
        #[arg(long)]
        exact: bool,
    },
    /// Exact discrepancy of a sequence file (stdin when no file is given)
    Discrepancy {
        file: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long = "K")]
    precision: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Comma-separated list
    #[arg(long)]
    s: Option<String>,
    /// Comma-separated ascending list
    #[arg(long)]
    n_grid: Option<String>,
    /// Comma-separated list
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_input(file: &Option<PathBuf>) -> Result<String> {
    match file {
        Some(path) => fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|source| Error::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
            Ok(text)
        }
    }
}

fn prefix(xs: &[PadicInt], n: Option<usize>) -> Result<&[PadicInt]> {
    match n {
        Some(n) if n > xs.len() => Err(Error::InvalidInput(format!(
            "{n} elements requested, {} available",
            xs.len()
        ))),
        Some(n) => Ok(&xs[..n]),
        None => Ok(xs),
    }
}

fn run_experiment_command(experiment: Experiment, args: ExperimentArgs) -> Result<i32> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    raw.set("experiment", experiment.name())?;
    let overrides = [
        ("p", &args.p),
        ("K", &args.precision),
        ("alpha", &args.alpha),
        ("s", &args.s),
        ("n-grid", &args.n_grid),
        ("seeds", &args.seeds),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            raw.set(key, value)?;
        }
    }
    if let Some(out) = &args.out {
        raw.set("out", &out.to_string_lossy())?;
    }
    let config = raw.build()?;
    let outcome = run_experiment(&config)?;
    match &config.out {
        Some(path) => emit_report(&outcome.rows, path)?,
        None => write_report(&outcome.rows, io::stdout().lock())?,
    }
    let failed = outcome.rows.iter().filter(|r| !r.pass).count();
    eprintln!(
        "{}: {} rows, {} failing predicate",
        experiment,
        outcome.rows.len(),
        failed
    );
    Ok(outcome.exit_code())
}

fn run(cli: Cli) -> Result<i32> {
    let mut stdout = io::stdout().lock();
    let io_err = |source| Error::Io {
        path: "<stdout>".into(),
        source,
    };
    match cli.command {
        Command::RandomPpc(args) => run_experiment_command(Experiment::RandomPpc, args),
        Command::KroneckerPpc(args) => run_experiment_command(Experiment::KroneckerPpc, args),
        Command::KroneckerNonPpc(args) => run_experiment_command(Experiment::KroneckerNonPpc, args),
        Command::DiscrepancyDecay(args) => run_experiment_command(Experiment::DiscrepancyDecay, args),
        Command::BeerSandwich(args) => run_experiment_command(Experiment::BeerSandwich, args),
        Command::PpcImpliesUd(args) => run_experiment_command(Experiment::PpcImpliesUd, args),
        Command::Abs { b, c, p } => {
            let value = padic_abs_rational(&b, &c, Prime::new(p)?)?;
            writeln!(stdout, "{}", format_ratio(&value)).map_err(io_err)?;
            Ok(0)
        }
        Command::FStat {
            file,
            alpha,
            s,
            n,
            exact,
        } => {
            let (_, _, xs) = parse_sequence(&read_input(&file)?)?;
            let alpha = parse_small_ratio(&alpha)
                .ok_or_else(|| Error::InvalidInput(format!("bad alpha `{alpha}`")))?;
            let s = parse_ratio(&s).ok_or_else(|| Error::InvalidInput(format!("bad s `{s}`")))?;
            let params = ScaleParams::new(alpha, s)?;
            let exactness = if exact {
                Exactness::Exact
            } else {
                Exactness::Approximate
            };
            let stat = pair_correlation_f(prefix(&xs, n)?, &params, exactness)?;
            writeln!(stdout, "N,k0,R,F_exact,F_float").map_err(io_err)?;
            writeln!(
                stdout,
                "{},{},{},{},{}",
                stat.n,
                stat.k0,
                stat.r,
                format_ratio(&stat.f_exact),
                stat.f_float
            )
            .map_err(io_err)?;
            Ok(0)
        }
        Command::Discrepancy { file, n } => {
            let (_, _, xs) = parse_sequence(&read_input(&file)?)?;
            let report = discrepancy_exact(prefix(&xs, n)?)?;
            let witness = match report.witness {
                Witness::Ball { residue, level } => format!("{residue}+p^{level}"),
                Witness::TailLimit => "tail-limit".to_string(),
            };
            writeln!(stdout, "N,D_exact,attained,witness").map_err(io_err)?;
            writeln!(
                stdout,
                "{},{},{},{}",
                report.n,
                format_ratio(&report.d_exact),
                report.attained,
                witness
            )
            .map_err(io_err)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for_error(&err) as u8)
        }
    }
}
