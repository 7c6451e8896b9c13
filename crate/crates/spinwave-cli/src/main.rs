//! `spinwave`: batch front end for dark-time decay curves, fits, oracle
//! cross-checks and figure datasets.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical failure
//! (including an oracle deviation above tolerance), 4 fit failure.

mod commands;
mod error;
mod output;
mod scenario;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use commands::figure::FigureId;
use commands::oracle::OracleOutcome;
use error::{CliError, CliResult};
use output::Format;
use scenario::Resolved;

#[derive(Debug, Parser)]
#[command(name = "spinwave", version, about = "Dark-time decay of spin-wave retrieval efficiency")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "SPINWAVE_THREADS")]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Output format; overrides the scenario's output block.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the closed-form model of one or more scenario files.
    Curve {
        /// Scenario file; repeat to run a batch concurrently.
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
    },
    /// Fit a decay model to a CSV with columns t_us, eta[, sigma].
    Fit {
        /// Data file.
        data: PathBuf,
        /// gaussian, exponential, algebraic or stretched.
        #[arg(long, default_value = "gaussian")]
        model: String,
    },
    /// Regenerate the dataset behind a reference figure.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        /// figS2 only: also run the thermal sum converged to 10⁻⁵.
        #[arg(long)]
        converged: bool,
    },
    /// Compare a scenario's model with its numerical oracle.
    Oracle {
        /// Scenario file; repeat to run a batch concurrently.
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        /// Largest accepted relative deviation; overrides the scenario.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Curve { configs } => batch(&configs, |r| curve(r, &cli.out, cli.format)),
        Command::Oracle { configs, tolerance } => {
            if let Some(t) = tolerance {
                if !(t > 0.0) || !t.is_finite() {
                    return Err(CliError::config("--tolerance must be positive"));
                }
            }
            batch(&configs, |r| oracle(r, &cli.out, cli.format, tolerance))
        }
        Command::Fit { data, model } => {
            let (written, r) = commands::fit::run(&data, &model, &cli.out, cli.format.unwrap_or(Format::Json))?;
            let tau = r.value("tau").unwrap_or(f64::NAN) / spinwave::units::MICROSECOND;
            let mut line = format!("fit {:?}: τ = {tau:.6} µs", r.model);
            if let Some(p) = r.value("p") {
                line.push_str(&format!(", p = {p:.4}"));
            }
            line.push_str(&format!(" ({} points, {} excluded)", r.n_points, r.excluded));
            println!("{line}");
            report_written(&written);
            Ok(())
        }
        Command::Figure { id, converged } => {
            let run = commands::figure::run(id, &cli.out, cli.format.unwrap_or(Format::Csv), converged)?;
            for l in &run.summary {
                println!("{l}");
            }
            report_written(&run.written);
            Ok(())
        }
    }
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

/// Loads every scenario, rejects clashing output names, then runs them
/// concurrently. Each run returns its stdout lines and its outcome; lines are
/// printed in input order and the first failure sets the exit code.
fn batch<F>(configs: &[PathBuf], f: F) -> CliResult<()>
where
    F: Fn(&Resolved) -> (Vec<String>, CliResult<()>) + Sync,
{
    let resolved = configs
        .iter()
        .map(|p| {
            scenario::load(p)
                .and_then(scenario::resolve)
                .map_err(|e| e.context(&p.display().to_string()))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut names = HashSet::new();
    for r in &resolved {
        if !names.insert(r.file.output.name.clone()) {
            return Err(CliError::config(format!(
                "two scenarios share output.name '{}'",
                r.file.output.name
            )));
        }
    }
    let results: Vec<_> = resolved.par_iter().map(&f).collect();
    let mut errors = Vec::new();
    for (path, (lines, res)) in configs.iter().zip(results) {
        lines.iter().for_each(|l| println!("{l}"));
        if let Err(e) = res {
            errors.push(e.context(&path.display().to_string()));
        }
    }
    let mut errors = errors.into_iter();
    let first = errors.next();
    for e in errors {
        eprintln!("error: {e}");
    }
    first.map_or(Ok(()), Err)
}

fn warn_all(r: &Resolved, warnings: &[spinwave::Warning]) {
    for w in warnings {
        eprintln!("warning: {}: {}: {}", r.file.output.name, w.source, w.message);
    }
}

fn curve(r: &Resolved, out: &Path, format: Option<Format>) -> (Vec<String>, CliResult<()>) {
    let run = match commands::curve::run(r, out, format) {
        Ok(run) => run,
        Err(e) => return (Vec::new(), Err(e)),
    };
    warn_all(r, &run.warnings);
    let mut lines = Vec::new();
    if let Some(t) = run.one_over_e_us {
        lines.push(format!("{}: 1/e time {t:.3} µs", r.file.output.name));
    }
    lines.push(format!("wrote {}", run.written.display()));
    (lines, Ok(()))
}

fn oracle(r: &Resolved, out: &Path, format: Option<Format>, tolerance: Option<f64>) -> (Vec<String>, CliResult<()>) {
    let name = &r.file.output.name;
    match commands::oracle::run(r, out, format, tolerance) {
        Err(e) => (Vec::new(), Err(e)),
        Ok(OracleOutcome::NoOracle(kind)) => (vec![format!("{name}: no oracle available for {kind}")], Ok(())),
        Ok(OracleOutcome::Done {
            written,
            pass,
            max_rel_dev,
            tolerance,
            notes,
        }) => {
            for n in &notes {
                eprintln!("note: {name}: {n}");
            }
            let verdict = if pass { "PASS" } else { "FAIL" };
            let mut lines = vec![format!(
                "{verdict} {name}: max relative deviation {max_rel_dev:.3e} (tolerance {tolerance:.1e})"
            )];
            lines.extend(written.iter().map(|p| format!("wrote {}", p.display())));
            let res = if pass {
                Ok(())
            } else {
                Err(CliError::Numerical(format!(
                    "oracle deviation {max_rel_dev:.3e} exceeds tolerance {tolerance:.1e}"
                )))
            };
            (lines, res)
        }
    }
}
