use std::path::PathBuf;
use std::process::ExitCode;

use bethe_cli::problem::parse_problem;
use bethe_cli::report::ErrorEntry;
use bethe_cli::{run, Command, Overrides, Report};
use clap::Parser;

/// Exact scalar products, norms and form factors of gl(2|1) Bethe vectors.
#[derive(Parser, Debug)]
#[command(name = "bethe-sp", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per cardinality (per identity for `identities`).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    max_a: Option<usize>,
    #[arg(long)]
    max_b: Option<usize>,
    /// Worker threads; 0 means one per core.
    #[arg(long)]
    threads: Option<usize>,
    /// Report destination; stdout if absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-size budget for the partition-sum path of `bench`.
    #[arg(long)]
    budget_secs: Option<f64>,
    /// Allow bench sizes with a or b >= 4.
    #[arg(long)]
    large: bool,
}

fn write(report: &Report, out: Option<&PathBuf>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or(bethe_cli::commands::DEFAULT_SEED);
    let (report, code) = match std::fs::read_to_string(&cli.input) {
        Err(e) => {
            let mut r = Report::new(cli.command.name(), seed);
            r.errors.push(ErrorEntry::other("IoError", format!("{}: {e}", cli.input.display())));
            (r.finish(), 2)
        }
        Ok(text) => match parse_problem(&text) {
            Err(f) => {
                let mut r = Report::new(cli.command.name(), seed);
                r.errors.push(ErrorEntry::parse(&f));
                (r.finish(), 2)
            }
            Ok(problem) => {
                let o = Overrides {
                    seed: cli.seed,
                    trials: cli.trials,
                    max_a: cli.max_a,
                    max_b: cli.max_b,
                    threads: cli.threads,
                    budget_secs: cli.budget_secs,
                    large: cli.large,
                };
                let r = run(cli.command, &problem, &o);
                let code = if r.passed { 0 } else { 1 };
                (r, code)
            }
        },
    };
    if let Err(e) = write(&report, cli.output.as_ref()) {
        eprintln!("bethe-sp: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
