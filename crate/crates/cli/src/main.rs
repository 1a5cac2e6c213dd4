use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use heatindex_cli::{emit_report, exit, run_suite, RunConfig, Suite};

/// Thread count for the inner parallel sums.
const THREADS_ENV: &str = "HEATINDEX_THREADS";

#[derive(Parser)]
#[command(
    name = "heatindex",
    version,
    about = "Runs heat-kernel index verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite and write report.json plus CSV tables.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the suite named in the config.
        #[arg(long)]
        suite: Option<String>,
        /// Overrides the output directory named in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available suites.
    ListSuites,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE
            } else {
                exit::PASS
            });
        }
    };
    match cli.command {
        Command::ListSuites => {
            for s in Suite::ALL {
                println!("{:<14} {}", s.name(), s.description());
            }
            ExitCode::from(exit::PASS)
        }
        Command::Run { config, suite, out } => run(config, suite, out),
    }
}

fn run(path: PathBuf, suite: Option<String>, out: Option<PathBuf>) -> ExitCode {
    let mut config = match RunConfig::load(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::USAGE);
        }
    };
    if let Some(name) = suite {
        match Suite::parse(&name) {
            Some(s) => config.run.suite = s,
            None => {
                eprintln!("error: unknown suite {name:?}; see `heatindex list-suites`");
                return ExitCode::from(exit::USAGE);
            }
        }
    }
    if let Some(dir) = out {
        config.run.out = dir;
    }
    if let Ok(value) = std::env::var(THREADS_ENV) {
        match value.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    eprintln!("warning: could not size the thread pool: {e}");
                }
            }
            _ => {
                eprintln!("error: {THREADS_ENV}={value:?} is not a positive integer");
                return ExitCode::from(exit::USAGE);
            }
        }
    }

    let report = run_suite(&config);
    for c in &report.checks {
        println!(
            "{} {}: lhs {:.10e}, rhs {:.10e}, tolerance {:.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.lhs,
            c.rhs,
            c.tolerance
        );
    }
    for e in &report.errors {
        println!("ERROR {e}");
    }
    if let Err(e) = emit_report(&report, &config.run.out) {
        eprintln!("error: {e}");
        return ExitCode::from(exit::CHECK_FAILURE);
    }
    println!(
        "suite {}: {} ({} checks) -> {}",
        report.suite,
        if report.pass { "pass" } else { "FAIL" },
        report.checks.len(),
        config.run.out.display()
    );
    ExitCode::from(if report.pass {
        exit::PASS
    } else {
        exit::CHECK_FAILURE
    })
}
