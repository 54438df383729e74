use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qkroots_cli::{list_checks, parse_config, run_all, Status};

/// Verification checks for quantum difference equations, Bethe equations
/// and p-curvature.
#[derive(Parser)]
#[command(name = "qkroots", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the check catalog as JSON.
    List,
    /// Run the checks in a JSON config (one object or an array of them).
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Report path; defaults to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides every per-check seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            emit(&serde_json::to_string_pretty(list_checks()).expect("catalog serializes"));
            ExitCode::SUCCESS
        }
        Command::Run { config, out, seed, jobs } => run(config, out, seed, jobs),
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>, jobs: usize) -> ExitCode {
    let configs = match std::fs::read_to_string(&config)
        .map_err(|e| format!("reading {}: {e}", config.display()))
        .and_then(|text| parse_config(&text).map_err(|e| e.to_string()))
    {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qkroots: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match run_all(&configs, seed, jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qkroots: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    for c in &report.checks {
        let count = |s: Status| c.cases.iter().filter(|r| r.status == s).count();
        eprintln!(
            "{:<20} {:<8} {} pass, {} fail, {} finding ({:.0} ms)",
            c.check,
            format!("{:?}", c.status).to_lowercase(),
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Finding),
            c.runtime_ms
        );
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match out.or_else(|| configs.iter().find_map(|c| c.output.clone())) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text + "\n") {
                eprintln!("qkroots: writing {}: {e}", path.display());
                return ExitCode::from(EXIT_CONFIG);
            }
        }
        None => emit(&text),
    }
    if report.status == Status::Fail {
        ExitCode::from(EXIT_FAIL)
    } else {
        ExitCode::SUCCESS
    }
}
