use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cqd::config::parse_config;
use cqd::runner::{builtin_checks, derive_report, run_scenario, RunManifest, RunOptions, OUT_ENV};
use cqd::{Error, RunConfig};

#[derive(Parser)]
#[command(version, about = "Charge-qubit dephasing by a squeezed LC oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output` and $CQD_OUT.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Oracle and adiabatic-elimination checks with built-in parameters.
    Check {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print derived model parameters under both capacitance conventions.
    Derive {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    parse_config(&text)
}

fn out_dir(flag: Option<PathBuf>, cfg: Option<&RunConfig>) -> PathBuf {
    flag.or_else(|| cfg.and_then(|c| c.output.clone()).map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cqd-out"))
}

fn summarize(m: &RunManifest) {
    for c in &m.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} {} value={:.3e} tolerance={:.3e} {}",
            c.name, c.value, c.tolerance, c.detail
        );
    }
    for e in &m.errors {
        eprintln!("error: {e}");
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, threads } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(Error::Io { path, source }) => {
                    eprintln!("error: {}: {source}", path.display());
                    return ExitCode::from(2);
                }
                Err(e) => return fail(&e),
            };
            let opts = RunOptions {
                out_dir: out_dir(out, Some(&cfg)),
                threads,
            };
            match run_scenario(&cfg, &opts) {
                Ok(m) => {
                    summarize(&m);
                    println!("wrote {} file(s) to {}", m.files.len(), opts.out_dir.display());
                    ExitCode::from(m.exit_code() as u8)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Check { out, threads } => {
            let root = out_dir(out, None);
            let mut code = 0;
            for cfg in builtin_checks() {
                let opts = RunOptions {
                    out_dir: root.join(cfg.scenario.as_str()),
                    threads,
                };
                match run_scenario(&cfg, &opts) {
                    Ok(m) => {
                        summarize(&m);
                        code = code.max(m.exit_code());
                    }
                    Err(e) => code = code.max(e.exit_code()),
                }
            }
            ExitCode::from(code as u8)
        }
        Command::Derive { config } => match load(&config).and_then(|c| derive_report(&c)) {
            Ok(report) => {
                print!("{report}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}
