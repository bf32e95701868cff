use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use linhol::manifest::{Manifest, Suite};
use linhol::runner;

#[derive(Parser)]
#[command(
    name = "linhol",
    version,
    about = "Linear Poisson holonomy verification runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites of a manifest and write report.txt, results.csv, conventions.txt.
    Run {
        manifest: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Integrator steps per unit time.
        #[arg(long)]
        steps: Option<usize>,
        /// Samples per path.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run only these suites (repeatable); defaults to the manifest's list.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
}

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn load(
    path: &Path,
    steps: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
    suites: &[String],
) -> anyhow::Result<Manifest> {
    let mut m = Manifest::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(s) = steps {
        m.config.steps = s;
    }
    if let Some(s) = samples {
        m.config.samples = s;
    }
    if let Some(s) = seed {
        m.config.seed = s;
    }
    if !suites.is_empty() {
        m.suites = suites
            .iter()
            .map(|name| match Suite::from_name(name) {
                Some(s) => Ok(s),
                None => {
                    let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                    bail!("unknown suite '{name}' (known: {})", known.join(", "))
                }
            })
            .collect::<anyhow::Result<_>>()?;
    }
    Ok(m)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            manifest,
            out,
            steps,
            samples,
            seed,
            suites,
        } => {
            let scenario = match load(&manifest, steps, samples, seed, &suites).and_then(|m| {
                m.build()
                    .with_context(|| format!("validating {}", manifest.display()))
            }) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(EXIT_INVALID);
                }
            };
            let report = runner::run(&scenario);
            if let Err(e) = report.write_outputs(&out) {
                eprintln!("error: writing outputs to {}: {e}", out.display());
                return ExitCode::from(EXIT_INVALID);
            }
            let failures = report.failures().count();
            println!(
                "{}: {} rows, {} failed, conventions {} -> {}",
                report.name,
                report.rows.len(),
                failures,
                if report.conventions.as_ref().is_ok_and(|c| c.passed()) {
                    "ok"
                } else {
                    "MISMATCH"
                },
                out.display()
            );
            for r in report.failures() {
                let detail = r.error.clone().unwrap_or_else(|| format!("{:e}", r.value));
                println!("  FAIL {} {} {}: {}", r.label, r.suite, r.metric, detail);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
    }
}
