use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dualsat::audit::{link_budget_audit, render};
use dualsat::error::{HarnessError, Result};
use dualsat::output::{crossings, parse_csv, write_results};
use dualsat::patterns::dump;
use dualsat::scenario::Scenario;
use dualsat::sweep::run_sweep_with_threads;
use dualsat_core::architectures::Architecture;
use dualsat_core::system::System;

#[derive(Parser)]
#[command(name = "dualsat", version, about = "Dual co-located multibeam satellite simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the power sweep of a scenario and write the result files.
    Run {
        /// Scenario file; built-in defaults when omitted.
        scenario: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        drops: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Restrict to these architectures (repeatable).
        #[arg(long = "arch")]
        arch: Vec<Architecture>,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the link-budget audit.
    Table1 { scenario: Option<PathBuf> },
    /// Print the beam layouts and slot patterns.
    Patterns {
        scenario: Option<PathBuf>,
        /// Write the dump to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report spectral-efficiency crossings from result CSVs.
    Crossing {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// Restrict to pairs involving these architectures (repeatable).
        #[arg(long = "arch")]
        arch: Vec<Architecture>,
    },
}

fn load(path: &Option<PathBuf>) -> Result<Scenario> {
    match path {
        Some(p) => Scenario::load(p),
        None => Ok(Scenario::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            drops,
            out,
            arch,
            threads,
        } => {
            let mut sc = load(&scenario)?;
            if let Some(s) = seed {
                sc.sweep.seed = s;
            }
            if let Some(d) = drops {
                sc.sweep.drops = d;
            }
            if !arch.is_empty() {
                sc.sweep.architectures = arch;
            }
            let dir = out.unwrap_or_else(|| sc.output.dir.clone());
            sc.validate()?;
            let threads = threads.unwrap_or(0);
            let results = run_sweep_with_threads(&sc, threads)?;
            let files = write_results(&results, &dir)?;
            eprintln!(
                "{} power points x {} architectures, {} drops each, {} redrawn",
                results.powers.len(),
                results.architectures.len(),
                sc.sweep.drops,
                results.resampled.len()
            );
            for f in [&files.csv, &files.metadata, &files.cdf, &files.summary] {
                println!("{}", f.display());
            }
        }
        Command::Table1 { scenario } => {
            let sc = load(&scenario)?;
            let lines = link_budget_audit(&sc.link_budget)?;
            print!("{}", render(&lines));
            if !lines.iter().all(|l| l.passes()) {
                return Err(HarnessError::Format(
                    "link budget outside the reference tolerances".into(),
                ));
            }
        }
        Command::Patterns { scenario, out } => {
            let sc = load(&scenario)?;
            let text = dump(&System::new(sc.system_config())?);
            match out {
                Some(p) => fs::write(&p, text).map_err(|e| HarnessError::io(&p, e))?,
                None => print!("{text}"),
            }
        }
        Command::Crossing { csv, arch } => {
            let mut rows = Vec::new();
            for p in &csv {
                let f = fs::File::open(p).map_err(|e| HarnessError::io(p, e))?;
                rows.extend(parse_csv(f)?);
            }
            for (a, b, x) in crossings(&rows) {
                if !arch.is_empty() && !(arch.contains(&a) || arch.contains(&b)) {
                    continue;
                }
                match x {
                    Some(x) => println!("{a}\t{b}\t{x}"),
                    None => println!("{a}\t{b}\tnone"),
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
