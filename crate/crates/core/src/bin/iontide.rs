use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use iontide::scenarios::{self, ScenarioConfig, Status};
use iontide::Error;

#[derive(Parser)]
#[command(name = "iontide", version, about = "Fast-switching trapped-ion motion simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a configuration file.
    Run {
        scenario: String,
        #[arg(long)]
        config: PathBuf,
        /// Enable long full-scale runs.
        #[arg(long)]
        slow: bool,
        /// Directory for CSV tables and report.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for sweeps.
        #[arg(long)]
        jobs: Option<usize>,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// List available scenarios.
    List,
    /// Run every scenario with its built-in configuration and summarize the
    /// acceptance criteria.
    Check {
        #[arg(long)]
        slow: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for s in scenarios::scenarios() {
                println!("{:<12} {}", s.name, s.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Run { scenario, config, slow, out, seed, jobs, json } => {
            let mut cfg = match ScenarioConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return exit_for(&e),
            };
            if cfg.scenario != scenario {
                return exit_for(&Error::Config(format!("{} configures scenario {:?}, not {scenario:?}", config.display(), cfg.scenario)));
            }
            cfg.slow |= slow;
            if out.is_some() {
                cfg.out_dir = out;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if jobs.is_some() {
                cfg.jobs = jobs;
            }
            match scenarios::run(&cfg) {
                Ok(report) => {
                    if json {
                        println!("{}", report.to_json());
                    } else {
                        print!("{}", report.render());
                    }
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => exit_for(&e),
            }
        }
        Command::Check { slow, out } => {
            let reports = match scenarios::run_acceptance(slow, out.as_deref()) {
                Ok(r) => r,
                Err(e) => return exit_for(&e),
            };
            for r in &reports {
                print!("{}", r.render());
            }
            println!();
            let summary = scenarios::summarize_criteria(&reports);
            let mut ok = reports.iter().all(|r| r.passed());
            for c in &summary {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skipped => "SKIP",
                };
                ok &= c.status != Status::Fail;
                println!("criterion {:>2} {tag} {} ({})", c.id, c.title, c.detail);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
