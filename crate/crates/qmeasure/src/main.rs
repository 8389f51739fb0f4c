use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use qmeasure::{acceptance, config, runner, DESCRIPTIONS};

#[derive(Parser)]
#[command(name = "qmeasure", version, about = "Error, disturbance and uncertainty-product experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario or a sweep described by a TOML or JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweeps.
        #[arg(long)]
        jobs: Option<usize>,
        /// Seed for randomized parts (overrides `seed`).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List registered scenarios.
    List,
    /// Run the built-in acceptance criteria.
    Check {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn run(config: PathBuf, out: Option<PathBuf>, jobs: Option<usize>, seed: Option<u64>) -> anyhow::Result<()> {
    let mut cfg = config::load_config(&config)?;
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    if let Some(seed) = seed {
        cfg.setup.seed = seed;
    }
    let execution = runner::execute(&cfg, jobs)?;
    if let runner::Execution::Sweep(sweep) = &execution {
        for (field, fit) in &sweep.fits {
            println!("fit {field}: slope {:.6}, intercept {:.6}, r2 {:.8}", fit.slope, fit.intercept, fit.r_squared);
        }
    }
    for path in runner::write(&cfg, &execution).context("writing outputs")? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn check(only: &[u8]) -> bool {
    let mut all = true;
    for (id, ..) in acceptance::CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let c = acceptance::run_one(id).expect("registered criterion");
        println!("{c}");
        all &= c.pass;
    }
    all
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, jobs, seed } => match run(config, out, jobs, seed) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
        Command::List => {
            for (name, about) in DESCRIPTIONS {
                println!("{name:<16} {about}");
            }
            ExitCode::SUCCESS
        }
        Command::Check { only } => {
            if check(&only) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
