use std::path::PathBuf;
use std::process::ExitCode;

use blochldp_cli::commands::{self, Output};
use blochldp_cli::{CliError, Config, Overrides};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blochldp", version, about = "Qubit Markov semigroups: evolution, decay rates and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve an initial state and write its Bloch trajectory.
    Evolve(Run),
    /// Estimate the decay rate of the least eigenvalue.
    Rate(Run),
    /// Run the structural checks on one or more generators.
    Verify(Run),
    /// Tabulate absorbing state, gap and empirical rate over a parameter grid.
    Sweep {
        #[command(flatten)]
        run: Run,
        /// Worker threads; defaults to the available cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(clap::Args)]
struct Run {
    /// JSON configuration file.
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

impl Run {
    fn config(&self) -> Result<Config, CliError> {
        let mut cfg = Config::load(&self.config)?;
        cfg.apply(&self.overrides);
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (run, f): (&Run, Box<dyn Fn(&Config) -> Result<Output, CliError>>) = match &cli.command {
        Command::Evolve(r) => (r, Box::new(commands::evolve)),
        Command::Rate(r) => (r, Box::new(commands::rate)),
        Command::Verify(r) => (r, Box::new(commands::verify)),
        Command::Sweep { run, jobs } => {
            let jobs = *jobs;
            (run, Box::new(move |c: &Config| commands::sweep(c, jobs)))
        }
    };
    let cfg = run.config()?;
    let out = f(&cfg)?;
    commands::emit(&cfg, &out)
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
