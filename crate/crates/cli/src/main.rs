use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hvdcsim::commands::{cmd_compare, cmd_run, cmd_steady_state, cmd_sweep, SweepParameter};
use hvdcsim::range::parse_values;
use hvdcsim::{CliError, RunConfig};
use hvdcsim_core::{ControlMode, Service};

/// Frequency-response simulator of an HVDC-connected offshore wind power plant.
#[derive(Parser)]
#[command(name = "hvdcsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// energy_balancing or holistic
    #[arg(long)]
    control: Option<ControlMode>,
    /// fcr or inertia
    #[arg(long)]
    scenario: Option<Service>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Ok(cfg.with_selection(self.control, self.scenario))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both control modes on both scenarios.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the closed-form and oracle offshore steady state.
    SteadyState {
        #[command(flatten)]
        common: Common,
        /// Onshore frequency deviation, p.u.
        #[arg(long, allow_hyphen_values = true)]
        df_on: f64,
    },
    /// Sweep one parameter: R_dc, D_OWPP, H_OWPP or P_4.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        param: SweepParameter,
        /// Comma list or start:stop:count.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn execute(command: Command, w: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Run { common, out } => cmd_run(&common.load()?, &out, w).map(|_| ()),
        Command::Compare { common, out } => cmd_compare(&common.load()?, &out, w).map(|_| ()),
        Command::SteadyState { common, df_on } => {
            cmd_steady_state(&common.load()?, df_on, w).map(|_| ())
        }
        Command::Sweep { common, param, values, out } => {
            let values = parse_values(&values).map_err(|e| CliError::Config(e.to_string()))?;
            cmd_sweep(&common.load()?, param, &values, Path::new(&out), w).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match execute(cli.command, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
