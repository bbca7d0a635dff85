mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "commonbath",
    version,
    about = "Two qubits in a common bath: curves, Kraus checks, circuits and witness experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Write output to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Master seed for random sampling [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with option values keyed by long flag name; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Param {
    /// Γt for the multimode vacuum
    #[value(name = "gammaT")]
    GammaT,
    /// gt for the single-mode cavity
    #[value(name = "gt")]
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// Evolution setup (templated by theta1, theta2)
    Fig1,
    /// Collective-basis measurement setup
    Fig3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
/// Discriminants are the internal photon indices (Vv, Vh, Hv, Hh).
pub enum InputState {
    Ee = 0,
    Eg = 1,
    Ge = 2,
    Gg = 3,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Concurrence of the evolved |eg⟩ state over a parameter sweep
    Curve {
        /// Sweep parameter; gt selects the cavity model [default: gammaT]
        #[arg(long, value_enum)]
        param: Option<Param>,
        /// First sweep value [default: 0]
        #[arg(long, allow_negative_numbers = true)]
        start: Option<f64>,
        /// Last sweep value [default: 5]
        #[arg(long, allow_negative_numbers = true)]
        stop: Option<f64>,
        /// Number of evenly spaced points, at least 2 [default: 11]
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form and Choi-extracted Kraus operators with self-checks
    Kraus {
        /// Γt [default: 1]
        #[arg(long = "gamma-t", allow_negative_numbers = true)]
        gamma_t: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Propagate one photon through a netlist
    Circuit {
        /// Netlist file
        #[arg(long, conflicts_with = "builtin")]
        netlist: Option<PathBuf>,
        /// Bundled netlist instead of a file
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        /// Template value NAME=VALUE for a `{NAME}` placeholder (repeatable)
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        /// Two-qubit basis state to inject; defaults to the netlist's source
        #[arg(long, value_enum)]
        state: Option<InputState>,
        /// Path that receives --state [default: source path, else first input]
        #[arg(long)]
        input: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Simulated witness measurement with multinomial photon counts
    Experiment {
        /// Γt [default: ln 2]
        #[arg(long = "gamma-t", allow_negative_numbers = true)]
        gamma_t: Option<f64>,
        /// Number of photons [default: 100000]
        #[arg(long)]
        shots: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Curve { param, start, stop, points, common } => {
            commands::curve(&common, commands::CurveFlags { param, start, stop, points })
        }
        Command::Kraus { gamma_t, common } => commands::kraus(&common, gamma_t),
        Command::Circuit { netlist, builtin, set, state, input, common } => {
            commands::circuit(&common, commands::CircuitFlags { netlist, builtin, set, state, input })
        }
        Command::Experiment { gamma_t, shots, common } => commands::experiment(&common, gamma_t, shots),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
