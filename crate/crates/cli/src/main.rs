mod commands;
mod svg;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Damped waves on flat tori with polyhedral damping.
#[derive(Parser)]
#[command(name = "polydamp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct SceneArgs {
    /// Scene file (JSON, rationals as "p/q" strings).
    #[arg(long, conflicts_with = "preset")]
    pub scene: Option<PathBuf>,
    /// Built-in scene, `name` or `name:params`.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check control conditions; exit 0 all hold, 1 some fail, 2 unknown, 3 invalid scene.
    Verify(commands::VerifyArgs),
    /// Run the damped wave equation and fit the energy decay.
    Simulate(commands::SimulateArgs),
    /// Trial quasimodes over an h sweep: observability ratio and slice estimates.
    Probe(commands::ProbeArgs),
    /// The flow at infinity, closed form against the angle integrator.
    Flow(commands::FlowArgs),
    /// Straighten a closed geodesic by orthonormal changes of coordinates.
    Reduce(commands::ReduceArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.command {
        Command::Verify(a) => commands::verify(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Probe(a) => commands::probe(&a),
        Command::Flow(a) => commands::flow(&a),
        Command::Reduce(a) => commands::reduce(&a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
