use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use monopole::cli::{run, Command, Invocation};

/// Charged-particle motion around generalized magnetic monopoles:
/// integrate scenarios, verify the field identities, predict the cone the
/// orbit lives on, and cross-check against the closed-form geodesic.
#[derive(Parser)]
#[command(name = "monopole", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a scenario, write the trajectory CSV and a report
    Simulate(CommonArgs),
    /// Check the field identities at seeded random states (no integration)
    Verify(CommonArgs),
    /// Predict the cone carried by the initial state
    Cone(CommonArgs),
    /// Integrate and compare against the closed-form geodesic
    Compare(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file (JSON); repeat to run a sweep
    #[arg(long = "config", value_name = "PATH", required = true)]
    config: Vec<PathBuf>,
    /// Directory receiving output files
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write the internal charge per sample to a companion CSV
    #[arg(long)]
    dump_xi: bool,
    /// Worker threads when sweeping several configs
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Usage problems belong to the config failure class; --help and
            // --version are not failures.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, args) = match cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Cone(a) => (Command::Cone, a),
        Cmd::Compare(a) => (Command::Compare, a),
    };
    let inv = Invocation {
        command,
        configs: args.config,
        out_dir: args.out,
        dump_xi: args.dump_xi,
        jobs: args.jobs,
    };
    ExitCode::from(run(&inv) as u8)
}
