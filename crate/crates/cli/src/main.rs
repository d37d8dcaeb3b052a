//! `ibt`: command-line front end for the intermittent baker's transformation
//! kernels.
//!
//! Exit status: 0 on success, 1 on a numerical failure, 2 on invalid input
//! (bad arguments, unknown subcommand, missing or malformed config), 3 when
//! the output cannot be written.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::output::Failure;

#[derive(Parser, Debug)]
#[command(name = "ibt", version, about = "Intermittent baker's transformations: simulation and checks")]
struct Cli {
    /// Worker threads for ensemble runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Contact data and cut abscissa of a beta cut function.
    IcfInfo(commands::IcfInfoArgs),
    /// One orbit of B as CSV rows `k,x,y`.
    Trajectory(commands::TrajectoryArgs),
    /// Period-two orbit, preimage asymptotics, Kac sum and tail exponent.
    OrbitAsym(commands::OrbitAsymArgs),
    /// Histogram of return times of uniform base points against the cell measures.
    ReturnHist(commands::ReturnHistArgs),
    /// Correlation decay `Cor(k)` for a chosen observable.
    Correlations(commands::CorrelationsArgs),
    /// Limit-law prediction and ensemble diagnostics from a JSON config.
    LimitLaw(commands::LimitLawArgs),
    /// Draws from a stable law.
    SampleStable(commands::SampleStableArgs),
    /// Leading Ulam spectrum of the induced factor map.
    UlamGap(commands::UlamGapArgs),
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        ibt_core::parallel::configure_threads(n)?;
    }
    let threads = ibt_core::parallel::worker_threads();
    match cli.command {
        Command::IcfInfo(a) => commands::icf_info(a),
        Command::Trajectory(a) => commands::trajectory(a),
        Command::OrbitAsym(a) => commands::orbit_asym(a),
        Command::ReturnHist(a) => commands::return_hist(a),
        Command::Correlations(a) => commands::correlations(a),
        Command::LimitLaw(a) => commands::limit_law(a, threads),
        Command::SampleStable(a) => commands::sample_stable(a),
        Command::UlamGap(a) => commands::ulam_gap(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ibt: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
