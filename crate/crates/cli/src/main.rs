//! `cfp`: exact statistics, closed-form analytics, pair times and
//! stochastic simulation of finite-N coagulation-fragmentation processes.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric/resource error (or a
//! `compare` run that missed its tolerance).

mod args;
mod commands;
mod output;

use clap::Parser;
use commands::{analytic, exact_cmd, grids, stochastic};

#[derive(Parser, Debug)]
#[command(
    name = "cfp",
    version,
    about = "Steady-state statistics and exact simulation of finite-N coagulation-fragmentation"
)]
enum Cli {
    /// Steady-state distribution, moments and ⟨P₂⟩ for one kernel point
    Exact(exact_cmd::ExactArgs),
    /// Constant-kernel closed forms over an (N, a) grid
    Analytic(analytic::AnalyticArgs),
    /// Mean separation/reunion times from absorbing jump chains
    Pairtimes(stochastic::PairtimesArgs),
    /// Event-driven exact stochastic simulation
    Simulate(stochastic::SimulateArgs),
    /// Exact values against a simulation, flagging 3-sigma misses
    Compare(stochastic::CompareArgs),
    /// Quantity over an (N, a[, M]) grid as long-format CSV
    Sweep(grids::SweepArgs),
    /// Plot-ready data files (G₁ error, mean counts, Π_K, ⟨P₂⟩ vs a)
    Emit(grids::EmitArgs),
}

fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<stochastic::CompareMiss>().is_some() {
        return 2;
    }
    if let Some(core) = err.downcast_ref::<cfp_core::Error>() {
        return match core {
            cfp_core::Error::InvalidArgument(_) | cfp_core::Error::Parse(_) => 1,
            _ => 2,
        };
    }
    // Argument-shape problems surface as plain anyhow messages.
    if err.downcast_ref::<std::io::Error>().is_some() {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli {
        Cli::Exact(args) => exact_cmd::run(&args),
        Cli::Analytic(args) => analytic::run(&args),
        Cli::Pairtimes(args) => stochastic::run_pairtimes(&args),
        Cli::Simulate(args) => stochastic::run_simulate(&args),
        Cli::Compare(args) => stochastic::run_compare(&args),
        Cli::Sweep(args) => grids::run_sweep(&args),
        Cli::Emit(args) => grids::run_emit(&args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help/version are successes; genuine parse failures exit 1.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}
