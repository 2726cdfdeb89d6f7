use clap::{Parser, Subcommand};
use krflow_cli::commands;
use std::path::PathBuf;

/// Kähler-Ricci flow laboratory for symmetric metrics on CP1 and CP2.
#[derive(Parser)]
#[command(name = "krflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the flow and write trace.csv, summary.json, states, plots and manifest.json.
    Simulate {
        /// Configuration file; repeat to run several configurations in parallel.
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Number of random space-time pairs for the Harnack check.
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print functionals and invariants of a stored state as JSON.
    Audit { state: PathBuf },
    /// Print invariant Laplacian eigenvalues.
    Spectrum {
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Run property suites: all, algebra, geometry, functionals, invariants, flow.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Break one named coefficient to confirm the suites detect it.
        #[arg(long, env = "KRFLOW_MUTATE")]
        mutate: Option<String>,
    },
    /// Write SVG plots for a run directory.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Simulate { config, out, pairs, seed } => commands::cmd_simulate(&config, &out, pairs, seed),
        Command::Audit { state } => commands::cmd_audit(&state),
        Command::Spectrum { state, config, count } => commands::cmd_spectrum(state.as_deref(), config.as_deref(), count),
        Command::Verify { suite, trials, seed, mutate } => commands::cmd_verify(&suite, trials, seed, mutate.as_deref()),
        Command::Report { out } => commands::cmd_report(&out),
    };
    std::process::exit(code);
}
