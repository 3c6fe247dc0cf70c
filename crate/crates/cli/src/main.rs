use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qwram_cli::commands::{self, Mode, ResourcesConfig, RunConfig, SchemeArg};
use qwram_cli::CliError;

/// Gate-level simulator for a quantum-walk RAM on binary trees.
///
/// Exit codes: 0 ok, 1 verification failure, 2 input error, 3 domain error.
#[derive(Parser)]
#[command(name = "qwram", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scheme and dump the final state, one basis term per line.
    Run(RunFlags),
    /// Run a scheme and compare against the directly constructed target.
    Verify(VerifyFlags),
    /// Exact depth/gate/qubit counts with the baseline columns.
    Resources(ResourceFlags),
    /// Run a scheme with a per-stage device trace.
    Trace(RunFlags),
}

#[derive(Args)]
struct RunFlags {
    /// Memory specification file.
    #[arg(long)]
    memory: PathBuf,
    /// Which map to run.
    #[arg(long, value_enum, default_value_t = Mode::Classical)]
    mode: Mode,
    /// Comma list of decimal addresses, or "all" (classical/quantum modes).
    #[arg(long)]
    addresses: Option<String>,
    /// Semicolon list of complex weights "re" or "re,im"; normalized.
    #[arg(long)]
    weights: Option<String>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fidelity tolerance for verification.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Include state snapshots in traces.
    #[arg(long)]
    snapshots: bool,
}

#[derive(Args)]
struct VerifyFlags {
    #[command(flatten)]
    run: RunFlags,
    /// Check every memory and address set for the file's register sizes.
    #[arg(long)]
    exhaustive: bool,
    /// Test hook: drop the k-th cascade layer stage before running.
    #[arg(long, value_name = "K")]
    skip_cascade_layer: Option<usize>,
    /// Test hook: flip the orientation of the k-th roundabout stage.
    #[arg(long, value_name = "K")]
    flip_roundabout: Option<usize>,
}

#[derive(Args)]
struct ResourceFlags {
    /// Address width, a single size "3" or a range "1..8".
    #[arg(long)]
    n: String,
    /// Data width, a single size or a range.
    #[arg(long)]
    m: String,
    /// Scheme to count.
    #[arg(long, value_enum, default_value_t = SchemeArg::Qram)]
    scheme: SchemeArg,
    /// Emit comma-separated values instead of the aligned table.
    #[arg(long)]
    csv: bool,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_config(flags: &RunFlags) -> RunConfig {
    RunConfig {
        memory: flags.memory.clone(),
        mode: flags.mode,
        addresses: flags.addresses.clone(),
        weights: flags.weights.clone(),
        tolerance: flags.tolerance,
        snapshots: flags.snapshots,
        exhaustive: false,
        skip_cascade_layer: None,
        flip_roundabout: None,
    }
}

fn emit(text: String, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Run(flags) => {
            let text = commands::cmd_run(&run_config(&flags))?;
            emit(text, flags.out.as_ref())
        }
        Cmd::Trace(flags) => {
            let text = commands::cmd_trace(&run_config(&flags))?;
            emit(text, flags.out.as_ref())
        }
        Cmd::Verify(flags) => {
            let mut config = run_config(&flags.run);
            config.exhaustive = flags.exhaustive;
            config.skip_cascade_layer = flags.skip_cascade_layer;
            config.flip_roundabout = flags.flip_roundabout;
            let report = commands::cmd_verify(&config)?;
            emit(report, flags.run.out.as_ref())
        }
        Cmd::Resources(flags) => {
            let config = ResourcesConfig {
                n: flags.n.clone(),
                m: flags.m.clone(),
                scheme: flags.scheme,
                csv: flags.csv,
            };
            let text = commands::cmd_resources(&config)?;
            emit(text, flags.out.as_ref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = dispatch(cli) {
        match &error {
            // A failed verification still prints its report as the result.
            CliError::Verification(report) => print!("{report}"),
            other => eprintln!("{other}"),
        }
        std::process::exit(error.exit_code());
    }
}
