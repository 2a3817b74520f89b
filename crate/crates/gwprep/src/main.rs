use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gwprep::commands::{cmd_cost, cmd_prepare, cmd_target, cmd_train, output_dir};
use gwprep::config::Backend;
use gwprep::{CliError, Method, RunConfig};
use gwprep_core::Precision;

#[derive(Parser, Debug)]
#[command(name = "gwprep", version, about = "Quantum state preparation of inspiral waveforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file, or a preset name: paper-n6, fig9, qgan-l12, qgan-l20.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// RNG seed for training; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Amplitude preparation for `prepare`.
    #[arg(long, global = true, value_enum, default_value = "gr")]
    method: MethodArg,

    /// Dense-backend precision; selects the dense backend.
    #[arg(long, global = true, value_enum)]
    precision: Option<PrecisionArg>,

    /// Trained generator angles for `--method pqc`.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Write the discretised target waveform.
    Target,
    /// Run amplitude and phase preparation and compare with the target.
    Prepare,
    /// Train the generator circuit.
    Train,
    /// Tabulate gate-cost ratios over waveform duration.
    Cost,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MethodArg {
    Gr,
    Pqc,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum PrecisionArg {
    Double,
    Single,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Target => "target",
            Command::Prepare => "prepare",
            Command::Train => "train",
            Command::Cost => "cost",
        }
    }

    fn default_config(self) -> &'static str {
        match self {
            Command::Target | Command::Prepare => "paper-n6",
            Command::Train => "qgan-l20",
            Command::Cost => "fig9",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let source = cli.config.as_deref().unwrap_or(cli.command.default_config());
    let mut cfg = RunConfig::load(source)?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(p) = cli.precision {
        cfg.backend = Backend::Dense;
        cfg.precision = match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Single => Precision::Single,
        };
    }
    if cli.params.is_some() {
        cfg.pqc_params = cli.params.clone();
    }
    let cfg = cfg.resolve()?;
    let out = output_dir(cli.out.as_deref(), &cfg, cli.command.name());
    match cli.command {
        Command::Target => {
            let s = cmd_target(&cfg, &out)?;
            println!("target: {} bins, df = {} Hz", s.bins, s.delta_f);
        }
        Command::Prepare => {
            let method = match cli.method {
                MethodArg::Gr => Method::Gr,
                MethodArg::Pqc => Method::Pqc,
            };
            let r = cmd_prepare(&cfg, method, &out)?;
            println!(
                "prepare: fidelity {:.6} mismatch {:.3e} cnots {} (amplitude {}, phase oracle {}) max|dPsi'| {:.4}",
                r.fidelity, r.mismatch, r.cnot_count, r.cnot_amplitude, r.cnot_phase_oracle, r.max_delta_psi_prime
            );
        }
        Command::Train => {
            let r = cmd_train(&cfg, &out)?;
            println!(
                "train: best mismatch {:.3e} at iteration {}",
                r.best_mismatch, r.best_iteration
            );
        }
        Command::Cost => {
            let rows = cmd_cost(&cfg, &out)?;
            println!("cost: {rows} rows");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
