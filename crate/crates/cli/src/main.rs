use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gapbridge::{run, Command, ExperimentConfig, Invocation};

#[derive(Parser)]
#[command(
    name = "gapbridge",
    version,
    about = "Learn neural corrections between an assumed model and observed dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Checkpoint manifest to write (train) or read (other commands).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Replaces every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the true and assumed models and write their trajectories.
    Generate(Common),
    /// Build windows and splits, then train the correction network.
    Train(Common),
    /// Compare U_curr and U_nn against U_act on every split.
    Evaluate(Common),
    /// POD bases and mode similarities.
    Pod(Common),
    /// Metrics over consecutive future intervals.
    Horizon(Common),
    /// Dominant-frequency comparison.
    Fft(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Generate(a) => (Command::Generate, a),
        Cmd::Train(a) => (Command::Train, a),
        Cmd::Evaluate(a) => (Command::Evaluate, a),
        Cmd::Pod(a) => (Command::Pod, a),
        Cmd::Horizon(a) => (Command::Horizon, a),
        Cmd::Fft(a) => (Command::Fft, a),
    };
    let mut config = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("gapbridge: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(seed) = args.seed {
        config.override_seed(seed);
    }
    let mut inv = Invocation::new(command, config);
    if let Some(out) = args.out {
        inv.out = out;
    }
    inv.checkpoint = args.checkpoint;
    let (record, outcome) = run(&inv);
    match outcome {
        Ok(()) => {
            for a in &record.artifacts {
                println!("{}", a.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gapbridge {}: {e}", command.as_str());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
