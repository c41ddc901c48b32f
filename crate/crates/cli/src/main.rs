use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use figas_cli::{run, Command, Config};

#[derive(Parser)]
#[command(name = "figas", version, about = "Fine-grained news sentiment and real-time forecasting pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Score the parsed corpus; writes chunk scores and daily series.
    Score(Common),
    /// Re-smooth and resample the daily series.
    Aggregate(Common),
    /// Write real-time design matrices for every horizon.
    Design(Common),
    /// Double-selection inference per horizon with FDR-adjusted p-values.
    Insample(Common),
    /// Pseudo out-of-sample forecasts for ARX, ARXS, Average and LASSO.
    Forecast(Common),
    /// aSPA, fluctuation and fit-metric reports.
    Evaluate(Common),
    /// Generate a synthetic corpus, lexicon, vintages and manifest.
    Synth(Common),
}

#[derive(Args)]
struct Common {
    /// Flat TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (relative to the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override any config key: `--set key=value` (value in TOML syntax).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Cmd::Score(c) => (Command::Score, c),
        Cmd::Aggregate(c) => (Command::Aggregate, c),
        Cmd::Design(c) => (Command::Design, c),
        Cmd::Insample(c) => (Command::Insample, c),
        Cmd::Forecast(c) => (Command::Forecast, c),
        Cmd::Evaluate(c) => (Command::Evaluate, c),
        Cmd::Synth(c) => (Command::Synth, c),
    };
    let result = Config::load(common.config.as_deref(), &common.set).and_then(|mut cfg| {
        if let Some(s) = common.seed {
            cfg.seed = s;
        }
        if let Some(o) = common.out {
            let abs = if o.is_absolute() { o } else { std::env::current_dir()?.join(o) };
            cfg.out = abs.to_string_lossy().into_owned();
        }
        run(cmd, &cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("figas: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
