//! The `figas` pipeline: text scoring through forecast evaluation, plus a
//! synthetic data generator with known ground truth.

pub mod config;
pub mod design;
pub mod error;
pub mod evaluate;
pub mod forecast;
pub mod insample;
pub mod output;
pub mod score;
pub mod synth;

pub use config::Config;
pub use error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Score,
    Aggregate,
    Design,
    Insample,
    Forecast,
    Evaluate,
    Synth,
}

/// Runs one pipeline stage.
pub fn run(cmd: Command, cfg: &Config) -> Result<()> {
    match cmd {
        Command::Score => score::cmd_score(cfg).map(drop),
        Command::Aggregate => score::cmd_aggregate(cfg),
        Command::Design => design::cmd_design(cfg),
        Command::Insample => insample::cmd_insample(cfg).map(drop),
        Command::Forecast => forecast::cmd_forecast(cfg).map(drop),
        Command::Evaluate => evaluate::cmd_evaluate(cfg).map(drop),
        Command::Synth => synth::cmd_synth(cfg).map(drop),
    }
}
