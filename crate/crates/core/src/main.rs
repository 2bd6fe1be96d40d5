use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use compgen::pipeline::{
    cmd_build_dataset, cmd_gen_assets, cmd_sample_graphs, cmd_schedule, cmd_train_sim, Overrides, PipelineConfig,
    PipelineError,
};

#[derive(Parser)]
#[command(name = "compgen", version, about = "Difficulty-controlled scene-graph curricula")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the asset library JSON.
    GenAssets,
    /// Compare samplers over the easy, medium and hard bands.
    SampleGraphs,
    /// Write a curriculum dataset as JSONL plus a manifest.
    BuildDataset,
    /// Write a per-step level distribution CSV.
    Schedule,
    /// Run the simulated learner under each scheduler.
    TrainSim,
    /// Print the effective config as TOML.
    ShowConfig,
}

fn run(cli: Cli) -> Result<String, PipelineError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    config.apply(&cli.overrides);
    let out = match cli.command {
        Command::GenAssets => cmd_gen_assets(&config)?,
        Command::SampleGraphs => cmd_sample_graphs(&config)?,
        Command::BuildDataset => cmd_build_dataset(&config)?,
        Command::Schedule => cmd_schedule(&config)?,
        Command::TrainSim => cmd_train_sim(&config)?,
        Command::ShowConfig => return Ok(config.to_toml()),
    };
    Ok(out.summary)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{}", summary.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
