//! Runs every pipeline command into a scratch directory, as the `compgen`
//! binary would.
//!
//! cargo run --release --example pipeline -- [output_dir]

use compgen::pipeline::{
    cmd_build_dataset, cmd_gen_assets, cmd_sample_graphs, cmd_schedule, cmd_train_sim, PipelineConfig,
};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("compgen_pipeline"));
    let mut config = PipelineConfig { output_dir: dir, trials: 200, ..Default::default() };
    config.dataset.size = 300;
    config.train.steps = 100;
    config.train.seeds = 3;
    println!("config digest {}", config.digest());
    let commands: [(&str, fn(&PipelineConfig) -> _); 5] = [
        ("gen-assets", cmd_gen_assets),
        ("sample-graphs", cmd_sample_graphs),
        ("build-dataset", cmd_build_dataset),
        ("schedule", cmd_schedule),
        ("train-sim", cmd_train_sim),
    ];
    for (name, cmd) in commands {
        match cmd(&config) {
            Ok(out) => {
                println!("== {name} ({} artifacts)", out.manifest.artifacts.len());
                println!("{}", out.summary.trim_end());
            }
            Err(e) => {
                eprintln!("{name} failed: {e}");
                std::process::exit(e.exit_code());
            }
        }
    }
    println!("outputs in {}", config.output_dir.display());
}
