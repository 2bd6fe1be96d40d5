//! Trains the simulated policy under each scheduler and prints held-out
//! reward curves averaged over seeds.
//!
//! cargo run --release --example sim_training -- [steps] [seeds]

use compgen::assets::builtin_library;
use compgen::assets::llm::TemplateClient;
use compgen::cgrpo::{sim_train, split_heldout, CgrpoConfig, MockOracle, SimConfig};
use compgen::curriculum::{build_dataset, BuildContext, DatasetPreset};
use compgen::scheduler::{SchedulerKind, SchedulerParams};

fn main() {
    let mut args = std::env::args().skip(1).filter_map(|s| s.parse::<usize>().ok());
    let steps = args.next().unwrap_or(200);
    let seeds = args.next().unwrap_or(5) as u64;
    let library = builtin_library();
    let client = TemplateClient;
    let ctx = BuildContext::new(&library, &client, 2024);
    let data = build_dataset(500, &DatasetPreset::Uniform.weights(), &ctx).unwrap().samples;

    let checkpoints: Vec<usize> = (1..=5).map(|k| k * steps / 5).filter(|&s| s > 0).collect();
    print!("{:<14}{:>8}", "scheduler", "0");
    for c in &checkpoints {
        print!("{c:>8}");
    }
    println!();
    for kind in SchedulerKind::ALL {
        let mut curve = vec![0.0; checkpoints.len() + 1];
        for seed in 0..seeds {
            let (train, heldout) = split_heldout(&data, seed);
            let out = sim_train(
                &train,
                &heldout,
                kind,
                &SchedulerParams::new(10, steps.max(1)),
                &CgrpoConfig::default(),
                &SimConfig::default(),
                &MockOracle::smoothed(),
                steps,
                seed,
            )
            .unwrap();
            curve[0] += out.initial_heldout / seeds as f64;
            for (i, c) in checkpoints.iter().enumerate() {
                curve[i + 1] += out.trace[c - 1].heldout_reward / seeds as f64;
            }
        }
        print!("{:<14}", kind.name());
        for v in curve {
            print!("{v:>8.3}");
        }
        println!();
    }
}
