//! Builds a small curriculum dataset and shows one sample per level.
//!
//! cargo run --release --example dataset -- [size] [preset]

use compgen::assets::builtin_library;
use compgen::assets::llm::TemplateClient;
use compgen::curriculum::{build_dataset, check_prompt, BuildContext, DatasetPreset};

fn main() {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let preset: DatasetPreset = args.next().map(|s| s.parse().expect("preset")).unwrap_or(DatasetPreset::Uniform);
    let library = builtin_library();
    let client = TemplateClient;
    let ctx = BuildContext::new(&library, &client, 2024);
    let out = build_dataset(size, &preset.weights(), &ctx).expect("weights are valid");
    println!("{} samples, {} failures", out.samples.len(), out.failures.len());

    let mut shown = std::collections::BTreeSet::new();
    for s in &out.samples {
        if !shown.insert(s.level) {
            continue;
        }
        println!("\nlevel {} (difficulty {}), fidelity ok: {}", s.level, s.difficulty_exact, check_prompt(&s.graph, &s.prompt).passed());
        println!("  {}", s.prompt);
        for q in s.questions.iter().take(4) {
            println!("  - {}", q.text);
        }
        if s.questions.len() > 4 {
            println!("  ... {} more", s.questions.len() - 4);
        }
    }
}
