//! Trial protocol for the three samplers on the easy/medium/hard bands.
//!
//! cargo run --release --example sampling_efficiency -- [trials]

use compgen::assets::builtin_library;
use compgen::sampler::{run_trials, BandPreset, SamplerConfig, SamplerMethod};

fn main() {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let library = builtin_library();
    let cfg = SamplerConfig { seed: 2024, ..Default::default() };
    let cap = library.concept_capacity();
    println!("{:<18} {:>8} {:>8} {:>8}", "method", "band", "SR", "NTD");
    for method in SamplerMethod::ALL {
        for band in BandPreset::ALL {
            let range = band.range(&cfg, cap).expect("preset bands are attainable");
            let r = run_trials(trials, band.name(), &range, &cfg, &library, method);
            println!("{:<18} {:>8} {:>7.1}% {:>8}", r.method, r.band, 100.0 * r.success_rate, r.ntd);
        }
    }
}
