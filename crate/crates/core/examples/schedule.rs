//! Level distributions of the three schedulers over a training run.
//!
//! cargo run --example schedule -- [levels] [steps] [beta] [sigma]

use compgen::scheduler::{distribution, sample_level, SchedulerKind, SchedulerParams};

fn main() {
    let a: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let params = SchedulerParams {
        levels: a.first().map_or(10, |v| *v as usize),
        total_steps: a.get(1).map_or(100, |v| *v as usize),
        beta: *a.get(2).unwrap_or(&1.0),
        sigma: *a.get(3).unwrap_or(&1.0),
        stage_bounds: None,
    };
    params.validate().expect("valid parameters");
    let mut rng = compgen::rng::from_seed(1);
    for kind in SchedulerKind::ALL {
        println!("{}", kind.name());
        for t in (0..params.total_steps).step_by((params.total_steps / 5).max(1)) {
            let d = distribution(kind, t, &params).unwrap();
            let bars: String = d
                .probabilities
                .iter()
                .map(|p| [' ', '.', ':', '-', '=', '#'][(p * 5.0).round() as usize])
                .collect();
            let draws: Vec<usize> = (0..8).map(|_| sample_level(&d, &mut rng)).collect();
            println!("  t={t:<4} |{bars}| mode {:>2}  draws {draws:?}", d.argmax());
        }
    }
}
