mod common;

use compgen::cgrpo::{
    evaluate_heldout, sim_train, split_heldout, CgrpoConfig, MockOracle, SimConfig, SimPolicy, WeightingMode,
};
use compgen::scheduler::{SchedulerKind, SchedulerParams};

#[test]
fn training_is_deterministic_per_seed() {
    let data = common::builtin_dataset(200, 21);
    let (train, heldout) = split_heldout(&data, 1);
    let run = |seed| {
        sim_train(
            &train,
            &heldout,
            SchedulerKind::Gaussian,
            &SchedulerParams::new(10, 60),
            &CgrpoConfig::default(),
            &SimConfig::default(),
            &MockOracle::smoothed(),
            60,
            seed,
        )
        .unwrap()
    };
    let a = run(1);
    assert_eq!(a, run(1));
    assert_ne!(a.trace, run(2).trace);
    assert_eq!(heldout.len(), 50);
    assert!(train.iter().all(|s| !heldout.iter().any(|h| h.id == s.id)));
}

#[test]
fn easy_to_hard_draws_follow_the_stages() {
    let data = common::builtin_dataset(200, 22);
    let (train, heldout) = split_heldout(&data, 2);
    let out = sim_train(
        &train,
        &heldout,
        SchedulerKind::EasyToHard,
        &SchedulerParams::new(10, 100),
        &CgrpoConfig::default(),
        &SimConfig::default(),
        &MockOracle::smoothed(),
        100,
        2,
    )
    .unwrap();
    for r in &out.trace {
        assert_eq!(r.level_drawn as usize, r.step / 10 + 1);
    }
}

#[test]
fn level_weight_mode_trains_too() {
    let data = common::builtin_dataset(150, 23);
    let (train, heldout) = split_heldout(&data, 3);
    let cfg = CgrpoConfig { mode: WeightingMode::LevelWeight, ..Default::default() };
    let out = sim_train(
        &train,
        &heldout,
        SchedulerKind::Gaussian,
        &SchedulerParams::new(10, 150),
        &cfg,
        &SimConfig::default(),
        &MockOracle::smoothed(),
        150,
        3,
    )
    .unwrap();
    assert!(out.final_heldout > out.initial_heldout);
    assert!(out.trace.iter().all(|r| r.mean_reward <= 1.0 && r.kl >= 0.0));
}

#[test]
fn heldout_evaluation_uses_common_noise() {
    let data = common::builtin_dataset(150, 24);
    let (_, heldout) = split_heldout(&data, 4);
    let sim = SimConfig::default();
    let weak = SimPolicy::new(10, -1.0, sim.load_penalty);
    let strong = SimPolicy::new(10, 1.0, sim.load_penalty);
    let oracle = MockOracle::smoothed();
    let w = evaluate_heldout(&weak, &heldout, 8, &oracle, 4);
    assert_eq!(w, evaluate_heldout(&weak, &heldout, 8, &oracle, 4));
    // with shared noise, raising every inclusion probability cannot lower the score
    assert!(evaluate_heldout(&strong, &heldout, 8, &oracle, 4) >= w);
}
