//! Rewards, advantages and the clipped objective on one hand-made group.
//!
//! cargo run --example cgrpo_math

use compgen::cgrpo::{
    advantages, cgrpo_objective, clipped_term, overall_reward, question_rewards, CgrpoConfig, MockOracle, Rendition,
};
use compgen::curriculum::generate_questions;
use compgen::scene_graph::{ObjectNode, RelationEdge};
use compgen::SceneGraph;

fn main() {
    let mut g = SceneGraph::new();
    for (id, name) in ["cat", "cat", "sofa"].iter().enumerate() {
        g.objects.push(ObjectNode { id: id as u32, name: name.to_string(), category: None });
    }
    g.relations.push(RelationEdge { id: 0, subject: 0, object: 2, predicate: "sleeping on".into() });
    let questions = generate_questions(&g);

    let full = Rendition::of_graph(&g);
    let mut one_cat = full.clone();
    one_cat.objects.remove(0);
    let mut no_sofa = full.clone();
    no_sofa.objects.retain(|o| o != "sofa");
    no_sofa.relations.clear();
    let group = [full, one_cat, no_sofa, Rendition::default()];

    let oracle = MockOracle::smoothed();
    let rewards: Vec<f64> = group
        .iter()
        .map(|r| overall_reward(&question_rewards(r, &questions, &oracle).unwrap(), 1.0).unwrap())
        .collect();
    let adv = advantages(&rewards, 1e-8).unwrap();
    for (i, (r, a)) in rewards.iter().zip(&adv.values).enumerate() {
        println!("rendition {i}: reward {r:.3}  advantage {a:+.3}");
    }

    let cfg = CgrpoConfig::default();
    for ratio in [0.5, 0.9, 1.0, 1.1, 1.5] {
        println!(
            "ratio {ratio}: A=+1 -> {:+.2}, A=-1 -> {:+.2}",
            clipped_term(ratio, 1.0, cfg.clip_epsilon),
            clipped_term(ratio, -1.0, cfg.clip_epsilon)
        );
    }
    let logp_old = [-2.0, -3.0, -2.5, -4.0];
    let logp = [-1.8, -3.1, -2.9, -4.5];
    let (j, d) = cgrpo_objective(&logp, &logp_old, &adv.values, 0.05, &cfg).unwrap();
    println!("objective {j:.4}, mean ratio {:.3}, clipped {:.0}%", d.mean_ratio, 100.0 * d.clip_fraction);
}
