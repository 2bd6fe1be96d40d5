//! Builds a small scene by hand and reports its difficulty under each measure.
//!
//! cargo run --example difficulty

use compgen::curriculum::level_of;
use compgen::scene_graph::{AttributeNode, ObjectNode, RelationEdge};
use compgen::{difficulty, difficulty_variant, signature, validate, DifficultyMeasure, SceneGraph};

fn main() {
    let mut g = SceneGraph::new();
    for (id, name) in ["dog", "dog", "hamburger"].iter().enumerate() {
        g.objects.push(ObjectNode { id: id as u32, name: name.to_string(), category: None });
    }
    for (id, (owner, value)) in [(0, "white"), (1, "yellow")].iter().enumerate() {
        g.attributes.push(AttributeNode {
            id: id as u32,
            owner: *owner,
            concept: "color".into(),
            value: value.to_string(),
        });
    }
    g.relations.push(RelationEdge { id: 0, subject: 0, object: 2, predicate: "eating".into() });
    assert!(validate(&g).is_empty());

    let d = difficulty(&g).expect("graph has objects");
    println!("signature  {:?}", signature(&g));
    println!("difficulty {d} (level {})", level_of(d));
    for m in [DifficultyMeasure::Product, DifficultyMeasure::Additive, DifficultyMeasure::Averaged] {
        println!("  {m:?}: {}", difficulty_variant(&g, m).unwrap());
    }

    // attributes and relations only start to count once they outnumber objects
    for extra in 0..4u32 {
        let mut h = g.clone();
        for k in 0..extra {
            h.attributes.push(AttributeNode {
                id: 10 + k,
                owner: 2,
                concept: format!("texture{k}"),
                value: "crispy".into(),
            });
        }
        println!("{} attributes -> {}", h.attributes.len(), difficulty(&h).unwrap());
    }
}
