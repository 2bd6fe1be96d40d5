#![allow(dead_code)]

use compgen::assets::builtin_library;
use compgen::assets::llm::TemplateClient;
use compgen::curriculum::{build_dataset, BuildContext, CurriculumSample, DatasetPreset};
use compgen::scene_graph::{AttributeNode, ObjectNode, RelationEdge};
use compgen::{validate, SceneGraph};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn graph_with_counts(n: usize, a: usize, r: usize) -> SceneGraph {
    let mut g = SceneGraph::new();
    for i in 0..n {
        g.objects.push(ObjectNode { id: i as u32, name: format!("thing{i}"), category: None });
    }
    for k in 0..a {
        g.attributes.push(AttributeNode {
            id: k as u32,
            owner: (k % n) as u32,
            concept: format!("concept{}", k / n),
            value: "v".into(),
        });
    }
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|i| ((i + 1)..n as u32).map(move |j| (i, j)))
        .collect();
    for (k, (s, o)) in pairs.into_iter().take(r).enumerate() {
        g.relations.push(RelationEdge { id: k as u32, subject: s, object: o, predicate: "near".into() });
    }
    g
}

const NAMES: [&str; 5] = ["dog", "apple", "bench", "owl", "umbrella"];
const CONCEPTS: [(&str, [&str; 3]); 3] = [
    ("color", ["white", "red", "green"]),
    ("size", ["small", "large", "tiny"]),
    ("texture", ["smooth", "fuzzy", "rough"]),
];
const PREDICATES: [&str; 4] = ["next to", "behind", "holding", "on top of"];

/// A valid concrete graph with names drawn from a small pool so repeats are
/// common.
pub fn random_graph<R: Rng>(rng: &mut R) -> SceneGraph {
    let n = rng.random_range(1..=8usize);
    let mut g = SceneGraph::new();
    for i in 0..n {
        g.objects.push(ObjectNode {
            id: i as u32,
            name: NAMES[rng.random_range(0..NAMES.len())].into(),
            category: None,
        });
    }
    let mut next = 0;
    for owner in 0..n as u32 {
        for (concept, values) in CONCEPTS {
            if rng.random_bool(0.4) {
                g.attributes.push(AttributeNode {
                    id: next,
                    owner,
                    concept: concept.into(),
                    value: values[rng.random_range(0..3)].into(),
                });
                next += 1;
            }
        }
    }
    let mut pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|i| ((i + 1)..n as u32).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(rng);
    let r = rng.random_range(0..=pairs.len().min(6));
    for (k, (a, b)) in pairs.into_iter().take(r).enumerate() {
        let (s, o) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
        g.relations.push(RelationEdge {
            id: k as u32,
            subject: s,
            object: o,
            predicate: PREDICATES[rng.random_range(0..PREDICATES.len())].into(),
        });
    }
    assert!(validate(&g).is_empty());
    g
}

pub fn builtin_dataset(n: usize, seed: u64) -> Vec<CurriculumSample> {
    let library = builtin_library();
    let client = TemplateClient;
    let ctx = BuildContext::new(&library, &client, seed);
    let out = build_dataset(n, &DatasetPreset::Uniform.weights(), &ctx).expect("builtin build succeeds");
    assert!(out.failures.is_empty(), "{:?}", out.failures);
    out.samples
}
