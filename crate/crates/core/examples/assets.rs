//! Samples an abstract graph and binds it to concrete objects, attributes
//! and predicates from the builtin library.
//!
//! cargo run --example assets -- [seed]

use compgen::assets::llm::TemplateClient;
use compgen::assets::{builtin_library, instantiate, InstantiateOptions, RelationResolver};
use compgen::curriculum::{fallback_render, level_range};
use compgen::rng::{from_seed, stream};
use compgen::sampler::{sample_graph, SamplerConfig};
use compgen::signature;

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let library = builtin_library();
    println!(
        "library: {} categories, {} objects, {} attribute catalogs",
        library.categories.len(),
        library.objects.len(),
        library.catalogs.len()
    );

    let cfg = SamplerConfig::default();
    let range = level_range(6, &cfg, library.concept_capacity()).unwrap();
    let draw = sample_graph(&range, &cfg, library.concept_capacity(), &mut from_seed(seed));
    println!("abstract graph: {:?}, in band {range}: {}", signature(&draw.graph), draw.success);

    let client = TemplateClient;
    let resolver = RelationResolver::new(&library, &client, 3);
    let scene = instantiate(&draw.graph, &library, &mut stream(seed, "bind"), &resolver, &InstantiateOptions::default())
        .expect("builtin library covers every binding");
    assert_eq!(signature(&scene), signature(&draw.graph));
    for o in &scene.objects {
        let attrs: Vec<String> = scene
            .attributes
            .iter()
            .filter(|a| a.owner == o.id)
            .map(|a| format!("{}={}", a.concept, a.value))
            .collect();
        println!("  #{} {} [{}] {}", o.id, o.name, o.category.as_deref().unwrap_or("-"), attrs.join(", "));
    }
    for r in &scene.relations {
        let name = |id| &scene.object(id).unwrap().name;
        println!("  {} -{}-> {}", name(r.subject), r.predicate, name(r.object));
    }
    println!("new relations cached: {}", resolver.learned().len());
    println!("\n{}", fallback_render(&scene));
}
