//! Binding abstract sampler graphs to concrete assets.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::generate::generate_relation;
use super::llm::LlmClient;
use super::{pair_key, AssetError, AssetLibrary, ObjectAsset, RelationAsset, DEFAULT_RETRY_CAP};
use crate::rng::StreamRng;
use crate::scene_graph::{validate, AttributeNode, ObjectNode, RelationEdge, SceneGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstantiateOptions {
    /// Chance that an object after the first reuses an already bound asset.
    pub repeat_probability: f64,
    pub retry_cap: usize,
}

impl Default for InstantiateOptions {
    fn default() -> Self {
        Self {
            repeat_probability: 0.15,
            retry_cap: DEFAULT_RETRY_CAP,
        }
    }
}

/// Predicate lookup with a per-unordered-pair cache. The library's own
/// cache is consulted first; fresh predicates are kept in memory and can be
/// merged back with [`RelationResolver::learned`].
pub struct RelationResolver<'a> {
    library: &'a AssetLibrary,
    client: &'a dyn LlmClient,
    retry_cap: usize,
    cache: Mutex<BTreeMap<String, RelationAsset>>,
}

impl<'a> RelationResolver<'a> {
    pub fn new(library: &'a AssetLibrary, client: &'a dyn LlmClient, retry_cap: usize) -> Self {
        Self {
            library,
            client,
            retry_cap,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    /// Returns the predicate and whether the cached orientation runs from
    /// `object` to `subject`, in which case the edge must be flipped.
    pub fn resolve(&self, subject: &ObjectAsset, object: &ObjectAsset) -> Result<(String, bool), AssetError> {
        let key = pair_key(&subject.name, &object.name);
        let hit = self
            .library
            .relations
            .get(&key)
            .cloned()
            .or_else(|| self.cache.lock().expect("relation cache poisoned").get(&key).cloned());
        if let Some(rel) = hit {
            let flipped = rel.subject != subject.name;
            return Ok((rel.predicate, flipped));
        }
        let predicate = generate_relation(subject, object, self.client, self.retry_cap)?;
        let mut cache = self.cache.lock().expect("relation cache poisoned");
        let rel = cache.entry(key).or_insert(RelationAsset {
            subject: subject.name.clone(),
            object: object.name.clone(),
            predicate,
        });
        Ok((rel.predicate.clone(), rel.subject != subject.name))
    }

    pub fn learned(&self) -> BTreeMap<String, RelationAsset> {
        self.cache.lock().expect("relation cache poisoned").clone()
    }
}

/// Binds every abstract object to an asset, every attribute to an unused
/// concept of its owner with a sampled value, and every edge to a predicate.
/// Element counts are preserved exactly, so the difficulty is unchanged.
pub fn instantiate(
    abstract_graph: &SceneGraph,
    library: &AssetLibrary,
    rng: &mut StreamRng,
    relations: &RelationResolver<'_>,
    options: &InstantiateOptions,
) -> Result<SceneGraph, AssetError> {
    let problems = validate(abstract_graph);
    if !problems.is_empty() {
        return Err(AssetError::InvalidGraph(problems.join("; ")));
    }
    if library.objects.is_empty() {
        return Err(AssetError::EmptyLibrary);
    }

    let mut bound: Vec<usize> = Vec::with_capacity(abstract_graph.objects.len());
    let mut used: Vec<usize> = Vec::new();
    for _ in &abstract_graph.objects {
        let repeat = !used.is_empty() && rng.random_bool(options.repeat_probability);
        let pick = if repeat || used.len() >= library.objects.len() {
            used[rng.random_range(0..used.len())]
        } else {
            loop {
                let i = rng.random_range(0..library.objects.len());
                if !used.contains(&i) {
                    break i;
                }
            }
        };
        if !used.contains(&pick) {
            used.push(pick);
        }
        bound.push(pick);
    }

    let new_id: HashMap<u32, u32> = abstract_graph
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| (o.id, i as u32))
        .collect();
    let mut g = SceneGraph::new();
    for (i, &asset) in bound.iter().enumerate() {
        let a = &library.objects[asset];
        g.objects.push(ObjectNode {
            id: i as u32,
            name: a.name.clone(),
            category: Some(a.category.clone()),
        });
    }

    for (i, o) in abstract_graph.objects.iter().enumerate() {
        let owned = abstract_graph.attributes_of(o.id).count();
        if owned == 0 {
            continue;
        }
        let asset = &library.objects[bound[i]];
        let catalog = library
            .catalog(&asset.name)
            .ok_or_else(|| AssetError::UnknownObject(asset.name.clone()))?;
        if owned > catalog.concepts.len() {
            return Err(AssetError::ConceptsExhausted {
                object: asset.name.clone(),
                needed: owned,
                available: catalog.concepts.len(),
            });
        }
        let mut picks: Vec<usize> = sample_indices(rng, catalog.concepts.len(), owned).into_vec();
        picks.sort_unstable();
        for c in picks {
            let concept = &catalog.concepts[c];
            let value = &concept.values[rng.random_range(0..concept.values.len())];
            g.attributes.push(AttributeNode {
                id: g.attributes.len() as u32,
                owner: i as u32,
                concept: concept.name.clone(),
                value: value.clone(),
            });
        }
    }

    for edge in &abstract_graph.relations {
        let (s, o) = (new_id[&edge.subject], new_id[&edge.object]);
        let sa = &library.objects[bound[s as usize]];
        let oa = &library.objects[bound[o as usize]];
        let (predicate, flipped) = relations.resolve(sa, oa)?;
        let (subject, object) = if flipped { (o, s) } else { (s, o) };
        g.relations.push(RelationEdge {
            id: g.relations.len() as u32,
            subject,
            object,
            predicate,
        });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::builtin_library;
    use crate::assets::llm::{ScriptedClient, TemplateClient};
    use crate::rng::from_seed;
    use crate::scene_graph::fixtures::graph_with_counts;
    use crate::scene_graph::{difficulty, signature};
    use proptest::prelude::*;

    #[test]
    fn shape_is_preserved() {
        let lib = builtin_library();
        let resolver = RelationResolver::new(&lib, &TemplateClient, 3);
        let abs = graph_with_counts(2, 1, 1);
        let g = instantiate(&abs, &lib, &mut from_seed(1), &resolver, &Default::default()).unwrap();
        assert_eq!(signature(&g), signature(&abs));
        assert!(validate(&g).is_empty());
        assert!(g.objects.iter().all(|o| lib.object(&o.name).is_some()));
        assert!(!g.relations[0].predicate.is_empty());
        let attr = &g.attributes[0];
        let owner = &g.objects[attr.owner as usize].name;
        assert!(lib.catalog(owner).unwrap().concept(&attr.concept).unwrap().values.contains(&attr.value));
    }

    #[test]
    fn six_attributes_on_one_object_fail() {
        let lib = builtin_library();
        let resolver = RelationResolver::new(&lib, &TemplateClient, 3);
        let abs = graph_with_counts(1, 6, 0);
        let err = instantiate(&abs, &lib, &mut from_seed(1), &resolver, &Default::default()).unwrap_err();
        assert!(matches!(err, AssetError::ConceptsExhausted { needed: 6, available: 5, .. }));
    }

    #[test]
    fn relation_cache_is_per_unordered_pair() {
        let lib = builtin_library();
        let client = ScriptedClient::new(["sitting on", "standing on"]);
        let resolver = RelationResolver::new(&lib, &client, 3);
        let person = ObjectAsset { id: 1, name: "person".into(), category: "People".into() };
        let chair = ObjectAsset { id: 2, name: "chair".into(), category: "Everyday Objects".into() };
        assert_eq!(resolver.resolve(&person, &chair).unwrap(), ("sitting on".to_string(), false));
        assert_eq!(resolver.resolve(&person, &chair).unwrap(), ("sitting on".to_string(), false));
        assert_eq!(resolver.resolve(&chair, &person).unwrap(), ("sitting on".to_string(), true));
        assert_eq!(client.calls(), 1);
        assert_eq!(resolver.learned().len(), 1);
    }

    #[test]
    fn flipped_edges_follow_cached_orientation() {
        let lib = builtin_library();
        let client = ScriptedClient::new(["above"]);
        let resolver = RelationResolver::new(&lib, &client, 3);
        let abs = graph_with_counts(2, 0, 1);
        let options = InstantiateOptions { repeat_probability: 0.0, ..Default::default() };
        let first = instantiate(&abs, &lib, &mut from_seed(4), &resolver, &options).unwrap();
        let cached = resolver.learned().into_values().next().unwrap();
        let e = &first.relations[0];
        assert_eq!(first.objects[e.subject as usize].name, cached.subject);
        assert_eq!(first.objects[e.object as usize].name, cached.object);
    }

    #[test]
    fn repeats_happen_at_roughly_the_configured_rate() {
        let lib = builtin_library();
        let resolver = RelationResolver::new(&lib, &TemplateClient, 3);
        let abs = graph_with_counts(2, 0, 0);
        let mut rng = from_seed(8);
        let trials = 4000;
        let repeats = (0..trials)
            .filter(|_| {
                let g = instantiate(&abs, &lib, &mut rng, &resolver, &Default::default()).unwrap();
                g.objects[0].name == g.objects[1].name
            })
            .count();
        let rate = repeats as f64 / trials as f64;
        assert!((rate - 0.15).abs() < 0.03, "{rate}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn difficulty_is_invariant(n in 1usize..8, a_per in 0usize..5, r_frac in 0usize..4, seed in any::<u64>()) {
            let lib = builtin_library();
            let resolver = RelationResolver::new(&lib, &TemplateClient, 3);
            let max_r = n * (n - 1) / 2;
            let abs = graph_with_counts(n, a_per * n, max_r * r_frac / 3);
            let g = instantiate(&abs, &lib, &mut from_seed(seed), &resolver, &Default::default()).unwrap();
            prop_assert_eq!(signature(&g), signature(&abs));
            prop_assert_eq!(difficulty(&g).unwrap(), difficulty(&abs).unwrap());
            prop_assert!(validate(&g).is_empty());
        }
    }
}
