//! Scene-graph data model and the compositional difficulty measure.
//!
//! A scene graph holds three node types: objects, attributes attached to a
//! single object, and directed relation edges between two distinct objects.
//! Difficulty is
//!
//! ```text
//! Diff(G) = |O| * max(1, |A| / |O|) * max(1, |R| / |O|)
//!         = max(|O|, |A|) * max(|O|, |R|) / |O|
//! ```
//!
//! and is computed with exact rational arithmetic ([`Rational`]), so band
//! membership tests never suffer from rounding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// Exact non-negative rational used for difficulties and energies.
pub type Rational = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SceneGraphError {
    #[error("difficulty is undefined for a graph without objects")]
    EmptyGraph,
    #[error("unknown difficulty measure `{0}` (expected product, additive or averaged)")]
    UnknownMeasure(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectNode {
    pub id: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributeNode {
    pub id: u32,
    pub owner: u32,
    pub concept: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationEdge {
    pub id: u32,
    pub subject: u32,
    pub object: u32,
    pub predicate: String,
}

/// Reference to a single element of a [`SceneGraph`]. Ids are unique per node type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementRef {
    Object(u32),
    Attribute(u32),
    Relation(u32),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SceneGraph {
    pub objects: Vec<ObjectNode>,
    pub attributes: Vec<AttributeNode>,
    pub relations: Vec<RelationEdge>,
}

/// Element counts `(objects, attributes, relations)` of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StructuralSignature {
    pub n_objects: usize,
    pub n_attributes: usize,
    pub n_relations: usize,
}

impl StructuralSignature {
    pub fn new(n_objects: usize, n_attributes: usize, n_relations: usize) -> Self {
        Self {
            n_objects,
            n_attributes,
            n_relations,
        }
    }
}

impl fmt::Display for StructuralSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            self.n_objects, self.n_attributes, self.n_relations
        )
    }
}

/// Selectable difficulty measures. `Product` is the default measure; the other
/// two exist for ablations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifficultyMeasure {
    #[default]
    Product,
    /// `|O| + |A| + |R|`
    Additive,
    /// `(|O| + |R|) / 2`
    Averaged,
}

impl FromStr for DifficultyMeasure {
    type Err = SceneGraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "product" | "default" => Ok(Self::Product),
            "additive" | "sum" => Ok(Self::Additive),
            "averaged" | "average" => Ok(Self::Averaged),
            other => Err(SceneGraphError::UnknownMeasure(other.to_string())),
        }
    }
}

impl SceneGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty() && self.attributes.is_empty() && self.relations.is_empty()
    }

    pub fn object(&self, id: u32) -> Option<&ObjectNode> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn attributes_of(&self, owner: u32) -> impl Iterator<Item = &AttributeNode> {
        self.attributes.iter().filter(move |a| a.owner == owner)
    }

    pub fn relations_of(&self, object: u32) -> impl Iterator<Item = &RelationEdge> {
        self.relations
            .iter()
            .filter(move |r| r.subject == object || r.object == object)
    }

    /// Relation between `a` and `b` in either direction.
    pub fn relation_between(&self, a: u32, b: u32) -> Option<&RelationEdge> {
        self.relations
            .iter()
            .find(|r| (r.subject == a && r.object == b) || (r.subject == b && r.object == a))
    }

    pub fn next_object_id(&self) -> u32 {
        self.objects.iter().map(|o| o.id + 1).max().unwrap_or(0)
    }

    pub fn next_attribute_id(&self) -> u32 {
        self.attributes.iter().map(|a| a.id + 1).max().unwrap_or(0)
    }

    pub fn next_relation_id(&self) -> u32 {
        self.relations.iter().map(|r| r.id + 1).max().unwrap_or(0)
    }

    /// Removes an object together with its attributes and incident relations.
    /// Returns the number of removed elements (0 if the object does not exist).
    pub fn remove_object_cascade(&mut self, id: u32) -> usize {
        let before = self.objects.len() + self.attributes.len() + self.relations.len();
        self.objects.retain(|o| o.id != id);
        self.attributes.retain(|a| a.owner != id);
        self.relations.retain(|r| r.subject != id && r.object != id);
        before - (self.objects.len() + self.attributes.len() + self.relations.len())
    }

    /// Multiplicity of every object name, sorted by name.
    pub fn name_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for o in &self.objects {
            *counts.entry(o.name.as_str()).or_insert(0) += 1;
        }
        counts
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scene graph serialization is infallible")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Returns one human-readable violation per broken invariant; empty iff the
/// graph is well formed.
pub fn validate(graph: &SceneGraph) -> Vec<String> {
    let mut violations = Vec::new();

    let mut object_ids = BTreeSet::new();
    for o in &graph.objects {
        if !object_ids.insert(o.id) {
            violations.push(format!("object {}: duplicate id", o.id));
        }
        if o.name.trim().is_empty() {
            violations.push(format!("object {}: empty name", o.id));
        }
    }

    let mut attribute_ids = BTreeSet::new();
    let mut owner_concepts = BTreeSet::new();
    for a in &graph.attributes {
        if !attribute_ids.insert(a.id) {
            violations.push(format!("attribute {}: duplicate id", a.id));
        }
        if !object_ids.contains(&a.owner) {
            violations.push(format!("attribute {}: dangling owner {}", a.id, a.owner));
        }
        if a.concept.trim().is_empty() || a.value.trim().is_empty() {
            violations.push(format!("attribute {}: empty concept or value", a.id));
        }
        if !owner_concepts.insert((a.owner, a.concept.as_str())) {
            violations.push(format!(
                "attribute {}: duplicate concept `{}` on object {}",
                a.id, a.concept, a.owner
            ));
        }
    }

    let mut relation_ids = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for r in &graph.relations {
        if !relation_ids.insert(r.id) {
            violations.push(format!("relation {}: duplicate id", r.id));
        }
        if !object_ids.contains(&r.subject) {
            violations.push(format!("relation {}: dangling subject {}", r.id, r.subject));
        }
        if !object_ids.contains(&r.object) {
            violations.push(format!("relation {}: dangling object {}", r.id, r.object));
        }
        if r.subject == r.object {
            violations.push(format!("relation {}: self relation on {}", r.id, r.subject));
            continue;
        }
        if r.predicate.trim().is_empty() {
            violations.push(format!("relation {}: empty predicate", r.id));
        }
        let pair = (r.subject.min(r.object), r.subject.max(r.object));
        if !pairs.insert(pair) {
            violations.push(format!(
                "relation {}: duplicate pair ({}, {})",
                r.id, pair.0, pair.1
            ));
        }
    }

    violations
}

pub fn signature(graph: &SceneGraph) -> StructuralSignature {
    StructuralSignature::new(
        graph.objects.len(),
        graph.attributes.len(),
        graph.relations.len(),
    )
}

/// Difficulty of a count triple. `n_objects` must be positive.
pub fn difficulty_of_counts(
    n_objects: usize,
    n_attributes: usize,
    n_relations: usize,
) -> Result<Rational, SceneGraphError> {
    if n_objects == 0 {
        return Err(SceneGraphError::EmptyGraph);
    }
    let o = n_objects as u64;
    let a = n_attributes as u64;
    let r = n_relations as u64;
    // |O| * max(1, A/O) * max(1, R/O) == max(O, A) * max(O, R) / O
    Ok(Rational::new(o.max(a) * o.max(r), o))
}

pub fn difficulty(graph: &SceneGraph) -> Result<Rational, SceneGraphError> {
    let s = signature(graph);
    difficulty_of_counts(s.n_objects, s.n_attributes, s.n_relations)
}

pub fn difficulty_variant(
    graph: &SceneGraph,
    measure: DifficultyMeasure,
) -> Result<Rational, SceneGraphError> {
    let s = signature(graph);
    measure_of_counts(measure, s.n_objects, s.n_attributes, s.n_relations)
}

/// Any measure evaluated on a count triple. `n_objects` must be positive.
pub fn measure_of_counts(
    measure: DifficultyMeasure,
    n_objects: usize,
    n_attributes: usize,
    n_relations: usize,
) -> Result<Rational, SceneGraphError> {
    if n_objects == 0 {
        return Err(SceneGraphError::EmptyGraph);
    }
    let (o, a, r) = (n_objects as u64, n_attributes as u64, n_relations as u64);
    match measure {
        DifficultyMeasure::Product => difficulty_of_counts(n_objects, n_attributes, n_relations),
        DifficultyMeasure::Additive => Ok(Rational::from_integer(o + a + r)),
        DifficultyMeasure::Averaged => Ok(Rational::new(o + r, 2)),
    }
}

/// Parses a measure name and evaluates it.
pub fn difficulty_by_name(graph: &SceneGraph, measure: &str) -> Result<Rational, SceneGraphError> {
    difficulty_variant(graph, measure.parse()?)
}

pub fn rational_to_f64(value: Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Abstract graph with exactly the requested counts: relations form a
    /// chain and then fan out, attributes round-robin over objects.
    pub fn graph_with_counts(n: usize, a: usize, r: usize) -> SceneGraph {
        let mut g = SceneGraph::new();
        for i in 0..n {
            g.objects.push(ObjectNode {
                id: i as u32,
                name: format!("thing{i}"),
                category: None,
            });
        }
        for k in 0..a {
            g.attributes.push(AttributeNode {
                id: k as u32,
                owner: (k % n) as u32,
                concept: format!("concept{}", k / n),
                value: "v".into(),
            });
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i as u32, j as u32));
            }
        }
        assert!(r <= pairs.len(), "too many relations for {n} objects");
        for (k, (s, o)) in pairs.into_iter().take(r).enumerate() {
            g.relations.push(RelationEdge {
                id: k as u32,
                subject: s,
                object: o,
                predicate: "near".into(),
            });
        }
        g
    }

    /// white dog, yellow dog, hamburger; white dog -eating-> hamburger.
    pub fn dogs_and_hamburger() -> SceneGraph {
        SceneGraph {
            objects: vec![
                ObjectNode { id: 0, name: "dog".into(), category: Some("Animals".into()) },
                ObjectNode { id: 1, name: "dog".into(), category: Some("Animals".into()) },
                ObjectNode {
                    id: 2,
                    name: "hamburger".into(),
                    category: Some("Food and Beverages".into()),
                },
            ],
            attributes: vec![
                AttributeNode { id: 0, owner: 0, concept: "color".into(), value: "white".into() },
                AttributeNode { id: 1, owner: 1, concept: "color".into(), value: "yellow".into() },
            ],
            relations: vec![RelationEdge {
                id: 0,
                subject: 0,
                object: 2,
                predicate: "eating".into(),
            }],
        }
    }
}
