//! Semantic assets (objects, attribute catalogs, relation predicates) and the
//! machinery that produces them: LLM-backed generation with mechanical
//! validation, a deterministic builtin library, and instantiation of abstract
//! sampler graphs into concrete scenes.

mod builtin;
mod generate;
mod instantiate;
pub mod llm;
pub mod prompts;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use builtin::{builtin_library, builtin_relation, BUILTIN_OBJECTS_PER_CATEGORY};
pub use generate::{
    generate_attributes, generate_library, generate_objects, generate_relation,
    parse_attribute_response, parse_object_response, validate_predicate, GenerationReport,
    DEFAULT_RETRY_CAP,
};
pub use instantiate::{instantiate, InstantiateOptions, RelationResolver};
pub use llm::{LlmClient, LlmError};

/// The ten broad object categories assets are generated for.
pub const CATEGORIES: [&str; 10] = [
    "Natural Landscapes",
    "City Infrastructure and Street Elements",
    "People",
    "Animals",
    "Plants",
    "Food and Beverages",
    "Sports and Fitness",
    "Technology Equipment and Industry",
    "Everyday Objects",
    "Transportation",
];

pub const OBJECTS_PER_CATEGORY: usize = 50;
pub const CONCEPTS_PER_OBJECT: usize = 5;
pub const VALUES_PER_CONCEPT: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum AssetError {
    #[error("generation failed after {attempts} attempts: {report}")]
    GenerationFailed { attempts: usize, report: GenerationReport },
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("object {object} needs {needed} attribute concepts but its catalog has {available}")]
    ConceptsExhausted {
        object: String,
        needed: usize,
        available: usize,
    },
    #[error("abstract graph is invalid: {0}")]
    InvalidGraph(String),
    #[error("library has no objects")]
    EmptyLibrary,
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AssetError {
    /// True when the failure came from talking to an external service.
    pub fn is_external(&self) -> bool {
        match self {
            AssetError::Llm(e) => e.is_external(),
            AssetError::GenerationFailed { report, .. } => report.external_failure,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectAsset {
    pub id: u32,
    pub name: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeConcept {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeCatalog {
    pub object: String,
    pub concepts: Vec<AttributeConcept>,
}

impl AttributeCatalog {
    pub fn concept(&self, name: &str) -> Option<&AttributeConcept> {
        self.concepts.iter().find(|c| c.name == name)
    }
}

/// A cached predicate for an unordered object-name pair, stored with the
/// orientation it was generated for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationAsset {
    pub subject: String,
    pub object: String,
    pub predicate: String,
}

/// Canonical key of an unordered name pair.
pub fn pair_key(a: &str, b: &str) -> String {
    if a <= b {
        format!("{a}|{b}")
    } else {
        format!("{b}|{a}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetLibrary {
    pub categories: Vec<String>,
    pub objects: Vec<ObjectAsset>,
    pub catalogs: BTreeMap<String, AttributeCatalog>,
    #[serde(default)]
    pub relations: BTreeMap<String, RelationAsset>,
}

impl AssetLibrary {
    pub fn object(&self, name: &str) -> Option<&ObjectAsset> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn catalog(&self, name: &str) -> Option<&AttributeCatalog> {
        self.catalogs.get(name)
    }

    /// Smallest number of attribute concepts any object offers; bounds how
    /// many attributes an abstract object may carry.
    pub fn concept_capacity(&self) -> usize {
        self.objects
            .iter()
            .map(|o| self.catalogs.get(&o.name).map_or(0, |c| c.concepts.len()))
            .min()
            .unwrap_or(0)
    }

    pub fn cached_relation(&self, a: &str, b: &str) -> Option<&RelationAsset> {
        self.relations.get(&pair_key(a, b))
    }

    /// Structural problems: catalogs for unknown objects, objects without a
    /// catalog, duplicate names.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for o in &self.objects {
            if !seen.insert(o.name.to_lowercase()) {
                problems.push(format!("duplicate object name `{}`", o.name));
            }
            if !self.catalogs.contains_key(&o.name) {
                problems.push(format!("object `{}` has no attribute catalog", o.name));
            }
        }
        for name in self.catalogs.keys() {
            if self.object(name).is_none() {
                problems.push(format!("catalog for unknown object `{name}`"));
            }
        }
        problems
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("library serialization is infallible")
    }

    pub fn save(&self, path: &Path) -> Result<(), AssetError> {
        // write-then-rename so a crashed run never leaves a truncated library
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, self.to_json_pretty())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, AssetError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_key_is_order_free() {
        assert_eq!(pair_key("dog", "cat"), pair_key("cat", "dog"));
        assert_eq!(pair_key("dog", "cat"), "cat|dog");
    }

    #[test]
    fn library_round_trips_through_json() {
        let lib = builtin_library();
        let back: AssetLibrary = serde_json::from_str(&lib.to_json_pretty()).unwrap();
        assert_eq!(back, lib);
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("library.json");
        let lib = builtin_library();
        lib.save(&path).unwrap();
        assert_eq!(AssetLibrary::load(&path).unwrap(), lib);
    }
}
