//! LLM-backed asset generation with mechanical validation and bounded retries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::llm::{DecodingOptions, LlmClient};
use super::prompts;
use super::{
    AssetError, AssetLibrary, AttributeCatalog, AttributeConcept, ObjectAsset, CATEGORIES,
    CONCEPTS_PER_OBJECT, OBJECTS_PER_CATEGORY, VALUES_PER_CONCEPT,
};

pub const DEFAULT_RETRY_CAP: usize = 3;

const MAX_PREDICATE_WORDS: usize = 5;

const GENERATION_OPTIONS: DecodingOptions = DecodingOptions {
    temperature: 0.7,
    max_tokens: None,
};

/// What went wrong with the last rejected response.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub task: String,
    pub attempts: usize,
    pub problems: Vec<String>,
    pub external_failure: bool,
}

impl fmt::Display for GenerationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.task, self.problems.join("; "))
    }
}

/// Slices the outermost JSON object out of a response that may be wrapped in
/// prose or code fences.
fn json_body(text: &str) -> Result<Value, Vec<String>> {
    let (Some(start), Some(end)) = (text.find('{'), text.rfind('}')) else {
        return Err(vec!["response contains no JSON object".into()]);
    };
    if end < start {
        return Err(vec!["response contains no JSON object".into()]);
    }
    serde_json::from_str(&text[start..=end]).map_err(|e| vec![format!("invalid JSON: {e}")])
}

fn check_token(kind: &str, token: &str, problems: &mut Vec<String>) {
    if token.trim().is_empty() {
        problems.push(format!("empty {kind}"));
    } else if token.contains('_') {
        problems.push(format!("{kind} `{token}` contains an underscore"));
    } else if token != token.to_lowercase() {
        problems.push(format!("{kind} `{token}` is not lowercase"));
    } else if token != token.trim() {
        problems.push(format!("{kind} `{token}` has surrounding whitespace"));
    }
}

fn string_list(value: &Value, what: &str) -> Result<Vec<String>, Vec<String>> {
    let items = value
        .as_array()
        .ok_or_else(|| vec![format!("`{what}` is not a list")])?;
    items
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| vec![format!("`{what}` contains a non-string item")])
        })
        .collect()
}

/// Validates an object-list response: exactly 50 lowercase names, unique under
/// case normalization, no underscores.
pub fn parse_object_response(text: &str) -> Result<Vec<String>, Vec<String>> {
    let body = json_body(text)?;
    let names = string_list(
        body.get("objects").ok_or_else(|| vec!["missing key `objects`".to_string()])?,
        "objects",
    )?;
    let mut problems = Vec::new();
    if names.len() != OBJECTS_PER_CATEGORY {
        problems.push(format!(
            "expected {OBJECTS_PER_CATEGORY} objects, got {}",
            names.len()
        ));
    }
    let mut seen = BTreeSet::new();
    for n in &names {
        check_token("object name", n, &mut problems);
        if !seen.insert(n.trim().to_lowercase()) {
            problems.push(format!("duplicate object `{n}` under case normalization"));
        }
    }
    if problems.is_empty() {
        Ok(names)
    } else {
        Err(problems)
    }
}

/// Validates an attribute-catalog response: 5 distinct concepts with 5
/// distinct values each. Accepts the list form
/// `{"concepts": [{"concept": .., "values": [..]}]}` and the map form
/// `{"color": [..], ...}`.
pub fn parse_attribute_response(text: &str) -> Result<Vec<AttributeConcept>, Vec<String>> {
    let body = json_body(text)?;
    let mut concepts = Vec::new();
    if let Some(list) = body.get("concepts").and_then(Value::as_array) {
        for item in list {
            let name = item
                .get("concept")
                .and_then(Value::as_str)
                .ok_or_else(|| vec!["concept entry without a `concept` name".to_string()])?;
            let values = string_list(
                item.get("values")
                    .ok_or_else(|| vec![format!("concept `{name}` has no `values`")])?,
                "values",
            )?;
            concepts.push(AttributeConcept { name: name.to_string(), values });
        }
    } else if let Some(map) = body.as_object() {
        for (name, values) in map {
            concepts.push(AttributeConcept {
                name: name.clone(),
                values: string_list(values, name)?,
            });
        }
    }
    let mut problems = Vec::new();
    if concepts.len() != CONCEPTS_PER_OBJECT {
        problems.push(format!(
            "expected {CONCEPTS_PER_OBJECT} concepts, got {}",
            concepts.len()
        ));
    }
    let mut seen = BTreeSet::new();
    for c in &concepts {
        check_token("concept", &c.name, &mut problems);
        if !seen.insert(c.name.to_lowercase()) {
            problems.push(format!("duplicate concept `{}`", c.name));
        }
        if c.values.len() != VALUES_PER_CONCEPT {
            problems.push(format!(
                "concept `{}` has {} values, expected {VALUES_PER_CONCEPT}",
                c.name,
                c.values.len()
            ));
        }
        let mut vals = BTreeSet::new();
        for v in &c.values {
            check_token("value", v, &mut problems);
            if !vals.insert(v.to_lowercase()) {
                problems.push(format!("duplicate value `{v}` in concept `{}`", c.name));
            }
        }
    }
    if problems.is_empty() {
        Ok(concepts)
    } else {
        Err(problems)
    }
}

fn words(text: &str) -> BTreeSet<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

/// Checks that `raw` is a bare base-form relation phrase: a few lowercase
/// words, no sentence punctuation, and no word taken from either object name.
pub fn validate_predicate(raw: &str, subject: &str, object: &str) -> Result<String, Vec<String>> {
    let phrase = raw.trim();
    let mut problems = Vec::new();
    if phrase.is_empty() {
        return Err(vec!["empty relation".into()]);
    }
    if phrase.contains('\n') {
        problems.push("relation spans several lines".into());
    }
    if let Some(c) = phrase
        .chars()
        .find(|c| !(c.is_alphanumeric() || *c == ' ' || *c == '-' || *c == '\''))
    {
        problems.push(format!("relation contains punctuation `{c}`"));
    }
    if phrase.contains('_') {
        problems.push("relation contains an underscore".into());
    }
    let ws = words(phrase);
    if phrase.split_whitespace().count() > MAX_PREDICATE_WORDS {
        problems.push("relation is longer than a short phrase".into());
    }
    for name in [subject, object] {
        if words(name).iter().any(|w| ws.contains(w)) {
            problems.push(format!("relation repeats the name `{name}`"));
        }
    }
    if problems.is_empty() {
        Ok(phrase.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
    } else {
        Err(problems)
    }
}

/// Calls the client until `parse` accepts a response or the retry cap is hit.
fn with_retries<T>(
    task: String,
    prompt: &str,
    client: &dyn LlmClient,
    retry_cap: usize,
    parse: impl Fn(&str) -> Result<T, Vec<String>>,
) -> Result<T, AssetError> {
    let attempts = retry_cap.max(1);
    let mut report = GenerationReport { task, ..Default::default() };
    for attempt in 1..=attempts {
        report.attempts = attempt;
        match client.complete(prompt, &GENERATION_OPTIONS) {
            Ok(text) => match parse(&text) {
                Ok(v) => return Ok(v),
                Err(problems) => {
                    log::warn!("{}: rejected response ({})", report.task, problems.join("; "));
                    report.problems = problems;
                    report.external_failure = false;
                }
            },
            Err(e) if e.is_external() => {
                log::warn!("{}: {e}", report.task);
                report.problems = vec![e.to_string()];
                report.external_failure = true;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(AssetError::GenerationFailed { attempts, report })
}

/// Asks for the 50 objects of a category. Ids run from 1 to 50.
pub fn generate_objects(
    category: &str,
    client: &dyn LlmClient,
    retry_cap: usize,
) -> Result<Vec<ObjectAsset>, AssetError> {
    if !CATEGORIES.contains(&category) {
        return Err(AssetError::UnknownCategory(category.to_string()));
    }
    let names = with_retries(
        format!("objects for {category}"),
        &prompts::object_prompt(category),
        client,
        retry_cap,
        parse_object_response,
    )?;
    Ok(names
        .into_iter()
        .enumerate()
        .map(|(i, name)| ObjectAsset {
            id: i as u32 + 1,
            name,
            category: category.to_string(),
        })
        .collect())
}

pub fn generate_attributes(
    object: &str,
    client: &dyn LlmClient,
    retry_cap: usize,
) -> Result<AttributeCatalog, AssetError> {
    let concepts = with_retries(
        format!("attributes for {object}"),
        &prompts::attribute_prompt(object),
        client,
        retry_cap,
        parse_attribute_response,
    )?;
    Ok(AttributeCatalog {
        object: object.to_string(),
        concepts,
    })
}

/// Asks for one predicate linking `subject` to `object`. Callers cache the
/// answer per unordered pair (see [`super::RelationResolver`]).
pub fn generate_relation(
    subject: &ObjectAsset,
    object: &ObjectAsset,
    client: &dyn LlmClient,
    retry_cap: usize,
) -> Result<String, AssetError> {
    with_retries(
        format!("relation {} -> {}", subject.name, object.name),
        &prompts::relation_prompt(&subject.name, &object.name),
        client,
        retry_cap,
        |text| validate_predicate(text, &subject.name, &object.name),
    )
}

/// Builds a full library: objects per category, then one catalog per object.
/// A name produced by two categories is kept in the first one only.
pub fn generate_library(
    categories: &[String],
    client: &dyn LlmClient,
    retry_cap: usize,
) -> Result<AssetLibrary, AssetError> {
    let mut objects: Vec<ObjectAsset> = Vec::new();
    let mut seen = BTreeSet::new();
    for category in categories {
        for asset in generate_objects(category, client, retry_cap)? {
            if seen.insert(asset.name.to_lowercase()) {
                objects.push(ObjectAsset {
                    id: objects.len() as u32 + 1,
                    ..asset
                });
            } else {
                log::warn!("dropping `{}` from {category}: already listed", asset.name);
            }
        }
    }
    let catalogs: Vec<AttributeCatalog> = objects
        .par_iter()
        .map(|o| generate_attributes(&o.name, client, retry_cap))
        .collect::<Result<_, _>>()?;
    Ok(AssetLibrary {
        categories: categories.to_vec(),
        objects,
        catalogs: catalogs
            .into_iter()
            .map(|c| (c.object.clone(), c))
            .collect::<BTreeMap<_, _>>(),
        relations: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::builtin_library;
    use crate::assets::llm::{ScriptedClient, TemplateClient};

    fn fifty(prefix: &str) -> Vec<String> {
        (0..50).map(|i| format!("{prefix} {i}")).collect()
    }

    #[test]
    fn valid_objects_get_sequential_ids() {
        let payload = serde_json::json!({ "objects": fifty("beast") }).to_string();
        let client = ScriptedClient::new([payload]);
        let assets = generate_objects("Animals", &client, 3).unwrap();
        assert_eq!(assets.len(), 50);
        assert_eq!(assets.first().unwrap().id, 1);
        assert_eq!(assets.last().unwrap().id, 50);
        assert!(assets.iter().all(|a| a.category == "Animals"));
    }

    #[test]
    fn case_duplicates_are_regenerated() {
        let mut dup = fifty("beast");
        dup[0] = "dog".into();
        dup[1] = "Dog".into();
        let bad = serde_json::json!({ "objects": dup }).to_string();
        assert!(parse_object_response(&bad)
            .unwrap_err()
            .iter()
            .any(|p| p.contains("duplicate")));
        let good = serde_json::json!({ "objects": fifty("beast") }).to_string();
        let client = ScriptedClient::new([bad, good]);
        generate_objects("Animals", &client, 3).unwrap();
        assert_eq!(client.calls(), 2);
    }

    #[test]
    fn short_lists_are_rejected() {
        let short = serde_json::json!({ "objects": fifty("beast")[..49] }).to_string();
        let problems = parse_object_response(&short).unwrap_err();
        assert!(problems[0].contains("got 49"));
        let client = ScriptedClient::new([short]);
        match generate_objects("Animals", &client, 3) {
            Err(AssetError::GenerationFailed { attempts, report }) => {
                assert_eq!(attempts, 3);
                assert!(!report.external_failure);
                assert!(report.problems[0].contains("got 49"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(client.calls(), 3);
    }

    #[test]
    fn unknown_category_rejected() {
        assert!(matches!(
            generate_objects("Dinosaurs", &TemplateClient, 3),
            Err(AssetError::UnknownCategory(_))
        ));
    }

    fn painting_payload(values: [&str; 5], n_concepts: usize) -> String {
        let mut concepts = vec![serde_json::json!({"concept": "color", "values": ["red", "blue", "green", "yellow", "black"]})];
        for k in 1..n_concepts {
            let vals: Vec<String> = values.iter().map(|v| format!("{v}{k}")).collect();
            concepts.push(serde_json::json!({"concept": format!("style{k}"), "values": vals}));
        }
        serde_json::json!({ "concepts": concepts }).to_string()
    }

    #[test]
    fn painting_catalog_has_color() {
        let client = ScriptedClient::new([painting_payload(["a", "b", "c", "d", "e"], 5)]);
        let cat = generate_attributes("painting", &client, 3).unwrap();
        let color = cat.concept("color").unwrap();
        assert_eq!(color.values, ["red", "blue", "green", "yellow", "black"]);
        assert_eq!(cat.concepts.len(), 5);
    }

    #[test]
    fn catalog_cardinality_and_underscores() {
        let four = painting_payload(["a", "b", "c", "d", "e"], 4);
        assert!(parse_attribute_response(&four).is_err());
        let under = painting_payload(["smooth_blended", "b", "c", "d", "e"], 5);
        let problems = parse_attribute_response(&under).unwrap_err();
        assert!(problems.iter().any(|p| p.contains("underscore")));
    }

    #[test]
    fn map_form_catalog_accepted() {
        let text = r#"Here you go:
```json
{"color": ["red","blue","green","yellow","black"],
 "size": ["small","medium","large","tiny","huge"],
 "shape": ["round","square","oval","long","flat"],
 "texture": ["smooth","rough","glossy","matte","cracked"],
 "frame": ["gilded","wooden","plain","carved","thin"]}
```"#;
        assert_eq!(parse_attribute_response(text).unwrap().len(), 5);
    }

    #[test]
    fn predicate_rules() {
        assert_eq!(validate_predicate(" Sitting  on ", "person", "chair").unwrap(), "sitting on");
        assert!(validate_predicate("The dog is on the mat.", "dog", "mat").is_err());
        assert!(validate_predicate("chasing the dog", "cat", "dog").is_err());
        assert!(validate_predicate("next_to", "cat", "dog").is_err());
        assert!(validate_predicate("in front of", "storefront", "dog").is_ok());
    }

    #[test]
    fn relation_generation_retries_bad_answers() {
        let person = ObjectAsset { id: 1, name: "person".into(), category: "People".into() };
        let chair = ObjectAsset { id: 2, name: "chair".into(), category: "Everyday Objects".into() };
        let client = ScriptedClient::new(["The person is sitting on the chair.", "sitting on"]);
        assert_eq!(generate_relation(&person, &chair, &client, 3).unwrap(), "sitting on");
        assert_eq!(client.calls(), 2);
    }

    #[test]
    fn template_client_regenerates_builtin_library() {
        let cats: Vec<String> = CATEGORIES.iter().map(|c| c.to_string()).collect();
        let lib = generate_library(&cats, &TemplateClient, 3).unwrap();
        assert_eq!(lib, builtin_library());
    }
}
