//! Prompt text: inclusion checks and the deterministic fallback renderer.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assets::llm::{DecodingOptions, LlmClient};
use crate::assets::prompts::input_text_prompt;
use crate::scene_graph::SceneGraph;

/// Words a count must appear within before the counted name.
pub const COUNT_WINDOW: usize = 4;

const NUMBER_WORDS: [&str; 21] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty",
];

pub fn number_word(k: usize) -> String {
    NUMBER_WORDS
        .get(k)
        .map(|w| w.to_string())
        .unwrap_or_else(|| k.to_string())
}

/// English plural of the last word of `name`.
pub fn plural(name: &str) -> String {
    let (head, last) = match name.rfind(' ') {
        Some(i) => (&name[..=i], &name[i + 1..]),
        None => ("", name),
    };
    let bytes = last.as_bytes();
    let consonant_y = bytes.len() >= 2
        && bytes[bytes.len() - 1] == b'y'
        && !b"aeiou".contains(&bytes[bytes.len() - 2]);
    let p = if consonant_y {
        format!("{}ies", &last[..last.len() - 1])
    } else if ["s", "x", "z", "ch", "sh"].iter().any(|s| last.ends_with(s)) {
        format!("{last}es")
    } else {
        format!("{last}s")
    };
    format!("{head}{p}")
}

fn article(phrase: &str) -> &'static str {
    match phrase.chars().next() {
        Some(c) if "aeiou".contains(c) => "an",
        _ => "a",
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '\'' { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

/// Start positions of `phrase` as a whole-word token run inside `text`.
fn occurrences(text: &[String], phrase: &str) -> Vec<usize> {
    let p = tokens(phrase);
    if p.is_empty() || p.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - p.len())
        .filter(|&i| text[i..i + p.len()] == p[..])
        .collect()
}

/// Outcome of the three mechanical inclusion checks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub missing_names: Vec<String>,
    pub missing_values: Vec<String>,
    pub missing_predicates: Vec<String>,
    pub missing_counts: Vec<String>,
}

impl FidelityReport {
    pub fn passed(&self) -> bool {
        self.missing_names.is_empty()
            && self.missing_values.is_empty()
            && self.missing_predicates.is_empty()
            && self.missing_counts.is_empty()
    }
}

/// (i) every object name (or its plural) and attribute value occurs, (ii) every
/// predicate occurs, (iii) every repeated name has its count word at most
/// [`COUNT_WINDOW`] words before one of its occurrences. Matching is
/// case-insensitive and on whole words.
pub fn check_prompt(graph: &SceneGraph, text: &str) -> FidelityReport {
    let toks = tokens(text);
    let mut report = FidelityReport::default();
    let present = |phrase: &str| !occurrences(&toks, phrase).is_empty();
    for (name, count) in graph.name_counts() {
        let mut starts = occurrences(&toks, name);
        starts.extend(occurrences(&toks, &plural(name)));
        if starts.is_empty() {
            report.missing_names.push(name.to_string());
            continue;
        }
        if count > 1 {
            let word = number_word(count);
            let digits = count.to_string();
            let counted = starts.iter().any(|&s| {
                toks[s.saturating_sub(COUNT_WINDOW)..s]
                    .iter()
                    .any(|t| *t == word || *t == digits)
            });
            if !counted {
                report.missing_counts.push(format!("{count} x {name}"));
            }
        }
    }
    for a in &graph.attributes {
        if !present(&a.value) {
            report.missing_values.push(a.value.clone());
        }
    }
    for r in &graph.relations {
        if !present(&r.predicate) {
            report.missing_predicates.push(r.predicate.clone());
        }
    }
    report
}

fn object_phrase(graph: &SceneGraph, id: u32) -> String {
    let obj = graph.object(id).expect("relation endpoints exist");
    let mut words: Vec<&str> = graph.attributes_of(id).map(|a| a.value.as_str()).collect();
    words.push(&obj.name);
    words.join(" ")
}

fn join_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} and {b}"),
        [init @ .., last] => format!("{}, and {last}", init.join(", ")),
    }
}

/// Deterministic description honouring the inclusion checks: one clause per
/// relation, then the remaining objects as a count-aware list. A repeated name
/// whose count is not already expressed gets a leading "There are k ..."
/// sentence.
pub fn fallback_render(graph: &SceneGraph) -> String {
    let mut sentences = Vec::new();
    let mut related = std::collections::BTreeSet::new();
    for r in &graph.relations {
        let s = object_phrase(graph, r.subject);
        let o = object_phrase(graph, r.object);
        sentences.push(format!(
            "{} {s} is {} {} {o}.",
            capitalize(article(&s)),
            r.predicate,
            article(&o)
        ));
        related.insert(r.subject);
        related.insert(r.object);
    }

    // group unrelated objects by identical appearance, keeping first-seen order
    let mut groups: Vec<(String, String, usize)> = Vec::new();
    for o in graph.objects.iter().filter(|o| !related.contains(&o.id)) {
        let mut values: Vec<&str> = graph.attributes_of(o.id).map(|a| a.value.as_str()).collect();
        values.sort_unstable();
        let adjectives = values.join(" ");
        match groups
            .iter_mut()
            .find(|(n, adj, _)| *n == o.name && *adj == adjectives)
        {
            Some(g) => g.2 += 1,
            None => groups.push((o.name.clone(), adjectives, 1)),
        }
    }
    if !groups.is_empty() {
        let items: Vec<String> = groups
            .iter()
            .map(|(name, adj, k)| {
                let noun = if *k == 1 { name.clone() } else { plural(name) };
                let phrase = if adj.is_empty() { noun } else { format!("{adj} {noun}") };
                if *k == 1 {
                    format!("{} {phrase}", article(&phrase))
                } else {
                    format!("{} {phrase}", number_word(*k))
                }
            })
            .collect();
        sentences.push(format!("{}.", capitalize(&join_list(&items))));
    }

    let body = sentences.join(" ");
    let missing = check_prompt(graph, &body).missing_counts;
    if missing.is_empty() {
        return body;
    }
    let counts: BTreeMap<&str, usize> = graph.name_counts();
    let lead: Vec<String> = counts
        .iter()
        .filter(|(name, k)| **k > 1 && missing.iter().any(|m| m == &format!("{k} x {name}")))
        .map(|(name, k)| format!("{} {}", number_word(*k), plural(name)))
        .collect();
    format!("There are {}. {body}", join_list(&lead))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptSource {
    Llm,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub text: String,
    pub source: PromptSource,
    pub attempts: usize,
}

/// Asks the client for a description (temperature 0) and keeps the first one
/// passing [`check_prompt`]. After `retries` failed attempts, or on any client
/// error, the fallback renderer is used.
pub fn generate_prompt(graph: &SceneGraph, client: &dyn LlmClient, retries: usize) -> RenderedPrompt {
    let prompt = input_text_prompt(graph);
    let options = DecodingOptions::default();
    for attempt in 1..=retries {
        match client.complete(&prompt, &options) {
            Ok(text) => {
                let text = text.trim().to_string();
                let report = check_prompt(graph, &text);
                if report.passed() {
                    return RenderedPrompt { text, source: PromptSource::Llm, attempts: attempt };
                }
                log::debug!("prompt attempt {attempt} failed checks: {report:?}");
            }
            Err(e) => {
                log::warn!("prompt generation failed: {e}; using fallback");
                return RenderedPrompt {
                    text: fallback_render(graph),
                    source: PromptSource::Fallback,
                    attempts: attempt,
                };
            }
        }
    }
    RenderedPrompt {
        text: fallback_render(graph),
        source: PromptSource::Fallback,
        attempts: retries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::llm::ScriptedClient;
    use crate::scene_graph::fixtures::dogs_and_hamburger;
    use crate::scene_graph::{AttributeNode, ObjectNode, RelationEdge};
    use proptest::prelude::*;

    fn obj(id: u32, name: &str) -> ObjectNode {
        ObjectNode { id, name: name.into(), category: None }
    }

    #[test]
    fn plurals() {
        assert_eq!(plural("apple"), "apples");
        assert_eq!(plural("strawberry"), "strawberries");
        assert_eq!(plural("monkey"), "monkeys");
        assert_eq!(plural("box"), "boxes");
        assert_eq!(plural("bus"), "buses");
        assert_eq!(plural("paint brush"), "paint brushes");
        assert_eq!(plural("hot dog"), "hot dogs");
    }

    #[test]
    fn single_chair() {
        let g = SceneGraph { objects: vec![obj(0, "chair")], ..Default::default() };
        assert_eq!(fallback_render(&g), "A chair.");
    }

    #[test]
    fn two_apples() {
        let g = SceneGraph { objects: vec![obj(0, "apple"), obj(1, "apple")], ..Default::default() };
        assert_eq!(fallback_render(&g), "Two apples.");
        assert!(check_prompt(&g, "Two apples.").passed());
    }

    #[test]
    fn unrelated_objects_form_a_list() {
        let g = SceneGraph {
            objects: vec![obj(0, "desert"), obj(1, "shrub"), obj(2, "eagle"), obj(3, "rocket")],
            ..Default::default()
        };
        assert_eq!(fallback_render(&g), "A desert, a shrub, an eagle, and a rocket.");
    }

    #[test]
    fn relation_then_orphan() {
        let g = SceneGraph {
            objects: vec![obj(0, "cat"), obj(1, "sofa"), obj(2, "lamp")],
            attributes: vec![],
            relations: vec![RelationEdge { id: 0, subject: 0, object: 1, predicate: "on".into() }],
        };
        assert_eq!(fallback_render(&g), "A cat is on a sofa. A lamp.");
    }

    #[test]
    fn dogs_and_hamburger_render() {
        let g = dogs_and_hamburger();
        let text = fallback_render(&g);
        assert_eq!(text, "There are two dogs. A white dog is eating a hamburger. A yellow dog.");
        let lower = text.to_lowercase();
        for needle in ["white dog", "yellow dog", "hamburger", "eating"] {
            assert!(lower.contains(needle));
        }
        assert!(check_prompt(&g, &text).passed());
    }

    #[test]
    fn checks_catch_each_omission() {
        let g = dogs_and_hamburger();
        let r = check_prompt(&g, "A white dog is eating a hamburger. A yellow dog.");
        assert_eq!(r.missing_counts, vec!["2 x dog".to_string()]);
        let r = check_prompt(&g, "Two dogs, one white and one yellow, near a hamburger.");
        assert_eq!(r.missing_predicates, vec!["eating".to_string()]);
        let r = check_prompt(&g, "Two dogs are eating.");
        assert_eq!(r.missing_names, vec!["hamburger".to_string()]);
        assert_eq!(r.missing_values.len(), 2);
        assert!(check_prompt(&g, "Two dogs: a white dog eating a hamburger and a yellow one.").passed());
    }

    #[test]
    fn counts_far_from_the_name_do_not_count() {
        let g = SceneGraph { objects: vec![obj(0, "apple"), obj(1, "apple")], ..Default::default() };
        assert!(!check_prompt(&g, "Two of them, sitting on the table, are apples.").passed());
        assert!(check_prompt(&g, "There are 2 shiny red apples.").passed());
    }

    #[test]
    fn llm_answer_used_when_it_passes() {
        let g = dogs_and_hamburger();
        let good = "Two dogs: a white dog is eating a hamburger while a yellow dog watches.";
        let client = ScriptedClient::new(["A dog.", good]);
        let out = generate_prompt(&g, &client, 3);
        assert_eq!(out.source, PromptSource::Llm);
        assert_eq!(out.attempts, 2);
        assert_eq!(out.text, good);
    }

    #[test]
    fn fallback_after_three_failures() {
        let g = dogs_and_hamburger();
        let client = ScriptedClient::new(["A dog."]);
        let out = generate_prompt(&g, &client, 3);
        assert_eq!(out.source, PromptSource::Fallback);
        assert_eq!(client.calls(), 3);
        assert!(check_prompt(&g, &out.text).passed());
    }

    fn arb_graph() -> impl Strategy<Value = SceneGraph> {
        let names = prop::sample::select(vec!["dog", "apple", "strawberry", "box", "hot dog", "eagle", "bus"]);
        (prop::collection::vec(names, 1..7), any::<u64>()).prop_map(|(names, bits)| {
            let mut g = SceneGraph::new();
            for (i, n) in names.iter().enumerate() {
                g.objects.push(obj(i as u32, n));
            }
            let values = ["red", "small", "shiny", "old", "wooden"];
            let concepts = ["color", "size", "finish", "age", "material"];
            let mut b = bits;
            for i in 0..g.objects.len() as u32 {
                for c in 0..2 {
                    if b & 1 == 1 {
                        let id = g.attributes.len() as u32;
                        let k = (b as usize >> 1) % 5;
                        g.attributes.push(AttributeNode {
                            id,
                            owner: i,
                            concept: format!("{}{c}", concepts[k]),
                            value: values[k].into(),
                        });
                    }
                    b = b.rotate_right(3);
                }
            }
            let n = g.objects.len() as u32;
            for i in 0..n {
                for j in (i + 1)..n {
                    if b & 1 == 1 {
                        let id = g.relations.len() as u32;
                        g.relations.push(RelationEdge { id, subject: i, object: j, predicate: "next to".into() });
                    }
                    b = b.rotate_right(5);
                }
            }
            g
        })
    }

    proptest! {
        #[test]
        fn fallback_always_passes(g in arb_graph()) {
            let text = fallback_render(&g);
            prop_assert!(check_prompt(&g, &text).passed(), "{}", text);
            prop_assert_eq!(text.clone(), fallback_render(&g));
        }
    }
}
