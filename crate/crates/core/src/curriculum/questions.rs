//! Programmatic yes/no questions covering every element of a scene graph.

use serde::{Deserialize, Serialize};

use super::text::{number_word, plural};
use crate::scene_graph::{ElementRef, SceneGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionCategory {
    Object,
    Count,
    Attribute,
    Relation,
}

/// Machine-readable content of a question, used by reward oracles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Probe {
    Object { name: String },
    Count { name: String, count: usize },
    Attribute { name: String, concept: String, value: String },
    Relation { subject: String, predicate: String, object: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub category: QuestionCategory,
    pub text: String,
    pub expected: String,
    pub target: Vec<ElementRef>,
    pub probe: Probe,
}

fn with_article(phrase: &str) -> String {
    let art = if phrase.starts_with(|c: char| "aeiou".contains(c)) { "an" } else { "a" };
    format!("{art} {phrase}")
}

/// One object question per distinct name, one count question per repeated
/// name, one question per attribute and one per relation. Every answer is "yes".
pub fn generate_questions(graph: &SceneGraph) -> Vec<Question> {
    let mut out = Vec::new();
    let counts = graph.name_counts();
    let ids_of = |name: &str| -> Vec<ElementRef> {
        graph
            .objects
            .iter()
            .filter(|o| o.name == name)
            .map(|o| ElementRef::Object(o.id))
            .collect()
    };
    // first-seen order keeps the output readable
    let mut seen = std::collections::BTreeSet::new();
    let names: Vec<&str> = graph
        .objects
        .iter()
        .map(|o| o.name.as_str())
        .filter(|n| seen.insert(*n))
        .collect();
    for name in &names {
        out.push(Question {
            category: QuestionCategory::Object,
            text: format!("Is there {} in the image?", with_article(name)),
            expected: "yes".into(),
            target: ids_of(name),
            probe: Probe::Object { name: name.to_string() },
        });
    }
    for name in &names {
        let k = counts[name];
        if k > 1 {
            out.push(Question {
                category: QuestionCategory::Count,
                text: format!("Are there exactly {} {} in the image?", number_word(k), plural(name)),
                expected: "yes".into(),
                target: ids_of(name),
                probe: Probe::Count { name: name.to_string(), count: k },
            });
        }
    }
    for a in &graph.attributes {
        let owner = graph.object(a.owner).expect("attribute owner exists");
        out.push(Question {
            category: QuestionCategory::Attribute,
            text: format!("Is there {} in the image?", with_article(&format!("{} {}", a.value, owner.name))),
            expected: "yes".into(),
            target: vec![ElementRef::Attribute(a.id), ElementRef::Object(owner.id)],
            probe: Probe::Attribute {
                name: owner.name.clone(),
                concept: a.concept.clone(),
                value: a.value.clone(),
            },
        });
    }
    for r in &graph.relations {
        let s = graph.object(r.subject).expect("relation subject exists");
        let o = graph.object(r.object).expect("relation object exists");
        out.push(Question {
            category: QuestionCategory::Relation,
            text: format!("Is the {} {} the {}?", s.name, r.predicate, o.name),
            expected: "yes".into(),
            target: vec![
                ElementRef::Relation(r.id),
                ElementRef::Object(s.id),
                ElementRef::Object(o.id),
            ],
            probe: Probe::Relation {
                subject: s.name.clone(),
                predicate: r.predicate.clone(),
                object: o.name.clone(),
            },
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene_graph::fixtures::dogs_and_hamburger;
    use crate::scene_graph::ObjectNode;
    use std::collections::BTreeSet;

    #[test]
    fn dogs_and_hamburger_questions() {
        let qs = generate_questions(&dogs_and_hamburger());
        assert_eq!(qs.len(), 6);
        let texts: Vec<&str> = qs.iter().map(|q| q.text.as_str()).collect();
        assert_eq!(
            texts,
            [
                "Is there a dog in the image?",
                "Is there a hamburger in the image?",
                "Are there exactly two dogs in the image?",
                "Is there a white dog in the image?",
                "Is there a yellow dog in the image?",
                "Is the dog eating the hamburger?",
            ]
        );
        assert!(qs.iter().all(|q| q.expected == "yes"));
    }

    #[test]
    fn single_object_single_question() {
        let g = SceneGraph {
            objects: vec![ObjectNode { id: 0, name: "owl".into(), category: None }],
            ..Default::default()
        };
        let qs = generate_questions(&g);
        assert_eq!(qs.len(), 1);
        assert_eq!(qs[0].text, "Is there an owl in the image?");
    }

    #[test]
    fn every_element_is_targeted() {
        let g = dogs_and_hamburger();
        let covered: BTreeSet<ElementRef> =
            generate_questions(&g).into_iter().flat_map(|q| q.target).collect();
        for o in &g.objects {
            assert!(covered.contains(&ElementRef::Object(o.id)));
        }
        for a in &g.attributes {
            assert!(covered.contains(&ElementRef::Attribute(a.id)));
        }
        for r in &g.relations {
            assert!(covered.contains(&ElementRef::Relation(r.id)));
        }
    }
}
