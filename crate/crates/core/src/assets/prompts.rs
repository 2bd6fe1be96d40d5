//! Prompt templates. Each prompt opens with a `TASK:` line and carries its
//! arguments on `Key: value` lines, which lets offline clients recognise it.

use crate::scene_graph::SceneGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PromptTask {
    Objects { category: String },
    Attributes { object: String },
    Relation { subject: String, object: String },
    InputText { graph: String },
}

pub fn object_prompt(category: &str) -> String {
    format!(
        "TASK: object-list\n\
         Category: {category}\n\
         List exactly 50 distinct, concrete objects that belong to this category and that a camera could capture.\n\
         Rules:\n\
         - every name is lowercase\n\
         - no two names may differ only in letter case\n\
         - separate words with spaces and never use underscores\n\
         - do not number the items or add descriptions\n\
         Respond with JSON only: {{\"objects\": [\"name\", ...]}}"
    )
}

pub fn attribute_prompt(object: &str) -> String {
    format!(
        "TASK: attribute-catalog\n\
         Object: {object}\n\
         Propose exactly 5 attribute concepts that are visible in a picture of this object, and exactly 5 values for each concept.\n\
         Rules:\n\
         - concepts are visible properties such as color, material or shape; skip smells, sounds and feelings\n\
         - every value must plausibly apply to the object\n\
         - lowercase words separated by spaces; never use underscores\n\
         - the 5 values of a concept are distinct\n\
         Respond with JSON only: {{\"concepts\": [{{\"concept\": \"color\", \"values\": [\"red\", ...]}}, ...]}}"
    )
}

pub fn relation_prompt(subject: &str, object: &str) -> String {
    format!(
        "TASK: relation\n\
         Subject: {subject}\n\
         Object: {object}\n\
         Give one short relation phrase that could visibly link the subject to the object, such as a spatial preposition or an action verb.\n\
         Return only the base-form phrase: no sentence, no punctuation, and do not repeat the subject or object names."
    )
}

pub fn input_text_prompt(graph: &SceneGraph) -> String {
    format!(
        "TASK: input-text\n\
         Write one fluent image description that realizes the scene graph below.\n\
         Rules:\n\
         - mention every object; when an object name occurs more than once, state how many with a number word\n\
         - attach every attribute value to its object\n\
         - express every relation with its predicate and do not invent relations between unrelated objects\n\
         - add nothing that is not in the graph\n\
         Scene graph:\n\
         <graph>\n{}\n</graph>\n\
         Respond with the description only.",
        graph.to_json()
    )
}

fn field<'a>(prompt: &'a str, key: &str) -> Option<&'a str> {
    prompt
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
        .map(str::trim)
}

pub fn parse_task(prompt: &str) -> Option<PromptTask> {
    let task = prompt.lines().next()?.strip_prefix("TASK: ")?.trim();
    match task {
        "object-list" => Some(PromptTask::Objects {
            category: field(prompt, "Category")?.to_string(),
        }),
        "attribute-catalog" => Some(PromptTask::Attributes {
            object: field(prompt, "Object")?.to_string(),
        }),
        "relation" => Some(PromptTask::Relation {
            subject: field(prompt, "Subject")?.to_string(),
            object: field(prompt, "Object")?.to_string(),
        }),
        "input-text" => {
            let start = prompt.find("<graph>\n")? + "<graph>\n".len();
            let end = prompt.find("\n</graph>")?;
            Some(PromptTask::InputText {
                graph: prompt.get(start..end)?.to_string(),
            })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prompts_parse_back() {
        assert_eq!(
            parse_task(&object_prompt("Animals")),
            Some(PromptTask::Objects { category: "Animals".into() })
        );
        assert_eq!(
            parse_task(&attribute_prompt("painting")),
            Some(PromptTask::Attributes { object: "painting".into() })
        );
        assert_eq!(
            parse_task(&relation_prompt("man", "chair")),
            Some(PromptTask::Relation { subject: "man".into(), object: "chair".into() })
        );
        let g = SceneGraph::new();
        assert_eq!(
            parse_task(&input_text_prompt(&g)),
            Some(PromptTask::InputText { graph: g.to_json() })
        );
        assert_eq!(parse_task("write me a poem"), None);
    }

    #[test]
    fn prompts_never_suggest_underscores() {
        for p in [object_prompt("People"), attribute_prompt("chair")] {
            assert!(p.contains("never use underscores"));
        }
    }
}
