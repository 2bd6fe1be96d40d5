//! Renditions and the reward oracles that score them.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::curriculum::{Probe, Question};
use crate::scene_graph::SceneGraph;

/// What a simulated generator produced: named objects, attribute bindings
/// and relation triples, with no ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rendition {
    pub objects: Vec<String>,
    /// `(object name, concept, value)`
    pub attributes: Vec<(String, String, String)>,
    /// `(subject name, predicate, object name)`
    pub relations: Vec<(String, String, String)>,
}

impl Rendition {
    /// Renders the whole graph.
    pub fn of_graph(graph: &SceneGraph) -> Self {
        let mut r = Rendition::default();
        for o in &graph.objects {
            r.objects.push(o.name.clone());
        }
        for a in &graph.attributes {
            let owner = graph.object(a.owner).expect("valid graph");
            r.attributes.push((owner.name.clone(), a.concept.clone(), a.value.clone()));
        }
        for e in &graph.relations {
            let s = graph.object(e.subject).expect("valid graph");
            let o = graph.object(e.object).expect("valid graph");
            r.relations.push((s.name.clone(), e.predicate.clone(), o.name.clone()));
        }
        r
    }

    pub fn count(&self, name: &str) -> usize {
        self.objects.iter().filter(|o| *o == name).count()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("oracle failure: {0}")]
pub struct OracleError(pub String);

/// Probability that the answer to `question` is "yes" given `rendition`.
/// Must be deterministic for a fixed pair.
pub trait RewardOracle: Send + Sync {
    fn score(&self, question: &Question, rendition: &Rendition) -> Result<f64, OracleError>;
}

/// Exact-match scorer. With smoothing, hits map to 0.95 and misses to 0.05.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MockOracle {
    pub smoothing: bool,
}

pub fn mock_oracle() -> MockOracle {
    MockOracle::default()
}

impl MockOracle {
    pub fn smoothed() -> Self {
        Self { smoothing: true }
    }

    pub fn hit(question: &Question, r: &Rendition) -> bool {
        match &question.probe {
            Probe::Object { name } => r.count(name) > 0,
            Probe::Count { name, count } => r.count(name) == *count,
            Probe::Attribute { name, concept, value } => r
                .attributes
                .iter()
                .any(|(n, c, v)| n == name && c == concept && v == value),
            Probe::Relation { subject, predicate, object } => r
                .relations
                .iter()
                .any(|(s, p, o)| s == subject && p == predicate && o == object),
        }
    }
}

impl RewardOracle for MockOracle {
    fn score(&self, question: &Question, rendition: &Rendition) -> Result<f64, OracleError> {
        let hit = Self::hit(question, rendition);
        Ok(match (hit, self.smoothing) {
            (true, false) => 1.0,
            (false, false) => 0.0,
            (true, true) => 0.95,
            (false, true) => 0.05,
        })
    }
}

/// Posts `{question, rendition}` as JSON and reads `{"probability": p}`.
pub struct HttpOracle {
    url: String,
    agent: ureq::Agent,
}

#[derive(Serialize)]
struct OracleRequest<'a> {
    question: &'a str,
    probe: &'a Probe,
    rendition: &'a Rendition,
}

#[derive(Deserialize)]
struct OracleResponse {
    probability: f64,
}

impl HttpOracle {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self { url: url.into(), agent }
    }
}

impl RewardOracle for HttpOracle {
    fn score(&self, question: &Question, rendition: &Rendition) -> Result<f64, OracleError> {
        let body = OracleRequest { question: &question.text, probe: &question.probe, rendition };
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(&body)
            .map_err(|e| OracleError(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(OracleError(format!("status {}", resp.status())));
        }
        let parsed: OracleResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| OracleError(e.to_string()))?;
        if !(0.0..=1.0).contains(&parsed.probability) {
            return Err(OracleError(format!("probability {} outside [0, 1]", parsed.probability)));
        }
        Ok(parsed.probability)
    }
}

/// Replays fixed scores keyed by question text; unknown questions fail.
#[derive(Debug, Clone, Default)]
pub struct TableOracle {
    pub scores: BTreeMap<String, f64>,
}

impl RewardOracle for TableOracle {
    fn score(&self, question: &Question, _: &Rendition) -> Result<f64, OracleError> {
        self.scores
            .get(&question.text)
            .copied()
            .ok_or_else(|| OracleError(format!("no score for `{}`", question.text)))
    }
}
