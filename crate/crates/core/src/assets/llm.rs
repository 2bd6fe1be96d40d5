//! Text-completion clients.
//!
//! [`HttpLlmClient`] talks to a chat-completions endpoint, [`FixtureClient`]
//! replays recorded responses keyed by the SHA-256 of the prompt,
//! [`RecordingClient`] captures a live session into such a fixture, and
//! [`TemplateClient`] answers every prompt this crate issues from builtin data
//! without any network.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::builtin;
use super::prompts::{self, PromptTask};
use crate::scene_graph::SceneGraph;

pub const ENV_BASE_URL: &str = "COMPGEN_LLM_BASE_URL";
pub const ENV_API_KEY: &str = "COMPGEN_LLM_API_KEY";
pub const ENV_MODEL: &str = "COMPGEN_LLM_MODEL";

const DEFAULT_BASE_URL: &str = "https://api.deepseek.com";
const DEFAULT_MODEL: &str = "deepseek-chat";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LlmError {
    #[error("llm configuration: {0}")]
    Config(String),
    #[error("llm transport: {0}")]
    Transport(String),
    #[error("llm endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed llm response: {0}")]
    Malformed(String),
    #[error("no recorded response for prompt {0}")]
    MissingFixture(String),
    #[error("prompt not understood by the template client")]
    Unsupported,
    #[error("fixture io: {0}")]
    Io(String),
}

impl LlmError {
    /// Failures caused by the remote service rather than local configuration.
    pub fn is_external(&self) -> bool {
        matches!(
            self,
            LlmError::Transport(_) | LlmError::Status { .. } | LlmError::Malformed(_)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodingOptions {
    pub temperature: f64,
    pub max_tokens: Option<u32>,
}

impl Default for DecodingOptions {
    fn default() -> Self {
        Self {
            temperature: 0.0,
            max_tokens: None,
        }
    }
}

pub trait LlmClient: Send + Sync {
    fn complete(&self, prompt: &str, options: &DecodingOptions) -> Result<String, LlmError>;
}

pub fn prompt_digest(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// Counting semaphore bounding concurrent requests.
struct InFlight {
    free: Mutex<usize>,
    cv: Condvar,
}

impl InFlight {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("semaphore poisoned");
        while *free == 0 {
            free = self.cv.wait(free).expect("semaphore poisoned");
        }
        *free -= 1;
        Permit(self)
    }
}

struct Permit<'a>(&'a InFlight);

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("semaphore poisoned") += 1;
        self.0.cv.notify_one();
    }
}

pub struct HttpLlmClient {
    base_url: String,
    api_key: String,
    model: String,
    agent: ureq::Agent,
    in_flight: InFlight,
}

impl HttpLlmClient {
    pub fn new(base_url: &str, api_key: &str, model: &str, max_in_flight: usize) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            api_key: api_key.to_string(),
            model: model.to_string(),
            agent,
            in_flight: InFlight::new(max_in_flight),
        }
    }

    /// Reads the endpoint from the environment; a missing API key is a
    /// configuration error.
    pub fn from_env(max_in_flight: usize) -> Result<Self, LlmError> {
        let key = std::env::var(ENV_API_KEY)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| LlmError::Config(format!("{ENV_API_KEY} is not set")))?;
        let base = std::env::var(ENV_BASE_URL).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        let model = std::env::var(ENV_MODEL).unwrap_or_else(|_| DEFAULT_MODEL.to_string());
        Ok(Self::new(&base, &key, &model, max_in_flight))
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_tokens: Option<u32>,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatContent,
}

#[derive(Deserialize)]
struct ChatContent {
    content: Option<String>,
}

impl LlmClient for HttpLlmClient {
    fn complete(&self, prompt: &str, options: &DecodingOptions) -> Result<String, LlmError> {
        let _permit = self.in_flight.acquire();
        let body = ChatRequest {
            model: &self.model,
            messages: [ChatMessage {
                role: "user",
                content: prompt,
            }],
            temperature: options.temperature,
            max_tokens: options.max_tokens,
        };
        let url = format!("{}/chat/completions", self.base_url);
        let mut resp = self
            .agent
            .post(&url)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            let text = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(LlmError::Status { status, body: text });
        }
        let parsed: ChatResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| LlmError::Malformed(e.to_string()))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| LlmError::Malformed("no choices in response".into()))
    }
}

/// Recorded responses: prompt digest -> responses in call order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub entries: BTreeMap<String, Vec<String>>,
}

impl Fixture {
    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path).map_err(|e| LlmError::Io(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| LlmError::Io(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), LlmError> {
        let text = serde_json::to_string_pretty(self).expect("fixture serialization is infallible");
        std::fs::write(path, text).map_err(|e| LlmError::Io(e.to_string()))
    }

    pub fn push(&mut self, prompt: &str, response: &str) {
        self.entries
            .entry(prompt_digest(prompt))
            .or_default()
            .push(response.to_string());
    }
}

/// Replays a [`Fixture`]. Repeated prompts walk through their recorded
/// responses and then keep returning the last one.
pub struct FixtureClient {
    fixture: Fixture,
    cursors: Mutex<BTreeMap<String, usize>>,
}

impl FixtureClient {
    pub fn new(fixture: Fixture) -> Self {
        Self {
            fixture,
            cursors: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn load(path: &Path) -> Result<Self, LlmError> {
        Ok(Self::new(Fixture::load(path)?))
    }
}

impl LlmClient for FixtureClient {
    fn complete(&self, prompt: &str, _options: &DecodingOptions) -> Result<String, LlmError> {
        let key = prompt_digest(prompt);
        let responses = self
            .fixture
            .entries
            .get(&key)
            .filter(|r| !r.is_empty())
            .ok_or_else(|| LlmError::MissingFixture(key.clone()))?;
        let mut cursors = self.cursors.lock().expect("fixture cursor poisoned");
        let cursor = cursors.entry(key).or_insert(0);
        let i = (*cursor).min(responses.len() - 1);
        *cursor += 1;
        Ok(responses[i].clone())
    }
}

pub struct RecordingClient<C> {
    inner: C,
    fixture: Mutex<Fixture>,
}

impl<C: LlmClient> RecordingClient<C> {
    pub fn new(inner: C) -> Self {
        Self {
            inner,
            fixture: Mutex::new(Fixture::default()),
        }
    }

    pub fn fixture(&self) -> Fixture {
        self.fixture.lock().expect("recording poisoned").clone()
    }
}

impl<C: LlmClient> LlmClient for RecordingClient<C> {
    fn complete(&self, prompt: &str, options: &DecodingOptions) -> Result<String, LlmError> {
        let out = self.inner.complete(prompt, options)?;
        self.fixture
            .lock()
            .expect("recording poisoned")
            .push(prompt, &out);
        Ok(out)
    }
}

/// Offline client that answers this crate's prompts from builtin data.
#[derive(Debug, Clone, Copy, Default)]
pub struct TemplateClient;

impl LlmClient for TemplateClient {
    fn complete(&self, prompt: &str, _options: &DecodingOptions) -> Result<String, LlmError> {
        match prompts::parse_task(prompt).ok_or(LlmError::Unsupported)? {
            PromptTask::Objects { category } => {
                let names = builtin::category_objects(&category).ok_or(LlmError::Unsupported)?;
                Ok(serde_json::json!({ "objects": names }).to_string())
            }
            PromptTask::Attributes { object } => {
                let concepts = builtin::catalog_for(&object).ok_or(LlmError::Unsupported)?;
                let list: Vec<_> = concepts
                    .iter()
                    .map(|c| serde_json::json!({ "concept": c.name, "values": c.values }))
                    .collect();
                Ok(serde_json::json!({ "concepts": list }).to_string())
            }
            PromptTask::Relation { subject, object } => Ok(builtin::builtin_relation(&subject, &object)),
            PromptTask::InputText { graph } => {
                let g = SceneGraph::from_json(&graph).map_err(|_| LlmError::Unsupported)?;
                Ok(crate::curriculum::fallback_render(&g))
            }
        }
    }
}

/// Returns scripted responses in order, then repeats the last one. Handy for
/// exercising validation and retry paths.
pub struct ScriptedClient {
    responses: Vec<String>,
    cursor: Mutex<usize>,
}

impl ScriptedClient {
    pub fn new<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> Self {
        Self {
            responses: responses.into_iter().map(Into::into).collect(),
            cursor: Mutex::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        *self.cursor.lock().expect("cursor poisoned")
    }
}

impl LlmClient for ScriptedClient {
    fn complete(&self, _prompt: &str, _options: &DecodingOptions) -> Result<String, LlmError> {
        let mut c = self.cursor.lock().expect("cursor poisoned");
        let out = self
            .responses
            .get((*c).min(self.responses.len().saturating_sub(1)))
            .cloned()
            .ok_or(LlmError::Unsupported)?;
        *c += 1;
        Ok(out)
    }
}
