use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cascade_core::TokenUsage;

use crate::config::EndpointConfig;
use crate::error::{RunnerError, TransportError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// One chat-completion request in the common messages wire format. Decoding
/// parameters are flattened into the top-level object, exactly as sent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    #[serde(flatten)]
    pub decoding: BTreeMap<String, serde_json::Value>,
}

impl ChatRequest {
    /// Replay-store key: hash of the canonical request JSON. Canonical
    /// because struct fields serialize in declaration order and decoding
    /// keys are sorted, so equal requests always hash equally.
    pub fn fixture_key(&self) -> String {
        let json = serde_json::to_string(self).expect("chat request serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// What a completed request yields. Replay stores carry no timing or usage
/// metadata, so both are optional.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatReply {
    pub content: String,
    pub usage: Option<TokenUsage>,
    pub latency_ms: Option<u64>,
}

#[async_trait]
pub trait Transport: Send + Sync {
    async fn complete(&self, request: &ChatRequest) -> Result<ChatReply, TransportError>;
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct WireUsage {
    prompt_tokens: u64,
    completion_tokens: u64,
}

/// Live endpoint: POSTs to `{base_url}/chat/completions` with a bearer
/// token read from the configured environment variable.
pub struct HttpTransport {
    client: reqwest::Client,
    url: String,
    api_key: String,
}

impl HttpTransport {
    pub fn new(config: &EndpointConfig) -> Result<HttpTransport, RunnerError> {
        config.validate()?;
        let api_key = config.api_key()?;
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs(config.request_timeout_secs))
            .build()
            .map_err(|err| RunnerError::ClientBuild(err.to_string()))?;
        Ok(HttpTransport {
            client,
            url: format!("{}/chat/completions", config.base_url.trim_end_matches('/')),
            api_key,
        })
    }
}

fn truncate_body(body: &str) -> String {
    const LIMIT: usize = 500;
    if body.len() <= LIMIT {
        return body.to_string();
    }
    let mut cut = LIMIT;
    while !body.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{}...", &body[..cut])
}

#[async_trait]
impl Transport for HttpTransport {
    async fn complete(&self, request: &ChatRequest) -> Result<ChatReply, TransportError> {
        let started = Instant::now();
        let response = self
            .client
            .post(&self.url)
            .bearer_auth(&self.api_key)
            .json(request)
            .send()
            .await
            .map_err(|err| TransportError::Network(err.to_string()))?;
        let status = response.status();
        let body = response
            .text()
            .await
            .map_err(|err| TransportError::Network(err.to_string()))?;
        if !status.is_success() {
            return Err(TransportError::Status {
                status: status.as_u16(),
                body: truncate_body(&body),
            });
        }
        let wire: WireResponse = serde_json::from_str(&body)
            .map_err(|err| TransportError::BadResponse(err.to_string()))?;
        let content = wire
            .choices
            .into_iter()
            .next()
            .and_then(|choice| choice.message.content)
            .ok_or_else(|| {
                TransportError::BadResponse("missing choices[0].message.content".into())
            })?;
        Ok(ChatReply {
            content,
            usage: wire.usage.map(|u| TokenUsage {
                prompt_tokens: u.prompt_tokens,
                completion_tokens: u.completion_tokens,
            }),
            latency_ms: Some(started.elapsed().as_millis() as u64),
        })
    }
}

/// Offline store of canned completions keyed by request hash. Lookups are
/// exact: a request without a recorded response is a fatal transport error,
/// which keeps replay runs deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplayTransport {
    fixtures: BTreeMap<String, String>,
}

impl ReplayTransport {
    pub fn new(fixtures: BTreeMap<String, String>) -> ReplayTransport {
        ReplayTransport { fixtures }
    }

    pub fn insert(&mut self, request: &ChatRequest, content: impl Into<String>) {
        self.fixtures.insert(request.fixture_key(), content.into());
    }

    pub fn len(&self) -> usize {
        self.fixtures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixtures.is_empty()
    }

    pub fn from_json(text: &str) -> Result<ReplayTransport, RunnerError> {
        Ok(ReplayTransport { fixtures: serde_json::from_str(text)? })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.fixtures).expect("string map serializes")
    }

    pub fn read(path: &Path) -> Result<ReplayTransport, RunnerError> {
        ReplayTransport::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), RunnerError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[async_trait]
impl Transport for ReplayTransport {
    async fn complete(&self, request: &ChatRequest) -> Result<ChatReply, TransportError> {
        let key = request.fixture_key();
        match self.fixtures.get(&key) {
            Some(content) => Ok(ChatReply {
                content: content.clone(),
                usage: None,
                latency_ms: None,
            }),
            None => Err(TransportError::MissingFixture(key)),
        }
    }
}
