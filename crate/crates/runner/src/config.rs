use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::RunnerError;

/// Connection and scheduling parameters for one chat-completion endpoint.
///
/// The API key is never stored here: `api_key_env` names the environment
/// variable it is read from at session start. `decoding` holds pass-through
/// sampling parameters (temperature, top_p, ...) that are sent verbatim and
/// recorded in the request hash; when empty, the provider's defaults apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    pub api_key_env: String,
    #[serde(default = "default_concurrency")]
    pub max_concurrent_requests: u32,
    #[serde(default = "default_timeout")]
    pub request_timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub retry_backoff_ms: u64,
    #[serde(default)]
    pub decoding: BTreeMap<String, serde_json::Value>,
}

fn default_concurrency() -> u32 {
    4
}

fn default_timeout() -> u64 {
    120
}

fn default_retries() -> u32 {
    2
}

fn default_backoff() -> u64 {
    500
}

impl EndpointConfig {
    pub fn new(
        base_url: impl Into<String>,
        model_name: impl Into<String>,
        api_key_env: impl Into<String>,
    ) -> EndpointConfig {
        EndpointConfig {
            base_url: base_url.into(),
            model_name: model_name.into(),
            api_key_env: api_key_env.into(),
            max_concurrent_requests: default_concurrency(),
            request_timeout_secs: default_timeout(),
            max_retries: default_retries(),
            retry_backoff_ms: default_backoff(),
            decoding: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        if self.base_url.trim().is_empty() {
            return Err(RunnerError::InvalidConfig("base_url is empty".into()));
        }
        if self.model_name.trim().is_empty() {
            return Err(RunnerError::InvalidConfig("model_name is empty".into()));
        }
        if self.max_concurrent_requests < 1 {
            return Err(RunnerError::InvalidConfig(
                "max_concurrent_requests must be at least 1".into(),
            ));
        }
        if self.request_timeout_secs == 0 {
            return Err(RunnerError::InvalidConfig(
                "request_timeout_secs must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Reads the API key from the environment variable named by
    /// `api_key_env`. Keys never appear in config files.
    pub fn api_key(&self) -> Result<String, RunnerError> {
        match std::env::var(&self.api_key_env) {
            Ok(key) if !key.trim().is_empty() => Ok(key),
            _ => Err(RunnerError::MissingApiKey(self.api_key_env.clone())),
        }
    }

    pub fn from_json(text: &str) -> Result<EndpointConfig, RunnerError> {
        let config: EndpointConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<EndpointConfig, RunnerError> {
        EndpointConfig::from_json(&std::fs::read_to_string(path)?)
    }
}
