use cascade_core::ScenarioId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("invalid endpoint config: {0}")]
    InvalidConfig(String),

    #[error("API key environment variable {0} is not set")]
    MissingApiKey(String),

    #[error("prompt template is missing the {{{placeholder}}} placeholder")]
    MissingPlaceholder { placeholder: String },

    #[error("trial {trial_id} belongs to scenario {found}, session is for {expected}")]
    ScenarioMismatch {
        trial_id: String,
        expected: ScenarioId,
        found: ScenarioId,
    },

    #[error("manifest is for scenario {manifest}, session is for {scenario}")]
    ManifestScenarioMismatch {
        manifest: ScenarioId,
        scenario: ScenarioId,
    },

    #[error("repetitions must be at least 1")]
    ZeroRepetitions,

    #[error("failed to build HTTP client: {0}")]
    ClientBuild(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Failure of a single completion request. `is_fatal` failures are not
/// retried: repeating the identical request cannot change the outcome.
#[derive(Debug, Error)]
pub enum TransportError {
    #[error("endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },

    #[error("request failed: {0}")]
    Network(String),

    #[error("response is not a usable chat completion: {0}")]
    BadResponse(String),

    #[error("no recorded response for request key {0}")]
    MissingFixture(String),
}

impl TransportError {
    pub fn is_fatal(&self) -> bool {
        matches!(self, TransportError::MissingFixture(_))
    }
}
