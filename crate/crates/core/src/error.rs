use crate::scenario::ScenarioId;

#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    #[error("signal accuracy q must lie strictly between 0.5 and 1, got {0}")]
    AccuracyOutOfRange(f64),

    #[error("raw confidence must lie in [50, 100], got {0}")]
    ConfidenceOutOfRange(f64),

    #[error("trial {trial_id} belongs to scenario {trial_scenario}, not {given}")]
    ScenarioMismatch {
        trial_id: String,
        trial_scenario: ScenarioId,
        given: ScenarioId,
    },

    #[error("trial {trial_id} must carry 1 to 3 advisors, got {count}")]
    AdvisorCountOutOfRange { trial_id: String, count: usize },

    #[error("scenario {id}: {detail}")]
    InvalidScenario { id: ScenarioId, detail: String },

    #[error("unknown scenario id {0:?}")]
    UnknownScenarioId(String),

    #[error("malformed JSON line {line}: {source}")]
    MalformedJsonLine {
        line: usize,
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
