use cascade_core::ScenarioId;

#[derive(Debug, thiserror::Error)]
pub enum EstimatorError {
    #[error("no usable observation rows")]
    EmptyInput,

    #[error("design is not estimable: {0}")]
    Estimability(String),

    #[error("tasks missing from the data: {0:?} (the full design needs all three)")]
    MissingTasks(Vec<ScenarioId>),

    #[error("random-intercept fit needs at least 2 groups, found {0}")]
    TooFewGroups(usize),

    #[error("fit did not converge after {iterations} iterations; trace of (ratio, restricted ll): {trace:?}")]
    NonConvergence {
        iterations: usize,
        trace: Vec<(f64, f64)>,
    },

    #[error("contrast is invalid: {0}")]
    InvalidContrast(String),

    #[error("fits are not comparable: {0}")]
    MismatchedFits(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("response confidence {0} outside [0.5, 1.0]")]
    InvalidConfidence(f64),

    #[error("invalid clamp bounds [{lo}, {hi}]")]
    InvalidClamp { lo: f64, hi: f64 },

    #[error("transcript {trial_id} (run {run_id}) carries digest {found}, manifest for {scenario} has {expected}")]
    DigestMismatch {
        run_id: String,
        trial_id: String,
        scenario: ScenarioId,
        found: String,
        expected: String,
    },

    #[error("transcript references unknown trial {trial_id} in scenario {scenario}")]
    UnknownTrial { trial_id: String, scenario: ScenarioId },

    #[error("response is for trial {response_trial}, observation built against trial {trial_id}")]
    ResponseTrialMismatch {
        response_trial: String,
        trial_id: String,
    },

    #[error("no manifest supplied for scenario {0}")]
    MissingManifest(ScenarioId),

    #[error("no scenario definition supplied for {0}")]
    MissingScenario(ScenarioId),

    #[error("duplicate transcript key (run {run_id}, trial {trial_id}, repetition {repetition_index})")]
    DuplicateTranscript {
        run_id: String,
        trial_id: String,
        repetition_index: u32,
    },

    #[error(transparent)]
    Core(#[from] cascade_core::CoreError),
}
