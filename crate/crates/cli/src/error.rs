//! Exit-code taxonomy. Validation errors (bad flags, malformed or
//! inconsistent inputs, infeasible requests) exit 1; runtime failures
//! (filesystem, network, lock contention, numerical non-convergence) exit 2.

use cascade_agents::AgentError;
use cascade_core::CoreError;
use cascade_estimator::EstimatorError;
use cascade_runner::RunnerError;
use cascade_trialgen::DesignError;

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> CliError {
        CliError::Validation(message.into())
    }

    pub fn runtime(message: impl Into<String>) -> CliError {
        CliError::Runtime(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> CliError {
        CliError::Runtime(err.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> CliError {
        match err {
            CoreError::Io(inner) => CliError::Runtime(inner.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<DesignError> for CliError {
    fn from(err: DesignError) -> CliError {
        match err {
            DesignError::Io(inner) => CliError::Runtime(inner.to_string()),
            DesignError::Core(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<AgentError> for CliError {
    fn from(err: AgentError) -> CliError {
        match err {
            AgentError::Core(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<RunnerError> for CliError {
    fn from(err: RunnerError) -> CliError {
        match err {
            RunnerError::Io(inner) => CliError::Runtime(inner.to_string()),
            RunnerError::ClientBuild(inner) => CliError::Runtime(inner),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<EstimatorError> for CliError {
    fn from(err: EstimatorError) -> CliError {
        match err {
            // The optimizer ran and failed; inputs were well-formed.
            EstimatorError::NonConvergence { .. } => CliError::Runtime(err.to_string()),
            EstimatorError::Core(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> CliError {
        CliError::Validation(err.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_split_validation_from_runtime() {
        assert_eq!(CliError::validation("bad flag").exit_code(), 1);
        assert_eq!(CliError::runtime("disk full").exit_code(), 2);
    }

    #[test]
    fn conversions_route_by_failure_class() {
        let io = std::io::Error::new(std::io::ErrorKind::PermissionDenied, "nope");
        assert_eq!(CliError::from(io).exit_code(), 2);

        let missing = EstimatorError::MissingTasks(vec![cascade_core::ScenarioId::Legal]);
        assert_eq!(CliError::from(missing).exit_code(), 1);

        let stuck = EstimatorError::NonConvergence { iterations: 500, trace: vec![] };
        assert_eq!(CliError::from(stuck).exit_code(), 2);

        let bad_json: serde_json::Error =
            serde_json::from_str::<serde_json::Value>("{").unwrap_err();
        assert_eq!(CliError::from(bad_json).exit_code(), 1);
    }
}
