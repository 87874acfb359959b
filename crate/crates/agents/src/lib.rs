//! Synthetic benchmark agents.
//!
//! Four policies with known ground truth: an exact Bayesian responder, a
//! noisy logistic evidence-weigher, a majority-following conformist and a
//! private-signal-only responder. Cohorts of seeded agents run over a
//! manifest and emit the same transcript format as live endpoint sessions,
//! so the whole estimation pipeline can be validated against analytically
//! known weights.

pub mod cohort;
pub mod policy;
pub mod respond;

pub use cohort::simulate_cohort;
pub use policy::{AgentKind, AgentSpec, ChoiceRule, Cohort, WeightedPolicy};
pub use respond::{
    respond, respond_bayesian, respond_conformist, respond_private_only, respond_weighted,
};

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("invalid weighted policy: {0}")]
    InvalidPolicy(String),

    #[error("cohort has no agents")]
    EmptyCohort,

    #[error("duplicate agent_id {0}")]
    DuplicateAgentId(String),

    #[error("repetitions must be at least 1")]
    ZeroRepetitions,

    #[error(transparent)]
    Core(#[from] cascade_core::CoreError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
