//! Domain types and Bayesian arithmetic for binary-choice cascade trials.
//!
//! A trial presents one private signal and one to three public advisor
//! signals over two mutually exclusive options with a fixed 0.5 prior.
//! Signals are conditionally independent given the true option and share
//! the scenario's accuracy `q`, so the posterior depends only on the net
//! signed signal count. All probability math lives in [`bayes`] at full
//! double precision; rounding is a presentation concern.

pub mod bayes;
pub mod error;
pub mod scenario;
pub mod transcript;
pub mod trial;

pub use error::CoreError;
pub use scenario::{Scenario, ScenarioId};
pub use transcript::{
    read_transcripts, transcripts_from_jsonl, transcripts_to_jsonl, write_transcripts,
    ParseFailureReason, ParsedOutcome, TokenUsage, Transcript,
};
pub use trial::{AdvisorSignal, AdvisorSource, AgentResponse, Evidence, Side, Trial};
