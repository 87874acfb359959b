//! Executes trial manifests against chat-completion endpoints.
//!
//! The runner renders each trial into a deterministic prompt, presents it
//! to a model over HTTP (or a recorded-response replay store), parses the
//! structured answer, and persists one [`cascade_core::Transcript`] per
//! (trial, repetition) presentation. Failures are recorded, never dropped:
//! the transcript count always equals trials x repetitions.

mod config;
mod error;
mod parse;
mod prompt;
mod session;
mod transport;

pub use config::EndpointConfig;
pub use error::{RunnerError, TransportError};
pub use parse::{parse_response, ParseFailure, ParsedReply};
pub use prompt::{render_prompt, FORMAT_REMINDER};
pub use session::{chat_request, run_session, SYSTEM_PROMPT};
pub use transport::{
    ChatMessage, ChatReply, ChatRequest, HttpTransport, ReplayTransport, Transport,
};
