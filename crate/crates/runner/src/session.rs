use std::time::Duration;

use futures::stream::{self, StreamExt};

use cascade_core::{
    AgentResponse, ParsedOutcome, Scenario, TokenUsage, Transcript, Trial,
};
use cascade_trialgen::Manifest;

use crate::config::EndpointConfig;
use crate::error::{RunnerError, TransportError};
use crate::parse::{parse_response, ParseFailure};
use crate::prompt::{render_prompt, FORMAT_REMINDER};
use crate::transport::{ChatMessage, ChatReply, ChatRequest, Transport};

/// Sent as the system message of every request.
pub const SYSTEM_PROMPT: &str = "You are a careful decision-maker taking part in a \
calibrated judgment study. Follow the requested output format exactly.";

/// The wire request for one rendered prompt. Exposed so recording tools and
/// replay fixtures can address requests by the same key the session uses.
pub fn chat_request(config: &EndpointConfig, prompt: &str) -> ChatRequest {
    ChatRequest {
        model: config.model_name.clone(),
        messages: vec![
            ChatMessage { role: "system".into(), content: SYSTEM_PROMPT.into() },
            ChatMessage { role: "user".into(), content: prompt.to_string() },
        ],
        decoding: config.decoding.clone(),
    }
}

struct Presentation {
    rendered_prompt: String,
    raw_completion: Option<String>,
    outcome: ParsedOutcome,
    latency_ms: Option<u64>,
    usage: Option<TokenUsage>,
}

/// Sends one request, retrying transient transport errors with exponential
/// backoff. Fatal errors (e.g. a missing replay fixture) are not retried.
async fn send_with_retries<T: Transport + ?Sized>(
    transport: &T,
    config: &EndpointConfig,
    request: &ChatRequest,
) -> Result<ChatReply, TransportError> {
    let mut attempt: u32 = 0;
    loop {
        match transport.complete(request).await {
            Ok(reply) => return Ok(reply),
            Err(err) if err.is_fatal() || attempt >= config.max_retries => return Err(err),
            Err(_) => {
                let backoff = config
                    .retry_backoff_ms
                    .saturating_mul(1u64 << attempt.min(16));
                tokio::time::sleep(Duration::from_millis(backoff)).await;
                attempt += 1;
            }
        }
    }
}

/// One (trial, repetition) presentation: ask, parse, and on parse failure
/// re-ask up to `max_retries` times with a fixed format reminder appended.
/// Every path yields a Presentation; nothing is dropped.
async fn present_one<T: Transport + ?Sized>(
    transport: &T,
    config: &EndpointConfig,
    scenario: &Scenario,
    trial: &Trial,
    prompt: &str,
    repetition_index: u32,
) -> Presentation {
    let mut last_failure: Option<(String, ChatReply, ParseFailure)> = None;
    for attempt in 0..=config.max_retries {
        let text = if attempt == 0 {
            prompt.to_string()
        } else {
            format!("{prompt}{FORMAT_REMINDER}")
        };
        let request = chat_request(config, &text);
        let reply = match send_with_retries(transport, config, &request).await {
            Ok(reply) => reply,
            Err(err) => {
                // If an earlier attempt already produced a completion, its
                // parse failure (with raw text) is the more informative
                // record; otherwise record the transport failure.
                return match last_failure {
                    Some(entry) => parse_failure_presentation(entry),
                    None => Presentation {
                        rendered_prompt: prompt.to_string(),
                        raw_completion: None,
                        outcome: ParsedOutcome::TransportFailure { detail: err.to_string() },
                        latency_ms: None,
                        usage: None,
                    },
                };
            }
        };
        match parse_response(&reply.content, scenario) {
            Ok(parsed) => {
                return Presentation {
                    rendered_prompt: text,
                    raw_completion: Some(reply.content.clone()),
                    outcome: ParsedOutcome::Ok {
                        response: AgentResponse {
                            trial_id: trial.trial_id.clone(),
                            choice: parsed.choice,
                            confidence: parsed.confidence,
                            rationale: parsed.rationale,
                            repetition_index,
                        },
                    },
                    latency_ms: reply.latency_ms,
                    usage: reply.usage,
                };
            }
            Err(failure) => last_failure = Some((text, reply, failure)),
        }
    }
    parse_failure_presentation(last_failure.expect("loop ran at least once"))
}

fn parse_failure_presentation(
    (text, reply, failure): (String, ChatReply, ParseFailure),
) -> Presentation {
    Presentation {
        rendered_prompt: text,
        raw_completion: Some(reply.content),
        outcome: ParsedOutcome::ParseFailure { reason: failure.reason, detail: failure.detail },
        latency_ms: reply.latency_ms,
        usage: reply.usage,
    }
}

/// Presents every manifest trial `repetitions` times to one endpoint.
///
/// At most `max_concurrent_requests` requests are in flight at once; the
/// returned transcripts are in canonical (manifest order x repetition)
/// order regardless of completion order, one per presentation, failures
/// included. The run id is a pure function of the design digest and model
/// name, so a replayed session reproduces its transcript file byte for byte.
pub async fn run_session<T: Transport + ?Sized>(
    manifest: &Manifest,
    scenario: &Scenario,
    config: &EndpointConfig,
    transport: &T,
    repetitions: u32,
) -> Result<Vec<Transcript>, RunnerError> {
    config.validate()?;
    if repetitions == 0 {
        return Err(RunnerError::ZeroRepetitions);
    }
    if manifest.header.scenario_id != scenario.id {
        return Err(RunnerError::ManifestScenarioMismatch {
            manifest: manifest.header.scenario_id,
            scenario: scenario.id,
        });
    }

    let prompts: Vec<String> = manifest
        .trials
        .iter()
        .map(|trial| render_prompt(scenario, trial))
        .collect::<Result<_, _>>()?;

    let digest = &manifest.header.design_digest;
    let run_id = format!("llm-{}-{}", &digest[..8.min(digest.len())], config.model_name);

    let jobs = (0..manifest.trials.len())
        .flat_map(|trial_idx| (0..repetitions).map(move |rep| (trial_idx, rep)));
    let mut results: Vec<(usize, u32, Presentation)> = stream::iter(jobs)
        .map(|(trial_idx, rep)| {
            let trial = &manifest.trials[trial_idx];
            let prompt = &prompts[trial_idx];
            async move {
                let presentation =
                    present_one(transport, config, scenario, trial, prompt, rep).await;
                (trial_idx, rep, presentation)
            }
        })
        .buffer_unordered(config.max_concurrent_requests as usize)
        .collect()
        .await;
    results.sort_by_key(|(trial_idx, rep, _)| (*trial_idx, *rep));

    let transcripts: Vec<Transcript> = results
        .into_iter()
        .map(|(trial_idx, rep, p)| Transcript {
            run_id: run_id.clone(),
            design_digest: digest.clone(),
            scenario_id: scenario.id,
            model_name: config.model_name.clone(),
            trial_id: manifest.trials[trial_idx].trial_id.clone(),
            repetition_index: rep,
            rendered_prompt: Some(p.rendered_prompt),
            raw_completion: p.raw_completion,
            outcome: p.outcome,
            latency_ms: p.latency_ms,
            usage: p.usage,
        })
        .collect();
    assert_eq!(
        transcripts.len(),
        manifest.trials.len() * repetitions as usize,
        "one transcript per presentation"
    );
    Ok(transcripts)
}
