//! Shared transcript record: one line per (run, trial, repetition).
//!
//! Synthetic cohorts and live endpoint sessions emit the same format, so the
//! estimator and the report pipelines consume either interchangeably.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::scenario::ScenarioId;
use crate::trial::AgentResponse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseFailureReason {
    NoChoice,
    BadConfidence,
    Ambiguous,
}

/// Outcome of one presentation. Failures are first-class records: a failed
/// parse keeps its raw completion and a transport failure keeps its error,
/// so no presentation is ever silently dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ParsedOutcome {
    Ok { response: AgentResponse },
    ParseFailure { reason: ParseFailureReason, detail: String },
    TransportFailure { detail: String },
}

impl ParsedOutcome {
    pub fn response(&self) -> Option<&AgentResponse> {
        match self {
            ParsedOutcome::Ok { response } => Some(response),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// One presentation of one trial to one subject.
///
/// `(run_id, trial_id, repetition_index)` is unique within a transcript set;
/// `design_digest` ties the record to the manifest that produced the trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub run_id: String,
    pub design_digest: String,
    pub scenario_id: ScenarioId,
    pub model_name: String,
    pub trial_id: String,
    pub repetition_index: u32,
    pub rendered_prompt: Option<String>,
    pub raw_completion: Option<String>,
    pub outcome: ParsedOutcome,
    pub latency_ms: Option<u64>,
    pub usage: Option<TokenUsage>,
}

pub fn transcripts_to_jsonl(transcripts: &[Transcript]) -> Result<String, CoreError> {
    let mut out = String::new();
    for t in transcripts {
        out.push_str(&serde_json::to_string(t)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn transcripts_from_jsonl(text: &str) -> Result<Vec<Transcript>, CoreError> {
    let mut transcripts = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let t = serde_json::from_str(line)
            .map_err(|source| CoreError::MalformedJsonLine { line: idx + 1, source })?;
        transcripts.push(t);
    }
    Ok(transcripts)
}

pub fn write_transcripts(path: &Path, transcripts: &[Transcript]) -> Result<(), CoreError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(transcripts_to_jsonl(transcripts)?.as_bytes())?;
    Ok(())
}

pub fn read_transcripts(path: &Path) -> Result<Vec<Transcript>, CoreError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut text = String::new();
    for line in reader.lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    transcripts_from_jsonl(&text)
}
