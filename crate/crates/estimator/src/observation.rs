//! Conversion of transcripts into regression rows.
//!
//! Each successfully parsed response becomes one row. The dependent variable
//! is the log-odds the subject assigned to option A: a choice of A with
//! confidence `c` maps to probability `c`, a choice of B maps to `1 - c`.
//! Probabilities are clamped away from {0, 1} before the logit so that a
//! reported confidence of 1.0 stays finite; clamping is counted, never silent.

use std::collections::{BTreeMap, BTreeSet};

use cascade_core::{
    AgentResponse, ParsedOutcome, Scenario, ScenarioId, Side, Transcript, Trial,
};
use cascade_trialgen::Manifest;

use crate::error::EstimatorError;

/// Bounds applied to the option-A probability before taking the logit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampPolicy {
    pub lo: f64,
    pub hi: f64,
}

impl Default for ClampPolicy {
    fn default() -> Self {
        ClampPolicy { lo: 0.01, hi: 0.99 }
    }
}

impl ClampPolicy {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        if self.lo.is_finite() && self.hi.is_finite() && 0.0 < self.lo && self.lo < self.hi && self.hi < 1.0 {
            Ok(())
        } else {
            Err(EstimatorError::InvalidClamp { lo: self.lo, hi: self.hi })
        }
    }

    /// Clamped probability and whether either bound was hit.
    pub fn apply(&self, p: f64) -> (f64, bool) {
        if p < self.lo {
            (self.lo, true)
        } else if p > self.hi {
            (self.hi, true)
        } else {
            (p, false)
        }
    }
}

/// One regression row: a subject's response to one trial presentation.
///
/// `i_private`, `i_human`, and `i_ai` are the signed signal counts scaled by
/// the scenario's per-signal log-likelihood ratio, so a perfectly Bayesian
/// responder satisfies `y = i_private + i_human + i_ai` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRow {
    pub scenario: ScenarioId,
    /// Grouping unit for random intercepts (model name or agent id).
    pub subject: String,
    pub trial_id: String,
    pub repetition_index: u32,
    pub choice: Side,
    /// Confidence in the chosen option as reported, in [0.5, 1.0].
    pub confidence: f64,
    /// Probability assigned to option A after clamping.
    pub p_a: f64,
    pub clamped: bool,
    /// `ln(p_a / (1 - p_a))`, the dependent variable.
    pub y: f64,
    pub i_private: f64,
    pub i_human: f64,
    pub i_ai: f64,
    /// Net signed signal count `d`; rows with `d == 0` have no normative answer.
    pub net_evidence: i32,
    /// Bayesian posterior for option A given every signal in the trial.
    pub posterior_a: f64,
}

/// Tallies from a conversion pass. Failed presentations yield no rows but are
/// still counted, so `rows == ok` and `transcripts = ok + failures`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConversionStats {
    pub transcripts: usize,
    pub ok: usize,
    pub parse_failures: usize,
    pub transport_failures: usize,
    pub rows: usize,
    pub clamped_rows: usize,
}

impl ConversionStats {
    pub fn clamped_fraction(&self) -> f64 {
        if self.rows == 0 {
            0.0
        } else {
            self.clamped_rows as f64 / self.rows as f64
        }
    }
}

/// Builds a row from one response with the default clamp bounds.
pub fn to_observation(
    scenario: &Scenario,
    trial: &Trial,
    response: &AgentResponse,
    subject: &str,
) -> Result<ObservationRow, EstimatorError> {
    to_observation_clamped(scenario, trial, response, subject, ClampPolicy::default())
}

/// Builds a row from one response with explicit clamp bounds.
pub fn to_observation_clamped(
    scenario: &Scenario,
    trial: &Trial,
    response: &AgentResponse,
    subject: &str,
    policy: ClampPolicy,
) -> Result<ObservationRow, EstimatorError> {
    policy.validate()?;
    if response.trial_id != trial.trial_id {
        return Err(EstimatorError::ResponseTrialMismatch {
            response_trial: response.trial_id.clone(),
            trial_id: trial.trial_id.clone(),
        });
    }
    if !(0.5..=1.0).contains(&response.confidence) {
        return Err(EstimatorError::InvalidConfidence(response.confidence));
    }

    let raw_p_a = match response.choice {
        Side::OptionA => response.confidence,
        Side::OptionB => 1.0 - response.confidence,
    };
    let (p_a, clamped) = policy.apply(raw_p_a);
    let llr = scenario.llr();
    let evidence = trial.evidence();

    Ok(ObservationRow {
        scenario: trial.scenario_id,
        subject: subject.to_string(),
        trial_id: trial.trial_id.clone(),
        repetition_index: response.repetition_index,
        choice: response.choice,
        confidence: response.confidence,
        p_a,
        clamped,
        y: (p_a / (1.0 - p_a)).ln(),
        i_private: f64::from(evidence.private) * llr,
        i_human: f64::from(evidence.human) * llr,
        i_ai: f64::from(evidence.ai) * llr,
        net_evidence: evidence.net(),
        posterior_a: trial.posterior_a,
    })
}

/// Converts a transcript set into rows, resolving each transcript against its
/// scenario's manifest.
///
/// Every transcript must carry the digest of the manifest it was generated
/// from and a trial id that manifest contains; `(run_id, trial_id,
/// repetition_index)` must be unique across the set. Parse and transport
/// failures are tallied and skipped.
pub fn from_transcripts(
    scenarios: &[Scenario],
    manifests: &[Manifest],
    transcripts: &[Transcript],
    policy: ClampPolicy,
) -> Result<(Vec<ObservationRow>, ConversionStats), EstimatorError> {
    policy.validate()?;
    let scenario_by_id: BTreeMap<ScenarioId, &Scenario> =
        scenarios.iter().map(|s| (s.id, s)).collect();
    let manifest_by_id: BTreeMap<ScenarioId, &Manifest> =
        manifests.iter().map(|m| (m.header.scenario_id, m)).collect();
    let mut trials_by_scenario: BTreeMap<ScenarioId, BTreeMap<&str, &Trial>> = BTreeMap::new();
    for manifest in manifests {
        let by_id = trials_by_scenario
            .entry(manifest.header.scenario_id)
            .or_default();
        for trial in &manifest.trials {
            by_id.insert(trial.trial_id.as_str(), trial);
        }
    }

    let mut seen: BTreeSet<(&str, &str, u32)> = BTreeSet::new();
    let mut rows = Vec::new();
    let mut stats = ConversionStats::default();

    for transcript in transcripts {
        stats.transcripts += 1;
        if !seen.insert((
            transcript.run_id.as_str(),
            transcript.trial_id.as_str(),
            transcript.repetition_index,
        )) {
            return Err(EstimatorError::DuplicateTranscript {
                run_id: transcript.run_id.clone(),
                trial_id: transcript.trial_id.clone(),
                repetition_index: transcript.repetition_index,
            });
        }

        let scenario = scenario_by_id
            .get(&transcript.scenario_id)
            .ok_or(EstimatorError::MissingScenario(transcript.scenario_id))?;
        let manifest = manifest_by_id
            .get(&transcript.scenario_id)
            .ok_or(EstimatorError::MissingManifest(transcript.scenario_id))?;
        if transcript.design_digest != manifest.header.design_digest {
            return Err(EstimatorError::DigestMismatch {
                run_id: transcript.run_id.clone(),
                trial_id: transcript.trial_id.clone(),
                scenario: transcript.scenario_id,
                found: transcript.design_digest.clone(),
                expected: manifest.header.design_digest.clone(),
            });
        }
        let trial = trials_by_scenario
            .get(&transcript.scenario_id)
            .and_then(|by_id| by_id.get(transcript.trial_id.as_str()))
            .ok_or_else(|| EstimatorError::UnknownTrial {
                trial_id: transcript.trial_id.clone(),
                scenario: transcript.scenario_id,
            })?;

        match &transcript.outcome {
            ParsedOutcome::Ok { response } => {
                stats.ok += 1;
                let row = to_observation_clamped(
                    scenario,
                    trial,
                    response,
                    &transcript.model_name,
                    policy,
                )?;
                stats.rows += 1;
                if row.clamped {
                    stats.clamped_rows += 1;
                }
                rows.push(row);
            }
            ParsedOutcome::ParseFailure { .. } => stats.parse_failures += 1,
            ParsedOutcome::TransportFailure { .. } => stats.transport_failures += 1,
        }
    }

    Ok((rows, stats))
}
