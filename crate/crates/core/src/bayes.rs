//! Posterior arithmetic for symmetric binary signals.
//!
//! With prior 0.5 and conditionally independent signals of accuracy `q`, the
//! posterior for option A after a net signed count `d` is
//! `1 / (1 + ((1 - q) / q)^d)`, equivalently `logit(posterior) = d * llr(q)`.

use crate::error::CoreError;
use crate::scenario::Scenario;
use crate::trial::{Side, Trial};

/// Log-likelihood ratio `ln(q / (1 - q))` of a single signal.
pub fn llr(q: f64) -> Result<f64, CoreError> {
    if !(q > 0.5 && q < 1.0) {
        return Err(CoreError::AccuracyOutOfRange(q));
    }
    Ok((q / (1.0 - q)).ln())
}

/// Posterior probability of option A given net signed count `d`.
pub fn posterior_from_net(q: f64, d: i32) -> Result<f64, CoreError> {
    if !(q > 0.5 && q < 1.0) {
        return Err(CoreError::AccuracyOutOfRange(q));
    }
    let ratio = (1.0 - q) / q;
    Ok(1.0 / (1.0 + ratio.powi(d)))
}

/// Posterior of option A for a trial, from its private and advisor signals.
pub fn trial_posterior(trial: &Trial, scenario: &Scenario) -> Result<f64, CoreError> {
    check_pair(trial, scenario)?;
    posterior_from_net(scenario.q, trial.net_count())
}

/// The option with posterior above 0.5, or `None` on a net count of zero.
pub fn most_likely_option(trial: &Trial, scenario: &Scenario) -> Result<Option<Side>, CoreError> {
    check_pair(trial, scenario)?;
    Ok(match trial.net_count() {
        0 => None,
        d if d > 0 => Some(Side::OptionA),
        _ => Some(Side::OptionB),
    })
}

/// Maps a raw confidence report on the 50-100 scale to [0.5, 1.0].
pub fn normalize_confidence(raw: f64) -> Result<f64, CoreError> {
    if !(50.0..=100.0).contains(&raw) {
        return Err(CoreError::ConfidenceOutOfRange(raw));
    }
    Ok(raw / 100.0)
}

fn check_pair(trial: &Trial, scenario: &Scenario) -> Result<(), CoreError> {
    if trial.scenario_id != scenario.id {
        return Err(CoreError::ScenarioMismatch {
            trial_id: trial.trial_id.clone(),
            trial_scenario: trial.scenario_id,
            given: scenario.id,
        });
    }
    if trial.advisors.is_empty() || trial.advisors.len() > 3 {
        return Err(CoreError::AdvisorCountOutOfRange {
            trial_id: trial.trial_id.clone(),
            count: trial.advisors.len(),
        });
    }
    Ok(())
}
