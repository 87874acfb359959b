use serde::{Deserialize, Serialize};

use crate::bayes;
use crate::error::CoreError;
use crate::scenario::{Scenario, ScenarioId};

/// One of the two mutually exclusive options. Option A carries positive sign
/// in every signed-count computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    OptionA,
    OptionB,
}

impl Side {
    /// +1 for option A, -1 for option B.
    pub fn sign(self) -> i32 {
        match self {
            Side::OptionA => 1,
            Side::OptionB => -1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::OptionA => Side::OptionB,
            Side::OptionB => Side::OptionA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvisorSource {
    Human,
    Ai,
}

/// A public advisor decision shown to the subject before it answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdvisorSignal {
    pub source: AdvisorSource,
    pub decision: Side,
}

/// Signed signal counts toward option A: `private` is the private signal's
/// sign, `human`/`ai` are net advisor counts by source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evidence {
    pub private: i32,
    pub human: i32,
    pub ai: i32,
}

impl Evidence {
    /// Net signed count `d` that determines the posterior.
    pub fn net(&self) -> i32 {
        self.private + self.human + self.ai
    }
}

/// One stimulus: a private signal plus 1 to 3 advisor signals.
///
/// `posterior_a` is a cached value of [`bayes::trial_posterior`]; readers
/// must treat the recomputation, not the cache, as authoritative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub trial_id: String,
    pub scenario_id: ScenarioId,
    pub private: Side,
    pub advisors: Vec<AdvisorSignal>,
    pub posterior_a: f64,
}

impl Trial {
    pub fn new(
        trial_id: impl Into<String>,
        scenario: &Scenario,
        private: Side,
        advisors: Vec<AdvisorSignal>,
    ) -> Result<Trial, CoreError> {
        let trial_id = trial_id.into();
        if advisors.is_empty() || advisors.len() > 3 {
            return Err(CoreError::AdvisorCountOutOfRange {
                trial_id,
                count: advisors.len(),
            });
        }
        let mut trial = Trial {
            trial_id,
            scenario_id: scenario.id,
            private,
            advisors,
            posterior_a: 0.0,
        };
        trial.posterior_a = bayes::trial_posterior(&trial, scenario)?;
        Ok(trial)
    }

    pub fn evidence(&self) -> Evidence {
        let mut evidence = Evidence {
            private: self.private.sign(),
            human: 0,
            ai: 0,
        };
        for advisor in &self.advisors {
            match advisor.source {
                AdvisorSource::Human => evidence.human += advisor.decision.sign(),
                AdvisorSource::Ai => evidence.ai += advisor.decision.sign(),
            }
        }
        evidence
    }

    /// Net signed count toward option A, private signal included.
    pub fn net_count(&self) -> i32 {
        self.evidence().net()
    }
}

/// A subject's answer to one trial presentation. `confidence` refers to the
/// chosen option and lies in [0.5, 1.0].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentResponse {
    pub trial_id: String,
    pub choice: Side,
    pub confidence: f64,
    pub rationale: Option<String>,
    pub repetition_index: u32,
}
