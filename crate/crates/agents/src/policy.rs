use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::AgentError;

/// How a weighted agent turns its choice probability into a decision:
/// `Argmax` picks the likelier option deterministically, `Sample` draws from
/// the probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChoiceRule {
    Argmax,
    Sample,
}

/// Logistic evidence-weighing policy. The latent score is
/// `beta0 + beta_private * i_pi + beta_human * i_h + beta_ai * i_ai + noise`
/// where the `i` terms are log-likelihood-ratio units toward option A and
/// `noise ~ Normal(0, noise_sd)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPolicy {
    pub beta0: f64,
    pub beta_private: f64,
    pub beta_human: f64,
    pub beta_ai: f64,
    pub noise_sd: f64,
    pub choice_rule: ChoiceRule,
}

impl WeightedPolicy {
    /// An exact Bayesian responder expressed as a weighted policy: unit
    /// weights, no bias, no noise, deterministic choice.
    pub fn bayesian_equivalent() -> WeightedPolicy {
        WeightedPolicy {
            beta0: 0.0,
            beta_private: 1.0,
            beta_human: 1.0,
            beta_ai: 1.0,
            noise_sd: 0.0,
            choice_rule: ChoiceRule::Argmax,
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        let finite = [self.beta0, self.beta_private, self.beta_human, self.beta_ai]
            .iter()
            .all(|b| b.is_finite());
        if !finite {
            return Err(AgentError::InvalidPolicy("coefficients must be finite".into()));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(AgentError::InvalidPolicy(format!(
                "noise_sd must be finite and >= 0, got {}",
                self.noise_sd
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentKind {
    Bayesian,
    Weighted(WeightedPolicy),
    Conformist,
    PrivateOnly,
}

/// One synthetic subject. The seed makes the agent's noise and sampling
/// reproducible; deterministic policies ignore it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub agent_id: String,
    pub seed: u64,
    #[serde(flatten)]
    pub kind: AgentKind,
}

impl AgentSpec {
    pub fn validate(&self) -> Result<(), AgentError> {
        if let AgentKind::Weighted(policy) = &self.kind {
            policy.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    pub agents: Vec<AgentSpec>,
}

impl Cohort {
    pub fn new(agents: Vec<AgentSpec>) -> Result<Cohort, AgentError> {
        let cohort = Cohort { agents };
        cohort.validate()?;
        Ok(cohort)
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        if self.agents.is_empty() {
            return Err(AgentError::EmptyCohort);
        }
        let mut seen = std::collections::BTreeSet::new();
        for agent in &self.agents {
            agent.validate()?;
            if !seen.insert(agent.agent_id.as_str()) {
                return Err(AgentError::DuplicateAgentId(agent.agent_id.clone()));
            }
        }
        Ok(())
    }

    /// A cohort of `n` identically configured agents with distinct ids and
    /// seeds derived from `base_seed`.
    pub fn uniform(n: usize, label: &str, base_seed: u64, kind: AgentKind) -> Result<Cohort, AgentError> {
        let agents = (0..n)
            .map(|i| AgentSpec {
                agent_id: format!("{label}-{:02}", i + 1),
                seed: base_seed.wrapping_add(i as u64),
                kind: kind.clone(),
            })
            .collect();
        Cohort::new(agents)
    }

    /// Content digest of the cohort definition; folded into run ids so the
    /// same cohort always produces the same transcript identity.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("cohort serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn from_json(text: &str) -> Result<Cohort, AgentError> {
        let cohort: Cohort = serde_json::from_str(text)?;
        cohort.validate()?;
        Ok(cohort)
    }
}
