use rand::Rng;
use rand_distr::{Distribution, Normal};

use cascade_core::{bayes, AgentResponse, Scenario, Side, Trial};

use crate::policy::{AgentKind, ChoiceRule, WeightedPolicy};
use crate::AgentError;

/// Chooses the most likely option given all signals; confidence is its
/// posterior. A net count of zero falls back to the private signal at
/// confidence 0.5.
pub fn respond_bayesian(trial: &Trial, scenario: &Scenario) -> Result<AgentResponse, AgentError> {
    let posterior_a = bayes::trial_posterior(trial, scenario)?;
    let choice = bayes::most_likely_option(trial, scenario)?.unwrap_or(trial.private);
    Ok(response(trial, choice, posterior_a.max(1.0 - posterior_a)))
}

/// Logistic evidence-weigher: latent score over log-likelihood-ratio units,
/// Gaussian noise, then argmax or sampled choice. Confidence is the score's
/// implied probability of the chosen option, so an argmax agent's reported
/// confidence inverts exactly back to its latent score.
pub fn respond_weighted(
    trial: &Trial,
    scenario: &Scenario,
    policy: &WeightedPolicy,
    rng: &mut impl Rng,
) -> Result<AgentResponse, AgentError> {
    policy.validate()?;
    let posterior_check = bayes::trial_posterior(trial, scenario)?;
    debug_assert!(posterior_check > 0.0);

    let llr = scenario.llr();
    let evidence = trial.evidence();
    let mut z = policy.beta0
        + policy.beta_private * f64::from(evidence.private) * llr
        + policy.beta_human * f64::from(evidence.human) * llr
        + policy.beta_ai * f64::from(evidence.ai) * llr;
    if policy.noise_sd > 0.0 {
        let normal = Normal::new(0.0, policy.noise_sd)
            .map_err(|err| AgentError::InvalidPolicy(err.to_string()))?;
        z += normal.sample(rng);
    }
    let p_a = 1.0 / (1.0 + (-z).exp());
    let choice = match policy.choice_rule {
        ChoiceRule::Argmax => {
            if p_a > 0.5 {
                Side::OptionA
            } else if p_a < 0.5 {
                Side::OptionB
            } else {
                trial.private
            }
        }
        ChoiceRule::Sample => {
            if rng.gen_bool(p_a) {
                Side::OptionA
            } else {
                Side::OptionB
            }
        }
    };
    let confidence = p_a.max(1.0 - p_a).min(1.0);
    Ok(response(trial, choice, confidence))
}

/// Follows the advisor majority, breaking advisor ties toward the private
/// signal. Confidence is 0.5 + 0.5 * (largest advisor share), so a unanimous
/// panel yields 1.0 and a tied panel 0.75.
pub fn respond_conformist(trial: &Trial, scenario: &Scenario) -> Result<AgentResponse, AgentError> {
    bayes::trial_posterior(trial, scenario)?;
    let toward_a = trial.advisors.iter().filter(|a| a.decision == Side::OptionA).count();
    let toward_b = trial.advisors.len() - toward_a;
    let choice = match toward_a.cmp(&toward_b) {
        std::cmp::Ordering::Greater => Side::OptionA,
        std::cmp::Ordering::Less => Side::OptionB,
        std::cmp::Ordering::Equal => trial.private,
    };
    let majority_share = toward_a.max(toward_b) as f64 / trial.advisors.len() as f64;
    Ok(response(trial, choice, 0.5 + 0.5 * majority_share))
}

/// Ignores advisors entirely: picks the private signal's option at the
/// signal's own accuracy.
pub fn respond_private_only(trial: &Trial, scenario: &Scenario) -> Result<AgentResponse, AgentError> {
    bayes::trial_posterior(trial, scenario)?;
    Ok(response(trial, trial.private, scenario.q))
}

/// Dispatches on the agent kind. Deterministic kinds never touch the
/// generator, so draw order depends only on the weighted policies.
pub fn respond(
    kind: &AgentKind,
    trial: &Trial,
    scenario: &Scenario,
    rng: &mut impl Rng,
) -> Result<AgentResponse, AgentError> {
    match kind {
        AgentKind::Bayesian => respond_bayesian(trial, scenario),
        AgentKind::Weighted(policy) => respond_weighted(trial, scenario, policy, rng),
        AgentKind::Conformist => respond_conformist(trial, scenario),
        AgentKind::PrivateOnly => respond_private_only(trial, scenario),
    }
}

fn response(trial: &Trial, choice: Side, confidence: f64) -> AgentResponse {
    AgentResponse {
        trial_id: trial.trial_id.clone(),
        choice,
        confidence,
        rationale: None,
        repetition_index: 0,
    }
}
