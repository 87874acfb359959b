use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use cascade_core::{ParsedOutcome, Scenario, Transcript};
use cascade_trialgen::Manifest;

use crate::policy::Cohort;
use crate::respond::respond;
use crate::AgentError;

/// Runs every agent over every trial of a manifest for the given number of
/// repetitions, in (agent, trial, repetition) order.
///
/// Each agent's generator is seeded from its own seed mixed with the design
/// digest, so reruns are exactly reproducible and the same agent does not
/// replay one noise sequence across different manifests. Run ids derive from
/// the cohort digest, the design digest and the agent id, which keeps
/// `(run_id, trial_id, repetition_index)` unique in any combined set.
pub fn simulate_cohort(
    manifest: &Manifest,
    scenario: &Scenario,
    cohort: &Cohort,
    repetitions: u32,
) -> Result<Vec<Transcript>, AgentError> {
    cohort.validate()?;
    if repetitions == 0 {
        return Err(AgentError::ZeroRepetitions);
    }

    let cohort_digest = cohort.digest();
    let digest = &manifest.header.design_digest;
    let mut transcripts =
        Vec::with_capacity(cohort.agents.len() * manifest.trials.len() * repetitions as usize);
    for agent in &cohort.agents {
        let run_id = format!("sim-{}-{}-{}", &cohort_digest[..8], &digest[..8.min(digest.len())], agent.agent_id);
        let mut rng = ChaCha8Rng::seed_from_u64(agent.seed ^ digest_seed(digest));
        for trial in &manifest.trials {
            for repetition_index in 0..repetitions {
                let mut response = respond(&agent.kind, trial, scenario, &mut rng)?;
                response.repetition_index = repetition_index;
                transcripts.push(Transcript {
                    run_id: run_id.clone(),
                    design_digest: digest.clone(),
                    scenario_id: scenario.id,
                    model_name: agent.agent_id.clone(),
                    trial_id: trial.trial_id.clone(),
                    repetition_index,
                    rendered_prompt: None,
                    raw_completion: None,
                    outcome: ParsedOutcome::Ok { response },
                    latency_ms: None,
                    usage: None,
                });
            }
        }
    }
    Ok(transcripts)
}

fn digest_seed(digest: &str) -> u64 {
    let hash = Sha256::digest(digest.as_bytes());
    u64::from_le_bytes(hash[..8].try_into().expect("sha256 yields at least 8 bytes"))
}
