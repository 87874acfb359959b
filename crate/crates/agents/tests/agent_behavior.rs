//! Cohort-level guarantees: the weighted policy's Bayesian reduction,
//! reproducibility of seeded runs, and response bounds over whole manifests.

use cascade_agents::{
    respond_bayesian, respond_weighted, simulate_cohort, AgentKind, ChoiceRule, Cohort,
    WeightedPolicy,
};
use cascade_core::{transcripts_to_jsonl, Scenario, ScenarioId};
use cascade_trialgen::{generate_manifest, DesignSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Unit weights, zero bias and zero noise reduce the weighted policy to the
/// exact Bayesian responder on every trial of every preset manifest.
#[test]
fn weighted_with_unit_weights_reduces_to_bayesian() {
    let policy = WeightedPolicy::bayesian_equivalent();
    for id in ScenarioId::ALL {
        let scenario = Scenario::preset(id);
        let manifest = generate_manifest(&DesignSpec::published_preset(id, 404), &scenario).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for trial in &manifest.trials {
            let bayes = respond_bayesian(trial, &scenario).unwrap();
            let weighted = respond_weighted(trial, &scenario, &policy, &mut rng).unwrap();
            assert_eq!(weighted.choice, bayes.choice, "trial {}", trial.trial_id);
            assert!(
                (weighted.confidence - bayes.confidence).abs() < 1e-12,
                "trial {}: {} vs {}",
                trial.trial_id,
                weighted.confidence,
                bayes.confidence
            );
        }
    }
}

#[test]
fn confidence_stays_within_half_and_one_for_all_kinds() {
    let kinds = [
        AgentKind::Bayesian,
        AgentKind::Conformist,
        AgentKind::PrivateOnly,
        AgentKind::Weighted(WeightedPolicy {
            beta0: 0.2,
            beta_private: 1.5,
            beta_human: 2.5,
            beta_ai: 0.5,
            noise_sd: 1.0,
            choice_rule: ChoiceRule::Sample,
        }),
    ];
    for (i, kind) in kinds.into_iter().enumerate() {
        let scenario = Scenario::preset(ScenarioId::Investment);
        let manifest =
            generate_manifest(&DesignSpec::published_preset(ScenarioId::Investment, 7), &scenario)
                .unwrap();
        let cohort = Cohort::uniform(2, &format!("k{i}"), 50, kind).unwrap();
        for transcript in simulate_cohort(&manifest, &scenario, &cohort, 3).unwrap() {
            let response = transcript.outcome.response().expect("synthetic agents always parse");
            assert!(
                (0.5..=1.0).contains(&response.confidence),
                "confidence {} out of range",
                response.confidence
            );
        }
    }
}

#[test]
fn seeded_runs_are_byte_reproducible_and_seed_sensitive() {
    let scenario = Scenario::preset(ScenarioId::Legal);
    let manifest = generate_manifest(&DesignSpec::published_preset(ScenarioId::Legal, 11), &scenario).unwrap();
    let noisy = AgentKind::Weighted(WeightedPolicy {
        beta0: 0.0,
        beta_private: 0.813,
        beta_human: 1.553,
        beta_ai: 1.556,
        noise_sd: 0.3,
        choice_rule: ChoiceRule::Argmax,
    });
    let cohort_a = Cohort::uniform(3, "w", 1000, noisy.clone()).unwrap();
    let cohort_b = Cohort::uniform(3, "w", 2000, noisy).unwrap();

    let run_1 = transcripts_to_jsonl(&simulate_cohort(&manifest, &scenario, &cohort_a, 3).unwrap()).unwrap();
    let run_2 = transcripts_to_jsonl(&simulate_cohort(&manifest, &scenario, &cohort_a, 3).unwrap()).unwrap();
    let run_other = transcripts_to_jsonl(&simulate_cohort(&manifest, &scenario, &cohort_b, 3).unwrap()).unwrap();
    assert_eq!(run_1, run_2);
    assert_ne!(run_1, run_other);
}

#[test]
fn cohort_run_covers_every_trial_repetition_pair_uniquely() {
    let scenario = Scenario::preset(ScenarioId::Medical);
    let manifest = generate_manifest(&DesignSpec::published_preset(ScenarioId::Medical, 2), &scenario).unwrap();
    let cohort = Cohort::uniform(4, "bayes", 0, AgentKind::Bayesian).unwrap();
    let transcripts = simulate_cohort(&manifest, &scenario, &cohort, 3).unwrap();
    assert_eq!(transcripts.len(), 4 * 52 * 3);

    let mut keys = std::collections::BTreeSet::new();
    for t in &transcripts {
        assert!(keys.insert((t.run_id.clone(), t.trial_id.clone(), t.repetition_index)));
        assert_eq!(t.design_digest, manifest.header.design_digest);
        let response = t.outcome.response().unwrap();
        assert_eq!(response.repetition_index, t.repetition_index);
        assert_eq!(response.trial_id, t.trial_id);
    }
}

/// Per-repetition draws differ for sampling agents but stay identical for
/// deterministic ones.
#[test]
fn deterministic_kinds_repeat_identically_across_repetitions() {
    let scenario = Scenario::preset(ScenarioId::Legal);
    let manifest = generate_manifest(&DesignSpec::published_preset(ScenarioId::Legal, 5), &scenario).unwrap();
    let cohort = Cohort::uniform(1, "conf", 9, AgentKind::Conformist).unwrap();
    let transcripts = simulate_cohort(&manifest, &scenario, &cohort, 3).unwrap();
    for chunk in transcripts.chunks(3) {
        let first = chunk[0].outcome.response().unwrap();
        for t in &chunk[1..] {
            let r = t.outcome.response().unwrap();
            assert_eq!(r.choice, first.choice);
            assert_eq!(r.confidence, first.confidence);
        }
    }
}
