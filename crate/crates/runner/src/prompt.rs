use cascade_core::{AdvisorSource, Scenario, ScenarioId, Trial};

use crate::error::RunnerError;

/// Fixed suffix appended to the user prompt when a completion failed to
/// parse. One-shot: the re-ask is a fresh stateless request, not a dialogue.
pub const FORMAT_REMINDER: &str = "\n\nYour previous answer could not be parsed. \
Answer again, ending with the exact required fields: the final-decision line \
naming exactly one of the two options, and a line \"Confidence Level (50-100): <number>\".";

const PLACEHOLDERS: [&str; 3] = ["{trial_id}", "{private_signal}", "{advisor_block}"];

/// What one advisor is called in a prompt line; matches the voice of the
/// scenario templates.
fn advisor_noun(id: ScenarioId) -> &'static str {
    match id {
        ScenarioId::Medical => "Clinician",
        ScenarioId::Legal => "Expert",
        ScenarioId::Investment => "Analyst",
    }
}

fn source_label(source: AdvisorSource) -> &'static str {
    match source {
        AdvisorSource::Human => "human",
        AdvisorSource::Ai => "AI",
    }
}

/// One line per advisor, in stored panel order (order is part of the
/// recorded stimulus), each explicitly labeled human or AI.
fn advisor_block(scenario: &Scenario, trial: &Trial) -> String {
    trial
        .advisors
        .iter()
        .enumerate()
        .map(|(idx, advisor)| {
            format!(
                "{} {} ({}): {}",
                advisor_noun(scenario.id),
                idx + 1,
                source_label(advisor.source),
                scenario.option_label(advisor.decision)
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Renders the scenario's template for one trial. Deterministic: the same
/// (scenario, trial) pair always yields identical text.
pub fn render_prompt(scenario: &Scenario, trial: &Trial) -> Result<String, RunnerError> {
    if trial.scenario_id != scenario.id {
        return Err(RunnerError::ScenarioMismatch {
            trial_id: trial.trial_id.clone(),
            expected: scenario.id,
            found: trial.scenario_id,
        });
    }
    for placeholder in PLACEHOLDERS {
        if !scenario.prompt_template.contains(placeholder) {
            return Err(RunnerError::MissingPlaceholder {
                placeholder: placeholder.trim_matches(['{', '}']).to_string(),
            });
        }
    }
    Ok(scenario
        .prompt_template
        .replace("{trial_id}", &trial.trial_id)
        .replace("{private_signal}", scenario.signal_label(trial.private))
        .replace("{advisor_block}", &advisor_block(scenario, trial)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cascade_core::{AdvisorSignal, Side};

    fn medical_trial() -> (Scenario, Trial) {
        let scenario = Scenario::preset(ScenarioId::Medical);
        let trial = Trial::new(
            "medical-0007",
            &scenario,
            Side::OptionA,
            vec![
                AdvisorSignal { source: AdvisorSource::Human, decision: Side::OptionA },
                AdvisorSignal { source: AdvisorSource::Ai, decision: Side::OptionB },
            ],
        )
        .unwrap();
        (scenario, trial)
    }

    #[test]
    fn medical_prompt_states_accuracy_and_labels_both_advisors() {
        let (scenario, trial) = medical_trial();
        let prompt = render_prompt(&scenario, &trial).unwrap();
        assert!(prompt.contains("66.7%"));
        assert!(prompt.contains("Patient ID: medical-0007"));
        assert!(prompt.contains("Observed symptom: vomiting"));
        assert!(prompt.contains("Clinician 1 (human): appendicitis"));
        assert!(prompt.contains("Clinician 2 (AI): sigmoid diverticulitis"));
        assert!(prompt.contains("First reason step-by-step"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let (scenario, trial) = medical_trial();
        let a = render_prompt(&scenario, &trial).unwrap();
        let b = render_prompt(&scenario, &trial).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn legal_prompt_states_options_and_prior() {
        let scenario = Scenario::preset(ScenarioId::Legal);
        let trial = Trial::new(
            "legal-0001",
            &scenario,
            Side::OptionB,
            vec![AdvisorSignal { source: AdvisorSource::Human, decision: Side::OptionA }],
        )
        .unwrap();
        let prompt = render_prompt(&scenario, &trial).unwrap();
        assert!(prompt.contains("Acquittal or Conviction"));
        assert!(prompt.contains("50%"));
        assert!(prompt.contains("Expert 1 (human): Acquittal"));
    }

    #[test]
    fn missing_placeholder_is_named() {
        let (mut scenario, trial) = medical_trial();
        scenario.prompt_template = scenario.prompt_template.replace("{advisor_block}", "");
        let err = render_prompt(&scenario, &trial).unwrap_err();
        match err {
            RunnerError::MissingPlaceholder { placeholder } => {
                assert_eq!(placeholder, "advisor_block")
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn trial_from_another_scenario_is_rejected() {
        let (_, trial) = medical_trial();
        let legal = Scenario::preset(ScenarioId::Legal);
        assert!(matches!(
            render_prompt(&legal, &trial),
            Err(RunnerError::ScenarioMismatch { .. })
        ));
    }
}
