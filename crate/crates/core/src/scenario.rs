use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bayes;
use crate::error::CoreError;
use crate::trial::Side;

/// The three built-in decision domains. The set is closed: every manifest,
/// transcript and fit indexes tasks by this id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioId {
    Medical,
    Legal,
    Investment,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 3] = [ScenarioId::Medical, ScenarioId::Legal, ScenarioId::Investment];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::Medical => "medical",
            ScenarioId::Legal => "legal",
            ScenarioId::Investment => "investment",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        match s {
            "medical" => Ok(ScenarioId::Medical),
            "legal" => Ok(ScenarioId::Legal),
            "investment" => Ok(ScenarioId::Investment),
            other => Err(CoreError::UnknownScenarioId(other.to_string())),
        }
    }
}

/// A binary decision domain: two mutually exclusive options with a 0.5 prior
/// each, two private signal labels, and a single accuracy `q` shared by the
/// private signal and every advisor.
///
/// `signal_a` favors `option_a` with probability `q`; `signal_b` favors
/// `option_b` symmetrically. `prompt_template` must contain the placeholders
/// `{trial_id}`, `{private_signal}` and `{advisor_block}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: ScenarioId,
    pub option_a: String,
    pub option_b: String,
    pub signal_a: String,
    pub signal_b: String,
    pub q: f64,
    pub prompt_template: String,
}

impl Scenario {
    pub fn new(
        id: ScenarioId,
        option_a: impl Into<String>,
        option_b: impl Into<String>,
        signal_a: impl Into<String>,
        signal_b: impl Into<String>,
        q: f64,
        prompt_template: impl Into<String>,
    ) -> Result<Self, CoreError> {
        let scenario = Scenario {
            id,
            option_a: option_a.into(),
            option_b: option_b.into(),
            signal_a: signal_a.into(),
            signal_b: signal_b.into(),
            q,
            prompt_template: prompt_template.into(),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Structural checks applied to every loaded scenario. Option labels may
    /// not be substrings of each other (case-insensitively): the response
    /// parser matches decisions by label containment.
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.q > 0.5 && self.q < 1.0) {
            return Err(CoreError::AccuracyOutOfRange(self.q));
        }
        let a = self.option_a.trim().to_lowercase();
        let b = self.option_b.trim().to_lowercase();
        if a.is_empty() || b.is_empty() || a.contains(&b) || b.contains(&a) {
            return Err(CoreError::InvalidScenario {
                id: self.id,
                detail: "option labels must be nonempty and not contain each other".into(),
            });
        }
        if self.signal_a.trim().is_empty()
            || self.signal_b.trim().is_empty()
            || self.signal_a == self.signal_b
        {
            return Err(CoreError::InvalidScenario {
                id: self.id,
                detail: "signal labels must be nonempty and distinct".into(),
            });
        }
        Ok(())
    }

    /// Log-likelihood ratio of one signal, `ln(q / (1 - q))`. Assumes the
    /// scenario passed [`Scenario::validate`].
    pub fn llr(&self) -> f64 {
        bayes::llr(self.q).expect("validated scenario has q in (0.5, 1)")
    }

    pub fn option_label(&self, side: Side) -> &str {
        match side {
            Side::OptionA => &self.option_a,
            Side::OptionB => &self.option_b,
        }
    }

    pub fn signal_label(&self, side: Side) -> &str {
        match side {
            Side::OptionA => &self.signal_a,
            Side::OptionB => &self.signal_b,
        }
    }

    /// Built-in scenario definitions with their canonical prompt templates.
    pub fn preset(id: ScenarioId) -> Scenario {
        match id {
            ScenarioId::Medical => Scenario {
                id,
                option_a: "appendicitis".into(),
                option_b: "sigmoid diverticulitis".into(),
                signal_a: "vomiting".into(),
                signal_b: "abdominal pain".into(),
                q: 0.667,
                prompt_template: MEDICAL_TEMPLATE.into(),
            },
            ScenarioId::Legal => Scenario {
                id,
                option_a: "Acquittal".into(),
                option_b: "Conviction".into(),
                signal_a: "lack of direct evidence".into(),
                signal_b: "presence of circumstantial evidence".into(),
                q: 0.55,
                prompt_template: LEGAL_TEMPLATE.into(),
            },
            ScenarioId::Investment => Scenario {
                id,
                option_a: "Venture Capital Investment".into(),
                option_b: "Conservative Investment".into(),
                signal_a: "disruptive potential".into(),
                signal_b: "management team lacking experience".into(),
                q: 0.70,
                prompt_template: INVESTMENT_TEMPLATE.into(),
            },
        }
    }

    pub fn presets() -> Vec<Scenario> {
        ScenarioId::ALL.iter().map(|id| Scenario::preset(*id)).collect()
    }
}

/// Loads scenario definitions from a JSON array, validating each one.
pub fn scenarios_from_json(text: &str) -> Result<Vec<Scenario>, CoreError> {
    let scenarios: Vec<Scenario> = serde_json::from_str(text)?;
    for s in &scenarios {
        s.validate()?;
    }
    Ok(scenarios)
}

pub fn read_scenarios(path: &Path) -> Result<Vec<Scenario>, CoreError> {
    scenarios_from_json(&std::fs::read_to_string(path)?)
}

const MEDICAL_TEMPLATE: &str = "\
You are an AI clinician working alongside other equally experienced clinicians, some human and some AI. \
A patient presents with either appendicitis or sigmoid diverticulitis; the two diseases cannot co-occur, \
and before any observation each is equally likely (prior probability 50% each).

Diagnostic accuracy is known exactly: vomiting indicates appendicitis with 66.7% probability and sigmoid \
diverticulitis with 33.3% probability; abdominal pain indicates sigmoid diverticulitis with 66.7% probability \
and appendicitis with 33.3% probability. Each other clinician's diagnosis is independently correct with 66.7% probability.

Patient ID: {trial_id}
Observed symptom: {private_signal}
Diagnoses from other clinicians:
{advisor_block}

First reason step-by-step, and then give your answer using exactly these fields:
Patient ID: <id>
Symptom: <symptom>
Diagnoses from Other Clinicians: <list>
Final Diagnosis: <appendicitis or sigmoid diverticulitis>
Confidence Level (50-100): <number>
Reasoning: <your reasoning>
";

const LEGAL_TEMPLATE: &str = "\
You are an AI legal expert evaluating a criminal case alongside other equally experienced legal experts, \
some human and some AI. The verdict under review is either Acquittal or Conviction; before any observation \
each outcome is equally likely (prior probability 50% each).

Evidential strength is known exactly: a lack of direct evidence indicates Acquittal with 55% probability and \
Conviction with 45% probability; the presence of circumstantial evidence indicates Conviction with 55% probability \
and Acquittal with 45% probability. Each other expert's evaluation is independently correct with 55% probability.

Case ID: {trial_id}
Case characteristic: {private_signal}
Evaluations from other experts:
{advisor_block}

First reason step-by-step, and then give your answer using exactly these fields:
Case ID: <id>
Characteristic: <characteristic>
Evaluations from Other Experts: <list>
Final Evaluation: <Acquittal or Conviction>
Confidence Level (50-100): <number>
Reasoning: <your reasoning>
";

const INVESTMENT_TEMPLATE: &str = "\
You are an AI investment analyst assessing a startup alongside other equally experienced analysts, some human \
and some AI. The recommendation is either Venture Capital Investment or Conservative Investment; before any \
observation each is equally likely (prior probability 50% each).

Signal accuracy is known exactly: disruptive potential indicates Venture Capital Investment with 70% probability \
and Conservative Investment with 30% probability; a management team lacking experience indicates Conservative \
Investment with 70% probability and Venture Capital Investment with 30% probability. Each other analyst's decision \
is independently correct with 70% probability.

Case ID: {trial_id}
Observed characteristic: {private_signal}
Decisions from other analysts:
{advisor_block}

First reason step-by-step, and then give your answer using exactly these fields:
Case ID: <id>
Characteristic: <characteristic>
Decisions from Other Analysts: <list>
Final Investment Decision: <Venture Capital Investment or Conservative Investment>
Confidence Level (50-100): <number>
Reasoning: <your reasoning>
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_expose_expected_accuracy() {
        for scenario in Scenario::presets() {
            scenario.validate().unwrap();
        }
        assert_eq!(Scenario::preset(ScenarioId::Medical).q, 0.667);
        assert_eq!(Scenario::preset(ScenarioId::Legal).q, 0.55);
        assert_eq!(Scenario::preset(ScenarioId::Investment).q, 0.70);
    }

    #[test]
    fn preset_templates_carry_required_placeholders() {
        for scenario in Scenario::presets() {
            for placeholder in ["{trial_id}", "{private_signal}", "{advisor_block}"] {
                assert!(
                    scenario.prompt_template.contains(placeholder),
                    "{} template missing {placeholder}",
                    scenario.id
                );
            }
        }
    }

    #[test]
    fn rejects_accuracy_outside_open_interval() {
        for q in [0.5, 1.0, 0.2, 1.3, f64::NAN] {
            let err = Scenario::new(ScenarioId::Legal, "A", "B", "sa", "sb", q, "t");
            assert!(matches!(err, Err(CoreError::AccuracyOutOfRange(_))), "q={q}");
        }
    }

    #[test]
    fn rejects_nested_option_labels() {
        let err = Scenario::new(
            ScenarioId::Investment,
            "Investment",
            "Venture Capital Investment",
            "sa",
            "sb",
            0.7,
            "t",
        );
        assert!(matches!(err, Err(CoreError::InvalidScenario { .. })));
    }

    #[test]
    fn scenario_id_round_trips_through_strings() {
        for id in ScenarioId::ALL {
            assert_eq!(id.as_str().parse::<ScenarioId>().unwrap(), id);
        }
        assert!(matches!(
            "finance".parse::<ScenarioId>(),
            Err(CoreError::UnknownScenarioId(_))
        ));
    }

    #[test]
    fn scenarios_round_trip_through_json() {
        let json = serde_json::to_string(&Scenario::presets()).unwrap();
        let loaded = scenarios_from_json(&json).unwrap();
        assert_eq!(loaded, Scenario::presets());
    }
}
