use std::sync::LazyLock;

use regex::Regex;

use cascade_core::{ParseFailureReason, Scenario, Side};

/// The structured fields extracted from one raw completion. `confidence` is
/// normalized from the answer scale (50-100) to [0.5, 1.0].
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReply {
    pub choice: Side,
    pub confidence: f64,
    pub rationale: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseFailure {
    pub reason: ParseFailureReason,
    pub detail: String,
}

impl ParseFailure {
    fn new(reason: ParseFailureReason, detail: impl Into<String>) -> ParseFailure {
        ParseFailure { reason, detail: detail.into() }
    }
}

static FINAL_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)final[^:\n]*:").expect("static regex"));
static CONFIDENCE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)confidence[^:\n]*:\s*([0-9]+(?:\.[0-9]+)?)").expect("static regex")
});
static RATIONALE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)reasoning\s*:").expect("static regex"));

/// Label strings accepted for one option, lowercase. The exact label always
/// matches; the built-in labels additionally accept common shorthand.
fn aliases(scenario: &Scenario, side: Side) -> Vec<String> {
    let label = scenario.option_label(side).trim().to_lowercase();
    const SYNONYMS: [(&str, &[&str]); 5] = [
        ("sigmoid diverticulitis", &["diverticulitis"]),
        ("acquittal", &["acquit"]),
        ("conviction", &["convict"]),
        ("venture capital investment", &["venture capital", "venture"]),
        ("conservative investment", &["conservative"]),
    ];
    let mut list = vec![label.clone()];
    for (canonical, extra) in SYNONYMS {
        if label == canonical {
            list.extend(extra.iter().map(|s| s.to_string()));
        }
    }
    list
}

fn mentions(text_lower: &str, aliases: &[String]) -> bool {
    aliases.iter().any(|alias| text_lower.contains(alias.as_str()))
}

/// Text after the colon of the last final-answer line, if any line matches.
fn final_decision_text(raw: &str) -> Option<&str> {
    let m = FINAL_LINE.find_iter(raw).last()?;
    let rest = &raw[m.end()..];
    Some(rest.split('\n').next().unwrap_or(rest))
}

fn parse_confidence(raw: &str) -> Result<f64, ParseFailure> {
    let capture = CONFIDENCE
        .captures_iter(raw)
        .last()
        .ok_or_else(|| ParseFailure::new(ParseFailureReason::BadConfidence, "no confidence field found"))?;
    let value: f64 = capture[1].parse().expect("regex only captures digit strings");
    if !(50.0..=100.0).contains(&value) {
        return Err(ParseFailure::new(
            ParseFailureReason::BadConfidence,
            format!("confidence {value} outside [50, 100]"),
        ));
    }
    Ok(value / 100.0)
}

fn rationale_text(raw: &str) -> Option<String> {
    let m = RATIONALE.find_iter(raw).last()?;
    let text = raw[m.end()..].trim();
    (!text.is_empty()).then(|| text.to_string())
}

/// Extracts (choice, confidence, rationale) from a raw completion.
///
/// The decision is read from the last line matching `final...:`; when no
/// such line exists the whole text is scanned, which accepts terse answers.
/// A completion either parses or maps to exactly one failure reason; the
/// caller keeps the raw text alongside either outcome.
pub fn parse_response(raw: &str, scenario: &Scenario) -> Result<ParsedReply, ParseFailure> {
    let decision_text = final_decision_text(raw);
    let lower = decision_text.unwrap_or(raw).to_lowercase();
    let names_a = mentions(&lower, &aliases(scenario, Side::OptionA));
    let names_b = mentions(&lower, &aliases(scenario, Side::OptionB));
    let choice = match (names_a, names_b) {
        (true, false) => Side::OptionA,
        (false, true) => Side::OptionB,
        (true, true) => {
            return Err(ParseFailure::new(
                ParseFailureReason::Ambiguous,
                format!("both options asserted in {:?}", lower.trim()),
            ))
        }
        (false, false) => {
            let detail = match decision_text {
                Some(text) => format!("final-answer line names neither option: {:?}", text.trim()),
                None => "no final-answer line and no option label in the text".to_string(),
            };
            return Err(ParseFailure::new(ParseFailureReason::NoChoice, detail));
        }
    };
    let confidence = parse_confidence(raw)?;
    Ok(ParsedReply { choice, confidence, rationale: rationale_text(raw) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cascade_core::ScenarioId;

    fn medical() -> Scenario {
        Scenario::preset(ScenarioId::Medical)
    }

    fn legal() -> Scenario {
        Scenario::preset(ScenarioId::Legal)
    }

    fn investment() -> Scenario {
        Scenario::preset(ScenarioId::Investment)
    }

    #[test]
    fn happy_path_reads_only_the_final_answer_line() {
        // The reasoning block restates both options; only the final line decides.
        let raw = "Step 1: vomiting favors appendicitis over sigmoid diverticulitis.\n\
                   Step 2: two clinicians disagree.\n\
                   Patient ID: medical-0007\n\
                   Final Diagnosis: appendicitis\n\
                   Confidence Level (50-100): 80\n\
                   Reasoning: private signal plus one advisor outweighs the dissent";
        let reply = parse_response(raw, &medical()).unwrap();
        assert_eq!(reply.choice, Side::OptionA);
        assert_eq!(reply.confidence, 0.80);
        assert_eq!(
            reply.rationale.as_deref(),
            Some("private signal plus one advisor outweighs the dissent")
        );
    }

    #[test]
    fn last_final_line_wins() {
        let raw = "My final consideration: conviction seemed likely at first.\n\
                   Final Evaluation: Acquittal\n\
                   Confidence Level (50-100): 55";
        let reply = parse_response(raw, &legal()).unwrap();
        assert_eq!(reply.choice, Side::OptionA);
    }

    #[test]
    fn synonyms_are_accepted() {
        let cases = [
            ("Final Evaluation: we should acquit\nConfidence: 61", legal(), Side::OptionA),
            ("Final Evaluation: convict\nConfidence: 61", legal(), Side::OptionB),
            ("Final Diagnosis: diverticulitis\nConfidence: 70", medical(), Side::OptionB),
            ("Final Investment Decision: venture capital\nConfidence: 90", investment(), Side::OptionA),
            ("Final Investment Decision: conservative\nConfidence: 90", investment(), Side::OptionB),
        ];
        for (raw, scenario, expected) in cases {
            let reply = parse_response(raw, &scenario).unwrap();
            assert_eq!(reply.choice, expected, "raw: {raw}");
        }
    }

    #[test]
    fn terse_answer_without_final_line_parses_from_whole_text() {
        let reply = parse_response("Acquittal. Confidence: 70.", &legal()).unwrap();
        assert_eq!(reply.choice, Side::OptionA);
        assert_eq!(reply.confidence, 0.70);
        assert_eq!(reply.rationale, None);
    }

    #[test]
    fn out_of_range_confidence_fails() {
        let raw = "Final Evaluation: Acquittal\nConfidence Level (50-100): 45";
        let failure = parse_response(raw, &legal()).unwrap_err();
        assert_eq!(failure.reason, ParseFailureReason::BadConfidence);
        assert!(failure.detail.contains("45"));

        let raw = "Final Evaluation: Acquittal\nmy confidence is high";
        let failure = parse_response(raw, &legal()).unwrap_err();
        assert_eq!(failure.reason, ParseFailureReason::BadConfidence);
    }

    #[test]
    fn confidence_bounds_normalize_inclusively() {
        let at = |v: &str| {
            parse_response(
                &format!("Final Evaluation: Acquittal\nConfidence: {v}"),
                &legal(),
            )
        };
        assert_eq!(at("50").unwrap().confidence, 0.5);
        assert_eq!(at("100").unwrap().confidence, 1.0);
        assert_eq!(at("87.5").unwrap().confidence, 0.875);
        assert!(at("100.5").is_err());
    }

    #[test]
    fn both_options_in_the_final_line_are_ambiguous() {
        let raw = "Final Evaluation: either acquittal or conviction\nConfidence: 60";
        let failure = parse_response(raw, &legal()).unwrap_err();
        assert_eq!(failure.reason, ParseFailureReason::Ambiguous);
    }

    #[test]
    fn empty_final_line_is_no_choice_even_when_reasoning_names_options() {
        let raw = "Acquittal and conviction both discussed above.\nFinal Evaluation: unsure\nConfidence: 60";
        let failure = parse_response(raw, &legal()).unwrap_err();
        assert_eq!(failure.reason, ParseFailureReason::NoChoice);
        assert!(failure.detail.contains("unsure"));
    }

    #[test]
    fn no_option_anywhere_is_no_choice() {
        let failure = parse_response("I cannot decide. Confidence: 50", &legal()).unwrap_err();
        assert_eq!(failure.reason, ParseFailureReason::NoChoice);
    }

    #[test]
    fn nested_labels_do_not_collide() {
        // "venture capital investment" contains "investment" but must not
        // trigger the conservative aliases, and vice versa.
        let raw = "Final Investment Decision: Venture Capital Investment\nConfidence: 95";
        let reply = parse_response(raw, &investment()).unwrap();
        assert_eq!(reply.choice, Side::OptionA);
        let raw = "Final Investment Decision: Conservative Investment\nConfidence: 95";
        let reply = parse_response(raw, &investment()).unwrap();
        assert_eq!(reply.choice, Side::OptionB);
    }

    #[test]
    fn parsing_is_case_insensitive() {
        let raw = "FINAL DIAGNOSIS: APPENDICITIS\nCONFIDENCE LEVEL: 66";
        let reply = parse_response(raw, &medical()).unwrap();
        assert_eq!(reply.choice, Side::OptionA);
        assert_eq!(reply.confidence, 0.66);
    }
}
