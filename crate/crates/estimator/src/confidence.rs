//! Reported confidence as a function of the normative posterior.
//!
//! Rows enter only when the trial has a defined most-likely option (net
//! evidence nonzero) and the subject chose it; the regressor is then the
//! posterior of that option, the response the reported confidence. A perfect
//! Bayesian shows slope 1 in every task and a subject that ignores public
//! signals shows slope 0, so per-task slopes measure how strongly confidence
//! tracks the strength of the cascade.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use cascade_core::{ScenarioId, Side};

use crate::analysis::NamedContrast;
use crate::design::DesignData;
use crate::error::EstimatorError;
use crate::fit::{fit_random_intercept, FitResult};
use crate::infer::{wald_contrast, ContrastResult};
use crate::observation::ObservationRow;

/// Columns of the confidence model, in matrix order.
pub const CONFIDENCE_COLUMN_NAMES: [&str; 6] = [
    "intercept",
    "medical",
    "investment",
    "posterior",
    "medical:posterior",
    "investment:posterior",
];

/// One confidence-model row: a cascade-aligned response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceRecord {
    pub task: ScenarioId,
    pub subject: String,
    pub trial_id: String,
    pub repetition_index: u32,
    /// Posterior of the most likely option, in (0.5, 1).
    pub posterior: f64,
    /// Reported confidence in the chosen (= most likely) option.
    pub confidence: f64,
}

/// Row selection tallies; `rows = records + neutral_skipped + misaligned_skipped`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfidenceStats {
    pub rows: usize,
    /// Net evidence zero: no most-likely option exists.
    pub neutral_skipped: usize,
    /// Subject chose against the cascade, so its confidence refers to the
    /// other option.
    pub misaligned_skipped: usize,
    pub records: usize,
}

/// Extracts confidence-model records from observation rows.
pub fn confidence_records(rows: &[ObservationRow]) -> (Vec<ConfidenceRecord>, ConfidenceStats) {
    let mut records = Vec::new();
    let mut stats = ConfidenceStats::default();
    for row in rows {
        stats.rows += 1;
        let most_likely = match row.net_evidence {
            0 => {
                stats.neutral_skipped += 1;
                continue;
            }
            d if d > 0 => Side::OptionA,
            _ => Side::OptionB,
        };
        if row.choice != most_likely {
            stats.misaligned_skipped += 1;
            continue;
        }
        records.push(ConfidenceRecord {
            task: row.scenario,
            subject: row.subject.clone(),
            trial_id: row.trial_id.clone(),
            repetition_index: row.repetition_index,
            posterior: row.posterior_a.max(1.0 - row.posterior_a),
            confidence: row.confidence,
        });
        stats.records += 1;
    }
    (records, stats)
}

/// Per-task slope of confidence on posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSlope {
    pub task: ScenarioId,
    pub slope: ContrastResult,
}

/// Confidence model fit: coefficients, per-task slopes, and their pairwise
/// differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceFit {
    pub fit: FitResult,
    pub slopes: Vec<TaskSlope>,
    pub slope_contrasts: Vec<NamedContrast>,
}

fn slope_vector(task: ScenarioId) -> [f64; 6] {
    let mut c = [0.0; 6];
    c[3] = 1.0;
    match task {
        ScenarioId::Legal => {}
        ScenarioId::Medical => c[4] = 1.0,
        ScenarioId::Investment => c[5] = 1.0,
    }
    c
}

/// Fits confidence on posterior-by-task with a subject random intercept.
///
/// Requires records from all three tasks (the task indicators are otherwise
/// collinear) and at least two subjects.
pub fn fit_confidence_model(
    records: &[ConfidenceRecord],
) -> Result<ConfidenceFit, EstimatorError> {
    if records.is_empty() {
        return Err(EstimatorError::EmptyInput);
    }
    let missing: Vec<ScenarioId> = ScenarioId::ALL
        .iter()
        .copied()
        .filter(|id| records.iter().all(|r| r.task != *id))
        .collect();
    if !missing.is_empty() {
        return Err(EstimatorError::MissingTasks(missing));
    }

    let mut subjects: Vec<&str> = records.iter().map(|r| r.subject.as_str()).collect();
    subjects.sort_unstable();
    subjects.dedup();
    let index_of = |name: &str| subjects.binary_search(&name).expect("subject was collected");

    let n = records.len();
    let mut x = DMatrix::zeros(n, 6);
    let mut y = DVector::zeros(n);
    let mut group_index = Vec::with_capacity(n);
    for (i, record) in records.iter().enumerate() {
        let med = f64::from(record.task == ScenarioId::Medical);
        let inv = f64::from(record.task == ScenarioId::Investment);
        x[(i, 0)] = 1.0;
        x[(i, 1)] = med;
        x[(i, 2)] = inv;
        x[(i, 3)] = record.posterior;
        x[(i, 4)] = med * record.posterior;
        x[(i, 5)] = inv * record.posterior;
        y[i] = record.confidence;
        group_index.push(index_of(&record.subject));
    }
    let data = DesignData {
        x,
        y,
        column_names: CONFIDENCE_COLUMN_NAMES.iter().map(|s| s.to_string()).collect(),
        group_names: subjects.iter().map(|s| s.to_string()).collect(),
        group_index,
    };

    let fit = fit_random_intercept(&data)?;
    let mut slopes = Vec::with_capacity(3);
    for task in ScenarioId::ALL {
        slopes.push(TaskSlope {
            task,
            slope: wald_contrast(&fit, &slope_vector(task))?,
        });
    }
    let mut slope_contrasts = Vec::new();
    for (a, b) in [
        (ScenarioId::Legal, ScenarioId::Medical),
        (ScenarioId::Legal, ScenarioId::Investment),
        (ScenarioId::Medical, ScenarioId::Investment),
    ] {
        let va = slope_vector(a);
        let vb = slope_vector(b);
        let mut c = [0.0; 6];
        for j in 0..6 {
            c[j] = va[j] - vb[j];
        }
        slope_contrasts.push(NamedContrast {
            name: format!("slope {a} - {b}"),
            contrast: wald_contrast(&fit, &c)?,
        });
    }

    Ok(ConfidenceFit { fit, slopes, slope_contrasts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(
        scenario: ScenarioId,
        net: i32,
        choice: Side,
        confidence: f64,
        posterior_a: f64,
    ) -> ObservationRow {
        ObservationRow {
            scenario,
            subject: "s1".into(),
            trial_id: format!("{scenario}-0001"),
            repetition_index: 0,
            choice,
            confidence,
            p_a: confidence,
            clamped: false,
            y: 0.0,
            i_private: 0.0,
            i_human: 0.0,
            i_ai: 0.0,
            net_evidence: net,
            posterior_a,
        }
    }

    #[test]
    fn record_selection_partitions_rows() {
        let rows = vec![
            row(ScenarioId::Medical, 2, Side::OptionA, 0.8, 0.8),
            row(ScenarioId::Medical, 0, Side::OptionA, 0.6, 0.5),
            row(ScenarioId::Medical, -1, Side::OptionA, 0.7, 1.0 / 3.0),
            row(ScenarioId::Legal, -2, Side::OptionB, 0.6, 0.401),
        ];
        let (records, stats) = confidence_records(&rows);
        assert_eq!(stats.rows, 4);
        assert_eq!(stats.neutral_skipped, 1);
        assert_eq!(stats.misaligned_skipped, 1);
        assert_eq!(stats.records, 2);
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].posterior, 0.8);
        // posterior of the most likely option flips below 0.5 inputs
        approx::assert_abs_diff_eq!(records[1].posterior, 0.599, epsilon = 1e-12);
    }

    #[test]
    fn missing_task_is_rejected() {
        let rows = vec![
            row(ScenarioId::Medical, 2, Side::OptionA, 0.8, 0.8),
            row(ScenarioId::Legal, 1, Side::OptionA, 0.6, 0.55),
        ];
        let (records, _) = confidence_records(&rows);
        assert!(matches!(
            fit_confidence_model(&records),
            Err(EstimatorError::MissingTasks(missing)) if missing == vec![ScenarioId::Investment]
        ));
    }
}
