//! Per-task effective evidence weights from the interaction coding.
//!
//! In the full design the bare evidence coefficients are the legal-task
//! weights; every other task's weight is the bare coefficient plus that
//! task's interaction coefficient. Each weight and each within-task weight
//! difference is a linear contrast, so standard errors come from the fitted
//! covariance.

use serde::{Deserialize, Serialize};

use cascade_core::ScenarioId;

use crate::design::COLUMN_NAMES;
use crate::error::EstimatorError;
use crate::fit::FitResult;
use crate::infer::{wald_contrast, ContrastResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceSource {
    Private,
    Human,
    Ai,
}

impl EvidenceSource {
    pub const ALL: [EvidenceSource; 3] =
        [EvidenceSource::Private, EvidenceSource::Human, EvidenceSource::Ai];

    pub fn label(self) -> &'static str {
        match self {
            EvidenceSource::Private => "private",
            EvidenceSource::Human => "human",
            EvidenceSource::Ai => "ai",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightEstimate {
    pub estimate: f64,
    pub standard_error: f64,
}

/// The three evidence weights of one task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskWeights {
    pub task: ScenarioId,
    pub private: WeightEstimate,
    pub human: WeightEstimate,
    pub ai: WeightEstimate,
}

impl TaskWeights {
    pub fn get(&self, source: EvidenceSource) -> WeightEstimate {
        match source {
            EvidenceSource::Private => self.private,
            EvidenceSource::Human => self.human,
            EvidenceSource::Ai => self.ai,
        }
    }
}

fn require_social_fit(fit: &FitResult) -> Result<(), EstimatorError> {
    if fit.column_names == COLUMN_NAMES {
        Ok(())
    } else {
        Err(EstimatorError::InvalidContrast(format!(
            "effective weights need the {}-column task-interaction design, fit has columns [{}]",
            COLUMN_NAMES.len(),
            fit.column_names.join(", ")
        )))
    }
}

/// Contrast vector selecting one task's weight for one evidence source.
fn weight_vector(task: ScenarioId, source: EvidenceSource) -> [f64; 12] {
    let base = match source {
        EvidenceSource::Private => 3,
        EvidenceSource::Human => 4,
        EvidenceSource::Ai => 5,
    };
    let mut c = [0.0; 12];
    c[base] = 1.0;
    // Interaction columns sit in (private, human, ai) pairs after the bases:
    // medical at 6/8/10, investment at 7/9/11.
    match task {
        ScenarioId::Legal => {}
        ScenarioId::Medical => c[2 * base] = 1.0,
        ScenarioId::Investment => c[2 * base + 1] = 1.0,
    }
    c
}

/// Effective (private, human, ai) weights for one task, with standard errors.
pub fn effective_weights(
    fit: &FitResult,
    task: ScenarioId,
) -> Result<TaskWeights, EstimatorError> {
    require_social_fit(fit)?;
    let mut estimates = [WeightEstimate { estimate: 0.0, standard_error: 0.0 }; 3];
    for (slot, source) in EvidenceSource::ALL.into_iter().enumerate() {
        let contrast = wald_contrast(fit, &weight_vector(task, source))?;
        estimates[slot] = WeightEstimate {
            estimate: contrast.estimate,
            standard_error: contrast.standard_error,
        };
    }
    Ok(TaskWeights {
        task,
        private: estimates[0],
        human: estimates[1],
        ai: estimates[2],
    })
}

/// Tests the within-task weight difference `weight(a) - weight(b)`.
pub fn weight_contrast(
    fit: &FitResult,
    task: ScenarioId,
    a: EvidenceSource,
    b: EvidenceSource,
) -> Result<ContrastResult, EstimatorError> {
    require_social_fit(fit)?;
    if a == b {
        return Err(EstimatorError::InvalidContrast(format!(
            "contrast of {} against itself is identically zero",
            a.label()
        )));
    }
    let va = weight_vector(task, a);
    let vb = weight_vector(task, b);
    let mut c = [0.0; 12];
    for j in 0..12 {
        c[j] = va[j] - vb[j];
    }
    wald_contrast(fit, &c)
}
