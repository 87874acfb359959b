//! End-to-end social-influence analysis on observation rows.

use serde::{Deserialize, Serialize};

use cascade_core::ScenarioId;

use crate::design::build_design;
use crate::error::EstimatorError;
use crate::fit::{fit_ols, fit_random_intercept, FitResult};
use crate::infer::{lrt_random_intercept, ContrastResult, LrtResult};
use crate::observation::ObservationRow;
use crate::weights::{effective_weights, weight_contrast, EvidenceSource, TaskWeights};

/// A labelled contrast, for report tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedContrast {
    pub name: String,
    pub contrast: ContrastResult,
}

/// The full social-influence fit: mixed model, its fixed-effects null, the
/// boundary test between them, per-task effective weights, and the
/// within-task source comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialAnalysis {
    pub fit: FitResult,
    pub null_fit: FitResult,
    pub intercept_variance_test: LrtResult,
    pub weights: Vec<TaskWeights>,
    pub contrasts: Vec<NamedContrast>,
    pub n_rows: usize,
    pub clamped_rows: usize,
}

impl SocialAnalysis {
    pub fn clamped_fraction(&self) -> f64 {
        if self.n_rows == 0 {
            0.0
        } else {
            self.clamped_rows as f64 / self.n_rows as f64
        }
    }

    pub fn weights_for(&self, task: ScenarioId) -> Option<&TaskWeights> {
        self.weights.iter().find(|w| w.task == task)
    }
}

/// Fits the 12-column design with a subject random intercept, tests that
/// variance against the fixed-effects-only null, and derives every per-task
/// weight and within-task source contrast.
pub fn analyze_social(rows: &[ObservationRow]) -> Result<SocialAnalysis, EstimatorError> {
    let data = build_design(rows)?;
    let fit = fit_random_intercept(&data)?;
    let null_fit = fit_ols(&data)?;
    let intercept_variance_test = lrt_random_intercept(&fit, &null_fit)?;

    let mut weights = Vec::with_capacity(3);
    let mut contrasts = Vec::new();
    for task in ScenarioId::ALL {
        weights.push(effective_weights(&fit, task)?);
        for (a, b) in [
            (EvidenceSource::Human, EvidenceSource::Private),
            (EvidenceSource::Ai, EvidenceSource::Private),
            (EvidenceSource::Human, EvidenceSource::Ai),
        ] {
            contrasts.push(NamedContrast {
                name: format!("{task} {} - {}", a.label(), b.label()),
                contrast: weight_contrast(&fit, task, a, b)?,
            });
        }
    }

    Ok(SocialAnalysis {
        fit,
        null_fit,
        intercept_variance_test,
        weights,
        contrasts,
        n_rows: rows.len(),
        clamped_rows: rows.iter().filter(|row| row.clamped).count(),
    })
}
