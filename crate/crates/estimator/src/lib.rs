//! Regression and mixed-model estimation for cascade transcripts.
//!
//! The pipeline turns parsed transcripts into log-odds observation rows,
//! builds the three-task interaction design, and fits either ordinary least
//! squares (via QR) or a one-way random-intercept mixed model (via profiled
//! REML). Inference helpers cover the boundary-corrected likelihood-ratio
//! test for the intercept variance, Wald contrasts with residual degrees of
//! freedom, per-task effective weight recombination, a confidence-on-
//! posterior model, and a binary logistic sensitivity mode.

pub mod analysis;
pub mod confidence;
pub mod design;
pub mod error;
pub mod fit;
pub mod infer;
pub mod logistic;
pub mod observation;
pub mod weights;

pub use analysis::{analyze_social, NamedContrast, SocialAnalysis};
pub use confidence::{
    confidence_records, fit_confidence_model, ConfidenceFit, ConfidenceRecord, ConfidenceStats,
    TaskSlope,
};
pub use design::{
    build_design, build_task_design, DesignData, COLUMN_NAMES, TASK_COLUMN_NAMES,
};
pub use error::EstimatorError;
pub use fit::{fit_ols, fit_random_intercept, FitResult};
pub use infer::{lrt_random_intercept, wald_contrast, ContrastResult, LrtResult};
pub use logistic::{fit_logistic, LogisticFit};
pub use observation::{
    from_transcripts, to_observation, to_observation_clamped, ClampPolicy, ConversionStats,
    ObservationRow,
};
pub use weights::{effective_weights, weight_contrast, EvidenceSource, TaskWeights, WeightEstimate};
