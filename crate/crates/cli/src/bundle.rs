//! The JSON report bundle and CSV rendering of the tables.
//!
//! The bundle is the machine-readable core of a report: provenance, row
//! accounting, both model fits with inference, the descriptive tables, and
//! the published reference block. Field order is fixed by the structs and
//! every map is a `BTreeMap`, so serializing the same analysis twice yields
//! identical bytes; nothing time- or path-dependent is stored.

use std::collections::BTreeMap;

use serde::Serialize;

use cascade_core::{ScenarioId, Transcript};
use cascade_estimator::{
    ConfidenceFit, ConfidenceStats, ContrastResult, ConversionStats, FitResult, LrtResult,
    NamedContrast, SocialAnalysis, TaskSlope, TaskWeights,
};
use cascade_trialgen::Manifest;

use crate::error::CliError;
use crate::reference;
use crate::tables::{AlignedRow, NeutralCellRow, NeutralRow};

pub const BUNDLE_FORMAT: &str = "cascade-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientOut {
    pub term: String,
    pub estimate: f64,
    pub std_error: f64,
}

/// A fit reduced to what a report consumes; the full covariance stays in
/// memory only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummaryOut {
    pub coefficients: Vec<CoefficientOut>,
    pub sigma2_residual: f64,
    pub sigma2_intercept: f64,
    pub log_likelihood: f64,
    pub n_observations: usize,
    pub n_subjects: usize,
    pub iterations: usize,
    pub at_boundary: bool,
}

impl FitSummaryOut {
    pub fn from_fit(fit: &FitResult) -> FitSummaryOut {
        let coefficients = fit
            .column_names
            .iter()
            .enumerate()
            .map(|(j, term)| CoefficientOut {
                term: term.clone(),
                estimate: fit.coefficients[j],
                std_error: fit.covariance[(j, j)].sqrt(),
            })
            .collect();
        FitSummaryOut {
            coefficients,
            sigma2_residual: fit.sigma2_residual,
            sigma2_intercept: fit.sigma2_intercept,
            log_likelihood: fit.log_likelihood,
            n_observations: fit.n_observations,
            n_subjects: fit.n_subjects,
            iterations: fit.iterations,
            at_boundary: fit.at_boundary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContrastOut {
    pub name: String,
    #[serde(flatten)]
    pub contrast: ContrastResult,
}

impl From<&NamedContrast> for ContrastOut {
    fn from(named: &NamedContrast) -> ContrastOut {
        ContrastOut { name: named.name.clone(), contrast: named.contrast }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProvenanceOut {
    pub package_version: String,
    /// Design digest per task, from the manifest headers.
    pub design_digests: BTreeMap<ScenarioId, String>,
    /// Generation seed per task, from the manifest headers.
    pub design_seeds: BTreeMap<ScenarioId, u64>,
    pub run_ids: Vec<String>,
    pub subjects: Vec<String>,
}

impl ProvenanceOut {
    pub fn collect(manifests: &[Manifest], transcripts: &[Transcript]) -> ProvenanceOut {
        let mut design_digests = BTreeMap::new();
        let mut design_seeds = BTreeMap::new();
        for manifest in manifests {
            design_digests
                .insert(manifest.header.scenario_id, manifest.header.design_digest.clone());
            design_seeds.insert(manifest.header.scenario_id, manifest.header.seed);
        }
        let mut run_ids: Vec<String> =
            transcripts.iter().map(|t| t.run_id.clone()).collect();
        run_ids.sort_unstable();
        run_ids.dedup();
        let mut subjects: Vec<String> =
            transcripts.iter().map(|t| t.model_name.clone()).collect();
        subjects.sort_unstable();
        subjects.dedup();
        ProvenanceOut {
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            design_digests,
            design_seeds,
            run_ids,
            subjects,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountsOut {
    pub transcripts: usize,
    pub ok: usize,
    pub parse_failures: usize,
    pub transport_failures: usize,
    pub rows: usize,
    pub clamped_rows: usize,
    pub clamped_fraction: f64,
}

impl From<&ConversionStats> for CountsOut {
    fn from(stats: &ConversionStats) -> CountsOut {
        CountsOut {
            transcripts: stats.transcripts,
            ok: stats.ok,
            parse_failures: stats.parse_failures,
            transport_failures: stats.transport_failures,
            rows: stats.rows,
            clamped_rows: stats.clamped_rows,
            clamped_fraction: stats.clamped_fraction(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocialOut {
    pub fit: FitSummaryOut,
    pub null_fit: FitSummaryOut,
    pub intercept_variance_test: LrtResult,
    pub weights: Vec<TaskWeights>,
    pub contrasts: Vec<ContrastOut>,
}

impl From<&SocialAnalysis> for SocialOut {
    fn from(analysis: &SocialAnalysis) -> SocialOut {
        SocialOut {
            fit: FitSummaryOut::from_fit(&analysis.fit),
            null_fit: FitSummaryOut::from_fit(&analysis.null_fit),
            intercept_variance_test: analysis.intercept_variance_test,
            weights: analysis.weights.clone(),
            contrasts: analysis.contrasts.iter().map(ContrastOut::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceOut {
    pub stats: ConfidenceStats,
    pub fit: FitSummaryOut,
    pub slopes: Vec<TaskSlope>,
    pub slope_contrasts: Vec<ContrastOut>,
}

impl ConfidenceOut {
    pub fn collect(fit: &ConfidenceFit, stats: &ConfidenceStats) -> ConfidenceOut {
        ConfidenceOut {
            stats: *stats,
            fit: FitSummaryOut::from_fit(&fit.fit),
            slopes: fit.slopes.clone(),
            slope_contrasts: fit.slope_contrasts.iter().map(ContrastOut::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TermValue {
    pub term: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedSlopeOut {
    pub task: ScenarioId,
    pub slope: f64,
}

/// Frozen comparison block; see [`reference`] for where the numbers live.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublishedReferenceOut {
    pub label: &'static str,
    pub coefficients: Vec<TermValue>,
    pub weights: Vec<reference::PublishedWeightRow>,
    pub aligned_rows: Vec<reference::PublishedAlignedRow>,
    pub neutral_rows: Vec<reference::PublishedNeutralRow>,
    pub confidence_slopes: Vec<PublishedSlopeOut>,
}

impl PublishedReferenceOut {
    pub fn frozen() -> PublishedReferenceOut {
        let coefficients = cascade_estimator::COLUMN_NAMES
            .iter()
            .zip(reference::PUBLISHED_COEFFICIENTS)
            .map(|(term, value)| TermValue { term, value })
            .collect();
        PublishedReferenceOut {
            label: reference::REFERENCE_LABEL,
            coefficients,
            weights: reference::published_weight_rows().to_vec(),
            aligned_rows: reference::PUBLISHED_ALIGNED_ROWS.to_vec(),
            neutral_rows: reference::PUBLISHED_NEUTRAL_ROWS.to_vec(),
            confidence_slopes: reference::PUBLISHED_CONFIDENCE_SLOPES
                .iter()
                .map(|(task, slope)| PublishedSlopeOut { task: *task, slope: *slope })
                .collect(),
        }
    }
}

pub const FIT_FORMAT: &str = "cascade-fit/1";

/// Output of the `fit` subcommand: the models without tables or reference
/// block, for pipelines that only want coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitDocument {
    pub format: &'static str,
    pub counts: CountsOut,
    pub social: SocialOut,
    pub confidence: ConfidenceOut,
}

impl FitDocument {
    pub fn assemble(
        conversion: &ConversionStats,
        analysis: &SocialAnalysis,
        confidence_fit: &ConfidenceFit,
        confidence_stats: &ConfidenceStats,
    ) -> FitDocument {
        FitDocument {
            format: FIT_FORMAT,
            counts: CountsOut::from(conversion),
            social: SocialOut::from(analysis),
            confidence: ConfidenceOut::collect(confidence_fit, confidence_stats),
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|err| CliError::runtime(err.to_string()))?;
        text.push('\n');
        Ok(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub format: &'static str,
    pub provenance: ProvenanceOut,
    pub counts: CountsOut,
    pub social: SocialOut,
    pub confidence: ConfidenceOut,
    pub table_aligned: Vec<AlignedRow>,
    pub table_neutral: Vec<NeutralRow>,
    pub table_neutral_cells: Vec<NeutralCellRow>,
    pub published_reference: PublishedReferenceOut,
}

impl ReportBundle {
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        manifests: &[Manifest],
        transcripts: &[Transcript],
        conversion: &ConversionStats,
        analysis: &SocialAnalysis,
        confidence_fit: &ConfidenceFit,
        confidence_stats: &ConfidenceStats,
        table_aligned: Vec<AlignedRow>,
        table_neutral: Vec<NeutralRow>,
        table_neutral_cells: Vec<NeutralCellRow>,
    ) -> ReportBundle {
        ReportBundle {
            format: BUNDLE_FORMAT,
            provenance: ProvenanceOut::collect(manifests, transcripts),
            counts: CountsOut::from(conversion),
            social: SocialOut::from(analysis),
            confidence: ConfidenceOut::collect(confidence_fit, confidence_stats),
            table_aligned,
            table_neutral,
            table_neutral_cells,
            published_reference: PublishedReferenceOut::frozen(),
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|err| CliError::runtime(err.to_string()))?;
        text.push('\n');
        Ok(text)
    }
}

/// Serializes table rows to CSV with a header row; `None` cells stay empty.
pub fn rows_to_csv<S: Serialize>(rows: &[S]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|err| CliError::runtime(err.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|err| CliError::runtime(err.to_string()))?;
    String::from_utf8(bytes).map_err(|err| CliError::runtime(err.to_string()))
}
