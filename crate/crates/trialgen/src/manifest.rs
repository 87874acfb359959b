use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use cascade_core::{bayes, Scenario, ScenarioId, Trial};

use crate::design::DesignError;

pub const MANIFEST_FORMAT: &str = "cascade-manifest/1";

/// First line of a manifest file; `design_digest` is the content hash of the
/// design spec (seed included) that produced the trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub format: String,
    pub scenario_id: ScenarioId,
    pub seed: u64,
    pub design_digest: String,
    pub trial_count: u32,
}

/// An ordered trial list with its header. Order is part of the contract:
/// runners present trials in manifest order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub header: ManifestHeader,
    pub trials: Vec<Trial>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    TrialCountMismatch,
    DuplicateTrialId,
    ScenarioMismatch,
    AdvisorCountOutOfRange,
    PosteriorMismatch,
    MissingNetLevel,
    ZeroEvidenceColumn,
    CollinearEvidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

/// Structural checks over a manifest. Collects violations instead of
/// erroring so callers can report all defects at once.
pub fn validate_manifest(manifest: &Manifest, scenario: &Scenario) -> Vec<Violation> {
    let mut violations = Vec::new();
    let push = |violations: &mut Vec<Violation>, code, message: String| {
        violations.push(Violation { code, message });
    };

    if manifest.header.trial_count as usize != manifest.trials.len() {
        push(
            &mut violations,
            ViolationCode::TrialCountMismatch,
            format!(
                "header declares {} trials, file holds {}",
                manifest.header.trial_count,
                manifest.trials.len()
            ),
        );
    }

    let mut seen_ids = BTreeSet::new();
    let mut net_levels = BTreeSet::new();
    for trial in &manifest.trials {
        if !seen_ids.insert(trial.trial_id.as_str()) {
            push(
                &mut violations,
                ViolationCode::DuplicateTrialId,
                format!("duplicate trial_id {}", trial.trial_id),
            );
        }
        if trial.scenario_id != manifest.header.scenario_id {
            push(
                &mut violations,
                ViolationCode::ScenarioMismatch,
                format!(
                    "trial {} is for scenario {}, manifest is for {}",
                    trial.trial_id, trial.scenario_id, manifest.header.scenario_id
                ),
            );
            continue;
        }
        if trial.advisors.is_empty() || trial.advisors.len() > 3 {
            push(
                &mut violations,
                ViolationCode::AdvisorCountOutOfRange,
                format!(
                    "trial {} has {} advisors",
                    trial.trial_id,
                    trial.advisors.len()
                ),
            );
            continue;
        }
        net_levels.insert(trial.net_count().unsigned_abs());
        match bayes::trial_posterior(trial, scenario) {
            Ok(posterior) if posterior.to_bits() == trial.posterior_a.to_bits() => {}
            Ok(posterior) => push(
                &mut violations,
                ViolationCode::PosteriorMismatch,
                format!(
                    "trial {} caches posterior {}, recomputation gives {}",
                    trial.trial_id, trial.posterior_a, posterior
                ),
            ),
            Err(err) => push(
                &mut violations,
                ViolationCode::PosteriorMismatch,
                format!("trial {}: {err}", trial.trial_id),
            ),
        }
    }

    for level in [0u32, 1, 2, 3] {
        if !net_levels.contains(&level) {
            push(
                &mut violations,
                ViolationCode::MissingNetLevel,
                format!("no trial reaches |d| = {level}"),
            );
        }
    }

    violations.extend(evidence_rank_violations(&manifest.trials));
    violations
}

/// Checks that the three evidence columns (private, human, ai signed counts)
/// have full column rank, i.e. the regression weights are estimable from
/// this manifest alone.
fn evidence_rank_violations(trials: &[Trial]) -> Vec<Violation> {
    let mut violations = Vec::new();
    let columns: Vec<Vec<f64>> = (0..3)
        .map(|j| {
            trials
                .iter()
                .map(|t| {
                    let e = t.evidence();
                    f64::from([e.private, e.human, e.ai][j])
                })
                .collect()
        })
        .collect();
    let names = ["private", "human", "ai"];

    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    for (j, norm) in norms.iter().enumerate() {
        if *norm == 0.0 {
            violations.push(Violation {
                code: ViolationCode::ZeroEvidenceColumn,
                message: format!("{} evidence column is identically zero", names[j]),
            });
        }
    }
    if violations.is_empty() {
        // Gram determinant of the unit-normalized columns; near zero means
        // some column is a linear combination of the others.
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let mut g = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = dot(&columns[i], &columns[j]) / (norms[i] * norms[j]);
            }
        }
        let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        if det.abs() < 1e-10 {
            violations.push(Violation {
                code: ViolationCode::CollinearEvidence,
                message: format!("evidence columns are collinear (normalized Gram det {det:.3e})"),
            });
        }
    }
    violations
}

pub fn manifest_to_jsonl(manifest: &Manifest) -> Result<String, DesignError> {
    let mut out = serde_json::to_string(&manifest.header)?;
    out.push('\n');
    for trial in &manifest.trials {
        out.push_str(&serde_json::to_string(trial)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn manifest_from_jsonl(text: &str) -> Result<Manifest, DesignError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header_line) = lines.next().ok_or(DesignError::MalformedManifest {
        line: 1,
        detail: "empty manifest".into(),
    })?;
    let header: ManifestHeader =
        serde_json::from_str(header_line).map_err(|err| DesignError::MalformedManifest {
            line: 1,
            detail: format!("bad header: {err}"),
        })?;
    if header.format != MANIFEST_FORMAT {
        return Err(DesignError::MalformedManifest {
            line: 1,
            detail: format!("unsupported format {:?}", header.format),
        });
    }
    let mut trials = Vec::with_capacity(header.trial_count as usize);
    for (idx, line) in lines {
        let trial: Trial =
            serde_json::from_str(line).map_err(|err| DesignError::MalformedManifest {
                line: idx + 1,
                detail: err.to_string(),
            })?;
        trials.push(trial);
    }
    Ok(Manifest { header, trials })
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), DesignError> {
    std::fs::write(path, manifest_to_jsonl(manifest)?)?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Manifest, DesignError> {
    manifest_from_jsonl(&std::fs::read_to_string(path)?)
}
