//! Subcommand orchestration: file layout, option tokens, and the
//! generate / simulate / run / fit / report flows.
//!
//! One output directory holds one experiment. Manifests live at
//! `manifest_{task}.jsonl`, transcripts at `transcripts_{task}.jsonl`, the
//! fit at `fit.json` and report artifacts under `report/`. Commands that
//! consume trials reuse a manifest file when it exists and only generate
//! one when it does not, so transcripts always bind to the manifest that is
//! actually on disk (the design digest inside each transcript enforces
//! this at fit time).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cascade_agents::{simulate_cohort, AgentKind, Cohort};
use cascade_core::{
    read_transcripts, write_transcripts, Scenario, ScenarioId, Transcript,
};
use cascade_estimator::{
    analyze_social, confidence_records, fit_confidence_model, from_transcripts, ClampPolicy,
    ConfidenceFit, ConfidenceStats, ConversionStats, ObservationRow, SocialAnalysis,
};
use cascade_runner::{run_session, EndpointConfig, HttpTransport, ReplayTransport, Transport};
use cascade_trialgen::{
    generate_manifest, read_manifest, validate_manifest, write_manifest, DesignSpec, Manifest,
};

use crate::bundle::{rows_to_csv, FitDocument, ReportBundle};
use crate::error::CliError;
use crate::plot::plot_weights;
use crate::tables::{table_alignment, table_neutral, trial_meta_index};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_COHORT: &str = "bayesian:9";
pub const DEFAULT_REPETITIONS: u32 = 3;
pub const DESIGN_PRESETS: [&str; 1] = ["published"];

pub const FIT_FILE: &str = "fit.json";
pub const REPORT_DIR: &str = "report";
pub const BUNDLE_FILE: &str = "bundle.json";
pub const TABLE_ALIGNED_FILE: &str = "table_aligned.csv";
pub const TABLE_NEUTRAL_FILE: &str = "table_neutral.csv";
pub const TABLE_NEUTRAL_CELLS_FILE: &str = "table_neutral_cells.csv";
pub const WEIGHTS_PLOT_FILE: &str = "weights.svg";

/// File-borne defaults for the subcommand options; explicit flags win.
/// Unknown keys are rejected so typos surface instead of silently applying
/// defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub scenarios: Option<String>,
    pub cohort: Option<String>,
    pub repetitions: Option<u32>,
    pub scale: Option<u32>,
    pub endpoint: Option<PathBuf>,
    pub fixtures: Option<PathBuf>,
}

pub fn read_run_config(path: &Path) -> Result<RunConfig, CliError> {
    if !path.is_file() {
        return Err(CliError::validation(format!(
            "config file {} does not exist",
            path.display()
        )));
    }
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|err| {
        CliError::validation(format!("config file {}: {err}", path.display()))
    })
}

pub fn manifest_path(out: &Path, task: ScenarioId) -> PathBuf {
    out.join(format!("manifest_{task}.jsonl"))
}

pub fn transcripts_path(out: &Path, task: ScenarioId) -> PathBuf {
    out.join(format!("transcripts_{task}.jsonl"))
}

/// Parses `all` or a comma-separated task list into canonical task order.
pub fn parse_scenarios(token: &str) -> Result<Vec<ScenarioId>, CliError> {
    if token.trim() == "all" {
        return Ok(ScenarioId::ALL.to_vec());
    }
    let mut requested = Vec::new();
    for part in token.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let id: ScenarioId = part.parse().map_err(|_| {
            CliError::validation(format!(
                "unknown scenario {part:?}; expected medical, legal, investment or all"
            ))
        })?;
        requested.push(id);
    }
    if requested.is_empty() {
        return Err(CliError::validation("scenario list is empty"));
    }
    Ok(ScenarioId::ALL
        .into_iter()
        .filter(|id| requested.contains(id))
        .collect())
}

/// Parses a cohort token: `bayesian:N`, `conformist:N`, `private_only:N`,
/// or the path of a cohort JSON file (required for weighted policies).
pub fn parse_cohort(token: &str, base_seed: u64) -> Result<Cohort, CliError> {
    if let Some((kind_token, count_token)) = token.split_once(':') {
        let kind = match kind_token {
            "bayesian" => AgentKind::Bayesian,
            "conformist" => AgentKind::Conformist,
            "private_only" => AgentKind::PrivateOnly,
            other => {
                return Err(CliError::validation(format!(
                    "unknown cohort kind {other:?}; expected bayesian, conformist or private_only (weighted cohorts come from a JSON file)"
                )))
            }
        };
        let n: usize = count_token.parse().map_err(|_| {
            CliError::validation(format!("cohort size {count_token:?} is not a number"))
        })?;
        return Ok(Cohort::uniform(n, kind_token, base_seed, kind)?);
    }
    let path = Path::new(token);
    if !path.is_file() {
        return Err(CliError::validation(format!(
            "cohort {token:?} is neither kind:count nor an existing JSON file"
        )));
    }
    let text = std::fs::read_to_string(path)?;
    Ok(Cohort::from_json(&text)?)
}

fn check_manifest(manifest: &Manifest, scenario: &Scenario) -> Result<(), CliError> {
    let violations = validate_manifest(manifest, scenario);
    if violations.is_empty() {
        return Ok(());
    }
    let details: Vec<String> = violations
        .iter()
        .map(|v| format!("{:?}: {}", v.code, v.message))
        .collect();
    Err(CliError::validation(format!(
        "manifest for {} is invalid: {}",
        scenario.id,
        details.join("; ")
    )))
}

/// Generates one preset manifest. `scale` multiplies every design cell.
pub fn build_preset_manifest(
    task: ScenarioId,
    seed: u64,
    scale: u32,
) -> Result<(Scenario, Manifest), CliError> {
    if scale == 0 {
        return Err(CliError::validation("scale must be at least 1"));
    }
    let scenario = Scenario::preset(task);
    let spec = DesignSpec::published_preset(task, seed).scaled(scale);
    let manifest = generate_manifest(&spec, &scenario)?;
    check_manifest(&manifest, &scenario)?;
    Ok((scenario, manifest))
}

/// Reads each task's manifest from the output directory, generating and
/// writing any that are missing.
pub fn ensure_manifests(
    out: &Path,
    scenarios: &[ScenarioId],
    seed: u64,
    scale: u32,
) -> Result<Vec<(Scenario, Manifest)>, CliError> {
    std::fs::create_dir_all(out)?;
    let mut pairs = Vec::with_capacity(scenarios.len());
    for task in scenarios {
        let path = manifest_path(out, *task);
        if path.is_file() {
            let manifest = read_manifest(&path)?;
            let scenario = Scenario::preset(*task);
            if manifest.header.scenario_id != *task {
                return Err(CliError::validation(format!(
                    "{} holds a manifest for {}, not {task}",
                    path.display(),
                    manifest.header.scenario_id
                )));
            }
            check_manifest(&manifest, &scenario)?;
            pairs.push((scenario, manifest));
        } else {
            let (scenario, manifest) = build_preset_manifest(*task, seed, scale)?;
            write_manifest(&path, &manifest)?;
            pairs.push((scenario, manifest));
        }
    }
    Ok(pairs)
}

pub fn cmd_gen(
    out: &Path,
    scenarios: &[ScenarioId],
    preset: &str,
    seed: u64,
    scale: u32,
) -> Result<(), CliError> {
    if !DESIGN_PRESETS.contains(&preset) {
        return Err(CliError::validation(format!(
            "unknown design preset {preset:?}; available: {}",
            DESIGN_PRESETS.join(", ")
        )));
    }
    std::fs::create_dir_all(out)?;
    for task in scenarios {
        let (_, manifest) = build_preset_manifest(*task, seed, scale)?;
        let path = manifest_path(out, *task);
        write_manifest(&path, &manifest)?;
        println!(
            "wrote {} ({} trials, design digest {})",
            path.display(),
            manifest.trials.len(),
            &manifest.header.design_digest[..8]
        );
    }
    Ok(())
}

pub fn cmd_simulate(
    out: &Path,
    scenarios: &[ScenarioId],
    seed: u64,
    scale: u32,
    cohort_token: &str,
    repetitions: u32,
) -> Result<(), CliError> {
    let cohort = parse_cohort(cohort_token, seed)?;
    let pairs = ensure_manifests(out, scenarios, seed, scale)?;
    for (scenario, manifest) in &pairs {
        let transcripts = simulate_cohort(manifest, scenario, &cohort, repetitions)?;
        let path = transcripts_path(out, scenario.id);
        write_transcripts(&path, &transcripts)?;
        println!(
            "wrote {} ({} agents x {} trials x {} repetitions = {} transcripts)",
            path.display(),
            cohort.agents.len(),
            manifest.trials.len(),
            repetitions,
            transcripts.len()
        );
    }
    Ok(())
}

fn execute_sessions(
    out: &Path,
    pairs: &[(Scenario, Manifest)],
    endpoint: &EndpointConfig,
    transport: &dyn Transport,
    repetitions: u32,
) -> Result<(), CliError> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|err| CliError::runtime(err.to_string()))?;
    for (scenario, manifest) in pairs {
        let transcripts =
            runtime.block_on(run_session(manifest, scenario, endpoint, transport, repetitions))?;
        let path = transcripts_path(out, scenario.id);
        write_transcripts(&path, &transcripts)?;
        println!(
            "wrote {} ({} transcripts from {})",
            path.display(),
            transcripts.len(),
            endpoint.model_name
        );
    }
    Ok(())
}

/// Executes manifests against a live chat endpoint. The API key comes from
/// the environment variable named in the endpoint config, never from disk.
pub fn cmd_run(
    out: &Path,
    scenarios: &[ScenarioId],
    seed: u64,
    scale: u32,
    endpoint_path: &Path,
    repetitions: u32,
) -> Result<(), CliError> {
    let endpoint = EndpointConfig::read(endpoint_path)?;
    let transport = HttpTransport::new(&endpoint)?;
    let pairs = ensure_manifests(out, scenarios, seed, scale)?;
    execute_sessions(out, &pairs, &endpoint, &transport, repetitions)
}

/// Re-executes manifests against a recorded-response store. A request with
/// no recorded response is recorded as a transport failure for that
/// presentation; the transcript count is unaffected.
pub fn cmd_replay(
    out: &Path,
    scenarios: &[ScenarioId],
    seed: u64,
    scale: u32,
    endpoint_path: &Path,
    fixtures_path: &Path,
    repetitions: u32,
) -> Result<(), CliError> {
    let endpoint = EndpointConfig::read(endpoint_path)?;
    let transport = ReplayTransport::read(fixtures_path)?;
    let pairs = ensure_manifests(out, scenarios, seed, scale)?;
    execute_sessions(out, &pairs, &endpoint, &transport, repetitions)
}

/// Everything a fit or report consumes, read back from the output directory.
#[derive(Debug)]
pub struct LoadedRun {
    pub scenarios: Vec<Scenario>,
    pub manifests: Vec<Manifest>,
    pub transcripts: Vec<Transcript>,
}

pub fn load_run(out: &Path) -> Result<LoadedRun, CliError> {
    let mut scenarios = Vec::new();
    let mut manifests = Vec::new();
    let mut transcripts = Vec::new();
    for task in ScenarioId::ALL {
        let m_path = manifest_path(out, task);
        if !m_path.is_file() {
            continue;
        }
        let manifest = read_manifest(&m_path)?;
        if manifest.header.scenario_id != task {
            return Err(CliError::validation(format!(
                "{} holds a manifest for {}, not {task}",
                m_path.display(),
                manifest.header.scenario_id
            )));
        }
        let scenario = Scenario::preset(task);
        check_manifest(&manifest, &scenario)?;
        scenarios.push(scenario);
        manifests.push(manifest);
        let t_path = transcripts_path(out, task);
        if t_path.is_file() {
            transcripts.extend(read_transcripts(&t_path)?);
        }
    }
    if manifests.is_empty() {
        return Err(CliError::validation(format!(
            "no manifests in {}; run gen or simulate first",
            out.display()
        )));
    }
    if transcripts.is_empty() {
        return Err(CliError::validation(format!(
            "no transcripts in {}; run simulate, run or replay first",
            out.display()
        )));
    }
    Ok(LoadedRun { scenarios, manifests, transcripts })
}

pub struct FitOutput {
    pub rows: Vec<ObservationRow>,
    pub conversion: ConversionStats,
    pub analysis: SocialAnalysis,
    pub confidence_fit: ConfidenceFit,
    pub confidence_stats: ConfidenceStats,
}

pub fn fit_loaded(loaded: &LoadedRun) -> Result<FitOutput, CliError> {
    let (rows, conversion) = from_transcripts(
        &loaded.scenarios,
        &loaded.manifests,
        &loaded.transcripts,
        ClampPolicy::default(),
    )?;
    let analysis = analyze_social(&rows)?;
    let (records, confidence_stats) = confidence_records(&rows);
    let confidence_fit = fit_confidence_model(&records)?;
    Ok(FitOutput { rows, conversion, analysis, confidence_fit, confidence_stats })
}

pub fn cmd_fit(out: &Path) -> Result<(), CliError> {
    let loaded = load_run(out)?;
    let fitted = fit_loaded(&loaded)?;
    let document = FitDocument::assemble(
        &fitted.conversion,
        &fitted.analysis,
        &fitted.confidence_fit,
        &fitted.confidence_stats,
    );
    let path = out.join(FIT_FILE);
    std::fs::write(&path, document.to_json()?)?;
    println!("wrote {}", path.display());
    for weights in &fitted.analysis.weights {
        println!(
            "{}: private {:.3} (se {:.3}), human {:.3} (se {:.3}), ai {:.3} (se {:.3})",
            weights.task,
            weights.private.estimate,
            weights.private.standard_error,
            weights.human.estimate,
            weights.human.standard_error,
            weights.ai.estimate,
            weights.ai.standard_error,
        );
    }
    let lrt = &fitted.analysis.intercept_variance_test;
    println!(
        "random-intercept variance: chi2 {:.3}, boundary-mixture p {:.4}",
        lrt.chi2, lrt.p_mixture
    );
    Ok(())
}

pub fn cmd_report(out: &Path) -> Result<(), CliError> {
    let loaded = load_run(out)?;
    let fitted = fit_loaded(&loaded)?;
    let aligned = table_alignment(&loaded.scenarios, &fitted.rows)?;
    let index = trial_meta_index(&loaded.manifests);
    let (neutral, neutral_cells) = table_neutral(&fitted.rows, &index)?;
    let bundle = ReportBundle::assemble(
        &loaded.manifests,
        &loaded.transcripts,
        &fitted.conversion,
        &fitted.analysis,
        &fitted.confidence_fit,
        &fitted.confidence_stats,
        aligned,
        neutral,
        neutral_cells,
    );

    let report_dir = out.join(REPORT_DIR);
    std::fs::create_dir_all(&report_dir)?;
    let artifacts = [
        (BUNDLE_FILE, bundle.to_json()?),
        (TABLE_ALIGNED_FILE, rows_to_csv(&bundle.table_aligned)?),
        (TABLE_NEUTRAL_FILE, rows_to_csv(&bundle.table_neutral)?),
        (TABLE_NEUTRAL_CELLS_FILE, rows_to_csv(&bundle.table_neutral_cells)?),
        (WEIGHTS_PLOT_FILE, plot_weights(&fitted.analysis.weights)),
    ];
    for (name, content) in artifacts {
        let path = report_dir.join(name);
        std::fs::write(&path, content)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
