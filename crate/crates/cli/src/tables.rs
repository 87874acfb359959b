//! Descriptive tables over observation rows.
//!
//! Two pipelines split on net evidence. The alignment table covers trials
//! whose posterior favors one option: the share of choices matching the
//! favored option and the reported confidence, per (task, posterior level).
//! The neutral table covers evidence-balanced trials (posterior exactly
//! 0.5): the share of choices matching the private signal and the
//! confidence attributed to it (reported confidence if the private option
//! was chosen, one minus it otherwise).
//!
//! Both aggregate in two stages: repetitions of one (subject, trial) pair
//! average into a unit value, units average into a per-subject value, and
//! the headline mean is the mean over subjects. Whether spread should be
//! measured across subjects or across units is a presentation choice, so
//! both standard deviations are emitted side by side. Cells with no data
//! stay visible with n = 0 and blank statistics.

use std::collections::BTreeMap;

use serde::Serialize;

use cascade_core::{bayes, Scenario, ScenarioId, Side};
use cascade_estimator::ObservationRow;
use cascade_trialgen::Manifest;

use crate::error::CliError;

/// Panel shape of one trial, for neutral-cell breakdowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialMeta {
    pub panel_size: usize,
    /// Advisors whose decision matches the trial's private signal.
    pub agreeing_advisors: usize,
    /// True when private and public evidence cancel exactly.
    pub neutral: bool,
}

pub type TrialMetaIndex = BTreeMap<(ScenarioId, String), TrialMeta>;

/// Panel metadata for every trial of the given manifests.
pub fn trial_meta_index(manifests: &[Manifest]) -> TrialMetaIndex {
    let mut index = TrialMetaIndex::new();
    for manifest in manifests {
        for trial in &manifest.trials {
            let agreeing = trial
                .advisors
                .iter()
                .filter(|advisor| advisor.decision == trial.private)
                .count();
            index.insert(
                (trial.scenario_id, trial.trial_id.clone()),
                TrialMeta {
                    panel_size: trial.advisors.len(),
                    agreeing_advisors: agreeing,
                    neutral: trial.net_count() == 0,
                },
            );
        }
    }
    index
}

/// One alignment-table row: a (task, posterior level) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignedRow {
    pub task: ScenarioId,
    /// Posterior of the favored option at this cell's net evidence.
    pub posterior_level: f64,
    pub net_abs: u32,
    pub n_subjects: usize,
    pub n_trials: usize,
    pub n_presentations: usize,
    pub choice_mean: Option<f64>,
    pub choice_std_subjects: Option<f64>,
    pub choice_std_trials: Option<f64>,
    pub confidence_mean: Option<f64>,
    pub confidence_std_subjects: Option<f64>,
    pub confidence_std_trials: Option<f64>,
}

/// One neutral-table summary row: all of a task's evidence-balanced trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeutralRow {
    pub task: ScenarioId,
    pub n_subjects: usize,
    pub n_trials: usize,
    pub n_presentations: usize,
    pub private_choice_mean: Option<f64>,
    pub private_choice_std_subjects: Option<f64>,
    pub private_choice_std_trials: Option<f64>,
    pub confidence_mean: Option<f64>,
    pub confidence_std_subjects: Option<f64>,
    pub confidence_std_trials: Option<f64>,
}

/// One neutral-table cell row: a (task, panel size, agreement) breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeutralCellRow {
    pub task: ScenarioId,
    pub panel_size: usize,
    pub agreeing_advisors: usize,
    pub n_subjects: usize,
    pub n_trials: usize,
    pub n_presentations: usize,
    pub private_choice_mean: Option<f64>,
    pub private_choice_std_subjects: Option<f64>,
    pub private_choice_std_trials: Option<f64>,
    pub confidence_mean: Option<f64>,
    pub confidence_std_subjects: Option<f64>,
    pub confidence_std_trials: Option<f64>,
}

/// Two parallel measures of one (subject, trial) unit, averaged over its
/// repetitions. `a` is the choice indicator, `b` the confidence measure.
#[derive(Debug, Default, Clone, Copy)]
struct UnitAccum {
    sum_a: f64,
    sum_b: f64,
    n: usize,
}

#[derive(Debug, Default, Clone)]
struct CellAccum {
    units: BTreeMap<(String, String), UnitAccum>,
}

impl CellAccum {
    fn push(&mut self, subject: &str, trial_id: &str, a: f64, b: f64) {
        let unit = self
            .units
            .entry((subject.to_string(), trial_id.to_string()))
            .or_default();
        unit.sum_a += a;
        unit.sum_b += b;
        unit.n += 1;
    }
}

#[derive(Debug, Clone, Copy)]
struct CellStats {
    n_subjects: usize,
    n_trials: usize,
    n_presentations: usize,
    a_mean: Option<f64>,
    a_std_subjects: Option<f64>,
    a_std_units: Option<f64>,
    b_mean: Option<f64>,
    b_std_subjects: Option<f64>,
    b_std_units: Option<f64>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation; a single value has spread 0 by convention so
/// degenerate one-subject cells still print.
fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    // A constant sample has spread exactly 0. The two-pass formula can miss
    // that: its mean may round one ulp off the common value.
    let first = values[0].to_bits();
    if values.iter().all(|v| v.to_bits() == first) {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

fn finalize(cell: &CellAccum) -> CellStats {
    let mut unit_a = Vec::with_capacity(cell.units.len());
    let mut unit_b = Vec::with_capacity(cell.units.len());
    let mut by_subject: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    let mut trial_ids: Vec<&str> = Vec::new();
    let mut n_presentations = 0;
    for ((subject, trial_id), unit) in &cell.units {
        let a = unit.sum_a / unit.n as f64;
        let b = unit.sum_b / unit.n as f64;
        unit_a.push(a);
        unit_b.push(b);
        let entry = by_subject.entry(subject).or_default();
        entry.0.push(a);
        entry.1.push(b);
        trial_ids.push(trial_id);
        n_presentations += unit.n;
    }
    trial_ids.sort_unstable();
    trial_ids.dedup();

    let subject_a: Vec<f64> = by_subject.values().map(|(a, _)| mean(a)).collect();
    let subject_b: Vec<f64> = by_subject.values().map(|(_, b)| mean(b)).collect();
    let empty = cell.units.is_empty();
    CellStats {
        n_subjects: by_subject.len(),
        n_trials: trial_ids.len(),
        n_presentations,
        a_mean: (!empty).then(|| mean(&subject_a)),
        a_std_subjects: (!empty).then(|| sample_std(&subject_a)),
        a_std_units: (!empty).then(|| sample_std(&unit_a)),
        b_mean: (!empty).then(|| mean(&subject_b)),
        b_std_subjects: (!empty).then(|| sample_std(&subject_b)),
        b_std_units: (!empty).then(|| sample_std(&unit_b)),
    }
}

fn scenario_accuracy(scenarios: &[Scenario], task: ScenarioId) -> f64 {
    scenarios
        .iter()
        .find(|s| s.id == task)
        .map(|s| s.q)
        .unwrap_or_else(|| Scenario::preset(task).q)
}

/// Alignment table over rows with nonzero net evidence.
///
/// Every (task, |net| 1..=3) cell is always emitted; data at higher |net|
/// adds its own rows. Posterior levels use the supplied scenario's accuracy,
/// falling back to the built-in preset for tasks not supplied.
pub fn table_alignment(
    scenarios: &[Scenario],
    rows: &[ObservationRow],
) -> Result<Vec<AlignedRow>, CliError> {
    let mut cells: BTreeMap<(ScenarioId, u32), CellAccum> = BTreeMap::new();
    for task in ScenarioId::ALL {
        for net_abs in 1..=3 {
            cells.insert((task, net_abs), CellAccum::default());
        }
    }
    for row in rows {
        if row.net_evidence == 0 {
            continue;
        }
        let favored = if row.net_evidence > 0 { Side::OptionA } else { Side::OptionB };
        let aligned = f64::from(row.choice == favored);
        cells
            .entry((row.scenario, row.net_evidence.unsigned_abs()))
            .or_default()
            .push(&row.subject, &row.trial_id, aligned, row.confidence);
    }

    let mut out = Vec::with_capacity(cells.len());
    for ((task, net_abs), cell) in &cells {
        let q = scenario_accuracy(scenarios, *task);
        let posterior_level = bayes::posterior_from_net(q, *net_abs as i32)
            .map_err(|err| CliError::validation(err.to_string()))?;
        let stats = finalize(cell);
        out.push(AlignedRow {
            task: *task,
            posterior_level,
            net_abs: *net_abs,
            n_subjects: stats.n_subjects,
            n_trials: stats.n_trials,
            n_presentations: stats.n_presentations,
            choice_mean: stats.a_mean,
            choice_std_subjects: stats.a_std_subjects,
            choice_std_trials: stats.a_std_units,
            confidence_mean: stats.b_mean,
            confidence_std_subjects: stats.b_std_subjects,
            confidence_std_trials: stats.b_std_units,
        });
    }
    Ok(out)
}

/// Neutral table over rows with zero net evidence: per-task summaries plus
/// per-(panel size, agreement) cell rows.
///
/// Every task gets a summary row even with no data. Cell rows enumerate the
/// neutral cells present in the trial index, so design cells nobody answered
/// stay visible with n = 0.
pub fn table_neutral(
    rows: &[ObservationRow],
    trials: &TrialMetaIndex,
) -> Result<(Vec<NeutralRow>, Vec<NeutralCellRow>), CliError> {
    let mut summaries: BTreeMap<ScenarioId, CellAccum> =
        ScenarioId::ALL.iter().map(|task| (*task, CellAccum::default())).collect();
    let mut cells: BTreeMap<(ScenarioId, usize, usize), CellAccum> = BTreeMap::new();
    for ((task, _), meta) in trials {
        if meta.neutral {
            cells
                .entry((*task, meta.panel_size, meta.agreeing_advisors))
                .or_default();
        }
    }

    for row in rows {
        if row.net_evidence != 0 {
            continue;
        }
        let private_side = if row.i_private > 0.0 { Side::OptionA } else { Side::OptionB };
        let chose_private = f64::from(row.choice == private_side);
        let attributed = if row.choice == private_side {
            row.confidence
        } else {
            1.0 - row.confidence
        };
        summaries
            .get_mut(&row.scenario)
            .expect("every task id has a summary accumulator")
            .push(&row.subject, &row.trial_id, chose_private, attributed);
        let meta = trials.get(&(row.scenario, row.trial_id.clone())).ok_or_else(|| {
            CliError::validation(format!(
                "row references trial {} ({}) absent from the supplied manifests",
                row.trial_id, row.scenario
            ))
        })?;
        cells
            .entry((row.scenario, meta.panel_size, meta.agreeing_advisors))
            .or_default()
            .push(&row.subject, &row.trial_id, chose_private, attributed);
    }

    let summary_rows = summaries
        .iter()
        .map(|(task, cell)| {
            let stats = finalize(cell);
            NeutralRow {
                task: *task,
                n_subjects: stats.n_subjects,
                n_trials: stats.n_trials,
                n_presentations: stats.n_presentations,
                private_choice_mean: stats.a_mean,
                private_choice_std_subjects: stats.a_std_subjects,
                private_choice_std_trials: stats.a_std_units,
                confidence_mean: stats.b_mean,
                confidence_std_subjects: stats.b_std_subjects,
                confidence_std_trials: stats.b_std_units,
            }
        })
        .collect();
    let cell_rows = cells
        .iter()
        .map(|((task, panel_size, agreeing), cell)| {
            let stats = finalize(cell);
            NeutralCellRow {
                task: *task,
                panel_size: *panel_size,
                agreeing_advisors: *agreeing,
                n_subjects: stats.n_subjects,
                n_trials: stats.n_trials,
                n_presentations: stats.n_presentations,
                private_choice_mean: stats.a_mean,
                private_choice_std_subjects: stats.a_std_subjects,
                private_choice_std_trials: stats.a_std_units,
                confidence_mean: stats.b_mean,
                confidence_std_subjects: stats.b_std_subjects,
                confidence_std_trials: stats.b_std_units,
            }
        })
        .collect();
    Ok((summary_rows, cell_rows))
}

/// Rows the two tables account for: alignment presentations plus neutral
/// presentations must partition the parsed rows exactly.
pub fn presentation_counts(aligned: &[AlignedRow], neutral: &[NeutralRow]) -> (usize, usize) {
    (
        aligned.iter().map(|r| r.n_presentations).sum(),
        neutral.iter().map(|r| r.n_presentations).sum(),
    )
}
