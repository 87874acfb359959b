//! Exercises the simulate -> convert -> table/report path at the library
//! level, pinning the exact values deterministic cohorts must produce.

use std::path::Path;

use cascade_agents::{AgentKind, AgentSpec, Cohort};
use cascade_cli::pipeline::{
    self, cmd_report, cmd_simulate, load_run, BUNDLE_FILE, REPORT_DIR, WEIGHTS_PLOT_FILE,
};
use cascade_cli::tables::{presentation_counts, table_alignment, table_neutral, trial_meta_index};
use cascade_core::ScenarioId;
use cascade_estimator::{from_transcripts, ClampPolicy, ObservationRow};

const ALL: [ScenarioId; 3] = ScenarioId::ALL;

fn converted_rows(out: &Path) -> (Vec<ObservationRow>, pipeline::LoadedRun) {
    let loaded = load_run(out).unwrap();
    let (rows, stats) = from_transcripts(
        &loaded.scenarios,
        &loaded.manifests,
        &loaded.transcripts,
        ClampPolicy::default(),
    )
    .unwrap();
    assert_eq!(stats.parse_failures, 0);
    assert_eq!(stats.transport_failures, 0);
    (rows, loaded)
}

#[test]
fn bayesian_cohort_pins_the_alignment_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    cmd_simulate(&out, &ALL, 42, 1, "bayesian:3", 2).unwrap();
    let (rows, loaded) = converted_rows(&out);

    let aligned = table_alignment(&loaded.scenarios, &rows).unwrap();
    assert_eq!(aligned.len(), 9, "3 tasks x 3 evidence levels");
    for row in &aligned {
        assert!(row.n_presentations > 0, "preset reaches {:?} |d|={}", row.task, row.net_abs);
        // A Bayesian subject always follows the evidence and reports the
        // posterior itself, so the cell statistics are exact.
        assert_eq!(row.choice_mean, Some(1.0), "{:?} |d|={}", row.task, row.net_abs);
        assert_eq!(row.choice_std_subjects, Some(0.0));
        assert_eq!(row.choice_std_trials, Some(0.0));
        let confidence = row.confidence_mean.unwrap();
        assert!(
            (confidence - row.posterior_level).abs() < 1e-12,
            "{:?} |d|={}: confidence {confidence} vs posterior {}",
            row.task,
            row.net_abs,
            row.posterior_level
        );
        assert_eq!(row.confidence_std_subjects, Some(0.0));
    }
}

#[test]
fn private_only_cohort_keeps_its_signal_on_every_balanced_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    cmd_simulate(&out, &ALL, 42, 1, "private_only:4", 2).unwrap();
    let (rows, loaded) = converted_rows(&out);

    let (summary, _) = table_neutral(&rows, &trial_meta_index(&loaded.manifests)).unwrap();
    assert_eq!(summary.len(), 3);
    for row in &summary {
        assert!(row.n_presentations > 0);
        assert_eq!(row.private_choice_mean, Some(1.0), "{:?}", row.task);
        assert_eq!(row.private_choice_std_subjects, Some(0.0));
        assert_eq!(row.private_choice_std_trials, Some(0.0));
    }
}

#[test]
fn conformist_cohort_abandons_its_signal_on_every_balanced_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    cmd_simulate(&out, &ALL, 42, 1, "conformist:4", 2).unwrap();
    let (rows, loaded) = converted_rows(&out);

    let (summary, cells) = table_neutral(&rows, &trial_meta_index(&loaded.manifests)).unwrap();
    for row in &summary {
        assert!(row.n_presentations > 0);
        assert_eq!(row.private_choice_mean, Some(0.0), "{:?}", row.task);
    }

    // Balanced trials come in two panel shapes: one lone dissenting advisor
    // (unanimous opposition) and a 3-panel with a single supporter.
    let mut unanimous_cells = 0;
    for cell in &cells {
        assert!(
            (cell.panel_size, cell.agreeing_advisors) == (1, 0)
                || (cell.panel_size, cell.agreeing_advisors) == (3, 1),
            "unexpected balanced panel shape {:?}",
            (cell.panel_size, cell.agreeing_advisors)
        );
        if cell.n_presentations == 0 {
            continue;
        }
        assert_eq!(cell.private_choice_mean, Some(0.0));
        if cell.agreeing_advisors == 0 {
            unanimous_cells += 1;
            // Against a unanimous panel the conformist reports full
            // confidence in the panel's option: none is left for private.
            assert_eq!(cell.confidence_mean, Some(0.0));
        }
    }
    assert!(unanimous_cells > 0, "preset includes unanimous-opposition cells");
}

#[test]
fn tables_account_for_every_converted_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    // A mixed cohort from a JSON file: every deterministic kind at once.
    let mut agents = Vec::new();
    for (label, kind) in [
        ("bayes", AgentKind::Bayesian),
        ("herd", AgentKind::Conformist),
        ("solo", AgentKind::PrivateOnly),
    ] {
        for idx in 1..=2 {
            agents.push(AgentSpec {
                agent_id: format!("{label}-{idx:02}"),
                seed: 100 + idx,
                kind: kind.clone(),
            });
        }
    }
    let cohort = Cohort::new(agents).unwrap();
    let cohort_path = dir.path().join("cohort.json");
    std::fs::write(&cohort_path, serde_json::to_string_pretty(&cohort).unwrap()).unwrap();

    cmd_simulate(&out, &ALL, 42, 1, cohort_path.to_str().unwrap(), 2).unwrap();
    let (rows, loaded) = converted_rows(&out);
    assert_eq!(rows.len(), 3 * 52 * 6 * 2, "tasks x trials x agents x repetitions");

    let aligned = table_alignment(&loaded.scenarios, &rows).unwrap();
    let (neutral, _) = table_neutral(&rows, &trial_meta_index(&loaded.manifests)).unwrap();
    let (n_aligned, n_neutral) = presentation_counts(&aligned, &neutral);
    assert_eq!(n_aligned + n_neutral, rows.len(), "every row lands in exactly one table");
}

#[test]
fn report_artifacts_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut artifacts: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        cmd_simulate(&out, &ALL, 42, 1, "bayesian:9", 3).unwrap();
        cmd_report(&out).unwrap();
        let report = out.join(REPORT_DIR);
        artifacts.push((
            std::fs::read(report.join(BUNDLE_FILE)).unwrap(),
            std::fs::read(report.join(WEIGHTS_PLOT_FILE)).unwrap(),
        ));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0, "bundle.json differs between runs");
    assert_eq!(artifacts[0].1, artifacts[1].1, "weights.svg differs between runs");
    assert!(!artifacts[0].0.is_empty());
    assert!(!artifacts[0].1.is_empty());
}
