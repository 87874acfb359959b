//! Argument parsing and dispatch.
//!
//! Option resolution order: explicit flag, then `--config` file value, then
//! built-in default. Every subcommand takes the output-directory lock
//! before touching files. Exit codes: 0 success, 1 validation error, 2
//! runtime failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::error::{CliError, EXIT_VALIDATION};
use crate::lock::OutDirLock;
use crate::pipeline::{
    self, RunConfig, DEFAULT_COHORT, DEFAULT_REPETITIONS, DEFAULT_SEED,
};

#[derive(Debug, Parser)]
#[command(
    name = "cascade",
    version,
    about = "Binary-choice cascade experiments: generate trial designs, collect decisions from synthetic cohorts or chat endpoints, fit evidence-weight models, and render reports"
)]
pub struct Cli {
    /// Output directory (default "out")
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Base seed for design generation and synthetic cohorts (default 42)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// JSON file with defaults for these options; explicit flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write trial manifests from a built-in design preset
    Gen {
        /// Task to generate: medical, legal, investment, or all
        #[arg(long)]
        scenario: Option<String>,

        /// Design preset name
        #[arg(long, default_value = "published")]
        preset: String,

        /// Multiply every design cell by a whole factor
        #[arg(long)]
        scale: Option<u32>,
    },

    /// Answer manifests with a synthetic cohort and store transcripts
    Simulate {
        /// Tasks to simulate: comma-separated list or all
        #[arg(long)]
        scenarios: Option<String>,

        /// Cohort: bayesian:N, conformist:N, private_only:N, or a JSON file
        #[arg(long)]
        cohort: Option<String>,

        /// Presentations of each trial per agent
        #[arg(long)]
        repetitions: Option<u32>,

        /// Design scale used only if a manifest must be generated
        #[arg(long)]
        scale: Option<u32>,
    },

    /// Answer manifests through a live chat-completion endpoint
    Run {
        /// Tasks to run: comma-separated list or all
        #[arg(long)]
        scenarios: Option<String>,

        /// Endpoint config JSON (the API key comes from the environment
        /// variable it names, never from the file)
        #[arg(long)]
        endpoint: Option<PathBuf>,

        /// Presentations of each trial
        #[arg(long)]
        repetitions: Option<u32>,

        /// Design scale used only if a manifest must be generated
        #[arg(long)]
        scale: Option<u32>,
    },

    /// Answer manifests from a recorded-response store
    Replay {
        /// Tasks to replay: comma-separated list or all
        #[arg(long)]
        scenarios: Option<String>,

        /// Endpoint config JSON; requests are keyed exactly as when live
        #[arg(long)]
        endpoint: Option<PathBuf>,

        /// Recorded-response store JSON
        #[arg(long)]
        fixtures: Option<PathBuf>,

        /// Presentations of each trial
        #[arg(long)]
        repetitions: Option<u32>,

        /// Design scale used only if a manifest must be generated
        #[arg(long)]
        scale: Option<u32>,
    },

    /// Fit the evidence-weight and confidence models from stored transcripts
    Fit,

    /// Render tables, the weight chart and the JSON bundle from stored
    /// transcripts
    Report,
}

/// Entry point behind `main`; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let informational = matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if informational { 0 } else { EXIT_VALIDATION };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file_config = match &cli.config {
        Some(path) => pipeline::read_run_config(path)?,
        None => RunConfig::default(),
    };
    let out = cli
        .out
        .or_else(|| file_config.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = cli.seed.or(file_config.seed).unwrap_or(DEFAULT_SEED);
    let _lock = OutDirLock::acquire(&out)?;

    let scenario_token = |flag: Option<String>| {
        flag.or_else(|| file_config.scenarios.clone())
            .unwrap_or_else(|| "all".to_string())
    };
    let resolved_repetitions =
        |flag: Option<u32>| flag.or(file_config.repetitions).unwrap_or(DEFAULT_REPETITIONS);
    let resolved_scale = |flag: Option<u32>| flag.or(file_config.scale).unwrap_or(1);

    match cli.command {
        Command::Gen { scenario, preset, scale } => {
            let scenarios = pipeline::parse_scenarios(&scenario_token(scenario))?;
            pipeline::cmd_gen(&out, &scenarios, &preset, seed, resolved_scale(scale))
        }
        Command::Simulate { scenarios, cohort, repetitions, scale } => {
            let scenarios = pipeline::parse_scenarios(&scenario_token(scenarios))?;
            let cohort_token = cohort
                .or_else(|| file_config.cohort.clone())
                .unwrap_or_else(|| DEFAULT_COHORT.to_string());
            pipeline::cmd_simulate(
                &out,
                &scenarios,
                seed,
                resolved_scale(scale),
                &cohort_token,
                resolved_repetitions(repetitions),
            )
        }
        Command::Run { scenarios, endpoint, repetitions, scale } => {
            let scenarios = pipeline::parse_scenarios(&scenario_token(scenarios))?;
            let endpoint = endpoint.or_else(|| file_config.endpoint.clone()).ok_or_else(
                || CliError::validation("run needs --endpoint (or \"endpoint\" in --config)"),
            )?;
            pipeline::cmd_run(
                &out,
                &scenarios,
                seed,
                resolved_scale(scale),
                &endpoint,
                resolved_repetitions(repetitions),
            )
        }
        Command::Replay { scenarios, endpoint, fixtures, repetitions, scale } => {
            let scenarios = pipeline::parse_scenarios(&scenario_token(scenarios))?;
            let endpoint = endpoint.or_else(|| file_config.endpoint.clone()).ok_or_else(
                || CliError::validation("replay needs --endpoint (or \"endpoint\" in --config)"),
            )?;
            let fixtures = fixtures.or_else(|| file_config.fixtures.clone()).ok_or_else(
                || CliError::validation("replay needs --fixtures (or \"fixtures\" in --config)"),
            )?;
            pipeline::cmd_replay(
                &out,
                &scenarios,
                seed,
                resolved_scale(scale),
                &endpoint,
                &fixtures,
                resolved_repetitions(repetitions),
            )
        }
        Command::Fit => pipeline::cmd_fit(&out),
        Command::Report => pipeline::cmd_report(&out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_version_exit_zero_without_a_command() {
        assert_eq!(run(["cascade", "--help"]), 0);
        assert_eq!(run(["cascade", "--version"]), 0);
    }

    #[test]
    fn unknown_flags_and_commands_are_validation_errors() {
        assert_eq!(run(["cascade", "gen", "--bogus"]), 1);
        assert_eq!(run(["cascade", "transmogrify"]), 1);
        assert_eq!(run(["cascade"]), 1);
    }

    #[test]
    fn bad_scenario_token_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        assert_eq!(
            run([
                "cascade",
                "gen",
                "--out",
                out.to_str().unwrap(),
                "--scenario",
                "astrology"
            ]),
            1
        );
    }

    #[test]
    fn gen_writes_manifests_and_releases_the_lock() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let code = run([
            "cascade",
            "gen",
            "--out",
            out.to_str().unwrap(),
            "--scenario",
            "legal",
            "--seed",
            "42",
        ]);
        assert_eq!(code, 0);
        assert!(out.join("manifest_legal.jsonl").is_file());
        assert!(!out.join(crate::lock::LOCK_FILE_NAME).exists());
    }

    #[test]
    fn config_file_supplies_defaults_and_flags_override() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("from-config");
        let config_path = dir.path().join("config.json");
        std::fs::write(
            &config_path,
            format!(
                r#"{{"out": {:?}, "scenarios": "legal", "seed": 7}}"#,
                out.to_str().unwrap()
            ),
        )
        .unwrap();
        let code = run(["cascade", "--config", config_path.to_str().unwrap(), "gen"]);
        assert_eq!(code, 0);
        let manifest =
            cascade_trialgen::read_manifest(&out.join("manifest_legal.jsonl")).unwrap();
        assert_eq!(manifest.header.seed, 7);

        // The explicit flag beats the config value.
        let out2 = dir.path().join("flag-wins");
        let code = run([
            "cascade",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out2.to_str().unwrap(),
            "--seed",
            "11",
            "gen",
        ]);
        assert_eq!(code, 0);
        let manifest =
            cascade_trialgen::read_manifest(&out2.join("manifest_legal.jsonl")).unwrap();
        assert_eq!(manifest.header.seed, 11);
    }

    #[test]
    fn run_without_endpoint_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        assert_eq!(run(["cascade", "run", "--out", out.to_str().unwrap()]), 1);
    }
}
