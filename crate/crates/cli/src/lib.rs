//! Command-line pipeline for binary-choice cascade experiments.
//!
//! The `cascade` binary strings the other crates together: `gen` writes
//! trial manifests, `simulate`/`run`/`replay` collect decision transcripts
//! (synthetic cohorts, a live chat endpoint, or recorded responses),
//! `fit` estimates the evidence-weight and confidence models, and
//! `report` renders the tables, the weight chart and a JSON bundle.
//!
//! Everything lives under one output directory guarded by a lock file, so
//! concurrent invocations cannot interleave writes.

pub mod bundle;
pub mod cli;
pub mod error;
pub mod lock;
pub mod pipeline;
pub mod plot;
pub mod reference;
pub mod tables;

pub use cli::run;
pub use error::CliError;
