//! Deterministic trial designs and manifests.
//!
//! A design spec enumerates cells (panel size, advisor source mix, agreement
//! pattern, repetitions); generation expands the cells into concrete trials
//! with a seeded generator, so a (spec, seed) pair always yields the same
//! manifest bytes. Manifests serialize as JSON Lines behind a header that
//! records a content digest of the spec.

pub mod design;
pub mod generate;
pub mod manifest;

pub use design::{DesignCell, DesignError, DesignSpec};
pub use generate::generate_manifest;
pub use manifest::{
    manifest_from_jsonl, manifest_to_jsonl, read_manifest, validate_manifest, write_manifest,
    Manifest, ManifestHeader, Violation, ViolationCode,
};
