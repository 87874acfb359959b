use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cascade_core::ScenarioId;

#[derive(Debug, thiserror::Error)]
pub enum DesignError {
    #[error("design has no cells")]
    EmptyDesign,

    #[error("infeasible cells: {0}")]
    InfeasibleCells(String),

    #[error("cell repetitions sum to {actual}, target is {target}")]
    TargetMismatch { actual: u32, target: u32 },

    #[error("design is for scenario {design}, but scenario {given} was supplied")]
    ScenarioMismatch { design: ScenarioId, given: ScenarioId },

    #[error(transparent)]
    Core(#[from] cascade_core::CoreError),

    #[error("malformed manifest line {line}: {detail}")]
    MalformedManifest { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One design cell: every trial expanded from it shows `panel_size` advisors
/// split into `human_advisors` + `ai_advisors`, of which `agreeing_advisors`
/// side with the private signal and `disagreeing_advisors` oppose it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignCell {
    pub panel_size: u32,
    pub human_advisors: u32,
    pub ai_advisors: u32,
    pub agreeing_advisors: u32,
    pub disagreeing_advisors: u32,
    pub repetitions: u32,
}

impl DesignCell {
    pub fn feasibility_issue(&self) -> Option<String> {
        if !(1..=3).contains(&self.panel_size) {
            return Some(format!("panel_size {} outside 1..=3", self.panel_size));
        }
        if self.human_advisors + self.ai_advisors != self.panel_size {
            return Some(format!(
                "source mix {}+{} does not sum to panel_size {}",
                self.human_advisors, self.ai_advisors, self.panel_size
            ));
        }
        if self.agreeing_advisors + self.disagreeing_advisors != self.panel_size {
            return Some(format!(
                "agreement pattern {}+{} does not sum to panel_size {}",
                self.agreeing_advisors, self.disagreeing_advisors, self.panel_size
            ));
        }
        if self.repetitions == 0 {
            return Some("repetitions must be at least 1".into());
        }
        None
    }

    /// Net signed count relative to the private signal's direction:
    /// private (+1) plus agreeing minus disagreeing advisors.
    pub fn relative_net(&self) -> i32 {
        1 + self.agreeing_advisors as i32 - self.disagreeing_advisors as i32
    }
}

/// A complete design: an ordered cell list, a seed, and the total trial
/// count the cells must sum to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub scenario_id: ScenarioId,
    pub seed: u64,
    pub target_trial_count: u32,
    pub cells: Vec<DesignCell>,
}

impl DesignSpec {
    pub fn validate(&self) -> Result<(), DesignError> {
        if self.cells.is_empty() {
            return Err(DesignError::EmptyDesign);
        }
        let issues: Vec<String> = self
            .cells
            .iter()
            .enumerate()
            .filter_map(|(idx, cell)| cell.feasibility_issue().map(|issue| format!("cell {idx}: {issue}")))
            .collect();
        if !issues.is_empty() {
            return Err(DesignError::InfeasibleCells(issues.join("; ")));
        }
        let actual: u32 = self.cells.iter().map(|c| c.repetitions).sum();
        if actual != self.target_trial_count {
            return Err(DesignError::TargetMismatch {
                actual,
                target: self.target_trial_count,
            });
        }
        Ok(())
    }

    /// Content digest over the canonical JSON form of the spec (seed
    /// included); recorded in manifest headers and transcripts.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("design spec serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// The canonical 52-trial design.
    ///
    /// Composition: the full crossing of panel size, advisor source mix and
    /// agreement pattern, truncated to agreement counts that keep the net
    /// signed count within |d| <= 3 (a unanimous three-advisor panel would
    /// reach |d| = 4 and a posterior level outside the four-level ladder).
    /// That crossing yields 25 cells; each contributes two trials (one per
    /// private-signal direction), and the mixed-source unanimous pair cell
    /// contributes four, reaching 52 trials split 26/26 across directions
    /// and covering |d| in {0, 1, 2, 3}.
    pub fn published_preset(scenario_id: ScenarioId, seed: u64) -> DesignSpec {
        let mut cells = Vec::new();
        for panel_size in 1..=3u32 {
            for human_advisors in (0..=panel_size).rev() {
                let ai_advisors = panel_size - human_advisors;
                for agreeing_advisors in 0..=panel_size.min(2) {
                    let repetitions = if panel_size == 2
                        && human_advisors == 1
                        && agreeing_advisors == 2
                    {
                        4
                    } else {
                        2
                    };
                    cells.push(DesignCell {
                        panel_size,
                        human_advisors,
                        ai_advisors,
                        agreeing_advisors,
                        disagreeing_advisors: panel_size - agreeing_advisors,
                        repetitions,
                    });
                }
            }
        }
        DesignSpec {
            scenario_id,
            seed,
            target_trial_count: 52,
            cells,
        }
    }

    /// The same cell structure with every repetition count multiplied by
    /// `factor`, for precision studies that need more trials per cell.
    pub fn scaled(mut self, factor: u32) -> DesignSpec {
        for cell in &mut self.cells {
            cell.repetitions *= factor;
        }
        self.target_trial_count *= factor;
        self
    }
}
