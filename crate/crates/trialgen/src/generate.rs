use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cascade_core::{AdvisorSignal, AdvisorSource, Scenario, Side, Trial};

use crate::design::{DesignError, DesignSpec};
use crate::manifest::{Manifest, ManifestHeader, MANIFEST_FORMAT};

/// Expands a design spec into a concrete manifest.
///
/// Deterministic: a (spec, seed) pair always produces identical trials. The
/// private-signal direction alternates across the expanded trial sequence,
/// so any design whose cells all have even repetitions (the preset included)
/// is split exactly evenly between directions. Which advisors agree and the
/// advisor display order are drawn from the seeded generator and recorded in
/// the trial as emitted.
pub fn generate_manifest(spec: &DesignSpec, scenario: &Scenario) -> Result<Manifest, DesignError> {
    spec.validate()?;
    scenario.validate()?;
    if spec.scenario_id != scenario.id {
        return Err(DesignError::ScenarioMismatch {
            design: spec.scenario_id,
            given: scenario.id,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut trials = Vec::with_capacity(spec.target_trial_count as usize);
    let mut index = 0u32;
    for cell in &spec.cells {
        for _ in 0..cell.repetitions {
            let private = if index % 2 == 0 { Side::OptionA } else { Side::OptionB };
            let mut agreement: Vec<bool> = (0..cell.panel_size)
                .map(|i| i < cell.agreeing_advisors)
                .collect();
            agreement.shuffle(&mut rng);
            let mut advisors: Vec<AdvisorSignal> = agreement
                .into_iter()
                .enumerate()
                .map(|(slot, agrees)| AdvisorSignal {
                    source: if (slot as u32) < cell.human_advisors {
                        AdvisorSource::Human
                    } else {
                        AdvisorSource::Ai
                    },
                    decision: if agrees { private } else { private.opposite() },
                })
                .collect();
            advisors.shuffle(&mut rng);

            let trial_id = format!("{}-{:04}", scenario.id, index + 1);
            trials.push(Trial::new(trial_id, scenario, private, advisors)?);
            index += 1;
        }
    }

    Ok(Manifest {
        header: ManifestHeader {
            format: MANIFEST_FORMAT.into(),
            scenario_id: scenario.id,
            seed: spec.seed,
            design_digest: spec.digest(),
            trial_count: trials.len() as u32,
        },
        trials,
    })
}
