use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::simulate::{levels_at, TrafficSampler};
use super::Scenario;
use crate::error::{Error, Result};
use crate::icdm::Icdm;
use crate::source_data::{cir, BinningConfig};

/// What the simulator knows that the measurements do not.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub icdm_true: Icdm,
    /// Road index behind each DT record.
    pub region_label_per_dt_record: Vec<usize>,
}

pub const MIN_TRUTH_SAMPLES: usize = 1000;

/// Monte Carlo ICDM: for positions drawn from the traffic density, the
/// fraction of samples whose CIR against each cell lands in a severe
/// interval. Every non-serving cell gets an entry. Measurement noise and
/// detection limits do not apply.
pub fn ground_truth_icdm(
    scenario: &Scenario,
    n_samples: usize,
    binning: &BinningConfig,
    seed: u64,
) -> Result<Icdm> {
    if n_samples < MIN_TRUTH_SAMPLES {
        return Err(Error::Scenario(format!(
            "ground truth needs at least {MIN_TRUTH_SAMPLES} samples, got {n_samples}"
        )));
    }
    let serving = scenario
        .cells
        .iter()
        .position(|c| c.id == scenario.serving_id)
        .ok_or_else(|| Error::Scenario(format!("serving cell `{}` is not in the layout", scenario.serving_id)))?;
    let sampler = TrafficSampler::new(scenario)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0u64; scenario.cells.len()];
    let mut levels = Vec::with_capacity(scenario.cells.len());
    for _ in 0..n_samples {
        let (x, y) = sampler.sample(scenario, &mut rng);
        levels_at(scenario, x, y, 0.0, &mut rng, &mut levels);
        let s = levels[serving];
        for (h, &l) in hits.iter_mut().zip(&levels) {
            if binning.is_severe(binning.bin(cir(s, l))) {
                *h += 1;
            }
        }
    }
    let entries: BTreeMap<String, f64> = scenario
        .cells
        .iter()
        .zip(hits)
        .enumerate()
        .filter(|(i, _)| *i != serving)
        .map(|(_, (c, h))| (c.id.clone(), h as f64 / n_samples as f64))
        .collect();
    Icdm::new(scenario.serving_id.clone(), entries)
}
