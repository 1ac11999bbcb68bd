//! Synthetic cellular scenarios: layout, traffic, roads and a log-distance
//! propagation model, plus the measurement simulators and the Monte Carlo
//! ground-truth ICDM built on top of them.

pub mod presets;
mod simulate;
mod truth;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use presets::{preset, Preset, SimulationPlan};
pub use simulate::{simulate_drive_test, simulate_mmrs, DriveTest};
pub use truth::{ground_truth_icdm, GroundTruth};

use crate::source_data::{BinningConfig, MmrReport};

/// Largest BA list a GSM cell can broadcast.
pub const MAX_BA_LIST: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSite {
    pub id: String,
    pub x: f64,
    pub y: f64,
    /// dBm.
    pub tx_power: f64,
    #[serde(default)]
    pub channel: u32,
}

/// Isotropic 2-D Gaussian traffic hotspot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hotspot {
    pub weight: f64,
    pub x: f64,
    pub y: f64,
    /// Standard deviation in meters.
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLoss {
    /// Loss at 1 m, dB.
    pub reference_loss_db: f64,
    pub exponent: f64,
    pub shadowing_sigma_db: f64,
}

impl Default for PathLoss {
    fn default() -> Self {
        PathLoss {
            reference_loss_db: 38.0,
            exponent: 3.5,
            shadowing_sigma_db: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub cells: Vec<CellSite>,
    pub serving_id: String,
    pub ba_list: Vec<String>,
    /// Successive BA lists in force while reports were collected. When
    /// present, reports are split evenly across them in order and `ba_list`
    /// is only the current one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ba_epochs: Vec<Vec<String>>,
    pub traffic: Vec<Hotspot>,
    pub roads: Vec<Vec<[f64; 2]>>,
    pub pathloss: PathLoss,
    /// dBm.
    pub noise_floor: f64,
    /// dBm; weaker signals are not reported.
    pub detection_threshold: f64,
    pub seed: u64,
    /// Extra Gaussian measurement error on MMR levels, dB.
    #[serde(default)]
    pub mmr_noise_db: f64,
    /// Extra Gaussian measurement error on DT levels, dB.
    #[serde(default)]
    pub dt_noise_db: f64,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn cell(&self, id: &str) -> Option<&CellSite> {
        self.cells.iter().find(|c| c.id == id)
    }

    pub fn serving(&self) -> Result<&CellSite> {
        self.cell(&self.serving_id)
            .ok_or_else(|| Error::Scenario(format!("serving cell `{}` is not in the layout", self.serving_id)))
    }

    /// The BA lists used for MMR simulation, in order.
    pub fn mmr_lists(&self) -> Vec<&[String]> {
        if self.ba_epochs.is_empty() {
            vec![self.ba_list.as_slice()]
        } else {
            self.ba_epochs.iter().map(Vec::as_slice).collect()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for c in &self.cells {
            if !ids.insert(c.id.as_str()) {
                return Err(Error::Scenario(format!("duplicate cell id `{}`", c.id)));
            }
            if !c.tx_power.is_finite() || !c.x.is_finite() || !c.y.is_finite() {
                return Err(Error::Scenario(format!("cell `{}` has non-finite parameters", c.id)));
            }
        }
        self.serving()?;
        let check_list = |list: &[String], what: &str| -> Result<()> {
            if list.len() > MAX_BA_LIST {
                return Err(Error::Scenario(format!(
                    "{what} holds {} cells, at most {MAX_BA_LIST} allowed",
                    list.len()
                )));
            }
            let mut seen = HashSet::new();
            for id in list {
                if id == &self.serving_id {
                    return Err(Error::Scenario(format!("{what} contains the serving cell")));
                }
                if !ids.contains(id.as_str()) {
                    return Err(Error::Scenario(format!("{what} names unknown cell `{id}`")));
                }
                if !seen.insert(id) {
                    return Err(Error::Scenario(format!("{what} repeats `{id}`")));
                }
            }
            Ok(())
        };
        check_list(&self.ba_list, "BA list")?;
        for (e, list) in self.ba_epochs.iter().enumerate() {
            check_list(list, &format!("BA epoch {e}"))?;
        }
        if self.traffic.is_empty() {
            return Err(Error::Scenario("traffic density needs at least one hotspot".into()));
        }
        if self.traffic.iter().any(|h| !(h.weight >= 0.0) || !(h.sigma >= 0.0) || !h.x.is_finite() || !h.y.is_finite()) {
            return Err(Error::Scenario("hotspot weights and sigmas must be nonnegative".into()));
        }
        let total: f64 = self.traffic.iter().map(|h| h.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Scenario(format!("hotspot weights sum to {total}, not 1")));
        }
        for road in &self.roads {
            if road.len() < 2 {
                return Err(Error::Scenario("a road needs at least two vertices".into()));
            }
            if road.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Scenario("road vertices must be finite".into()));
            }
        }
        let pl = &self.pathloss;
        if !pl.reference_loss_db.is_finite() || !(pl.exponent > 0.0) || !(pl.shadowing_sigma_db >= 0.0) {
            return Err(Error::Scenario("invalid path-loss parameters".into()));
        }
        if !(self.mmr_noise_db >= 0.0) || !(self.dt_noise_db >= 0.0) {
            return Err(Error::Scenario("measurement noise must be nonnegative".into()));
        }
        if !self.detection_threshold.is_finite() || !self.noise_floor.is_finite() {
            return Err(Error::Scenario("thresholds must be finite".into()));
        }
        if self.detection_threshold < self.noise_floor {
            return Err(Error::Scenario("detection threshold lies below the noise floor".into()));
        }
        Ok(())
    }
}

/// Per-stream seeds derived from a scenario seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationSeeds {
    pub mmr: u64,
    pub dt: u64,
    pub truth: u64,
}

impl SimulationSeeds {
    pub fn derive(seed: u64) -> Self {
        SimulationSeeds {
            mmr: seed,
            dt: seed.wrapping_add(1),
            truth: seed.wrapping_add(2),
        }
    }
}

/// Everything one simulation run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub reports: Vec<MmrReport>,
    pub drive_test: DriveTest,
    pub truth: GroundTruth,
}

/// MMRs, drive test and Monte Carlo ICDM with seeds derived from
/// `scenario.seed`.
pub fn simulate(scenario: &Scenario, plan: &SimulationPlan, binning: &BinningConfig) -> Result<Simulated> {
    scenario.validate()?;
    let seeds = SimulationSeeds::derive(scenario.seed);
    let reports = simulate_mmrs(scenario, plan.n_reports, seeds.mmr)?;
    let drive_test = simulate_drive_test(scenario, plan.dt_spacing, seeds.dt)?;
    let icdm_true = ground_truth_icdm(scenario, plan.truth_samples, binning, seeds.truth)?;
    let truth = GroundTruth {
        icdm_true,
        region_label_per_dt_record: drive_test.region_labels.clone(),
    };
    Ok(Simulated {
        reports,
        drive_test,
        truth,
    })
}

/// Received level in dBm under log-distance loss; distances clamp at 1 m.
pub fn rxlev(pathloss: &PathLoss, cell: &CellSite, x: f64, y: f64, shadowing_draw: f64) -> f64 {
    let d = (cell.x - x).hypot(cell.y - y).max(1.0);
    cell.tx_power - (pathloss.reference_loss_db + 10.0 * pathloss.exponent * d.log10()) + shadowing_draw
}

/// Quantize a level to the 0.1 dB resolution of the measurement files.
#[inline]
pub(crate) fn tenth_db(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}
