//! Ready-made scenarios used by the tests, the acceptance suite and the
//! `simulate --preset` command.

use serde::{Deserialize, Serialize};

use super::{CellSite, Hotspot, PathLoss, Scenario};
use crate::error::{Error, Result};

/// How much data to draw from a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub n_reports: usize,
    /// Arc-length spacing of DT samples, meters.
    pub dt_spacing: f64,
    pub truth_samples: usize,
}

impl Default for SimulationPlan {
    fn default() -> Self {
        SimulationPlan {
            n_reports: 5000,
            dt_spacing: 10.0,
            truth_samples: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub scenario: Scenario,
    pub plan: SimulationPlan,
}

type Builder = fn(u64) -> Preset;

const PRESETS: &[(&str, &str, Builder)] = &[
    ("toy", "three cells, one short road, twenty records", toy),
    ("regions8", "eight short road segments around the serving cell", regions8),
    ("fusion", "three strong neighbors missing from the BA list, road grid vs traffic hotspots", fusion),
    ("field-scale", "two crossing 3 km roads through a 124-site layout", field_scale),
];

/// Names and one-line descriptions of the bundled presets.
pub fn presets() -> impl Iterator<Item = (&'static str, &'static str)> {
    PRESETS.iter().map(|&(n, d, _)| (n, d))
}

pub fn preset(name: &str, seed: u64) -> Result<Preset> {
    PRESETS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, _, build)| build(seed))
        .ok_or_else(|| {
            let known: Vec<_> = PRESETS.iter().map(|p| p.0).collect();
            Error::Scenario(format!("unknown preset `{name}` (known: {})", known.join(", ")))
        })
}

/// Sites of hexagonal ring `ring` around the origin, counterclockwise from
/// the 30 degree corner.
pub fn hex_ring(ring: usize, isd: f64) -> Vec<(f64, f64)> {
    if ring == 0 {
        return vec![(0.0, 0.0)];
    }
    let corner = |k: usize| {
        let a = std::f64::consts::FRAC_PI_3 * k as f64 + std::f64::consts::FRAC_PI_6;
        (a.cos() * isd, a.sin() * isd)
    };
    let mut out = Vec::with_capacity(6 * ring);
    for side in 0..6 {
        let (sx, sy) = corner(side);
        let (nx, ny) = corner((side + 2) % 6);
        for step in 0..ring {
            let (r, s) = (ring as f64, step as f64);
            out.push((sx * r + nx * s, sy * r + ny * s));
        }
    }
    out
}

/// Serving cell `S` at the origin and rings `1..=rings` named `R{r}C{kk}`.
pub fn hex_layout(rings: usize, isd: f64, tx_power: f64) -> Vec<CellSite> {
    (0..=rings)
        .flat_map(|r| {
            hex_ring(r, isd).into_iter().enumerate().map(move |(k, (x, y))| CellSite {
                id: if r == 0 { "S".into() } else { format!("R{r}C{k:02}") },
                x,
                y,
                tx_power,
                channel: 0,
            })
        })
        .collect()
}

fn neighbors_except(cells: &[CellSite], skip: &[&str]) -> Vec<String> {
    cells
        .iter()
        .skip(1)
        .map(|c| c.id.clone())
        .filter(|id| !skip.contains(&id.as_str()))
        .collect()
}

pub fn toy(seed: u64) -> Preset {
    let cells = vec![
        CellSite { id: "S".into(), x: 0.0, y: 0.0, tx_power: 43.0, channel: 0 },
        CellSite { id: "A".into(), x: 800.0, y: 0.0, tx_power: 43.0, channel: 0 },
        CellSite { id: "B".into(), x: -400.0, y: 700.0, tx_power: 40.0, channel: 0 },
    ];
    Preset {
        name: "toy",
        scenario: Scenario {
            cells,
            serving_id: "S".into(),
            ba_list: vec!["A".into(), "B".into()],
            ba_epochs: vec![],
            traffic: vec![Hotspot { weight: 1.0, x: 250.0, y: 150.0, sigma: 200.0 }],
            roads: vec![vec![[150.0, -50.0], [150.0, 140.0]]],
            pathloss: PathLoss::default(),
            noise_floor: -121.0,
            detection_threshold: -110.0,
            seed,
            mmr_noise_db: 0.0,
            dt_noise_db: 0.0,
        },
        plan: SimulationPlan {
            n_reports: 20,
            dt_spacing: 10.0,
            truth_samples: 100_000,
        },
    }
}

/// Eight 80 m road segments on a 650 m circle around the serving cell, with
/// weak shadowing so each segment keeps a recognizable CIR profile. Region
/// labels of the drive test are the segment indices.
pub fn regions8(seed: u64) -> Preset {
    let cells = hex_layout(2, 1000.0, 43.0);
    let roads = (0..8)
        .map(|k| {
            let t = std::f64::consts::FRAC_PI_4 * k as f64 + 0.1;
            let (cx, cy) = (650.0 * t.cos(), 650.0 * t.sin());
            let (dx, dy) = (-40.0 * t.sin(), 40.0 * t.cos());
            vec![[cx - dx, cy - dy], [cx + dx, cy + dy]]
        })
        .collect();
    Preset {
        name: "regions8",
        scenario: Scenario {
            ba_list: neighbors_except(&cells, &[]),
            cells,
            serving_id: "S".into(),
            ba_epochs: vec![],
            traffic: vec![Hotspot { weight: 1.0, x: 0.0, y: 0.0, sigma: 400.0 }],
            roads,
            pathloss: PathLoss { shadowing_sigma_db: 1.0, ..PathLoss::default() },
            noise_floor: -115.0,
            detection_threshold: -105.0,
            seed,
            mmr_noise_db: 0.0,
            dt_noise_db: 0.0,
        },
        plan: SimulationPlan {
            dt_spacing: 5.0,
            ..SimulationPlan::default()
        },
    }
}

/// First-ring cells left out of the BA list in the `fusion` preset.
pub const FUSION_OMITTED: [&str; 3] = ["R1C00", "R1C02", "R1C04"];

/// Two hexagonal rings at 1 km spacing. The drive test sweeps an even 4x4
/// road grid while traffic sits in three hotspots, and three first-ring
/// neighbors are missing from the BA list.
pub fn fusion(seed: u64) -> Preset {
    let cells = hex_layout(2, 1000.0, 43.0);
    let e = 900.0;
    let g = e / 3.0;
    let mut roads = Vec::new();
    for k in 0..4 {
        let c = -e + 2.0 * e * k as f64 / 3.0;
        roads.push(vec![[-e, c], [e, c]]);
        roads.push(vec![[c, -e], [c, e]]);
    }
    Preset {
        name: "fusion",
        scenario: Scenario {
            ba_list: neighbors_except(&cells, &FUSION_OMITTED),
            cells,
            serving_id: "S".into(),
            ba_epochs: vec![],
            traffic: vec![
                Hotspot { weight: 0.55, x: g, y: g, sigma: 200.0 },
                Hotspot { weight: 0.30, x: -g, y: g, sigma: 200.0 },
                Hotspot { weight: 0.15, x: g, y: -g, sigma: 200.0 },
            ],
            roads,
            pathloss: PathLoss::default(),
            noise_floor: -115.0,
            detection_threshold: -105.0,
            seed,
            mmr_noise_db: 0.0,
            dt_noise_db: 0.0,
        },
        plan: SimulationPlan::default(),
    }
}

/// 124 sites (six hexagonal rings at 400 m, minus three outer corners) and
/// two perpendicular roads of 3040 m and 3030 m sampled every 10 m, giving
/// 609 DT records. The MMRs were collected under four successive BA lists
/// that together name the 103 nearest neighbors.
pub fn field_scale(seed: u64) -> Preset {
    let mut cells = hex_layout(6, 400.0, 43.0);
    cells.retain(|c| !["R6C00", "R6C12", "R6C24"].contains(&c.id.as_str()));
    let mut by_distance: Vec<&CellSite> = cells.iter().skip(1).collect();
    by_distance.sort_by(|p, q| p.x.hypot(p.y).total_cmp(&q.x.hypot(q.y)).then_with(|| p.id.cmp(&q.id)));
    let mut epochs = vec![Vec::new(); 4];
    for (i, c) in by_distance.iter().take(103).enumerate() {
        epochs[i % 4].push(c.id.clone());
    }
    Preset {
        name: "field-scale",
        scenario: Scenario {
            ba_list: epochs[3].clone(),
            ba_epochs: epochs,
            cells,
            serving_id: "S".into(),
            traffic: vec![
                Hotspot { weight: 0.5, x: 300.0, y: 200.0, sigma: 1200.0 },
                Hotspot { weight: 0.5, x: -400.0, y: -300.0, sigma: 1200.0 },
            ],
            roads: vec![
                vec![[-1520.0, 10.0], [1520.0, 10.0]],
                vec![[5.0, -1515.0], [5.0, 1515.0]],
            ],
            pathloss: PathLoss::default(),
            noise_floor: -121.0,
            detection_threshold: -120.0,
            seed,
            mmr_noise_db: 0.0,
            dt_noise_db: 0.0,
        },
        plan: SimulationPlan {
            n_reports: 20_000,
            ..SimulationPlan::default()
        },
    }
}
