use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{rxlev, tenth_db, Scenario};
use crate::error::{Error, Result};
use crate::source_data::{DtRecord, MmrReport, Reading, MAX_REPORTED_NEIGHBORS};

/// Draws positions from the scenario's traffic mixture.
pub(crate) struct TrafficSampler {
    pick: WeightedIndex<f64>,
}

impl TrafficSampler {
    pub(crate) fn new(scenario: &Scenario) -> Result<Self> {
        let pick = WeightedIndex::new(scenario.traffic.iter().map(|h| h.weight))
            .map_err(|e| Error::Scenario(format!("traffic weights: {e}")))?;
        Ok(TrafficSampler { pick })
    }

    pub(crate) fn sample(&self, scenario: &Scenario, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let h = &scenario.traffic[self.pick.sample(rng)];
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        (h.x + h.sigma * dx, h.y + h.sigma * dy)
    }
}

/// Level of every cell at a position, shadowing drawn i.i.d. per cell in
/// layout order, plus optional measurement noise.
pub(crate) fn levels_at(
    scenario: &Scenario,
    x: f64,
    y: f64,
    noise_db: f64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<f64>,
) {
    out.clear();
    let sigma = scenario.pathloss.shadowing_sigma_db;
    for cell in &scenario.cells {
        let z: f64 = rng.sample(StandardNormal);
        let mut level = rxlev(&scenario.pathloss, cell, x, y, sigma * z);
        if noise_db > 0.0 {
            let e: f64 = rng.sample(StandardNormal);
            level += noise_db * e;
        }
        out.push(level);
    }
}

/// Simulate `n_reports` MMRs from positions drawn from the traffic density.
///
/// Each report carries the serving level and the six strongest detectable
/// cells of the BA list in force, strongest first. Levels are quantized to
/// 0.1 dB.
pub fn simulate_mmrs(scenario: &Scenario, n_reports: usize, seed: u64) -> Result<Vec<MmrReport>> {
    if n_reports == 0 {
        return Err(Error::Scenario("need at least one MMR".into()));
    }
    let serving_index = scenario
        .cells
        .iter()
        .position(|c| c.id == scenario.serving_id)
        .ok_or_else(|| Error::Scenario(format!("serving cell `{}` is not in the layout", scenario.serving_id)))?;
    let lists: Vec<Vec<usize>> = scenario
        .mmr_lists()
        .iter()
        .map(|list| {
            list.iter()
                .map(|id| {
                    scenario
                        .cells
                        .iter()
                        .position(|c| &c.id == id)
                        .ok_or_else(|| Error::Scenario(format!("BA list names unknown cell `{id}`")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let sampler = TrafficSampler::new(scenario)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = Vec::with_capacity(scenario.cells.len());
    let mut reports = Vec::with_capacity(n_reports);
    for r in 0..n_reports {
        let list = &lists[r * lists.len() / n_reports];
        let (x, y) = sampler.sample(scenario, &mut rng);
        levels_at(scenario, x, y, scenario.mmr_noise_db, &mut rng, &mut levels);

        let mut candidates: Vec<(usize, f64)> = list
            .iter()
            .map(|&c| (c, tenth_db(levels[c])))
            .filter(|&(_, l)| l >= scenario.detection_threshold)
            .collect();
        candidates.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| scenario.cells[a.0].id.cmp(&scenario.cells[b.0].id))
        });
        candidates.truncate(MAX_REPORTED_NEIGHBORS);
        reports.push(MmrReport {
            serving_id: scenario.serving_id.clone(),
            serving_rxlev: tenth_db(levels[serving_index]),
            neighbors: candidates
                .into_iter()
                .map(|(c, l)| Reading::new(scenario.cells[c].id.clone(), l))
                .collect(),
        });
    }
    Ok(reports)
}

/// Drive-test output: records, the road each came from, and the number of
/// sample points dropped because the serving cell was not detected.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveTest {
    pub records: Vec<DtRecord>,
    pub region_labels: Vec<usize>,
    pub skipped: usize,
}

/// Points at arc length `0, spacing, 2*spacing, ...` along a polyline.
pub(crate) fn road_points(road: &[[f64; 2]], spacing: f64) -> Vec<(f64, f64)> {
    let seg_len: Vec<f64> = road
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .collect();
    let total: f64 = seg_len.iter().sum();
    let count = (total / spacing + 1e-9).floor() as usize + 1;
    let mut points = Vec::with_capacity(count);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for j in 0..count {
        let s = j as f64 * spacing;
        while seg + 1 < seg_len.len() && s > seg_start + seg_len[seg] {
            seg_start += seg_len[seg];
            seg += 1;
        }
        let t = if seg_len[seg] > 0.0 {
            ((s - seg_start) / seg_len[seg]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (a, b) = (road[seg], road[seg + 1]);
        points.push((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])));
    }
    points
}

/// Sweep every road at uniform arc-length spacing, recording all cells at or
/// above the detection threshold regardless of any BA list.
pub fn simulate_drive_test(scenario: &Scenario, sample_spacing: f64, seed: u64) -> Result<DriveTest> {
    if scenario.roads.is_empty() {
        return Err(Error::NoDtRecords("scenario has no roads".into()));
    }
    if !(sample_spacing > 0.0) {
        return Err(Error::Scenario(format!("sample spacing must be positive, got {sample_spacing}")));
    }
    let serving_index = scenario
        .cells
        .iter()
        .position(|c| c.id == scenario.serving_id)
        .ok_or_else(|| Error::Scenario(format!("serving cell `{}` is not in the layout", scenario.serving_id)))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = Vec::with_capacity(scenario.cells.len());
    let mut out = DriveTest {
        records: Vec::new(),
        region_labels: Vec::new(),
        skipped: 0,
    };
    for (road_index, road) in scenario.roads.iter().enumerate() {
        for (x, y) in road_points(road, sample_spacing) {
            levels_at(scenario, x, y, scenario.dt_noise_db, &mut rng, &mut levels);
            let quantized: Vec<f64> = levels.iter().map(|&l| tenth_db(l)).collect();
            if quantized[serving_index] < scenario.detection_threshold {
                out.skipped += 1;
                continue;
            }
            let readings = scenario
                .cells
                .iter()
                .zip(&quantized)
                .filter(|(_, &l)| l >= scenario.detection_threshold)
                .map(|(c, &l)| Reading::new(c.id.clone(), l))
                .collect();
            out.records.push(DtRecord { x, y, readings });
            out.region_labels.push(road_index);
        }
    }
    if out.records.is_empty() {
        return Err(Error::NoDtRecords(format!(
            "serving cell undetected at all {} sample points",
            out.skipped
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{CellSite, Hotspot, PathLoss};
    use std::collections::{BTreeMap, HashSet};

    fn cell(id: &str, x: f64, y: f64) -> CellSite {
        CellSite { id: id.into(), x, y, tx_power: 43.0, channel: 0 }
    }

    fn scenario(neighbors: usize) -> Scenario {
        let mut cells = vec![cell("S", 0.0, 0.0)];
        let mut ba = Vec::new();
        for i in 0..neighbors {
            let a = i as f64 * std::f64::consts::TAU / neighbors as f64;
            let id = format!("N{i:02}");
            cells.push(cell(&id, 900.0 * a.cos(), 900.0 * a.sin()));
            ba.push(id);
        }
        Scenario {
            cells,
            serving_id: "S".into(),
            ba_list: ba,
            ba_epochs: vec![],
            traffic: vec![Hotspot { weight: 1.0, x: 100.0, y: 0.0, sigma: 150.0 }],
            roads: vec![vec![[0.0, 0.0], [1000.0, 0.0]]],
            pathloss: PathLoss::default(),
            noise_floor: -121.0,
            detection_threshold: -200.0,
            seed: 1,
            mmr_noise_db: 0.0,
            dt_noise_db: 0.0,
        }
    }

    #[test]
    fn few_candidates_all_reported() {
        let reports = simulate_mmrs(&scenario(3), 200, 9).unwrap();
        assert!(reports.iter().all(|r| r.neighbors.len() == 3));
    }

    #[test]
    fn six_strongest_of_ten() {
        let s = scenario(10);
        let reports = simulate_mmrs(&s, 200, 4).unwrap();
        for r in &reports {
            assert_eq!(r.neighbors.len(), 6);
            assert!(r.neighbors.windows(2).all(|w| w[0].rxlev >= w[1].rxlev));
        }
    }

    #[test]
    fn reports_are_strongest_against_recomputation() {
        // replay the generator's draws and check each report keeps the top six
        let s = scenario(10);
        let reports = simulate_mmrs(&s, 50, 77).unwrap();
        let sampler = TrafficSampler::new(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut levels = Vec::new();
        for r in &reports {
            let (x, y) = sampler.sample(&s, &mut rng);
            levels_at(&s, x, y, 0.0, &mut rng, &mut levels);
            let mut all: Vec<(String, f64)> = s.cells[1..]
                .iter()
                .zip(&levels[1..])
                .map(|(c, &l)| (c.id.clone(), tenth_db(l)))
                .collect();
            all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let expected: Vec<&str> = all.iter().take(6).map(|(id, _)| id.as_str()).collect();
            let got: Vec<&str> = r.neighbors.iter().map(|n| n.id.as_str()).collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn edge_hotspot_frequencies_reproduce() {
        let mut s = scenario(6);
        s.traffic = vec![Hotspot { weight: 1.0, x: 450.0, y: 0.0, sigma: 60.0 }];
        s.detection_threshold = -95.0;
        let tally = |reports: &[MmrReport]| {
            let mut m = BTreeMap::new();
            for r in reports {
                for n in &r.neighbors {
                    *m.entry(n.id.clone()).or_insert(0usize) += 1;
                }
            }
            m
        };
        let a = tally(&simulate_mmrs(&s, 2000, 5).unwrap());
        let b = tally(&simulate_mmrs(&s, 2000, 5).unwrap());
        assert_eq!(a, b);
        // the neighbor facing the hotspot is reported most often
        let top = a.iter().max_by_key(|(_, &v)| v).unwrap().0;
        assert_eq!(top, "N00");
    }

    #[test]
    fn ba_list_restricts_reports() {
        let mut s = scenario(8);
        s.ba_list.retain(|id| id != "N00" && id != "N01");
        let reports = simulate_mmrs(&s, 300, 2).unwrap();
        let ba: HashSet<&str> = s.ba_list.iter().map(String::as_str).collect();
        assert!(reports.iter().flat_map(|r| &r.neighbors).all(|n| ba.contains(n.id.as_str())));
        let dt = simulate_drive_test(&s, 50.0, 2).unwrap();
        assert!(dt.records.iter().any(|r| r.rxlev_of("N00").is_some()));
    }

    #[test]
    fn straight_road_record_count() {
        let dt = simulate_drive_test(&scenario(3), 10.0, 1).unwrap();
        assert_eq!(dt.records.len(), 101);
        assert_eq!(dt.skipped, 0);
        assert_eq!((dt.records[100].x, dt.records[100].y), (1000.0, 0.0));
        assert!((dt.records[37].x - 370.0).abs() < 1e-9);
    }

    #[test]
    fn polyline_spacing_follows_arc_length() {
        let pts = road_points(&[[0.0, 0.0], [30.0, 0.0], [30.0, 40.0]], 20.0);
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1], (20.0, 0.0));
        assert!((pts[2].0 - 30.0).abs() < 1e-12 && (pts[2].1 - 10.0).abs() < 1e-12);
        assert!((pts[3].1 - 30.0).abs() < 1e-12);
    }

    #[test]
    fn drive_test_is_deterministic() {
        let s = scenario(5);
        let a = simulate_drive_test(&s, 25.0, 8).unwrap();
        let b = simulate_drive_test(&s, 25.0, 8).unwrap();
        assert_eq!(a, b);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            for (x, y) in ra.readings.iter().zip(&rb.readings) {
                assert_eq!(x.rxlev.to_bits(), y.rxlev.to_bits());
            }
        }
    }

    #[test]
    fn drive_test_errors() {
        let mut s = scenario(3);
        assert!(simulate_drive_test(&s, 0.0, 1).is_err());
        s.detection_threshold = 50.0;
        assert!(matches!(simulate_drive_test(&s, 10.0, 1), Err(Error::NoDtRecords(_))));
        s.roads.clear();
        assert!(matches!(simulate_drive_test(&s, 10.0, 1), Err(Error::NoDtRecords(_))));
    }

    #[test]
    fn weak_serving_points_are_skipped() {
        let mut s = scenario(3);
        s.pathloss.shadowing_sigma_db = 0.0;
        // serving drops below -95 dBm about 720 m out
        s.detection_threshold = -95.0;
        let dt = simulate_drive_test(&s, 10.0, 3).unwrap();
        assert!(dt.skipped > 0);
        assert_eq!(dt.records.len() + dt.skipped, 101);
    }

    #[test]
    fn missing_serving_is_error() {
        let mut s = scenario(3);
        s.serving_id = "nope".into();
        assert!(simulate_mmrs(&s, 10, 1).is_err());
    }
}
