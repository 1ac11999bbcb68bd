//! Data fusion. Fusion I appends DT-recovered severe interferers to the MMRs
//! data; fusion II replicates DT records so each set carries its estimated
//! traffic instead of its drive-test sample count.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::ClusterModel;
use crate::error::{Error, Result};
use crate::regression::TrafficEstimate;
use crate::source_data::{BinningConfig, CellIndexMap, DtMatrix, MmrsVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    /// A DT-only cell is severe when its weighted sub-threshold mass exceeds
    /// this value (strictly).
    pub min_weight: f64,
    /// Add the intercept `beta_0` to every completed count.
    pub include_intercept: bool,
    pub seed: u64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            min_weight: 0.0,
            include_intercept: true,
            seed: 0,
        }
    }
}

/// Weighted sub-threshold mass `sum_{q<=Qth} sum_k max(0,beta_k) c_{row,q,k}`
/// of one DT row.
pub fn severe_weight(
    cluster: &ClusterModel,
    beta: &TrafficEstimate,
    dt_row: usize,
    binning: &BinningConfig,
) -> f64 {
    let q = binning.q();
    (0..cluster.k())
        .map(|k| {
            let w = beta.clamped(k + 1);
            if w == 0.0 {
                return 0.0;
            }
            let mass: f64 = (1..=binning.q_threshold())
                .map(|qq| cluster.center_value(dt_row * q + qq - 1, k))
                .sum();
            w * mass
        })
        .sum()
}

/// DT-only cells that act as severe interferers somewhere in the estimated
/// traffic, in DT row order.
pub fn find_omitted_severe(
    cluster: &ClusterModel,
    beta: &TrafficEstimate,
    map: &CellIndexMap,
    binning: &BinningConfig,
    min_weight: f64,
) -> Vec<String> {
    let n = map.n_common();
    map.dt_only_ids()
        .iter()
        .enumerate()
        .filter(|(offset, _)| severe_weight(cluster, beta, n + offset, binning) > min_weight)
        .map(|(_, id)| id.clone())
        .collect()
}

/// Real-valued completed counts `[1 | C''] beta` for the given DT-only
/// cells, `Q` values per cell, before rounding.
pub fn complete_mmrs_real(
    cluster: &ClusterModel,
    beta: &TrafficEstimate,
    map: &CellIndexMap,
    omitted: &[String],
    q: usize,
    include_intercept: bool,
) -> Result<Vec<f64>> {
    let intercept = if include_intercept { beta.intercept() } else { 0.0 };
    let mut out = Vec::with_capacity(omitted.len() * q);
    for id in omitted {
        let row = map
            .dt_row(id)
            .filter(|&r| r >= map.n_common())
            .ok_or_else(|| Error::Fusion(format!("`{id}` is not a DT-only cell")))?;
        for qq in 0..q {
            let v: f64 = (0..cluster.k())
                .map(|k| beta.clamped(k + 1) * cluster.center_value(row * q + qq, k))
                .sum();
            out.push(intercept + v);
        }
    }
    Ok(out)
}

/// Round half-up, floor at zero.
pub fn round_counts(values: &[f64]) -> Vec<u64> {
    values
        .iter()
        .map(|&v| {
            let r = (v + 0.5).floor();
            if r > 0.0 {
                r as u64
            } else {
                0
            }
        })
        .collect()
}

/// Completed MMRs data `R''` for the omitted cells.
pub fn complete_mmrs(
    cluster: &ClusterModel,
    beta: &TrafficEstimate,
    map: &CellIndexMap,
    omitted: &[String],
    q: usize,
    include_intercept: bool,
) -> Result<Vec<u64>> {
    complete_mmrs_real(cluster, beta, map, omitted, q, include_intercept).map(|v| round_counts(&v))
}

/// Reinforced MMRs data: the original vector followed by completed blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ReinforcedMmrs {
    base: MmrsVector,
    appended_ids: Vec<String>,
    appended_counts: Vec<u64>,
}

impl ReinforcedMmrs {
    pub fn base(&self) -> &MmrsVector {
        &self.base
    }

    pub fn appended_ids(&self) -> &[String] {
        &self.appended_ids
    }

    pub fn appended_counts(&self) -> &[u64] {
        &self.appended_counts
    }

    pub fn appended_block(&self, n: usize) -> &[u64] {
        let q = self.base.q();
        &self.appended_counts[n * q..(n + 1) * q]
    }

    /// All neighbor ids, base first.
    pub fn neighbor_ids(&self) -> impl Iterator<Item = &String> {
        self.base.neighbor_ids().iter().chain(&self.appended_ids)
    }

    /// `(id, Q counts)` for every neighbor, base first.
    pub fn blocks(&self) -> impl Iterator<Item = (&str, &[u64])> {
        let q = self.base.q();
        let base = (0..self.base.j()).map(move |j| (self.base.neighbor_ids()[j].as_str(), self.base.block(j)));
        let extra = self
            .appended_ids
            .iter()
            .zip(self.appended_counts.chunks(q))
            .map(|(id, c)| (id.as_str(), c));
        base.chain(extra)
    }

    pub fn total_reports(&self) -> u64 {
        self.base.total_reports()
    }
}

/// Concatenate `R` with `R''`.
pub fn reinforce(mmrs: &MmrsVector, completed: Vec<u64>, omitted: &[String]) -> Result<ReinforcedMmrs> {
    if completed.len() != omitted.len() * mmrs.q() {
        return Err(Error::Fusion(format!(
            "{} completed counts do not match {} cells of Q={}",
            completed.len(),
            omitted.len(),
            mmrs.q()
        )));
    }
    let mut seen: HashSet<&str> = mmrs.neighbor_ids().iter().map(String::as_str).collect();
    for id in omitted {
        if !seen.insert(id.as_str()) {
            return Err(Error::Fusion(format!("`{id}` is already present in the MMRs data")));
        }
    }
    Ok(ReinforcedMmrs {
        base: mmrs.clone(),
        appended_ids: omitted.to_vec(),
        appended_counts: completed,
    })
}

/// Replication plan for one DT set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetTarget {
    /// 1-based set number.
    pub set: usize,
    pub size: usize,
    pub target: u64,
    pub copies: u64,
    pub extra: u64,
}

/// DT data with the set distribution changed from `B` to `floor(beta)`.
///
/// Stores the source column of every output record instead of duplicating
/// CIR values; [`ReshapedDt::to_matrix`] materializes it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReshapedDt {
    source: DtMatrix,
    picks: Vec<usize>,
    per_set_targets: Vec<SetTarget>,
}

impl ReshapedDt {
    pub fn source(&self) -> &DtMatrix {
        &self.source
    }

    /// Source column index of each reshaped record.
    pub fn picks(&self) -> &[usize] {
        &self.picks
    }

    pub fn per_set_targets(&self) -> &[SetTarget] {
        &self.per_set_targets
    }

    pub fn len(&self) -> usize {
        self.picks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.picks.is_empty()
    }

    pub fn to_matrix(&self) -> Result<DtMatrix> {
        self.source.select_columns(&self.picks)
    }
}

/// Replicate each set `k` to `T_k = floor(max(0, beta_k))` records: every
/// record `E_k = T_k / b_k` times, then `F_k = T_k mod b_k` distinct records
/// drawn without replacement. The intercept contributes nothing.
///
/// Output order is ascending set, then the `E_k` passes over the set in input
/// order, then the sampled extras in input order.
pub fn reshape_dt(
    dt: &DtMatrix,
    cluster: &ClusterModel,
    beta: &TrafficEstimate,
    seed: u64,
) -> Result<ReshapedDt> {
    if cluster.membership().len() != dt.m() {
        return Err(Error::Fusion(format!(
            "membership covers {} records, DT matrix has {}",
            cluster.membership().len(),
            dt.m()
        )));
    }
    if beta.k() != cluster.k() {
        return Err(Error::Fusion(format!(
            "traffic estimate has {} clusters, model has {}",
            beta.k(),
            cluster.k()
        )));
    }
    let mut picks = Vec::new();
    let mut targets = Vec::with_capacity(cluster.k());
    for k in 0..cluster.k() {
        let members = cluster.members(k);
        let size = members.len();
        let target = beta.clamped(k + 1).floor() as u64;
        if size == 0 {
            if target > 0 {
                return Err(Error::Fusion(format!("set {} is empty but needs {target} records", k + 1)));
            }
            targets.push(SetTarget { set: k + 1, size, target, copies: 0, extra: 0 });
            continue;
        }
        let copies = target / size as u64;
        let extra = target % size as u64;
        for _ in 0..copies {
            picks.extend_from_slice(&members);
        }
        if extra > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64 + 1);
            let mut chosen: Vec<usize> = sample(&mut rng, size, extra as usize).into_vec();
            chosen.sort_unstable();
            picks.extend(chosen.into_iter().map(|i| members[i]));
        }
        targets.push(SetTarget { set: k + 1, size, target, copies, extra });
    }
    if picks.is_empty() {
        return Err(Error::Fusion("every set has a zero traffic target".into()));
    }
    Ok(ReshapedDt {
        source: dt.clone(),
        picks,
        per_set_targets: targets,
    })
}
