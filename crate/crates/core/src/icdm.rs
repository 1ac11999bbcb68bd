//! ICDM rows and the metrics used to compare them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{ReinforcedMmrs, ReshapedDt};
use crate::source_data::{BinningConfig, DtMatrix, MmrsVector};

/// One serving cell's ICDM row: probability that the CIR against each
/// neighbor falls at or below the threshold interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Icdm {
    pub serving_id: String,
    pub entries: BTreeMap<String, f64>,
}

impl Icdm {
    pub fn new(serving_id: impl Into<String>, entries: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((id, p)) = entries.iter().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Icdm(format!("element for `{id}` is {p}, outside [0, 1]")));
        }
        Ok(Icdm {
            serving_id: serving_id.into(),
            entries,
        })
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.entries.get(id).copied()
    }

    /// Ids with a strictly positive element.
    pub fn support(&self) -> BTreeSet<&str> {
        self.entries
            .iter()
            .filter(|(_, &p)| p > 0.0)
            .map(|(id, _)| id.as_str())
            .collect()
    }
}

/// Denominator of an MMRs-derived element.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MmrsNormalization {
    /// Divide by the number of reports, so heavily loaded areas weigh more.
    #[default]
    TotalReports,
    /// Divide by the number of samples reported for that neighbor.
    PerNeighbor,
}

fn mmrs_element(block: &[u64], total: u64, binning: &BinningConfig, norm: MmrsNormalization) -> f64 {
    let severe: u64 = block[..binning.q_threshold()].iter().sum();
    let denom = match norm {
        MmrsNormalization::TotalReports => total,
        MmrsNormalization::PerNeighbor => block.iter().sum(),
    };
    if denom == 0 {
        0.0
    } else {
        (severe as f64 / denom as f64).min(1.0)
    }
}

fn check_q(q: usize, binning: &BinningConfig) -> Result<()> {
    if q != binning.q() {
        return Err(Error::Icdm(format!("data binned with Q={q}, binning has Q={}", binning.q())));
    }
    Ok(())
}

pub fn icdm_from_mmrs(mmrs: &MmrsVector, binning: &BinningConfig, norm: MmrsNormalization) -> Result<Icdm> {
    check_q(mmrs.q(), binning)?;
    if mmrs.total_reports() == 0 {
        return Err(Error::Icdm("no MMRs reports".into()));
    }
    let entries = (0..mmrs.j())
        .map(|j| {
            let p = mmrs_element(mmrs.block(j), mmrs.total_reports(), binning, norm);
            (mmrs.neighbor_ids()[j].clone(), p)
        })
        .collect();
    Icdm::new(mmrs.serving_id(), entries)
}

/// Same rule as [`icdm_from_mmrs`]; appended cells share the base report count.
pub fn icdm_from_reinforced(
    mmrs: &ReinforcedMmrs,
    binning: &BinningConfig,
    norm: MmrsNormalization,
) -> Result<Icdm> {
    check_q(mmrs.base().q(), binning)?;
    let total = mmrs.total_reports();
    if total == 0 {
        return Err(Error::Icdm("no MMRs reports".into()));
    }
    let entries = mmrs
        .blocks()
        .map(|(id, block)| (id.to_string(), mmrs_element(block, total, binning, norm)))
        .collect();
    Icdm::new(mmrs.base().serving_id(), entries)
}

fn dt_icdm_over(dt: &DtMatrix, picks: impl Iterator<Item = usize>, records: usize, binning: &BinningConfig) -> Result<Icdm> {
    if records == 0 {
        return Err(Error::Icdm("no DT records".into()));
    }
    let mut hits = vec![0u64; dt.i()];
    for m in picks {
        for (h, v) in hits.iter_mut().zip(dt.column(m)) {
            if let Some(c) = v {
                if binning.is_severe(binning.bin(*c)) {
                    *h += 1;
                }
            }
        }
    }
    let entries = dt
        .neighbor_ids()
        .iter()
        .zip(hits)
        .map(|(id, h)| (id.clone(), h as f64 / records as f64))
        .collect();
    Icdm::new(dt.serving_id(), entries)
}

/// Fraction of records in which the neighbor was detected below threshold.
pub fn icdm_from_dt(dt: &DtMatrix, binning: &BinningConfig) -> Result<Icdm> {
    dt_icdm_over(dt, 0..dt.m(), dt.m(), binning)
}

pub fn icdm_from_reshaped(dt: &ReshapedDt, binning: &BinningConfig) -> Result<Icdm> {
    dt_icdm_over(dt.source(), dt.picks().iter().copied(), dt.len(), binning)
}

/// Which neighbor ids a comparison runs over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    #[default]
    Intersection,
    /// Union of both rows, absent entries read as 0.
    UnionZeros,
}

fn paired(a: &Icdm, b: &Icdm, support: Support) -> Vec<(f64, f64)> {
    match support {
        Support::Intersection => a
            .entries
            .iter()
            .filter_map(|(id, &x)| b.get(id).map(|y| (x, y)))
            .collect(),
        Support::UnionZeros => {
            let ids: BTreeSet<&String> = a.entries.keys().chain(b.entries.keys()).collect();
            ids.into_iter()
                .map(|id| (a.get(id).unwrap_or(0.0), b.get(id).unwrap_or(0.0)))
                .collect()
        }
    }
}

/// Pearson correlation of the paired elements of two rows.
pub fn pearson(a: &Icdm, b: &Icdm, support: Support) -> Result<f64> {
    let pairs = paired(a, b, support);
    if pairs.len() < 2 {
        return Err(Error::Icdm(format!("need at least 2 shared neighbors, have {}", pairs.len())));
    }
    let n = pairs.len() as f64;
    let (mx, my) = pairs
        .iter()
        .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x / n, sy + y / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Icdm("correlation undefined for a constant series".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImError {
    pub mae: f64,
    pub max_ae: f64,
    pub support_mismatch: usize,
}

/// Absolute errors over the union of ids (missing entries count as 0), and
/// the number of ids whose zero/nonzero status differs.
pub fn im_error(estimate: &Icdm, truth: &Icdm) -> ImError {
    let pairs = paired(estimate, truth, Support::UnionZeros);
    if pairs.is_empty() {
        return ImError { mae: 0.0, max_ae: 0.0, support_mismatch: 0 };
    }
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    let mut mismatch = 0;
    for (e, t) in &pairs {
        let d = (e - t).abs();
        sum += d;
        max = max.max(d);
        if (*e > 0.0) != (*t > 0.0) {
            mismatch += 1;
        }
    }
    ImError {
        mae: sum / pairs.len() as f64,
        max_ae: max,
        support_mismatch: mismatch,
    }
}
