use std::collections::{BTreeMap, BTreeSet};

use super::binning::{cir, BinningConfig};
use super::records::{MmrReport, MAX_REPORTED_NEIGHBORS};
use crate::error::{Error, Result};

/// Binned MMRs data: per neighbor `j` and interval `q`, the number of CIR
/// samples that fell into that interval.
///
/// Counts are stored neighbor-major, so neighbor `j` (0-based) owns the slice
/// `counts[j*Q .. (j+1)*Q]` and interval `q` (1-based) sits at `j*Q + q - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmrsVector {
    serving_id: String,
    neighbor_ids: Vec<String>,
    q: usize,
    counts: Vec<u64>,
    total_reports: u64,
}

impl MmrsVector {
    pub fn from_parts(
        serving_id: String,
        neighbor_ids: Vec<String>,
        q: usize,
        counts: Vec<u64>,
        total_reports: u64,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::Measurement(format!("Q must be >= 2, got {q}")));
        }
        if counts.len() != neighbor_ids.len() * q {
            return Err(Error::Measurement(format!(
                "expected {} counts for J={} and Q={q}, got {}",
                neighbor_ids.len() * q,
                neighbor_ids.len(),
                counts.len()
            )));
        }
        let distinct: BTreeSet<&str> = neighbor_ids.iter().map(String::as_str).collect();
        if distinct.len() != neighbor_ids.len() {
            return Err(Error::Measurement("duplicate neighbor id in MMRs vector".into()));
        }
        let total: u64 = counts.iter().sum();
        if total > MAX_REPORTED_NEIGHBORS as u64 * total_reports {
            return Err(Error::Measurement(format!(
                "{total} CIR samples cannot come from {total_reports} reports"
            )));
        }
        Ok(MmrsVector {
            serving_id,
            neighbor_ids,
            q,
            counts,
            total_reports,
        })
    }

    pub fn serving_id(&self) -> &str {
        &self.serving_id
    }

    pub fn neighbor_ids(&self) -> &[String] {
        &self.neighbor_ids
    }

    /// Number of neighbors `J`.
    pub fn j(&self) -> usize {
        self.neighbor_ids.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_reports(&self) -> u64 {
        self.total_reports
    }

    pub fn block(&self, j: usize) -> &[u64] {
        &self.counts[j * self.q..(j + 1) * self.q]
    }

    /// `r_{j,q}` with `j` 0-based and `q` in `1..=Q`.
    pub fn count(&self, j: usize, q: usize) -> u64 {
        self.counts[j * self.q + q - 1]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.neighbor_ids.iter().position(|n| n == id)
    }

    pub fn total_samples(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Reorder the neighbor blocks; `order[new] = old`.
    pub(crate) fn permuted(&self, order: &[usize]) -> MmrsVector {
        let q = self.q;
        let mut counts = Vec::with_capacity(self.counts.len());
        for &old in order {
            counts.extend_from_slice(&self.counts[old * q..(old + 1) * q]);
        }
        MmrsVector {
            serving_id: self.serving_id.clone(),
            neighbor_ids: order.iter().map(|&o| self.neighbor_ids[o].clone()).collect(),
            q,
            counts,
            total_reports: self.total_reports,
        }
    }
}

/// Bin every (report, neighbor) CIR sample into the `R` vector.
///
/// Neighbor rows are ordered lexicographically by cell id. An empty report
/// list yields `J = 0` with an empty serving id.
pub fn build_mmrs_vector(reports: &[MmrReport], binning: &BinningConfig) -> Result<MmrsVector> {
    let q = binning.q();
    let Some(first) = reports.first() else {
        return MmrsVector::from_parts(String::new(), Vec::new(), q, Vec::new(), 0);
    };
    let serving = first.serving_id.clone();

    let mut tallies: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    for report in reports {
        if report.serving_id != serving {
            return Err(Error::MixedServing {
                expected: serving,
                found: report.serving_id.clone(),
            });
        }
        report.validate()?;
        for n in &report.neighbors {
            let slot = binning.bin(cir(report.serving_rxlev, n.rxlev)) - 1;
            tallies.entry(n.id.as_str()).or_insert_with(|| vec![0; q])[slot] += 1;
        }
    }

    let neighbor_ids = tallies.keys().map(|s| s.to_string()).collect();
    let counts = tallies.into_values().flatten().collect();
    MmrsVector::from_parts(serving, neighbor_ids, q, counts, reports.len() as u64)
}
