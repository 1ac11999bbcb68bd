use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Carrier-to-interference ratio of a serving/neighbor pair in dB.
#[inline]
pub fn cir(serving_rxlev: f64, neighbor_rxlev: f64) -> f64 {
    serving_rxlev - neighbor_rxlev
}

/// Partition of the CIR axis into `Q` ordered intervals.
///
/// Interval `q` (1-based) covers `[edges[q-2], edges[q-1])`, with interval 1
/// open below and interval `Q` open above, so low indices mean strong
/// interference. An ICDM element counts samples in intervals
/// `1..=q_threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBinning", into = "RawBinning")]
pub struct BinningConfig {
    edges: Vec<f64>,
    q_threshold: usize,
}

#[derive(Serialize, Deserialize)]
struct RawBinning {
    edges: Vec<f64>,
    q_threshold: usize,
}

impl TryFrom<RawBinning> for BinningConfig {
    type Error = Error;

    fn try_from(raw: RawBinning) -> Result<Self> {
        BinningConfig::new(raw.edges, raw.q_threshold)
    }
}

impl From<BinningConfig> for RawBinning {
    fn from(b: BinningConfig) -> Self {
        RawBinning {
            edges: b.edges,
            q_threshold: b.q_threshold,
        }
    }
}

pub const DEFAULT_EDGES: [f64; 9] = [-6.0, -3.0, 0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0];
pub const DEFAULT_Q_THRESHOLD: usize = 6;

impl Default for BinningConfig {
    /// Q = 10 with 3 dB steps; the threshold sits at 9 dB.
    fn default() -> Self {
        BinningConfig {
            edges: DEFAULT_EDGES.to_vec(),
            q_threshold: DEFAULT_Q_THRESHOLD,
        }
    }
}

impl BinningConfig {
    pub fn new(edges: Vec<f64>, q_threshold: usize) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Binning("need at least one edge (Q >= 2)".into()));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::Binning("edges must be finite".into()));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Binning("edges must be strictly increasing".into()));
        }
        let q = edges.len() + 1;
        if q_threshold < 1 || q_threshold >= q {
            return Err(Error::Binning(format!(
                "q_threshold must satisfy 1 <= q_threshold < Q={q}, got {q_threshold}"
            )));
        }
        Ok(BinningConfig { edges, q_threshold })
    }

    /// Same edges, different threshold.
    pub fn with_q_threshold(&self, q_threshold: usize) -> Result<Self> {
        BinningConfig::new(self.edges.clone(), q_threshold)
    }

    /// Number of intervals `Q`.
    pub fn q(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn q_threshold(&self) -> usize {
        self.q_threshold
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// CIR value separating interval `q_threshold` from `q_threshold + 1`.
    pub fn cir_threshold(&self) -> f64 {
        self.edges[self.q_threshold - 1]
    }

    /// Interval index in `1..=Q`.
    pub fn bin(&self, cir: f64) -> usize {
        1 + self.edges.partition_point(|&e| e <= cir)
    }

    #[inline]
    pub fn is_severe(&self, q: usize) -> bool {
        q >= 1 && q <= self.q_threshold
    }
}

pub fn bin_cir(cir: f64, binning: &BinningConfig) -> usize {
    binning.bin(cir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cir_examples() {
        assert_eq!(cir(-60.0, -60.0), 0.0);
        assert_eq!(cir(-55.0, -70.0), 15.0);
        assert_eq!(cir(-80.0, -60.0), -20.0);
    }

    #[test]
    fn bin_examples() {
        let b = BinningConfig::default();
        assert_eq!(b.q(), 10);
        assert_eq!(b.bin(-10.0), 1);
        assert_eq!(b.bin(9.0), 7);
        assert_eq!(b.bin(100.0), 10);
        // half-open: the edge value belongs to the upper interval
        assert_eq!(b.bin(-6.0), 2);
        assert_eq!(b.bin(-6.0 - 1e-9), 1);
        assert_eq!(b.bin(18.0), 10);
    }

    #[test]
    fn default_threshold_is_nine_db() {
        let b = BinningConfig::default();
        assert_eq!(b.q_threshold(), 6);
        assert_eq!(b.cir_threshold(), 9.0);
        assert!(b.is_severe(6));
        assert!(!b.is_severe(7));
        assert!(b.bin(8.99) <= 6);
        assert!(b.bin(9.0) > 6);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(BinningConfig::new(vec![], 1).is_err());
        assert!(BinningConfig::new(vec![1.0, 1.0], 1).is_err());
        assert!(BinningConfig::new(vec![2.0, 1.0], 1).is_err());
        assert!(BinningConfig::new(vec![0.0, 1.0], 0).is_err());
        assert!(BinningConfig::new(vec![0.0, 1.0], 3).is_err());
        assert!(BinningConfig::new(vec![0.0, f64::NAN], 1).is_err());
        assert!(BinningConfig::new(vec![0.0], 1).is_ok());
    }

    #[test]
    fn serde_validates() {
        let ok: BinningConfig =
            serde_json::from_str(r#"{"edges":[-3.0,0.0,3.0],"q_threshold":2}"#).unwrap();
        assert_eq!(ok.q(), 4);
        let bad = serde_json::from_str::<BinningConfig>(r#"{"edges":[3.0,0.0],"q_threshold":1}"#);
        assert!(bad.is_err());
    }

    proptest! {
        #[test]
        fn bin_is_total_and_monotone(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let cfg = BinningConfig::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (ql, qh) = (cfg.bin(lo), cfg.bin(hi));
            prop_assert!((1..=cfg.q()).contains(&ql));
            prop_assert!((1..=cfg.q()).contains(&qh));
            prop_assert!(ql <= qh);
        }
    }
}
