//! Traffic estimation: stepwise regression of the MMRs counts on the cluster
//! centers, restricted to common neighbors.

mod fdist;
mod ols;
mod stepwise;

use serde::{Deserialize, Serialize};

use crate::clustering::ClusterModel;
use crate::error::{Error, Result};
use crate::source_data::{CellIndexMap, MmrsVector};

pub use fdist::f_pvalue;
pub use ols::{ols, OlsFit, PIVOT_TOL};
pub use stepwise::{stepwise_fit, Step, StepwiseConfig};

/// Response `R'` and augmented design `[1 | C']` over the `N*Q` common rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDesign {
    response: Vec<f64>,
    /// Column 0 is the all-ones intercept, column `k` is center `k`.
    columns: Vec<Vec<f64>>,
    n_common: usize,
}

impl RegressionDesign {
    /// Assemble from a response and the `K` center columns; the intercept is
    /// prepended.
    pub fn new(response: Vec<f64>, centers: Vec<Vec<f64>>, n_common: usize) -> Result<Self> {
        let rows = response.len();
        if centers.iter().any(|c| c.len() != rows) {
            return Err(Error::Regression("center columns must match the response length".into()));
        }
        let mut columns = Vec::with_capacity(centers.len() + 1);
        columns.push(vec![1.0; rows]);
        columns.extend(centers);
        Ok(RegressionDesign {
            response,
            columns,
            n_common,
        })
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// Column `c` of `[1 | C']`.
    pub fn column(&self, c: usize) -> &[f64] {
        &self.columns[c]
    }

    pub fn rows(&self) -> usize {
        self.response.len()
    }

    /// Number of center columns `K`.
    pub fn k(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn n_common(&self) -> usize {
        self.n_common
    }

    /// `[1 | C'] beta`.
    pub fn predict(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.rows())
            .map(|r| self.columns.iter().zip(beta).map(|(c, b)| c[r] * b).sum())
            .collect()
    }
}

/// Estimated MMR count per region. `beta[0]` is the intercept; `beta[k]`
/// belongs to cluster `k` (1-based), zero when the cluster never entered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficEstimate {
    pub beta: Vec<f64>,
    /// 1-based cluster numbers still in the model, in order of entry.
    pub entered: Vec<usize>,
    pub r_squared: f64,
    pub model_p_value: f64,
    #[serde(default)]
    pub steps: Vec<Step>,
}

impl TrafficEstimate {
    pub fn k(&self) -> usize {
        self.beta.len() - 1
    }

    /// `max(0, beta_k)` for cluster `k` (1-based). Counts cannot be negative.
    pub fn clamped(&self, k: usize) -> f64 {
        self.beta[k].max(0.0)
    }

    pub fn intercept(&self) -> f64 {
        self.beta[0]
    }
}

/// Extract `R'` and `[1 | C']` for the `N` common neighbors.
///
/// `mmrs` and `map` must come from the same alignment, and the cluster model
/// from the SP matrix of the aligned DT data.
pub fn build_design(
    cluster: &ClusterModel,
    mmrs: &MmrsVector,
    map: &CellIndexMap,
) -> Result<RegressionDesign> {
    let n = map.n_common();
    if n == 0 {
        return Err(Error::NoCommonNeighbors);
    }
    let q = mmrs.q();
    if mmrs.neighbor_ids()[..n] != *map.common_ids() {
        return Err(Error::Regression("MMRs vector is not aligned with the index map".into()));
    }
    if cluster.rows() != map.dt_ids().len() * q {
        return Err(Error::Regression(format!(
            "cluster centers have {} rows, expected I*Q = {}",
            cluster.rows(),
            map.dt_ids().len() * q
        )));
    }
    let rows = n * q;
    let response = mmrs.counts()[..rows].iter().map(|&c| c as f64).collect();
    let centers = (0..cluster.k())
        .map(|k| cluster.center(k)[..rows].to_vec())
        .collect();
    RegressionDesign::new(response, centers, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn random_centers(rng: &mut ChaCha8Rng, rows: usize, k: usize, q: usize) -> Vec<Vec<f64>> {
        // block-stochastic columns resembling cluster centers
        (0..k)
            .map(|_| {
                let mut col = vec![0.0; rows];
                for block in col.chunks_mut(q) {
                    if rng.random_bool(0.5) {
                        let w: Vec<f64> = (0..q).map(|_| rng.random::<f64>().powi(3)).collect();
                        let s: f64 = w.iter().sum();
                        for (c, v) in block.iter_mut().zip(&w) {
                            *c = v / s * rng.random::<f64>();
                        }
                    }
                }
                col
            })
            .collect()
    }

    #[test]
    fn exact_model_with_orthogonal_noise_column() {
        // c1 and c2 are orthogonal to each other and to the intercept
        let c1: Vec<f64> = (0..40).map(|r| if r % 4 == 0 { 1.0 } else if r % 4 == 1 { -1.0 } else { 0.0 }).collect();
        let c2: Vec<f64> = (0..40).map(|r| if r % 4 == 2 { 1.0 } else if r % 4 == 3 { -1.0 } else { 0.0 }).collect();
        let y: Vec<f64> = c1.iter().map(|v| 5.0 + 3.0 * v).collect();
        let design = RegressionDesign::new(y, vec![c1, c2], 4).unwrap();
        let est = stepwise_fit(&design, &StepwiseConfig::default()).unwrap();
        assert_eq!(est.entered, vec![1]);
        assert!((est.beta[0] - 5.0).abs() < 1e-10);
        assert!((est.beta[1] - 3.0).abs() < 1e-10);
        assert_eq!(est.beta[2], 0.0);
        assert!((est.r_squared - 1.0).abs() < 1e-12);

        // full OLS oracle on [1, c1, c2] agrees
        let full = ols(design.response(), &[design.column(0), design.column(1), design.column(2)]).unwrap();
        assert!((full.coefficients[1] - 3.0).abs() < 1e-10);
        assert!(full.coefficients[2].abs() < 1e-10);
        assert!(full.ssr < 1e-18);
    }

    #[test]
    fn exact_subset_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let q = 5;
        let rows = 30 * q;
        let centers = random_centers(&mut rng, rows, 6, q);
        let truth = [120.0, 0.0, 800.0, 0.0, 0.0, 450.0, 0.0];
        let mut design = RegressionDesign::new(vec![0.0; rows], centers, 30).unwrap();
        design.response = design.predict(&truth);
        let est = stepwise_fit(&design, &StepwiseConfig::default()).unwrap();
        let mut entered = est.entered.clone();
        entered.sort();
        assert_eq!(entered, vec![2, 5]);
        for (b, t) in est.beta.iter().zip(truth) {
            assert!((b - t).abs() < 1e-6 * t.abs().max(1.0));
        }
    }

    #[test]
    fn noisy_recovery_within_five_percent() {
        let mut total_err = 0.0;
        let mut count = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = 10;
            let rows = 60 * q;
            let centers = random_centers(&mut rng, rows, 4, q);
            let truth = [300.0, 17000.0, 13000.0, 8000.0, 2000.0];
            let mut design = RegressionDesign::new(vec![0.0; rows], centers, 60).unwrap();
            let clean = design.predict(&truth);
            let rms = (clean.iter().map(|v| v * v).sum::<f64>() / rows as f64).sqrt();
            let noise = Normal::new(0.0, 0.01 * rms).unwrap();
            design.response = clean.iter().map(|v| v + noise.sample(&mut rng)).collect();
            let est = stepwise_fit(&design, &StepwiseConfig::default()).unwrap();
            for k in 1..=4 {
                total_err += ((est.beta[k] - truth[k]) / truth[k]).abs();
                count += 1;
            }
        }
        assert!(total_err / (count as f64) < 0.05);
    }

    #[test]
    fn invariants_on_noisy_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let q = 6;
        let rows = 40 * q;
        let centers = random_centers(&mut rng, rows, 5, q);
        let truth = [50.0, 900.0, 0.0, 400.0, 0.0, 250.0];
        let mut design = RegressionDesign::new(vec![0.0; rows], centers, 40).unwrap();
        let noise = Normal::new(0.0, 8.0).unwrap();
        design.response = design.predict(&truth).iter().map(|v| v + noise.sample(&mut rng)).collect();
        let est = stepwise_fit(&design, &StepwiseConfig::default()).unwrap();

        // residual orthogonal to every in-model column
        let fitted = design.predict(&est.beta);
        let resid: Vec<f64> = design.response().iter().zip(&fitted).map(|(a, b)| a - b).collect();
        let rnorm = resid.iter().map(|e| e * e).sum::<f64>().sqrt();
        for c in std::iter::once(0).chain(est.entered.iter().copied()) {
            let col = design.column(c);
            let cn = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            let d: f64 = col.iter().zip(&resid).map(|(a, b)| a * b).sum();
            assert!(d.abs() < 1e-8 * cn * rnorm.max(1.0), "column {c}");
        }

        // r^2 from an independent SSR/SST computation
        let y = design.response();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        let ssr: f64 = resid.iter().map(|e| e * e).sum();
        assert!((est.r_squared - (1.0 - ssr / sst)).abs() < 1e-10);
        assert!((0.0..=1.0).contains(&est.r_squared));

        // scale equivariance
        let mut scaled = design.clone();
        scaled.response = y.iter().map(|v| v * 7.5).collect();
        let est2 = stepwise_fit(&scaled, &StepwiseConfig::default()).unwrap();
        assert_eq!(est2.entered, est.entered);
        for (a, b) in est.beta.iter().zip(&est2.beta) {
            assert!((a * 7.5 - b).abs() <= 1e-8 * b.abs().max(1.0));
        }
        assert!((est.model_p_value - est2.model_p_value).abs() < 1e-10);
        for (s1, s2) in est.steps.iter().zip(&est2.steps) {
            match (s1, s2) {
                (Step::Enter { p_value: p1, .. }, Step::Enter { p_value: p2, .. })
                | (Step::Remove { p_value: p1, .. }, Step::Remove { p_value: p2, .. }) => {
                    assert!((p1 - p2).abs() < 1e-10)
                }
                _ => panic!("step kinds diverged"),
            }
        }
    }

    #[test]
    fn entering_never_increases_ssr() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let q = 4;
        let rows = 25 * q;
        let centers = random_centers(&mut rng, rows, 5, q);
        let y: Vec<f64> = (0..rows).map(|_| rng.random_range(0.0..100.0)).collect();
        let design = RegressionDesign::new(y, centers, 25).unwrap();
        let mut cols: Vec<&[f64]> = vec![design.column(0)];
        let mut last = ols(design.response(), &cols).unwrap().ssr;
        for c in 1..=5 {
            cols.push(design.column(c));
            let ssr = ols(design.response(), &cols).unwrap().ssr;
            assert!(ssr <= last * (1.0 + 1e-12));
            last = ssr;
        }
    }

    #[test]
    fn nothing_enters_on_pure_noise_is_flagged() {
        let rows = 50;
        let y: Vec<f64> = (0..rows).map(|r| (r % 2) as f64).collect();
        let c1: Vec<f64> = (0..rows).map(|r| if r < 25 { 1.0 } else { 0.0 }).collect();
        let design = RegressionDesign::new(y, vec![c1], 5).unwrap();
        match stepwise_fit(&design, &StepwiseConfig::default()) {
            Err(Error::NoVariableEntered { fallback }) => {
                assert_eq!(fallback.beta, vec![0.5, 0.0]);
                assert!(fallback.entered.is_empty());
            }
            other => panic!("expected NoVariableEntered, got {other:?}"),
        }
    }

    #[test]
    fn design_requires_common_neighbors() {
        use crate::cirsp::SpMatrix;
        use crate::source_data::{align_common_neighbors, DtMatrix};
        let mmrs = MmrsVector::from_parts("S".into(), vec!["A".into()], 2, vec![3, 1], 10).unwrap();
        let dt = DtMatrix::from_parts("S".into(), vec!["B".into()], vec![Some(1.0)], 1).unwrap();
        let (mmrs, _, map) = align_common_neighbors(&mmrs, &dt);
        let sp = SpMatrix::from_columns(2, 2, vec![vec![0]]);
        let cluster = ClusterModel::from_membership(&sp, 1, vec![0]).unwrap();
        assert!(matches!(build_design(&cluster, &mmrs, &map), Err(Error::NoCommonNeighbors)));
    }

    #[test]
    fn design_keeps_only_common_rows() {
        use crate::cirsp::build_sp_matrix;
        use crate::source_data::{align_common_neighbors, BinningConfig, DtMatrix};
        let b = BinningConfig::default();
        let q = b.q();
        let mut counts = vec![0u64; 2 * q];
        counts[3] = 4;
        counts[q + 7] = 2;
        let mmrs = MmrsVector::from_parts("S".into(), vec!["A".into(), "B".into()], q, counts, 10).unwrap();
        let dt = DtMatrix::from_parts(
            "S".into(),
            vec!["A".into(), "B".into(), "Z".into()],
            vec![Some(1.0), Some(10.0), Some(-4.0), Some(2.0), None, Some(20.0)],
            2,
        )
        .unwrap();
        let (mmrs, dt, map) = align_common_neighbors(&mmrs, &dt);
        let sp = build_sp_matrix(&dt, &b);
        let cluster = ClusterModel::from_membership(&sp, 1, vec![0, 0]).unwrap();
        let design = build_design(&cluster, &mmrs, &map).unwrap();
        assert_eq!(design.rows(), 2 * q);
        assert_eq!(design.k(), 1);
        assert!(design.column(0).iter().all(|&v| v == 1.0));
        assert_eq!(design.response()[3], 4.0);
        assert_eq!(design.response()[q + 7], 2.0);
        // Z's block lives only in the full center
        assert_eq!(cluster.rows(), 3 * q);
        assert_eq!(cluster.center_value(2 * q + 1, 0), 0.5);
    }
}
