//! K-means over SP columns: membership `A`, sizes `B` and centers `C`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cirsp::SpMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop when the relative inertia improvement drops below this.
    pub tol: f64,
    /// Independent k-means++ restarts; the lowest-inertia run is kept.
    #[serde(default = "default_n_init")]
    pub n_init: usize,
}

fn default_n_init() -> usize {
    10
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            k: 8,
            seed: 0,
            max_iter: 300,
            tol: 1e-6,
            n_init: default_n_init(),
        }
    }
}

/// Result of clustering the `M` SP columns into `K` sets.
///
/// Cluster indices are 0-based in this API; the JSON form uses `1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    k: usize,
    rows: usize,
    membership: Vec<usize>,
    sizes: Vec<usize>,
    centers: Vec<f64>,
    inertia: f64,
    inertia_trace: Vec<f64>,
    iterations: usize,
}

impl ClusterModel {
    /// Build a model from an explicit membership, computing centers from `sp`.
    pub fn from_membership(sp: &SpMatrix, k: usize, membership: Vec<usize>) -> Result<Self> {
        if membership.len() != sp.cols() {
            return Err(Error::Clustering(format!(
                "membership covers {} records, SP matrix has {}",
                membership.len(),
                sp.cols()
            )));
        }
        if let Some(&bad) = membership.iter().find(|&&a| a >= k) {
            return Err(Error::Clustering(format!("label {bad} out of range for K={k}")));
        }
        let centers = cluster_centers(&membership, k, sp);
        let sizes = sizes_of(&membership, k);
        let inertia = total_inertia(sp, &membership, &centers);
        Ok(ClusterModel {
            k,
            rows: sp.rows(),
            membership,
            sizes,
            centers,
            inertia,
            inertia_trace: vec![inertia],
            iterations: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Length of a center (`IQ`).
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.centers[k * self.rows..(k + 1) * self.rows]
    }

    /// `c_{r,k}` for 0-based SP row `r`.
    pub fn center_value(&self, row: usize, k: usize) -> f64 {
        self.centers[k * self.rows + row]
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    /// Inertia after each Lloyd update, first entry from the seeding.
    pub fn inertia_trace(&self) -> &[f64] {
        &self.inertia_trace
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Records of set `k` in input order.
    pub fn members(&self, k: usize) -> Vec<usize> {
        (0..self.membership.len())
            .filter(|&m| self.membership[m] == k)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ClusterModelJson {
    #[serde(rename = "K")]
    k: usize,
    membership: Vec<usize>,
    sizes: Vec<usize>,
    /// `IQ` rows of `K` values.
    centers: Vec<Vec<f64>>,
    inertia: f64,
}

impl Serialize for ClusterModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let centers = (0..self.rows)
            .map(|r| (0..self.k).map(|k| self.center_value(r, k)).collect())
            .collect();
        ClusterModelJson {
            k: self.k,
            membership: self.membership.iter().map(|a| a + 1).collect(),
            sizes: self.sizes.clone(),
            centers,
            inertia: self.inertia,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClusterModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ClusterModelJson::deserialize(d)?;
        if j.membership.iter().any(|&a| a == 0 || a > j.k) {
            return Err(D::Error::custom("membership labels must be in 1..=K"));
        }
        let membership: Vec<usize> = j.membership.iter().map(|a| a - 1).collect();
        let sizes = sizes_of(&membership, j.k);
        if sizes != j.sizes {
            return Err(D::Error::custom("sizes disagree with membership"));
        }
        let rows = j.centers.len();
        if j.centers.iter().any(|r| r.len() != j.k) {
            return Err(D::Error::custom("every center row needs K values"));
        }
        let mut centers = vec![0.0; rows * j.k];
        for (r, row) in j.centers.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                centers[k * rows + r] = v;
            }
        }
        Ok(ClusterModel {
            k: j.k,
            rows,
            membership,
            sizes,
            centers,
            inertia: j.inertia,
            inertia_trace: vec![j.inertia],
            iterations: 0,
        })
    }
}

fn sizes_of(membership: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &a in membership {
        sizes[a] += 1;
    }
    sizes
}

/// Per-cluster mean of the SP columns: `c_{i,q,k}` is the fraction of set-`k`
/// records whose profile puts neighbor `i` in interval `q`.
///
/// Returns `K` dense columns of length `IQ`, concatenated. Empty clusters get
/// a zero center.
pub fn cluster_centers(membership: &[usize], k: usize, sp: &SpMatrix) -> Vec<f64> {
    let rows = sp.rows();
    let mut sums = vec![0.0; rows * k];
    let mut sizes = vec![0usize; k];
    for (col, &a) in sp.columns().iter().zip(membership) {
        sizes[a] += 1;
        for &r in col {
            sums[a * rows + r as usize] += 1.0;
        }
    }
    for (a, &b) in sizes.iter().enumerate() {
        if b > 0 {
            let inv = b as f64;
            sums[a * rows..(a + 1) * rows]
                .iter_mut()
                .for_each(|c| *c /= inv);
        }
    }
    sums
}

/// Squared distance between a binary column (given by its one-rows) and a
/// dense center with precomputed squared norm.
#[inline]
fn sq_dist(ones: &[u32], center: &[f64], center_norm: f64) -> f64 {
    let dot: f64 = ones.iter().map(|&r| center[r as usize]).sum();
    (ones.len() as f64 - 2.0 * dot + center_norm).max(0.0)
}

fn norms(centers: &[f64], rows: usize) -> Vec<f64> {
    centers
        .chunks(rows.max(1))
        .map(|c| c.iter().map(|v| v * v).sum())
        .collect()
}

fn total_inertia(sp: &SpMatrix, membership: &[usize], centers: &[f64]) -> f64 {
    let rows = sp.rows();
    let ns = norms(centers, rows);
    sp.columns()
        .iter()
        .zip(membership)
        .map(|(col, &a)| sq_dist(col, &centers[a * rows..(a + 1) * rows], ns[a]))
        .sum()
}

fn kmeans_plus_plus(sp: &SpMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let rows = sp.rows();
    let m = sp.cols();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..m));
    let mut best: Vec<f64> = (0..m)
        .map(|p| point_dist(sp.column(p), sp.column(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = best.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = m - 1;
            for (p, &d) in best.iter().enumerate() {
                if d > 0.0 {
                    if target < d {
                        pick = p;
                        break;
                    }
                    target -= d;
                }
            }
            // float slack can land on an already-zero weight
            if best[pick] == 0.0 {
                pick = best.iter().rposition(|&d| d > 0.0).expect("total > 0");
            }
            pick
        } else {
            // every remaining point coincides with a chosen center
            let free: Vec<usize> = (0..m).filter(|p| !chosen.contains(p)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (p, b) in best.iter_mut().enumerate() {
            *b = b.min(point_dist(sp.column(p), sp.column(next)));
        }
    }
    let mut centers = vec![0.0; rows * k];
    for (a, &p) in chosen.iter().enumerate() {
        for &r in sp.column(p) {
            centers[a * rows + r as usize] = 1.0;
        }
    }
    centers
}

/// Hamming distance between two sorted one-position lists.
fn point_dist(a: &[u32], b: &[u32]) -> f64 {
    let (mut i, mut j, mut shared) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (a.len() + b.len() - 2 * shared) as f64
}

/// Lloyd's algorithm with k-means++ seeding over squared Euclidean distance.
///
/// Each run stops at an assignment fixpoint, when the relative inertia gain
/// falls below `tol`, or after `max_iter` updates. A cluster left empty
/// adopts the point farthest from its current center. Of `n_init` runs
/// drawn from one seeded stream, the first with the lowest inertia wins.
pub fn kmeans(sp: &SpMatrix, cfg: &KMeansConfig) -> Result<ClusterModel> {
    let (k, m) = (cfg.k, sp.cols());
    if k == 0 {
        return Err(Error::Clustering("K must be at least 1".into()));
    }
    if k > m {
        return Err(Error::TooManyClusters { k, m });
    }
    if cfg.n_init == 0 {
        return Err(Error::Clustering("n_init must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best = lloyd(sp, cfg, &mut rng);
    for _ in 1..cfg.n_init {
        let run = lloyd(sp, cfg, &mut rng);
        if run.inertia < best.inertia {
            best = run;
        }
    }
    Ok(best)
}

fn lloyd(sp: &SpMatrix, cfg: &KMeansConfig, rng: &mut ChaCha8Rng) -> ClusterModel {
    let (k, m, rows) = (cfg.k, sp.cols(), sp.rows());
    let mut centers = kmeans_plus_plus(sp, k, rng);
    let mut membership: Vec<usize> = vec![usize::MAX; m];
    let mut dists = vec![0.0; m];
    let mut trace = Vec::new();
    let mut iterations = 0;

    loop {
        let ns = norms(&centers, rows);
        let mut changed = false;
        for (p, col) in sp.columns().iter().enumerate() {
            let mut best = (0, f64::INFINITY);
            for (a, &n) in ns.iter().enumerate() {
                let d = sq_dist(col, &centers[a * rows..(a + 1) * rows], n);
                if d < best.1 {
                    best = (a, d);
                }
            }
            if membership[p] != best.0 {
                membership[p] = best.0;
                changed = true;
            }
            dists[p] = best.1;
        }
        if trace.is_empty() {
            trace.push(dists.iter().sum());
        }

        let mut sizes = sizes_of(&membership, k);
        while let Some(empty) = sizes.iter().position(|&b| b == 0) {
            let donor = (0..m)
                .filter(|&p| sizes[membership[p]] > 1)
                .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                .expect("K <= M leaves a cluster with two or more points");
            sizes[membership[donor]] -= 1;
            sizes[empty] += 1;
            membership[donor] = empty;
            dists[donor] = 0.0;
            changed = true;
        }

        if !changed && iterations > 0 {
            break;
        }
        centers = cluster_centers(&membership, k, sp);
        let inertia = total_inertia(sp, &membership, &centers);
        let previous = *trace.last().expect("seeded");
        trace.push(inertia);
        iterations += 1;

        if !changed || iterations >= cfg.max_iter {
            break;
        }
        if previous > 0.0 && (previous - inertia) / previous < cfg.tol {
            break;
        }
        if inertia == 0.0 {
            break;
        }
    }

    let sizes = sizes_of(&membership, k);
    let inertia = total_inertia(sp, &membership, &centers);
    ClusterModel {
        k,
        rows,
        membership,
        sizes,
        centers,
        inertia,
        inertia_trace: trace,
        iterations,
    }
}

/// Adjusted Rand index between two labelings of the same points.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must cover the same points");
    let n = a.len() as f64;
    let pairs = |x: f64| x * (x - 1.0) / 2.0;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut rows: HashMap<usize, f64> = HashMap::new();
    let mut cols: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0;
        *rows.entry(x).or_default() += 1.0;
        *cols.entry(y).or_default() += 1.0;
    }
    let index: f64 = joint.values().map(|&v| pairs(v)).sum();
    let sum_a: f64 = rows.values().map(|&v| pairs(v)).sum();
    let sum_b: f64 = cols.values().map(|&v| pairs(v)).sum();
    let expected = sum_a * sum_b / pairs(n);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}
