use std::collections::HashSet;

use super::dt::DtMatrix;
use super::mmrs::MmrsVector;

/// Row layout after alignment: the `n_common` shared neighbors come first, in
/// the same order, in both the MMRs vector and the DT matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellIndexMap {
    mmrs_ids: Vec<String>,
    dt_ids: Vec<String>,
    n_common: usize,
}

impl CellIndexMap {
    /// `N`, the number of common neighbors.
    pub fn n_common(&self) -> usize {
        self.n_common
    }

    pub fn common_ids(&self) -> &[String] {
        &self.dt_ids[..self.n_common]
    }

    /// Cells seen only by the drive test (rows `N..I`).
    pub fn dt_only_ids(&self) -> &[String] {
        &self.dt_ids[self.n_common..]
    }

    pub fn mmrs_only_ids(&self) -> &[String] {
        &self.mmrs_ids[self.n_common..]
    }

    pub fn mmrs_ids(&self) -> &[String] {
        &self.mmrs_ids
    }

    pub fn dt_ids(&self) -> &[String] {
        &self.dt_ids
    }

    pub fn dt_row(&self, id: &str) -> Option<usize> {
        self.dt_ids.iter().position(|x| x == id)
    }

    pub fn mmrs_row(&self, id: &str) -> Option<usize> {
        self.mmrs_ids.iter().position(|x| x == id)
    }
}

/// Permute both structures so the common neighbors lead, keeping the
/// relative order of each side otherwise.
pub fn align_common_neighbors(
    mmrs: &MmrsVector,
    dt: &DtMatrix,
) -> (MmrsVector, DtMatrix, CellIndexMap) {
    let dt_set: HashSet<&str> = dt.neighbor_ids().iter().map(String::as_str).collect();
    let common: Vec<&str> = mmrs
        .neighbor_ids()
        .iter()
        .map(String::as_str)
        .filter(|id| dt_set.contains(id))
        .collect();
    let common_set: HashSet<&str> = common.iter().copied().collect();

    let mut mmrs_order: Vec<usize> = common
        .iter()
        .map(|id| mmrs.index_of(id).expect("common id"))
        .collect();
    mmrs_order.extend(
        (0..mmrs.j()).filter(|&j| !common_set.contains(mmrs.neighbor_ids()[j].as_str())),
    );

    let mut dt_order: Vec<usize> = common
        .iter()
        .map(|id| dt.index_of(id).expect("common id"))
        .collect();
    dt_order.extend((0..dt.i()).filter(|&i| !common_set.contains(dt.neighbor_ids()[i].as_str())));

    let mmrs = mmrs.permuted(&mmrs_order);
    let dt = dt.permuted_rows(&dt_order);
    let map = CellIndexMap {
        mmrs_ids: mmrs.neighbor_ids().to_vec(),
        dt_ids: dt.neighbor_ids().to_vec(),
        n_common: common.len(),
    };
    (mmrs, dt, map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mmrs(ids: &[&str]) -> MmrsVector {
        let q = 2;
        let counts = (0..ids.len() * q).map(|c| c as u64).collect();
        MmrsVector::from_parts(
            "S".into(),
            ids.iter().map(|s| s.to_string()).collect(),
            q,
            counts,
            100,
        )
        .unwrap()
    }

    fn dt(ids: &[&str]) -> DtMatrix {
        let values = (0..ids.len() * 2).map(|v| Some(v as f64)).collect();
        DtMatrix::from_parts("S".into(), ids.iter().map(|s| s.to_string()).collect(), values, 2)
            .unwrap()
    }

    #[test]
    fn partial_overlap() {
        let (r, d, map) = align_common_neighbors(&mmrs(&["A", "B", "C"]), &dt(&["B", "C", "D"]));
        assert_eq!(map.n_common(), 2);
        assert_eq!(map.common_ids(), &["B", "C"]);
        assert_eq!(d.neighbor_ids(), &["B", "C", "D"]);
        assert_eq!(r.neighbor_ids(), &["B", "C", "A"]);
        assert_eq!(map.dt_only_ids(), &["D"]);
        assert_eq!(map.mmrs_only_ids(), &["A"]);
        // A's block moved, values intact
        assert_eq!(r.block(2), &[0, 1]);
        assert_eq!(r.block(0), &[2, 3]);
    }

    #[test]
    fn identical_sets() {
        let (_, d, map) = align_common_neighbors(&mmrs(&["A", "B"]), &dt(&["A", "B"]));
        assert_eq!(map.n_common(), 2);
        assert_eq!(d.i(), 2);
        assert!(map.dt_only_ids().is_empty());
    }

    #[test]
    fn disjoint_sets() {
        let (_, _, map) = align_common_neighbors(&mmrs(&["A"]), &dt(&["B"]));
        assert_eq!(map.n_common(), 0);
    }

    #[test]
    fn is_a_permutation() {
        let m = mmrs(&["A", "B", "C", "E"]);
        let d = dt(&["E", "C", "X"]);
        let (r2, d2, _) = align_common_neighbors(&m, &d);
        let mut a: Vec<u64> = m.counts().to_vec();
        let mut b: Vec<u64> = r2.counts().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        for id in d.neighbor_ids() {
            let (i0, i1) = (d.index_of(id).unwrap(), d2.index_of(id).unwrap());
            for mcol in 0..d.m() {
                assert_eq!(d.get(i0, mcol), d2.get(i1, mcol));
            }
        }
    }
}
