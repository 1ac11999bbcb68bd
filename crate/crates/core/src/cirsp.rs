//! CIR-spectrum profiles: the 6-strongest-neighbor fingerprint of a DT record
//! and its one-hot SP matrix encoding.

use crate::source_data::{BinningConfig, DtMatrix, MAX_REPORTED_NEIGHBORS};

/// Per-neighbor interval index for one record; 0 for neighbors outside the
/// record's six strongest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cirsp {
    values: Vec<u8>,
}

impl Cirsp {
    pub fn from_values(values: Vec<u8>) -> Self {
        Cirsp { values }
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn nonzero(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }
}

/// Profile of one DT column. `ids` are the row ids of the matrix the column
/// came from; they break strength ties.
///
/// The strongest neighbors are those with the smallest CIR (highest received
/// level relative to the shared serving level).
pub fn derive_cirsp(column: &[Option<f64>], ids: &[String], binning: &BinningConfig) -> Cirsp {
    let mut detected: Vec<(usize, f64)> = column
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|c| (i, c)))
        .collect();
    detected.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| ids[a.0].cmp(&ids[b.0])));

    let mut values = vec![0u8; column.len()];
    for &(i, c) in detected.iter().take(MAX_REPORTED_NEIGHBORS) {
        values[i] = binning.bin(c) as u8;
    }
    Cirsp { values }
}

/// Binary SP matrix `S` of shape `IQ x M`, stored as the sorted one-positions
/// (0-based row `i*Q + q - 1`) of each column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpMatrix {
    rows: usize,
    q: usize,
    columns: Vec<Vec<u32>>,
}

impl SpMatrix {
    pub fn from_columns(rows: usize, q: usize, columns: Vec<Vec<u32>>) -> Self {
        debug_assert!(columns.iter().flatten().all(|&r| (r as usize) < rows));
        SpMatrix { rows, q, columns }
    }

    /// `I * Q`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// `M`.
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn column(&self, m: usize) -> &[u32] {
        &self.columns[m]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    /// `s_{i,q,m}` with `i`, `m` 0-based and `q` in `1..=Q`.
    pub fn get(&self, i: usize, q: usize, m: usize) -> bool {
        let row = (i * self.q + q - 1) as u32;
        self.columns[m].binary_search(&row).is_ok()
    }

    pub fn dense_column(&self, m: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.rows];
        for &r in &self.columns[m] {
            v[r as usize] = 1.0;
        }
        v
    }
}

/// One-hot encoding of a profile: a 1 at `(i, q)` iff `cirsp[i] = q != 0`.
pub fn to_sp_vector(cirsp: &Cirsp, binning: &BinningConfig) -> Vec<u32> {
    let q = binning.q();
    cirsp
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(i, &v)| (i * q + v as usize - 1) as u32)
        .collect()
}

/// Inverse of [`to_sp_vector`].
pub fn from_sp_vector(ones: &[u32], i_count: usize, binning: &BinningConfig) -> Cirsp {
    let q = binning.q();
    let mut values = vec![0u8; i_count];
    for &r in ones {
        let r = r as usize;
        values[r / q] = (r % q + 1) as u8;
    }
    Cirsp { values }
}

pub fn build_sp_matrix(dt: &DtMatrix, binning: &BinningConfig) -> SpMatrix {
    let ids = dt.neighbor_ids();
    let columns = dt
        .columns()
        .map(|col| to_sp_vector(&derive_cirsp(col, ids, binning), binning))
        .collect();
    SpMatrix::from_columns(dt.i() * binning.q(), binning.q(), columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source_data::{build_dt_matrix, DtRecord, Reading};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("N{i:02}")).collect()
    }

    #[test]
    fn cell_center_profile() {
        // six first-ring neighbors far above the last edge, six more undetected
        let b = BinningConfig::default();
        let mut col = vec![Some(25.0); 6];
        col.extend(vec![None; 6]);
        let p = derive_cirsp(&col, &ids(12), &b);
        assert_eq!(&p.values()[..6], &[10; 6]);
        assert_eq!(&p.values()[6..], &[0; 6]);
    }

    #[test]
    fn fewer_than_six_detected() {
        let b = BinningConfig::default();
        let col = [Some(1.0), None, Some(-20.0), None, Some(12.5)];
        let p = derive_cirsp(&col, &ids(5), &b);
        assert_eq!(p.nonzero(), 3);
        assert_eq!(p.values(), &[4, 0, 1, 0, 8]);
    }

    #[test]
    fn top_six_matches_exhaustive_sort() {
        let b = BinningConfig::default();
        let cirs = [7.0, -2.0, 15.0, 3.0, 30.0, -9.0, 11.0, 0.5];
        let col: Vec<Option<f64>> = cirs.iter().map(|&c| Some(c)).collect();
        let p = derive_cirsp(&col, &ids(8), &b);
        // brute force: the two largest CIRs (30 and 15) are the weakest neighbors
        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&a, &b| cirs[a].partial_cmp(&cirs[b]).unwrap());
        let dropped = &order[6..];
        assert_eq!(dropped, &[2, 4]);
        for i in 0..8 {
            if dropped.contains(&i) {
                assert_eq!(p.values()[i], 0);
            } else {
                assert_eq!(p.values()[i] as usize, b.bin(cirs[i]));
            }
        }
    }

    #[test]
    fn ties_go_to_lower_id() {
        let b = BinningConfig::default();
        let names: Vec<String> = ["G", "B", "C", "D", "E", "F", "A"].iter().map(|s| s.to_string()).collect();
        let col = vec![Some(5.0); 7];
        let p = derive_cirsp(&col, &names, &b);
        // "G" loses the tie
        assert_eq!(p.values()[0], 0);
        assert_eq!(p.nonzero(), 6);
    }

    #[test]
    fn one_hot_positions() {
        let b = BinningConfig::default();
        let q = b.q();
        let p = Cirsp::from_values(vec![2, 1, q as u8, 0]);
        let s = to_sp_vector(&p, &b);
        // (cell 1, q=2), (cell 2, q=1), (cell 3, q=Q), 0-based rows
        assert_eq!(s, vec![1, q as u32, (2 * q + q - 1) as u32]);
        assert_eq!(from_sp_vector(&s, 4, &b), p);
        assert!(to_sp_vector(&Cirsp::from_values(vec![0; 4]), &b).is_empty());
    }

    #[test]
    fn single_record_matrix() {
        let b = BinningConfig::default();
        let rec = DtRecord {
            x: 0.0,
            y: 0.0,
            readings: vec![Reading::new("S", -60.0), Reading::new("A", -58.0), Reading::new("B", -90.0)],
        };
        let dt = build_dt_matrix(&[rec], "S").unwrap();
        let sp = build_sp_matrix(&dt, &b);
        assert_eq!((sp.rows(), sp.cols()), (20, 1));
        let expected = to_sp_vector(&derive_cirsp(dt.column(0), dt.neighbor_ids(), &b), &b);
        assert_eq!(sp.column(0), expected.as_slice());
        assert!(sp.get(0, 3, 0)); // CIR -2 -> q=3
        assert!(sp.get(1, 10, 0));
    }

    #[test]
    fn random_columns_respect_one_hot_budget() {
        let b = BinningConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20;
        let records: Vec<DtRecord> = (0..50)
            .map(|_| {
                let mut readings = vec![Reading::new("S", -60.0)];
                for i in 0..n {
                    if rng.random_bool(0.6) {
                        readings.push(Reading::new(format!("N{i:02}"), rng.random_range(-100.0..-40.0)));
                    }
                }
                DtRecord { x: 0.0, y: 0.0, readings }
            })
            .collect();
        let dt = build_dt_matrix(&records, "S").unwrap();
        let sp = build_sp_matrix(&dt, &b);
        for m in 0..sp.cols() {
            let dense = sp.dense_column(m);
            let ones = dense.iter().filter(|&&v| v == 1.0).count();
            let detected = dt.column(m).iter().flatten().count();
            assert_eq!(ones, detected.min(6));
            for block in dense.chunks(b.q()) {
                assert!(block.iter().sum::<f64>() <= 1.0);
            }
        }
    }
}
