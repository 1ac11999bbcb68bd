use std::collections::BTreeSet;

use super::binning::cir;
use super::records::DtRecord;
use crate::error::{Error, Result};

/// DT data `D`: CIR (dB) of the serving cell against each neighbor `i` in
/// each record `m`. `None` marks a neighbor the record did not detect.
///
/// Storage is record-major: column `m` is `values[m*I .. (m+1)*I]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtMatrix {
    serving_id: String,
    neighbor_ids: Vec<String>,
    values: Vec<Option<f64>>,
    records: usize,
}

impl DtMatrix {
    pub fn from_parts(
        serving_id: String,
        neighbor_ids: Vec<String>,
        values: Vec<Option<f64>>,
        records: usize,
    ) -> Result<Self> {
        if records == 0 {
            return Err(Error::NoDtRecords("DT matrix needs at least one record".into()));
        }
        if values.len() != neighbor_ids.len() * records {
            return Err(Error::Measurement(format!(
                "expected {}x{} DT entries, got {}",
                neighbor_ids.len(),
                records,
                values.len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Measurement("detected DT entries must be finite".into()));
        }
        let distinct: BTreeSet<&str> = neighbor_ids.iter().map(String::as_str).collect();
        if distinct.len() != neighbor_ids.len() {
            return Err(Error::Measurement("duplicate neighbor id in DT matrix".into()));
        }
        Ok(DtMatrix {
            serving_id,
            neighbor_ids,
            values,
            records,
        })
    }

    pub fn serving_id(&self) -> &str {
        &self.serving_id
    }

    pub fn neighbor_ids(&self) -> &[String] {
        &self.neighbor_ids
    }

    /// Number of neighbors `I`.
    pub fn i(&self) -> usize {
        self.neighbor_ids.len()
    }

    /// Number of records `M`.
    pub fn m(&self) -> usize {
        self.records
    }

    pub fn get(&self, i: usize, m: usize) -> Option<f64> {
        self.values[m * self.neighbor_ids.len() + i]
    }

    pub fn column(&self, m: usize) -> &[Option<f64>] {
        let n = self.neighbor_ids.len();
        &self.values[m * n..(m + 1) * n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Option<f64>]> + '_ {
        let n = self.neighbor_ids.len().max(1);
        (0..self.records).map(move |m| {
            if self.neighbor_ids.is_empty() {
                &self.values[0..0]
            } else {
                &self.values[m * n..(m + 1) * n]
            }
        })
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.neighbor_ids.iter().position(|n| n == id)
    }

    /// Reorder neighbor rows; `order[new] = old`.
    pub(crate) fn permuted_rows(&self, order: &[usize]) -> DtMatrix {
        let mut values = Vec::with_capacity(self.values.len());
        for col in self.columns() {
            values.extend(order.iter().map(|&o| col[o]));
        }
        DtMatrix {
            serving_id: self.serving_id.clone(),
            neighbor_ids: order.iter().map(|&o| self.neighbor_ids[o].clone()).collect(),
            values,
            records: self.records,
        }
    }

    /// New matrix whose columns are `picks[k]`-th columns of `self`.
    pub fn select_columns(&self, picks: &[usize]) -> Result<DtMatrix> {
        let mut values = Vec::with_capacity(picks.len() * self.i());
        for &m in picks {
            values.extend_from_slice(self.column(m));
        }
        DtMatrix::from_parts(
            self.serving_id.clone(),
            self.neighbor_ids.clone(),
            values,
            picks.len(),
        )
    }
}

/// Turn DT records into the CIR matrix of `serving_id` against every
/// neighbor detected in at least one record. Rows are sorted by cell id.
pub fn build_dt_matrix(records: &[DtRecord], serving_id: &str) -> Result<DtMatrix> {
    if records.is_empty() {
        return Err(Error::NoDtRecords("empty record list".into()));
    }
    let mut servings = Vec::with_capacity(records.len());
    let mut ids = BTreeSet::new();
    for (index, rec) in records.iter().enumerate() {
        rec.validate()?;
        let s = rec.rxlev_of(serving_id).ok_or_else(|| Error::MissingServing {
            index,
            serving: serving_id.to_string(),
        })?;
        servings.push(s);
        ids.extend(
            rec.readings
                .iter()
                .filter(|r| r.id != serving_id)
                .map(|r| r.id.as_str()),
        );
    }
    let neighbor_ids: Vec<String> = ids.into_iter().map(str::to_string).collect();
    let n = neighbor_ids.len();

    let mut values = vec![None; n * records.len()];
    for (m, (rec, &s)) in records.iter().zip(&servings).enumerate() {
        for r in rec.readings.iter().filter(|r| r.id != serving_id) {
            let i = neighbor_ids
                .binary_search(&r.id)
                .expect("id collected above");
            values[m * n + i] = Some(cir(s, r.rxlev));
        }
    }
    DtMatrix::from_parts(serving_id.to_string(), neighbor_ids, values, records.len())
}
