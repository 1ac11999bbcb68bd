use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Levels are written at 0.1 dB resolution.
fn one_decimal<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64((v * 10.0).round() / 10.0)
}

/// Maximum number of neighbor measurements carried by one MMR.
pub const MAX_REPORTED_NEIGHBORS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reading {
    pub id: String,
    #[serde(serialize_with = "one_decimal")]
    pub rxlev: f64,
}

impl Reading {
    pub fn new(id: impl Into<String>, rxlev: f64) -> Self {
        Reading {
            id: id.into(),
            rxlev,
        }
    }
}

/// One mobile measurement report: serving level plus up to six neighbors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmrReport {
    pub serving_id: String,
    #[serde(serialize_with = "one_decimal")]
    pub serving_rxlev: f64,
    pub neighbors: Vec<Reading>,
}

impl MmrReport {
    pub fn validate(&self) -> Result<()> {
        if self.neighbors.len() > MAX_REPORTED_NEIGHBORS {
            return Err(Error::Measurement(format!(
                "report carries {} neighbors, at most {MAX_REPORTED_NEIGHBORS} allowed",
                self.neighbors.len()
            )));
        }
        if !self.serving_rxlev.is_finite() || self.neighbors.iter().any(|n| !n.rxlev.is_finite()) {
            return Err(Error::Measurement("non-finite rxlev in report".into()));
        }
        check_distinct(self.neighbors.iter().map(|n| n.id.as_str()))?;
        if self.neighbors.iter().any(|n| n.id == self.serving_id) {
            return Err(Error::Measurement(format!(
                "serving cell `{}` listed as its own neighbor",
                self.serving_id
            )));
        }
        Ok(())
    }
}

/// One drive-test sample: every detected cell, serving cell included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtRecord {
    pub x: f64,
    pub y: f64,
    pub readings: Vec<Reading>,
}

impl DtRecord {
    pub fn rxlev_of(&self, id: &str) -> Option<f64> {
        self.readings.iter().find(|r| r.id == id).map(|r| r.rxlev)
    }

    pub fn validate(&self) -> Result<()> {
        if self.readings.iter().any(|r| !r.rxlev.is_finite()) {
            return Err(Error::Measurement("non-finite rxlev in DT record".into()));
        }
        check_distinct(self.readings.iter().map(|r| r.id.as_str()))
    }
}

fn check_distinct<'a>(ids: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::Measurement(format!("duplicate cell id `{id}`")));
        }
    }
    Ok(())
}
