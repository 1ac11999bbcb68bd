//! Source-data structures: binned MMRs vector `R`, DT CIR matrix `D`, and
//! the CIR interval machinery they share.

mod align;
mod binning;
mod dt;
mod mmrs;
mod records;

pub use align::{align_common_neighbors, CellIndexMap};
pub use binning::{bin_cir, cir, BinningConfig, DEFAULT_EDGES, DEFAULT_Q_THRESHOLD};
pub use dt::{build_dt_matrix, DtMatrix};
pub use mmrs::{build_mmrs_vector, MmrsVector};
pub use records::{DtRecord, MmrReport, Reading, MAX_REPORTED_NEIGHBORS};
