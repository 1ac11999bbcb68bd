//! Interference-matrix generation from mobile measurement reports (MMRs) and
//! drive-test (DT) records, with two fusion algorithms that let each source
//! make up for what the other lacks.
//!
//! * MMRs+DT: DT-derived cluster centers estimate the traffic behind the MMRs
//!   and recover severe interferers the MMRs never reported.
//! * DT+MMRs: the same traffic estimate replaces the drive test's sampling
//!   distribution by replicating DT records per region.
//!
//! Both, and the two single-source baselines, are registered in
//! [`pipeline::PipelineRegistry`] under stable names.

pub mod cirsp;
pub mod clustering;
pub mod error;
pub mod fusion;
pub mod icdm;
pub mod io;
pub mod pipeline;
pub mod regression;
pub mod scenario;
pub mod source_data;

pub use error::{Error, Result};
