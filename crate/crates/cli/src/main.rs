//! `imfusion`: inter-cell dependency matrices from MMRs and drive tests.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{AnalysisFlags, BinningFlags, SimulationFlags};

#[derive(Debug, Parser)]
#[command(name = "imfusion", version, about = "Interference matrices from fused MMRs and drive-test data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Measurements {
    /// MMR JSON lines, or an MMRs-vector CSV from `bin`.
    #[arg(long)]
    mmr: Option<PathBuf>,
    /// DT JSON lines, or a DT-matrix CSV from `bin`.
    #[arg(long)]
    dt: Option<PathBuf>,
    /// Serving cell; taken from the MMRs when omitted.
    #[arg(long)]
    serving: Option<String>,
    /// CSV of `serving_id,mmr,dt` rows; runs every serving cell in turn.
    #[arg(long, conflicts_with_all = ["mmr", "dt", "serving"])]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate MMRs, a drive test and the ground-truth ICDM.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scenario seed; MMR, DT and ground-truth streams derive from it.
        #[arg(long)]
        seed: Option<u64>,
        /// Bundled scenario name.
        #[arg(long, conflicts_with = "scenario")]
        preset: Option<String>,
        /// Scenario JSON file.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        sim: SimulationFlags,
        #[command(flatten)]
        binning: BinningFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bin raw measurements into the MMRs vector and DT matrix.
    Bin {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        input: Measurements,
        #[command(flatten)]
        binning: BinningFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// MMRs reinforced by DT: recover omitted severe interferers.
    FuseMmrs {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        input: Measurements,
        #[command(flatten)]
        binning: BinningFlags,
        #[command(flatten)]
        analysis: AnalysisFlags,
        /// Also write the SP matrix as `row,col,value` triplets.
        #[arg(long)]
        dump_sp: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DT reshaped by MMRs traffic.
    FuseDt {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        input: Measurements,
        #[command(flatten)]
        binning: BinningFlags,
        #[command(flatten)]
        analysis: AnalysisFlags,
        #[arg(long)]
        dump_sp: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an ICDM with a registered generator, or from one binned file.
    Icdm {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Generator name; see `--list`.
        #[arg(long, default_value = "im-mr")]
        pipeline: String,
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        input: Measurements,
        #[command(flatten)]
        binning: BinningFlags,
        #[command(flatten)]
        analysis: AnalysisFlags,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairwise Pearson correlation of ICDM files, and errors against a truth.
    Compare {
        /// Two or more ICDM CSV files.
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Average over the union of neighbors with missing entries as 0.
        #[arg(long)]
        union: bool,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate, run every generator and evaluate against the ground truth.
    Report {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scenario seed; every other seed derives from it unless set.
        #[arg(long)]
        scenario_seed: Option<u64>,
        #[arg(long, conflicts_with = "scenario")]
        preset: Option<String>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        sim: SimulationFlags,
        #[command(flatten)]
        binning: BinningFlags,
        #[command(flatten)]
        analysis: AnalysisFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
