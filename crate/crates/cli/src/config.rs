//! The TOML pipeline configuration and its merge with command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use imfusion_core::icdm::MmrsNormalization;
use imfusion_core::pipeline::PipelineSettings;
use imfusion_core::scenario::SimulationPlan;
use imfusion_core::source_data::BinningConfig;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputSection,
    pub output_dir: Option<PathBuf>,
    pub binning: BinningSection,
    pub clustering: ClusteringSection,
    pub regression: RegressionSection,
    pub fusion: FusionSection,
    pub simulation: SimulationSection,
    pub icdm: IcdmSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    pub preset: Option<String>,
    pub scenario: Option<PathBuf>,
    pub mmr: Option<PathBuf>,
    pub dt: Option<PathBuf>,
    pub serving_id: Option<String>,
    /// CSV of `serving_id,mmr,dt` rows for multi-cell runs.
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinningSection {
    pub edges: Option<Vec<f64>>,
    pub q_threshold: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringSection {
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub n_init: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressionSection {
    pub alpha_enter: Option<f64>,
    pub alpha_remove: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionSection {
    pub seed: Option<u64>,
    pub min_weight: Option<f64>,
    pub include_intercept: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub seed: Option<u64>,
    pub n_reports: Option<usize>,
    pub dt_spacing: Option<f64>,
    pub truth_samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IcdmSection {
    pub normalization: Option<MmrsNormalization>,
}

impl PipelineConfig {
    /// Reads a config file; relative paths inside it resolve against the
    /// file's directory and must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let input = &mut cfg.input;
        for p in [&mut input.scenario, &mut input.mmr, &mut input.dt, &mut input.manifest]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if !p.exists() {
                bail!("config {} references missing file {}", path.display(), p.display());
            }
        }
        if let Some(out) = cfg.output_dir.as_mut().filter(|o| o.is_relative()) {
            *out = base.join(&*out);
        }
        Ok(cfg)
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

/// Binning options shared by every subcommand that bins data.
#[derive(Debug, Clone, Default, Args)]
pub struct BinningFlags {
    /// Comma-separated CIR interval edges in dB, ascending.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub binning_edges: Option<Vec<f64>>,
    /// Number of leading intervals counted as severe interference.
    #[arg(long)]
    pub q_threshold: Option<usize>,
}

impl BinningFlags {
    pub fn resolve(&self, cfg: &PipelineConfig) -> Result<BinningConfig> {
        let defaults = BinningConfig::default();
        let edges = self
            .binning_edges
            .clone()
            .or_else(|| cfg.binning.edges.clone())
            .unwrap_or_else(|| defaults.edges().to_vec());
        let q_threshold = self
            .q_threshold
            .or(cfg.binning.q_threshold)
            .unwrap_or(defaults.q_threshold());
        Ok(BinningConfig::new(edges, q_threshold)?)
    }
}

/// Clustering, regression and fusion options.
#[derive(Debug, Clone, Default, Args)]
pub struct AnalysisFlags {
    /// Number of K-means clusters.
    #[arg(long)]
    pub k: Option<usize>,
    /// K-means seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// K-means restarts.
    #[arg(long)]
    pub n_init: Option<usize>,
    #[arg(long)]
    pub alpha_enter: Option<f64>,
    #[arg(long)]
    pub alpha_remove: Option<f64>,
    /// Seed for picking extra DT records when reshaping.
    #[arg(long)]
    pub fusion_seed: Option<u64>,
    /// Severe-weight cutoff for recovering omitted neighbors.
    #[arg(long)]
    pub min_weight: Option<f64>,
    /// Leave the intercept out of completed MMRs counts.
    #[arg(long)]
    pub no_intercept: bool,
    /// MMRs ICDM denominator.
    #[arg(long, value_parser = parse_normalization)]
    pub normalization: Option<MmrsNormalization>,
}

pub fn parse_normalization(s: &str) -> Result<MmrsNormalization, String> {
    match s {
        "total-reports" => Ok(MmrsNormalization::TotalReports),
        "per-neighbor" => Ok(MmrsNormalization::PerNeighbor),
        _ => Err(format!("expected `total-reports` or `per-neighbor`, got `{s}`")),
    }
}

impl AnalysisFlags {
    /// Flags win over the config file, which wins over defaults. Unset
    /// clustering and fusion seeds derive from the simulation seed.
    pub fn resolve(&self, cfg: &PipelineConfig, binning: BinningConfig, scenario_seed: Option<u64>) -> PipelineSettings {
        let base = scenario_seed.or(cfg.simulation.seed).unwrap_or(0);
        let mut s = PipelineSettings {
            binning,
            ..PipelineSettings::default()
        }
        .with_seed(base);
        let c = &cfg.clustering;
        s.kmeans.k = self.k.or(c.k).unwrap_or(s.kmeans.k);
        s.kmeans.seed = self.seed.or(c.seed).unwrap_or(s.kmeans.seed);
        s.kmeans.max_iter = self.max_iter.or(c.max_iter).unwrap_or(s.kmeans.max_iter);
        s.kmeans.tol = c.tol.unwrap_or(s.kmeans.tol);
        s.kmeans.n_init = self.n_init.or(c.n_init).unwrap_or(s.kmeans.n_init);
        let r = &cfg.regression;
        s.stepwise.alpha_enter = self.alpha_enter.or(r.alpha_enter).unwrap_or(s.stepwise.alpha_enter);
        s.stepwise.alpha_remove = self.alpha_remove.or(r.alpha_remove).unwrap_or(s.stepwise.alpha_remove);
        let f = &cfg.fusion;
        s.fusion.seed = self.fusion_seed.or(f.seed).unwrap_or(s.fusion.seed);
        s.fusion.min_weight = self.min_weight.or(f.min_weight).unwrap_or(s.fusion.min_weight);
        s.fusion.include_intercept = !self.no_intercept && f.include_intercept.unwrap_or(true);
        s.normalization = self.normalization.or(cfg.icdm.normalization).unwrap_or_default();
        s
    }
}

/// Simulation sizes.
#[derive(Debug, Clone, Default, Args)]
pub struct SimulationFlags {
    #[arg(long)]
    pub n_reports: Option<usize>,
    /// DT sample spacing along roads, meters.
    #[arg(long)]
    pub dt_spacing: Option<f64>,
    /// Monte Carlo samples for the ground-truth ICDM.
    #[arg(long)]
    pub truth_samples: Option<usize>,
}

impl SimulationFlags {
    pub fn plan(&self, cfg: &PipelineConfig, preset: SimulationPlan) -> SimulationPlan {
        let s = &cfg.simulation;
        SimulationPlan {
            n_reports: self.n_reports.or(s.n_reports).unwrap_or(preset.n_reports),
            dt_spacing: self.dt_spacing.or(s.dt_spacing).unwrap_or(preset.dt_spacing),
            truth_samples: self.truth_samples.or(s.truth_samples).unwrap_or(preset.truth_samples),
        }
    }
}
