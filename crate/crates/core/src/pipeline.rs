//! IM generators behind a common trait, registered by name.
//!
//! | name      | source data                     |
//! |-----------|---------------------------------|
//! | `im-mr`   | MMRs only                       |
//! | `im-dt`   | DT only                         |
//! | `mmrs+dt` | MMRs reinforced by DT (fusion I)|
//! | `dt+mmrs` | DT reshaped by MMRs (fusion II) |

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cirsp::{build_sp_matrix, SpMatrix};
use crate::clustering::{kmeans, ClusterModel, KMeansConfig};
use crate::error::{Error, Result, StageContext};
use crate::fusion::{
    complete_mmrs, find_omitted_severe, reinforce, reshape_dt, FusionConfig, ReinforcedMmrs, ReshapedDt,
};
use crate::icdm::{icdm_from_dt, icdm_from_mmrs, icdm_from_reinforced, icdm_from_reshaped, Icdm, MmrsNormalization};
use crate::regression::{build_design, stepwise_fit, RegressionDesign, StepwiseConfig, TrafficEstimate};
use crate::source_data::{
    align_common_neighbors, build_dt_matrix, build_mmrs_vector, BinningConfig, CellIndexMap, DtMatrix, DtRecord,
    MmrReport, MmrsVector,
};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PipelineSettings {
    pub binning: BinningConfig,
    pub kmeans: KMeansConfig,
    pub stepwise: StepwiseConfig,
    pub fusion: FusionConfig,
    pub normalization: MmrsNormalization,
}

impl PipelineSettings {
    /// Clustering and fusion seeds derived from a scenario seed, continuing
    /// the offsets used by [`crate::scenario::SimulationSeeds`].
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.kmeans.seed = seed.wrapping_add(3);
        self.fusion.seed = seed.wrapping_add(4);
        self
    }
}

/// Binned inputs shared by every generator.
#[derive(Debug, Clone)]
pub struct SourceData {
    pub mmrs: MmrsVector,
    pub dt: DtMatrix,
}

impl SourceData {
    pub fn build(reports: &[MmrReport], records: &[DtRecord], serving_id: &str, binning: &BinningConfig) -> Result<Self> {
        let mmrs = build_mmrs_vector(reports, binning).stage("bin")?;
        if !reports.is_empty() && mmrs.serving_id() != serving_id {
            return Err(Error::MixedServing {
                expected: serving_id.to_string(),
                found: mmrs.serving_id().to_string(),
            })
            .stage("bin");
        }
        let dt = build_dt_matrix(records, serving_id).stage("bin")?;
        Ok(SourceData { mmrs, dt })
    }
}

/// The steps both fusion algorithms share: alignment, CIRSP/SP, clustering
/// and traffic estimation.
#[derive(Debug, Clone)]
pub struct TrafficAnalysis {
    pub mmrs: MmrsVector,
    pub dt: DtMatrix,
    pub map: CellIndexMap,
    pub sp: SpMatrix,
    pub cluster: ClusterModel,
    pub design: RegressionDesign,
    pub estimate: TrafficEstimate,
}

pub fn analyze_traffic(source: &SourceData, settings: &PipelineSettings) -> Result<TrafficAnalysis> {
    let (mmrs, dt, map) = align_common_neighbors(&source.mmrs, &source.dt);
    let sp = build_sp_matrix(&dt, &settings.binning);
    let cluster = kmeans(&sp, &settings.kmeans).stage("clustering")?;
    let design = build_design(&cluster, &mmrs, &map).stage("regression")?;
    let estimate = stepwise_fit(&design, &settings.stepwise).stage("regression")?;
    Ok(TrafficAnalysis {
        mmrs,
        dt,
        map,
        sp,
        cluster,
        design,
        estimate,
    })
}

#[derive(Debug, Clone)]
pub enum FusionArtifacts {
    None,
    Reinforced {
        omitted: Vec<String>,
        reinforced: ReinforcedMmrs,
    },
    Reshaped(ReshapedDt),
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub pipeline: &'static str,
    pub icdm: Icdm,
    pub analysis: Option<TrafficAnalysis>,
    pub fusion: FusionArtifacts,
}

pub trait ImGenerator: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn generate(&self, source: &SourceData, settings: &PipelineSettings) -> Result<PipelineOutput>;
}

/// Conventional IM from MMRs alone.
pub struct MmrsOnly;

impl ImGenerator for MmrsOnly {
    fn name(&self) -> &'static str {
        "im-mr"
    }

    fn description(&self) -> &'static str {
        "ICDM from MMRs data"
    }

    fn generate(&self, source: &SourceData, settings: &PipelineSettings) -> Result<PipelineOutput> {
        let icdm = icdm_from_mmrs(&source.mmrs, &settings.binning, settings.normalization).stage("icdm")?;
        Ok(PipelineOutput {
            pipeline: self.name(),
            icdm,
            analysis: None,
            fusion: FusionArtifacts::None,
        })
    }
}

/// Conventional IM from DT records alone.
pub struct DtOnly;

impl ImGenerator for DtOnly {
    fn name(&self) -> &'static str {
        "im-dt"
    }

    fn description(&self) -> &'static str {
        "ICDM from DT data"
    }

    fn generate(&self, source: &SourceData, settings: &PipelineSettings) -> Result<PipelineOutput> {
        let icdm = icdm_from_dt(&source.dt, &settings.binning).stage("icdm")?;
        Ok(PipelineOutput {
            pipeline: self.name(),
            icdm,
            analysis: None,
            fusion: FusionArtifacts::None,
        })
    }
}

/// MMRs reinforced with DT-recovered severe interferers.
pub struct MmrsPlusDt;

impl ImGenerator for MmrsPlusDt {
    fn name(&self) -> &'static str {
        "mmrs+dt"
    }

    fn description(&self) -> &'static str {
        "ICDM from MMRs reinforced by DT (fusion I)"
    }

    fn generate(&self, source: &SourceData, settings: &PipelineSettings) -> Result<PipelineOutput> {
        let analysis = analyze_traffic(source, settings)?;
        let fusion = &settings.fusion;
        let omitted = find_omitted_severe(
            &analysis.cluster,
            &analysis.estimate,
            &analysis.map,
            &settings.binning,
            fusion.min_weight,
        );
        let completed = complete_mmrs(
            &analysis.cluster,
            &analysis.estimate,
            &analysis.map,
            &omitted,
            settings.binning.q(),
            fusion.include_intercept,
        )
        .stage("fusion")?;
        let reinforced = reinforce(&analysis.mmrs, completed, &omitted).stage("fusion")?;
        let icdm = icdm_from_reinforced(&reinforced, &settings.binning, settings.normalization).stage("icdm")?;
        Ok(PipelineOutput {
            pipeline: self.name(),
            icdm,
            analysis: Some(analysis),
            fusion: FusionArtifacts::Reinforced { omitted, reinforced },
        })
    }
}

/// DT reshaped to the MMR-estimated traffic distribution.
pub struct DtPlusMmrs;

impl ImGenerator for DtPlusMmrs {
    fn name(&self) -> &'static str {
        "dt+mmrs"
    }

    fn description(&self) -> &'static str {
        "ICDM from DT reshaped by MMRs traffic (fusion II)"
    }

    fn generate(&self, source: &SourceData, settings: &PipelineSettings) -> Result<PipelineOutput> {
        let analysis = analyze_traffic(source, settings)?;
        let reshaped =
            reshape_dt(&analysis.dt, &analysis.cluster, &analysis.estimate, settings.fusion.seed).stage("fusion")?;
        let icdm = icdm_from_reshaped(&reshaped, &settings.binning).stage("icdm")?;
        Ok(PipelineOutput {
            pipeline: self.name(),
            icdm,
            analysis: Some(analysis),
            fusion: FusionArtifacts::Reshaped(reshaped),
        })
    }
}

#[derive(Clone)]
pub struct PipelineRegistry {
    generators: BTreeMap<&'static str, Arc<dyn ImGenerator>>,
}

impl Default for PipelineRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PipelineRegistry {
    pub fn empty() -> Self {
        PipelineRegistry {
            generators: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(MmrsOnly));
        r.register(Arc::new(DtOnly));
        r.register(Arc::new(MmrsPlusDt));
        r.register(Arc::new(DtPlusMmrs));
        r
    }

    /// Adds a generator, replacing any previous one with the same name.
    pub fn register(&mut self, generator: Arc<dyn ImGenerator>) {
        self.generators.insert(generator.name(), generator);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ImGenerator>> {
        self.generators
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownPipeline(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.generators.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn ImGenerator>> {
        self.generators.values()
    }
}
