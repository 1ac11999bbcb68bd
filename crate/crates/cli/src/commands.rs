//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use imfusion_core::fusion::{ReinforcedMmrs, SetTarget};
use imfusion_core::icdm::{
    icdm_from_dt, icdm_from_mmrs, icdm_from_reinforced, im_error, pearson, Icdm, ImError, Support,
};
use imfusion_core::io;
use imfusion_core::pipeline::{FusionArtifacts, PipelineOutput, PipelineRegistry, PipelineSettings, SourceData};
use imfusion_core::regression::TrafficEstimate;
use imfusion_core::scenario::{self, preset, Scenario, SimulationPlan, SimulationSeeds, Simulated};
use imfusion_core::source_data::{build_dt_matrix, build_mmrs_vector, BinningConfig, DtMatrix, MmrsVector};

use crate::config::{AnalysisFlags, BinningFlags, PipelineConfig, SimulationFlags};
use crate::{Command, Measurements};

/// Prefix errors with the stage that raised them.
trait Staged<T> {
    fn stage(self, name: &str) -> Result<T>;
}

impl<T, E: Into<anyhow::Error>> Staged<T> for std::result::Result<T, E> {
    fn stage(self, name: &str) -> Result<T> {
        self.map_err(|e| e.into().context(format!("stage `{name}`")))
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate {
            config,
            seed,
            preset,
            scenario,
            sim,
            binning,
            out,
        } => {
            let cfg = PipelineConfig::load_opt(config.as_deref()).stage("config")?;
            let binning = binning.resolve(&cfg).stage("config")?;
            let (name, scenario, plan) = resolve_scenario(&cfg, preset, scenario, seed, &sim)?;
            let out = out_dir(out, &cfg);
            let sim = scenario::simulate(&scenario, &plan, &binning).stage("simulate")?;
            write_simulation(&out, name.as_deref(), &scenario, &plan, &sim)?;
            println!(
                "simulated {} MMRs and {} DT records ({} skipped) into {}",
                sim.reports.len(),
                sim.drive_test.records.len(),
                sim.drive_test.skipped,
                out.display()
            );
            Ok(())
        }
        Command::Bin {
            config,
            input,
            binning,
            out,
        } => {
            let cfg = PipelineConfig::load_opt(config.as_deref()).stage("config")?;
            let binning = binning.resolve(&cfg).stage("config")?;
            let out = out_dir(out, &cfg);
            for (source, dir) in load_sources(&input, &cfg, &binning, &out)? {
                write_source(&dir, &source)?;
                println!(
                    "{}: J={} Q={} M={} I={}",
                    source.dt.serving_id(),
                    source.mmrs.j(),
                    source.mmrs.q(),
                    source.dt.m(),
                    source.dt.i()
                );
            }
            Ok(())
        }
        Command::FuseMmrs {
            config,
            input,
            binning,
            analysis,
            dump_sp,
            out,
        } => fuse("mmrs+dt", config, input, binning, analysis, dump_sp, out),
        Command::FuseDt {
            config,
            input,
            binning,
            analysis,
            dump_sp,
            out,
        } => fuse("dt+mmrs", config, input, binning, analysis, dump_sp, out),
        Command::Icdm {
            config,
            pipeline,
            list,
            input,
            binning,
            analysis,
            out,
        } => icdm(config, &pipeline, list, input, binning, analysis, out),
        Command::Compare {
            files,
            truth,
            union,
            out,
        } => compare(&files, truth.as_deref(), union, out.as_deref()),
        Command::Report {
            config,
            scenario_seed,
            preset,
            scenario,
            sim,
            binning,
            analysis,
            out,
        } => report(config, scenario_seed, preset, scenario, sim, binning, analysis, out),
    }
}

fn out_dir(flag: Option<PathBuf>, cfg: &PipelineConfig) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn write(path: &Path, text: &str) -> Result<()> {
    io::write_text(path, text).stage("write")
}

fn write_report<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &io::json_report(value).stage("write")?)
}

fn resolve_scenario(
    cfg: &PipelineConfig,
    preset_flag: Option<String>,
    scenario_flag: Option<PathBuf>,
    seed: Option<u64>,
    sim: &SimulationFlags,
) -> Result<(Option<String>, Scenario, SimulationPlan)> {
    let seed = seed.or(cfg.simulation.seed);
    let (preset_name, scenario_path) = match (preset_flag, scenario_flag) {
        (None, None) => (cfg.input.preset.clone(), cfg.input.scenario.clone()),
        flags => flags,
    };
    let (name, mut scenario, plan) = match (preset_name, scenario_path) {
        (Some(name), _) => {
            let p = preset(&name, seed.unwrap_or(0)).stage("simulate")?;
            (Some(name), p.scenario, p.plan)
        }
        (None, Some(path)) => {
            let text = io::read_text(&path).stage("read")?;
            let s = Scenario::from_json(&text)
                .with_context(|| path.display().to_string())
                .stage("read")?;
            (None, s, SimulationPlan::default())
        }
        (None, None) => return Err(anyhow!("need --preset or --scenario")).stage("config"),
    };
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let plan = sim.plan(cfg, plan);
    Ok((name, scenario, plan))
}

#[derive(Serialize)]
struct SimulationReport<'a> {
    preset: Option<&'a str>,
    seed: u64,
    seeds: SimulationSeeds,
    plan: &'a SimulationPlan,
    reports: usize,
    dt_records: usize,
    dt_skipped: usize,
}

fn write_simulation(
    out: &Path,
    name: Option<&str>,
    scenario: &Scenario,
    plan: &SimulationPlan,
    sim: &Simulated,
) -> Result<()> {
    write(&out.join("scenario.json"), &(serde_json::to_string_pretty(scenario)? + "\n"))?;
    write(&out.join("mmr.jsonl"), &io::to_jsonl(&sim.reports).stage("write")?)?;
    write(&out.join("dt.jsonl"), &io::to_jsonl(&sim.drive_test.records).stage("write")?)?;
    write(&out.join("truth_icdm.csv"), &io::icdm_csv([&sim.truth.icdm_true]))?;
    let mut regions = String::from("record_index,x,y,region\n");
    for (m, (rec, label)) in sim.drive_test.records.iter().zip(&sim.truth.region_label_per_dt_record).enumerate() {
        regions.push_str(&format!("{m},{},{},{label}\n", rec.x, rec.y));
    }
    write(&out.join("regions.csv"), &regions)?;
    write_report(
        &out.join("simulation.json"),
        &SimulationReport {
            preset: name,
            seed: scenario.seed,
            seeds: SimulationSeeds::derive(scenario.seed),
            plan,
            reports: sim.reports.len(),
            dt_records: sim.drive_test.records.len(),
            dt_skipped: sim.drive_test.skipped,
        },
    )
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn check_q(q: usize, binning: &BinningConfig, path: &Path) -> Result<()> {
    if q != binning.q() {
        bail!("{} was binned with Q={q}, current binning has Q={}", path.display(), binning.q());
    }
    Ok(())
}

fn load_mmrs(path: &Path, binning: &BinningConfig) -> Result<MmrsVector> {
    if is_csv(path) {
        let file = io::read_mmrs_csv(path).stage("read")?;
        let io::MmrsFile::Plain(m) = file else {
            return Err(anyhow!("{} holds reinforced MMRs, not source data", path.display())).stage("read");
        };
        check_q(m.q(), binning, path).stage("bin")?;
        Ok(m)
    } else {
        let reports = io::read_mmr_reports(path).stage("read")?;
        build_mmrs_vector(&reports, binning)
            .with_context(|| path.display().to_string())
            .stage("bin")
    }
}

fn load_dt(path: &Path, serving: &str) -> Result<DtMatrix> {
    if is_csv(path) {
        let dt = io::read_dt_csv(path).stage("read")?;
        if dt.serving_id() != serving {
            return Err(anyhow!(
                "{} is for serving cell `{}`, expected `{serving}`",
                path.display(),
                dt.serving_id()
            ))
            .stage("bin");
        }
        Ok(dt)
    } else {
        let records = io::read_dt_records(path).stage("read")?;
        build_dt_matrix(&records, serving)
            .with_context(|| path.display().to_string())
            .stage("bin")
    }
}

fn load_source(
    mmr: &Path,
    dt: &Path,
    serving: Option<&str>,
    binning: &BinningConfig,
) -> Result<SourceData> {
    let mmrs = load_mmrs(mmr, binning)?;
    let serving = match (serving, mmrs.serving_id()) {
        (Some(s), found) if !found.is_empty() && found != s => {
            return Err(anyhow!("MMRs are for serving cell `{found}`, expected `{s}`")).stage("bin")
        }
        (Some(s), _) => s.to_string(),
        (None, "") => return Err(anyhow!("no MMRs to take the serving cell from; pass --serving")).stage("bin"),
        (None, found) => found.to_string(),
    };
    let dt = load_dt(dt, &serving)?;
    Ok(SourceData { mmrs, dt })
}

/// Every run described by the flags or config, with its output directory.
fn load_sources(
    input: &Measurements,
    cfg: &PipelineConfig,
    binning: &BinningConfig,
    out: &Path,
) -> Result<Vec<(SourceData, PathBuf)>> {
    let manifest = input.manifest.clone().or_else(|| {
        (input.mmr.is_none() && input.dt.is_none())
            .then(|| cfg.input.manifest.clone())
            .flatten()
    });
    if let Some(path) = manifest {
        return read_manifest(&path)?
            .into_iter()
            .map(|row| {
                let source = load_source(&row.mmr, &row.dt, Some(&row.serving_id), binning)?;
                Ok((source, out.join(&row.serving_id)))
            })
            .collect();
    }
    let mmr = input
        .mmr
        .clone()
        .or_else(|| cfg.input.mmr.clone())
        .ok_or_else(|| anyhow!("missing --mmr"))
        .stage("config")?;
    let dt = input
        .dt
        .clone()
        .or_else(|| cfg.input.dt.clone())
        .ok_or_else(|| anyhow!("missing --dt"))
        .stage("config")?;
    let serving = input.serving.clone().or_else(|| cfg.input.serving_id.clone());
    Ok(vec![(load_source(&mmr, &dt, serving.as_deref(), binning)?, out.to_path_buf())])
}

struct ManifestRow {
    serving_id: String,
    mmr: PathBuf,
    dt: PathBuf,
}

fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let text = io::read_text(path).stage("read")?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if n == 0 {
            if line != "serving_id,mmr,dt" {
                return Err(anyhow!("{}:1: expected header `serving_id,mmr,dt`", path.display())).stage("read");
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [serving_id, mmr, dt] = fields[..] else {
            return Err(anyhow!("{}:{}: expected 3 fields", path.display(), n + 1)).stage("read");
        };
        rows.push(ManifestRow {
            serving_id: serving_id.to_string(),
            mmr: base.join(mmr),
            dt: base.join(dt),
        });
    }
    if rows.is_empty() {
        return Err(anyhow!("{} lists no serving cells", path.display())).stage("read");
    }
    Ok(rows)
}

fn write_source(dir: &Path, source: &SourceData) -> Result<()> {
    write(&dir.join("mmrs.csv"), &io::mmrs_csv(&source.mmrs).stage("write")?)?;
    write(&dir.join("dt.csv"), &io::dt_csv(&source.dt).stage("write")?)
}

#[derive(Serialize)]
struct RegressionReport<'a> {
    beta: &'a [f64],
    entered: &'a [usize],
    r_squared: f64,
    model_p_value: f64,
}

impl<'a> From<&'a TrafficEstimate> for RegressionReport<'a> {
    fn from(e: &'a TrafficEstimate) -> Self {
        RegressionReport {
            beta: &e.beta,
            entered: &e.entered,
            r_squared: e.r_squared,
            model_p_value: e.model_p_value,
        }
    }
}

#[derive(Serialize)]
struct FusionReport<'a> {
    pipeline: &'a str,
    serving_id: &'a str,
    omitted_ids: &'a [String],
    per_set_targets: &'a [SetTarget],
}

/// Intermediates, the unfused baseline and the fused ICDM of one run.
fn write_fusion(
    dir: &Path,
    source: &SourceData,
    settings: &PipelineSettings,
    output: &PipelineOutput,
    dump_sp: bool,
) -> Result<()> {
    write_source(dir, source)?;
    let analysis = output.analysis.as_ref().expect("fusion generators keep their analysis");
    if dump_sp {
        write(&dir.join("sp.csv"), &io::sp_csv(&analysis.sp))?;
    }
    write_report(&dir.join("clusters.json"), &analysis.cluster)?;
    write_report(&dir.join("regression.json"), &RegressionReport::from(&analysis.estimate))?;
    let serving_id = source.dt.serving_id();
    match &output.fusion {
        FusionArtifacts::Reinforced { omitted, reinforced } => {
            let base = icdm_from_mmrs(&source.mmrs, &settings.binning, settings.normalization).stage("icdm")?;
            write(&dir.join("im_mr.csv"), &io::icdm_csv([&base]))?;
            write(&dir.join("mmrs_reinforced.csv"), &io::reinforced_csv(reinforced).stage("write")?)?;
            write(&dir.join("im_mr_prime.csv"), &io::icdm_csv([&output.icdm]))?;
            write_report(
                &dir.join("fusion_report.json"),
                &FusionReport {
                    pipeline: output.pipeline,
                    serving_id,
                    omitted_ids: omitted,
                    per_set_targets: &[],
                },
            )
        }
        FusionArtifacts::Reshaped(reshaped) => {
            let base = icdm_from_dt(&source.dt, &settings.binning).stage("icdm")?;
            write(&dir.join("im_dt.csv"), &io::icdm_csv([&base]))?;
            let matrix = reshaped.to_matrix().stage("fusion")?;
            write(&dir.join("dt_reshaped.csv"), &io::dt_csv(&matrix).stage("write")?)?;
            write(&dir.join("im_dt_prime.csv"), &io::icdm_csv([&output.icdm]))?;
            write_report(
                &dir.join("fusion_report.json"),
                &FusionReport {
                    pipeline: output.pipeline,
                    serving_id,
                    omitted_ids: &[],
                    per_set_targets: reshaped.per_set_targets(),
                },
            )
        }
        FusionArtifacts::None => Ok(()),
    }
}

fn fuse(
    pipeline: &str,
    config: Option<PathBuf>,
    input: Measurements,
    binning: BinningFlags,
    analysis: AnalysisFlags,
    dump_sp: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    let cfg = PipelineConfig::load_opt(config.as_deref()).stage("config")?;
    let binning = binning.resolve(&cfg).stage("config")?;
    let settings = analysis.resolve(&cfg, binning.clone(), None);
    let out = out_dir(out, &cfg);
    let generator = PipelineRegistry::builtin().get(pipeline)?;
    let sources = load_sources(&input, &cfg, &binning, &out)?;
    let multi = sources.len() > 1;
    let mut rows = Vec::new();
    for (source, dir) in &sources {
        let output = generator.generate(source, &settings)?;
        write_fusion(dir, source, &settings, &output, dump_sp)?;
        let estimate = &output.analysis.as_ref().expect("analysis").estimate;
        let extra = match &output.fusion {
            FusionArtifacts::Reinforced { omitted, .. } => format!("recovered {omitted:?}"),
            FusionArtifacts::Reshaped(r) => format!("{} reshaped DT records", r.len()),
            FusionArtifacts::None => String::new(),
        };
        println!(
            "{}: entered clusters {:?}, R^2 {:.3}, {extra}",
            source.dt.serving_id(),
            estimate.entered,
            estimate.r_squared
        );
        rows.push(output.icdm);
    }
    if multi {
        let name = if pipeline == "mmrs+dt" { "im_mr_prime.csv" } else { "im_dt_prime.csv" };
        write(&out.join(name), &io::icdm_csv(&rows))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn icdm(
    config: Option<PathBuf>,
    pipeline: &str,
    list: bool,
    input: Measurements,
    binning: BinningFlags,
    analysis: AnalysisFlags,
    out: Option<PathBuf>,
) -> Result<()> {
    let registry = PipelineRegistry::builtin();
    if list {
        for g in registry.iter() {
            println!("{:<8} {}", g.name(), g.description());
        }
        return Ok(());
    }
    let cfg = PipelineConfig::load_opt(config.as_deref()).stage("config")?;
    let binning = binning.resolve(&cfg).stage("config")?;
    let settings = analysis.resolve(&cfg, binning.clone(), None);
    let mmr = input.mmr.clone().or_else(|| cfg.input.mmr.clone());
    let dt = input.dt.clone().or_else(|| cfg.input.dt.clone());

    let rows: Vec<Icdm> = match (&mmr, &dt, &input.manifest) {
        (Some(mmr), None, None) => vec![single_mmrs_icdm(mmr, &settings)?],
        (None, Some(dt), None) => {
            let matrix = if is_csv(dt) {
                io::read_dt_csv(dt).stage("read")?
            } else {
                let serving = input
                    .serving
                    .clone()
                    .or_else(|| cfg.input.serving_id.clone())
                    .ok_or_else(|| anyhow!("DT records alone need --serving"))
                    .stage("config")?;
                load_dt(dt, &serving)?
            };
            vec![icdm_from_dt(&matrix, &binning).stage("icdm")?]
        }
        _ => {
            let generator = registry.get(pipeline).stage("config")?;
            let scratch = PathBuf::new();
            load_sources(&input, &cfg, &binning, &scratch)?
                .iter()
                .map(|(source, _)| generator.generate(source, &settings).map(|o| o.icdm).map_err(Into::into))
                .collect::<Result<_>>()?
        }
    };
    let text = io::icdm_csv(&rows);
    match out {
        Some(path) => write(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn single_mmrs_icdm(path: &Path, settings: &PipelineSettings) -> Result<Icdm> {
    let binning = &settings.binning;
    if is_csv(path) {
        match io::read_mmrs_csv(path).stage("read")? {
            io::MmrsFile::Plain(m) => {
                check_q(m.q(), binning, path).stage("icdm")?;
                icdm_from_mmrs(&m, binning, settings.normalization).stage("icdm")
            }
            io::MmrsFile::Reinforced(r) => {
                check_q(r.base().q(), binning, path).stage("icdm")?;
                icdm_from_reinforced(&r, binning, settings.normalization).stage("icdm")
            }
        }
    } else {
        let m = load_mmrs(path, binning)?;
        icdm_from_mmrs(&m, binning, settings.normalization).stage("icdm")
    }
}

#[derive(Serialize)]
struct PairCorrelation {
    a: String,
    b: String,
    pearson: f64,
}

#[derive(Serialize)]
struct TruthError {
    file: String,
    #[serde(flatten)]
    error: ImError,
}

#[derive(Serialize)]
struct CompareReport {
    support: Support,
    pearson: Vec<PairCorrelation>,
    truth: Option<String>,
    errors: Vec<TruthError>,
}

fn comparison(named: &[(String, Icdm)], truth: Option<&(String, Icdm)>, support: Support) -> Result<CompareReport> {
    let mut pairs = Vec::new();
    for (i, (na, a)) in named.iter().enumerate() {
        for (nb, b) in &named[i + 1..] {
            let value = pearson(a, b, support)
                .with_context(|| format!("{na} vs {nb}"))
                .stage("compare")?;
            pairs.push(PairCorrelation {
                a: na.clone(),
                b: nb.clone(),
                pearson: value,
            });
        }
    }
    let errors = match truth {
        Some((_, t)) => named
            .iter()
            .map(|(n, icdm)| TruthError {
                file: n.clone(),
                error: im_error(icdm, t),
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(CompareReport {
        support,
        pearson: pairs,
        truth: truth.map(|(n, _)| n.clone()),
        errors,
    })
}

fn print_comparison(report: &CompareReport) {
    let width = report
        .pearson
        .iter()
        .flat_map(|p| [p.a.len(), p.b.len()])
        .chain(report.errors.iter().map(|e| e.file.len()))
        .max()
        .unwrap_or(4);
    println!("{:<width$}  {:<width$}  pearson", "a", "b");
    for p in &report.pearson {
        println!("{:<width$}  {:<width$}  {:.6}", p.a, p.b, p.pearson);
    }
    if let Some(t) = &report.truth {
        println!();
        println!("{:<width$}  {:>9}  {:>9}  mismatch   (vs {t})", "file", "mae", "max_ae");
        for e in &report.errors {
            println!(
                "{:<width$}  {:>9.6}  {:>9.6}  {:>8}",
                e.file, e.error.mae, e.error.max_ae, e.error.support_mismatch
            );
        }
    }
}

fn read_icdm(path: &Path) -> Result<(String, Icdm)> {
    let rows = io::read_icdm_csv(path).stage("read")?;
    let icdm = io::flatten_icdm(&rows)
        .with_context(|| path.display().to_string())
        .stage("read")?;
    Ok((path.display().to_string(), icdm))
}

fn compare(files: &[PathBuf], truth: Option<&Path>, union: bool, out: Option<&Path>) -> Result<()> {
    let named: Vec<(String, Icdm)> = files.iter().map(|f| read_icdm(f)).collect::<Result<_>>()?;
    let truth = truth.map(read_icdm).transpose()?;
    let support = if union { Support::UnionZeros } else { Support::Intersection };
    let report = comparison(&named, truth.as_ref(), support)?;
    print_comparison(&report);
    if let Some(path) = out {
        write_report(path, &report)?;
    }
    Ok(())
}

/// Cumulative fraction of each neighbor's samples at or below each interval.
fn cdf_rows(out: &mut String, source: &str, binning: &BinningConfig, blocks: impl Iterator<Item = (impl Display, Vec<u64>)>) {
    for (id, block) in blocks {
        let total: u64 = block.iter().sum();
        if total == 0 {
            continue;
        }
        let mut acc = 0;
        for (q, c) in block.iter().enumerate() {
            acc += c;
            let edge = binning.edges().get(q).map_or("inf".to_string(), |e| e.to_string());
            out.push_str(&format!("{source},{id},{},{edge},{:.6}\n", q + 1, acc as f64 / total as f64));
        }
    }
}

fn dt_blocks(dt: &DtMatrix, binning: &BinningConfig) -> Vec<(String, Vec<u64>)> {
    dt.neighbor_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let mut block = vec![0u64; binning.q()];
            for m in 0..dt.m() {
                if let Some(v) = dt.get(i, m) {
                    block[binning.bin(v) - 1] += 1;
                }
            }
            (id.clone(), block)
        })
        .collect()
}

fn mmrs_blocks(m: &MmrsVector) -> Vec<(String, Vec<u64>)> {
    (0..m.j()).map(|j| (m.neighbor_ids()[j].clone(), m.block(j).to_vec())).collect()
}

fn reinforced_blocks(r: &ReinforcedMmrs) -> Vec<(String, Vec<u64>)> {
    r.blocks().map(|(id, b)| (id.to_string(), b.to_vec())).collect()
}

#[derive(Serialize)]
struct Summary<'a> {
    preset: Option<&'a str>,
    seed: u64,
    settings: &'a PipelineSettings,
    m: usize,
    i: usize,
    j: usize,
    omitted_ids: &'a [String],
    entered: &'a [usize],
    r_squared: f64,
    comparison: CompareReport,
}

#[allow(clippy::too_many_arguments)]
fn report(
    config: Option<PathBuf>,
    scenario_seed: Option<u64>,
    preset_flag: Option<String>,
    scenario_flag: Option<PathBuf>,
    sim_flags: SimulationFlags,
    binning: BinningFlags,
    analysis: AnalysisFlags,
    out: Option<PathBuf>,
) -> Result<()> {
    let cfg = PipelineConfig::load_opt(config.as_deref()).stage("config")?;
    let binning = binning.resolve(&cfg).stage("config")?;
    let (name, scenario, plan) = resolve_scenario(&cfg, preset_flag, scenario_flag, scenario_seed, &sim_flags)?;
    let settings = analysis.resolve(&cfg, binning.clone(), Some(scenario.seed));
    let out = out_dir(out, &cfg);

    let sim = scenario::simulate(&scenario, &plan, &binning).stage("simulate")?;
    write_simulation(&out.join("simulation"), name.as_deref(), &scenario, &plan, &sim)?;
    let source = SourceData::build(&sim.reports, &sim.drive_test.records, &scenario.serving_id, &binning)?;

    let registry = PipelineRegistry::builtin();
    let mut outputs = BTreeMap::new();
    for g in registry.iter() {
        outputs.insert(g.name(), g.generate(&source, &settings)?);
    }
    write_fusion(&out.join("fuse-mmrs"), &source, &settings, &outputs["mmrs+dt"], false)?;
    write_fusion(&out.join("fuse-dt"), &source, &settings, &outputs["dt+mmrs"], false)?;

    let files = [
        ("im-mr", "im_mr.csv"),
        ("im-dt", "im_dt.csv"),
        ("mmrs+dt", "im_mr_prime.csv"),
        ("dt+mmrs", "im_dt_prime.csv"),
    ];
    let mut named = Vec::new();
    for (key, file) in files {
        write(&out.join(file), &io::icdm_csv([&outputs[key].icdm]))?;
        named.push((file.to_string(), outputs[key].icdm.clone()));
    }
    let truth = ("truth_icdm.csv".to_string(), sim.truth.icdm_true.clone());
    write(&out.join("truth_icdm.csv"), &io::icdm_csv([&truth.1]))?;
    let comparison = comparison(&named, Some(&truth), Support::Intersection)?;
    print_comparison(&comparison);

    let fused = &outputs["mmrs+dt"];
    let analysis = fused.analysis.as_ref().expect("analysis");
    let mut map = String::from("record_index,x,y,region,cluster\n");
    let records = &sim.drive_test.records;
    for (m, rec) in records.iter().enumerate() {
        map.push_str(&format!(
            "{m},{},{},{},{}\n",
            rec.x,
            rec.y,
            sim.truth.region_label_per_dt_record[m],
            analysis.cluster.membership()[m] + 1
        ));
    }
    write(&out.join("cluster_map.csv"), &map)?;

    let mut cdf = String::from("source,neighbor_id,q,upper_edge_db,cdf\n");
    cdf_rows(&mut cdf, "mmrs", &binning, mmrs_blocks(&source.mmrs).into_iter());
    cdf_rows(&mut cdf, "dt", &binning, dt_blocks(&source.dt, &binning).into_iter());
    let omitted: &[String] = match &fused.fusion {
        FusionArtifacts::Reinforced { omitted, reinforced } => {
            cdf_rows(&mut cdf, "mmrs_reinforced", &binning, reinforced_blocks(reinforced).into_iter());
            omitted
        }
        _ => &[],
    };
    if let FusionArtifacts::Reshaped(r) = &outputs["dt+mmrs"].fusion {
        let matrix = r.to_matrix().stage("fusion")?;
        cdf_rows(&mut cdf, "dt_reshaped", &binning, dt_blocks(&matrix, &binning).into_iter());
    }
    write(&out.join("cir_cdf.csv"), &cdf)?;

    write_report(
        &out.join("summary.json"),
        &Summary {
            preset: name.as_deref(),
            seed: scenario.seed,
            settings: &settings,
            m: source.dt.m(),
            i: source.dt.i(),
            j: source.mmrs.j(),
            omitted_ids: omitted,
            entered: &analysis.estimate.entered,
            r_squared: analysis.estimate.r_squared,
            comparison,
        },
    )?;
    println!("\nrecovered omitted neighbors: {omitted:?}; report in {}", out.display());
    Ok(())
}
