//! Readers and writers for the on-disk formats.
//!
//! * MMRs and DT measurements: JSON lines, one report or record per line.
//! * MMRs vector: CSV `neighbor_id,q,count` with every `(j, q)` row.
//! * DT matrix: CSV `neighbor_id,record_index,cir_db`, detected entries only.
//! * ICDM: CSV `serving_id,neighbor_id,probability`.
//! * SP matrix: CSV `row,col,value` triplets, 1-based.
//!
//! The vector and matrix files start with a `#` line of `key=value` metadata
//! that the CSV body cannot express.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::cirsp::SpMatrix;
use crate::error::{Error, Result};
use crate::fusion::{reinforce, ReinforcedMmrs};
use crate::icdm::Icdm;
use crate::source_data::{DtMatrix, DtRecord, MmrReport, MmrsVector};

/// Version stamped into every JSON report.
pub const REPORT_SCHEMA: u32 = 1;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::File {
            path: dir.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

fn parse_error(origin: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_string(),
        line,
        message: message.into(),
    }
}

/// Parse JSON lines; blank lines are skipped.
pub fn parse_jsonl<T: DeserializeOwned>(text: &str, origin: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| parse_error(origin, n + 1, e.to_string())))
        .collect()
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_mmr_reports(text: &str, origin: &str) -> Result<Vec<MmrReport>> {
    let reports: Vec<MmrReport> = parse_jsonl(text, origin)?;
    check_each(&reports, text, origin, MmrReport::validate)?;
    Ok(reports)
}

pub fn parse_dt_records(text: &str, origin: &str) -> Result<Vec<DtRecord>> {
    let records: Vec<DtRecord> = parse_jsonl(text, origin)?;
    check_each(&records, text, origin, DtRecord::validate)?;
    Ok(records)
}

fn check_each<T>(items: &[T], text: &str, origin: &str, check: impl Fn(&T) -> Result<()>) -> Result<()> {
    let lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, _)| n + 1);
    for (item, line) in items.iter().zip(lines) {
        check(item).map_err(|e| parse_error(origin, line, e.to_string()))?;
    }
    Ok(())
}

pub fn read_mmr_reports(path: &Path) -> Result<Vec<MmrReport>> {
    parse_mmr_reports(&read_text(path)?, &path.display().to_string())
}

pub fn read_dt_records(path: &Path) -> Result<Vec<DtRecord>> {
    parse_dt_records(&read_text(path)?, &path.display().to_string())
}

fn check_token(what: &str, s: &str) -> Result<()> {
    if s.is_empty() || s.contains(|c: char| c.is_whitespace() || c == ';' || c == ',' || c == '"') {
        return Err(Error::Measurement(format!("{what} `{s}` cannot be written to a metadata line")));
    }
    Ok(())
}

fn meta_line(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}\n", body.join(" "))
}

/// Splits off the metadata line and returns its pairs plus the CSV body.
fn split_meta<'a>(text: &'a str, origin: &str) -> Result<(BTreeMap<String, String>, &'a str)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let meta = first
        .strip_prefix('#')
        .ok_or_else(|| parse_error(origin, 1, "expected a `# key=value` metadata line"))?;
    let mut pairs = BTreeMap::new();
    for token in meta.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| parse_error(origin, 1, format!("malformed metadata `{token}`")))?;
        pairs.insert(k.to_string(), v.to_string());
    }
    Ok((pairs, rest))
}

fn meta_get<T: std::str::FromStr>(meta: &BTreeMap<String, String>, key: &str, origin: &str) -> Result<T> {
    meta.get(key)
        .ok_or_else(|| parse_error(origin, 1, format!("missing metadata `{key}`")))?
        .parse()
        .map_err(|_| parse_error(origin, 1, format!("bad value for metadata `{key}`")))
}

/// Rows of a CSV body with their 1-based line numbers in the whole file.
fn csv_rows(body: &str, origin: &str, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let found = reader.headers().map_err(|e| parse_error(origin, 2, e.to_string()))?;
    if found.iter().map(str::trim).ne(header.iter().copied()) {
        return Err(parse_error(origin, 2, format!("expected header `{}`", header.join(","))));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize + 1);
            parse_error(origin, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize + 1);
        rows.push((line, rec));
    }
    Ok(rows)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str, origin: &str, line: usize) -> Result<T> {
    rec.get(i)
        .ok_or_else(|| parse_error(origin, line, format!("missing `{name}`")))?
        .trim()
        .parse()
        .map_err(|_| parse_error(origin, line, format!("bad `{name}` value `{}`", &rec[i])))
}

const MMRS_HEADER: [&str; 3] = ["neighbor_id", "q", "count"];

fn blocks_csv<'a>(
    serving_id: &str,
    total_reports: u64,
    q: usize,
    appended: usize,
    blocks: impl Iterator<Item = (&'a str, &'a [u64])>,
) -> Result<String> {
    check_token("serving id", serving_id)?;
    let mut meta = vec![
        ("serving_id", serving_id.to_string()),
        ("total_reports", total_reports.to_string()),
        ("q", q.to_string()),
    ];
    if appended > 0 {
        meta.push(("appended", appended.to_string()));
    }
    let mut out = meta_line(&meta);
    out.push_str(&MMRS_HEADER.join(","));
    out.push('\n');
    for (id, block) in blocks {
        check_token("neighbor id", id)?;
        for (q, c) in block.iter().enumerate() {
            writeln!(out, "{id},{},{c}", q + 1).unwrap();
        }
    }
    Ok(out)
}

pub fn mmrs_csv(mmrs: &MmrsVector) -> Result<String> {
    let blocks = (0..mmrs.j()).map(|j| (mmrs.neighbor_ids()[j].as_str(), mmrs.block(j)));
    blocks_csv(mmrs.serving_id(), mmrs.total_reports(), mmrs.q(), 0, blocks)
}

/// Reinforced MMRs in the MMRs-vector layout; the appended blocks come last
/// and their number is recorded in the metadata.
pub fn reinforced_csv(r: &ReinforcedMmrs) -> Result<String> {
    let base = r.base();
    blocks_csv(
        base.serving_id(),
        r.total_reports(),
        base.q(),
        r.appended_ids().len(),
        r.blocks(),
    )
}

/// Either kind of MMRs-vector file.
#[derive(Debug, Clone, PartialEq)]
pub enum MmrsFile {
    Plain(MmrsVector),
    Reinforced(ReinforcedMmrs),
}

impl MmrsFile {
    pub fn base(&self) -> &MmrsVector {
        match self {
            MmrsFile::Plain(m) => m,
            MmrsFile::Reinforced(r) => r.base(),
        }
    }
}

pub fn parse_mmrs_csv(text: &str, origin: &str) -> Result<MmrsFile> {
    let (meta, body) = split_meta(text, origin)?;
    let serving_id: String = meta_get(&meta, "serving_id", origin)?;
    let total_reports: u64 = meta_get(&meta, "total_reports", origin)?;
    let q: usize = meta_get(&meta, "q", origin)?;
    let appended: usize = if meta.contains_key("appended") {
        meta_get(&meta, "appended", origin)?
    } else {
        0
    };
    if q < 2 {
        return Err(parse_error(origin, 1, format!("Q must be >= 2, got {q}")));
    }

    let mut ids: Vec<String> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for (line, rec) in csv_rows(body, origin, &MMRS_HEADER)? {
        let id: String = field(&rec, 0, "neighbor_id", origin, line)?;
        let qi: usize = field(&rec, 1, "q", origin, line)?;
        let count: u64 = field(&rec, 2, "count", origin, line)?;
        let expected_q = counts.len() % q + 1;
        if expected_q == 1 {
            ids.push(id.clone());
        }
        if id != *ids.last().unwrap() || qi != expected_q {
            return Err(parse_error(
                origin,
                line,
                format!("expected row ({}, {expected_q}), found ({id}, {qi})", ids.last().unwrap()),
            ));
        }
        counts.push(count);
    }
    if !counts.len().is_multiple_of(q) {
        return Err(parse_error(origin, 0, "last neighbor block is incomplete"));
    }
    if appended > ids.len() {
        return Err(parse_error(origin, 1, "more appended blocks than neighbors"));
    }
    let split = ids.len() - appended;
    let extra_ids = ids.split_off(split);
    let extra_counts = counts.split_off(split * q);
    let base = MmrsVector::from_parts(serving_id, ids, q, counts, total_reports)
        .map_err(|e| parse_error(origin, 0, e.to_string()))?;
    if appended == 0 {
        Ok(MmrsFile::Plain(base))
    } else {
        let r = reinforce(&base, extra_counts, &extra_ids).map_err(|e| parse_error(origin, 0, e.to_string()))?;
        Ok(MmrsFile::Reinforced(r))
    }
}

pub fn read_mmrs_csv(path: &Path) -> Result<MmrsFile> {
    parse_mmrs_csv(&read_text(path)?, &path.display().to_string())
}

const DT_HEADER: [&str; 3] = ["neighbor_id", "record_index", "cir_db"];

/// CIR values use the shortest representation that parses back to the same
/// `f64`, so the file round-trips bit-exactly. Record indices are 0-based.
pub fn dt_csv(dt: &DtMatrix) -> Result<String> {
    check_token("serving id", dt.serving_id())?;
    for id in dt.neighbor_ids() {
        check_token("neighbor id", id)?;
    }
    let mut out = meta_line(&[
        ("serving_id", dt.serving_id().to_string()),
        ("records", dt.m().to_string()),
        ("neighbors", dt.neighbor_ids().join(";")),
    ]);
    out.push_str(&DT_HEADER.join(","));
    out.push('\n');
    for (i, id) in dt.neighbor_ids().iter().enumerate() {
        for m in 0..dt.m() {
            if let Some(v) = dt.get(i, m) {
                writeln!(out, "{id},{m},{v}").unwrap();
            }
        }
    }
    Ok(out)
}

pub fn parse_dt_csv(text: &str, origin: &str) -> Result<DtMatrix> {
    let (meta, body) = split_meta(text, origin)?;
    let serving_id: String = meta_get(&meta, "serving_id", origin)?;
    let records: usize = meta_get(&meta, "records", origin)?;
    let ids: Vec<String> = meta
        .get("neighbors")
        .filter(|s| !s.is_empty())
        .map(|s| s.split(';').map(str::to_string).collect())
        .unwrap_or_default();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let n = ids.len();
    let mut values = vec![None; n * records];
    for (line, rec) in csv_rows(body, origin, &DT_HEADER)? {
        let id: String = field(&rec, 0, "neighbor_id", origin, line)?;
        let m: usize = field(&rec, 1, "record_index", origin, line)?;
        let v: f64 = field(&rec, 2, "cir_db", origin, line)?;
        let i = *index
            .get(id.as_str())
            .ok_or_else(|| parse_error(origin, line, format!("neighbor `{id}` not declared in metadata")))?;
        if m >= records {
            return Err(parse_error(origin, line, format!("record index {m} out of range")));
        }
        if values[m * n + i].replace(v).is_some() {
            return Err(parse_error(origin, line, format!("duplicate entry ({id}, {m})")));
        }
    }
    DtMatrix::from_parts(serving_id, ids, values, records).map_err(|e| parse_error(origin, 0, e.to_string()))
}

pub fn read_dt_csv(path: &Path) -> Result<DtMatrix> {
    parse_dt_csv(&read_text(path)?, &path.display().to_string())
}

const ICDM_HEADER: [&str; 3] = ["serving_id", "neighbor_id", "probability"];

/// Probabilities are written with six decimals.
pub fn icdm_csv<'a>(rows: impl IntoIterator<Item = &'a Icdm>) -> String {
    let mut out = ICDM_HEADER.join(",");
    out.push('\n');
    for row in rows {
        for (id, p) in &row.entries {
            writeln!(out, "{},{id},{p:.6}", row.serving_id).unwrap();
        }
    }
    out
}

/// ICDM rows grouped by serving cell, in order of first appearance.
pub fn parse_icdm_csv(text: &str, origin: &str) -> Result<Vec<Icdm>> {
    let mut rows: Vec<(String, BTreeMap<String, f64>)> = Vec::new();
    for (line, rec) in csv_rows_no_meta(text, origin, &ICDM_HEADER)? {
        let serving: String = field(&rec, 0, "serving_id", origin, line)?;
        let id: String = field(&rec, 1, "neighbor_id", origin, line)?;
        let p: f64 = field(&rec, 2, "probability", origin, line)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(parse_error(origin, line, format!("probability {p} outside [0, 1]")));
        }
        let slot = match rows.iter().position(|(s, _)| *s == serving) {
            Some(k) => k,
            None => {
                rows.push((serving, BTreeMap::new()));
                rows.len() - 1
            }
        };
        if rows[slot].1.insert(id.clone(), p).is_some() {
            return Err(parse_error(origin, line, format!("duplicate element for `{id}`")));
        }
    }
    rows.into_iter().map(|(s, e)| Icdm::new(s, e)).collect()
}

fn csv_rows_no_meta(text: &str, origin: &str, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    // csv_rows numbers lines as if a metadata line preceded the body.
    csv_rows(text, origin, header).map(|rows| rows.into_iter().map(|(l, r)| (l - 1, r)).collect())
}

pub fn read_icdm_csv(path: &Path) -> Result<Vec<Icdm>> {
    parse_icdm_csv(&read_text(path)?, &path.display().to_string())
}

/// Joins several serving-cell rows into one keyed by `serving/neighbor`, so
/// multi-cell matrices can be compared element-wise. A single row is
/// returned unchanged.
pub fn flatten_icdm(rows: &[Icdm]) -> Result<Icdm> {
    match rows {
        [] => Err(Error::Icdm("ICDM file has no elements".into())),
        [one] => Ok(one.clone()),
        many => {
            let entries = many
                .iter()
                .flat_map(|r| r.entries.iter().map(move |(id, &p)| (format!("{}/{id}", r.serving_id), p)))
                .collect();
            Icdm::new("*", entries)
        }
    }
}

pub fn sp_csv(sp: &SpMatrix) -> String {
    let mut out = String::from("row,col,value\n");
    for (m, col) in sp.columns().iter().enumerate() {
        for &r in col {
            writeln!(out, "{},{},1", r + 1, m + 1).unwrap();
        }
    }
    out
}

/// Serializes `value` as pretty JSON with a top-level `"schema"` field.
pub fn json_report<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    match v.as_object_mut() {
        Some(obj) => {
            obj.insert("schema".into(), REPORT_SCHEMA.into());
        }
        None => {
            v = serde_json::json!({ "schema": REPORT_SCHEMA, "value": v });
        }
    }
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source_data::{build_dt_matrix, build_mmrs_vector, BinningConfig, Reading};
    use proptest::prelude::*;

    fn report(neighbors: &[(&str, f64)]) -> MmrReport {
        MmrReport {
            serving_id: "S".into(),
            serving_rxlev: -60.0,
            neighbors: neighbors.iter().map(|&(id, l)| Reading::new(id, l)).collect(),
        }
    }

    #[test]
    fn jsonl_shape_and_decimals() {
        let r = report(&[("A", -70.04), ("B", -81.25)]);
        let text = to_jsonl(&[r]).unwrap();
        assert_eq!(
            text,
            "{\"serving_id\":\"S\",\"serving_rxlev\":-60.0,\"neighbors\":[{\"id\":\"A\",\"rxlev\":-70.0},{\"id\":\"B\",\"rxlev\":-81.3}]}\n"
        );
    }

    #[test]
    fn jsonl_errors_carry_line_numbers() {
        let text = "{\"x\":0,\"y\":0,\"readings\":[]}\n\n{\"x\":1,\"y\":\n";
        match parse_dt_records(text, "dt.jsonl") {
            Err(Error::Parse { line, path, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(path, "dt.jsonl");
            }
            other => panic!("{other:?}"),
        }
        let dup = "{\"x\":0,\"y\":0,\"readings\":[{\"id\":\"A\",\"rxlev\":-50},{\"id\":\"A\",\"rxlev\":-51}]}\n";
        assert!(matches!(parse_dt_records(dup, "d"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn mmrs_csv_layout() {
        let b = BinningConfig::default();
        let m = build_mmrs_vector(&[report(&[("A", -70.0)]), report(&[("B", -58.0)])], &b).unwrap();
        let text = mmrs_csv(&m).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# serving_id=S total_reports=2 q=10");
        assert_eq!(lines[1], "neighbor_id,q,count");
        assert_eq!(lines.len(), 2 + 20);
        // CIR 10 dB falls in [9, 12), interval 7; CIR -2 dB in [-3, 0), interval 3.
        assert_eq!(lines[2 + 6], "A,7,1");
        assert_eq!(lines[12 + 2], "B,3,1");
        assert_eq!(parse_mmrs_csv(&text, "m").unwrap(), MmrsFile::Plain(m));
    }

    #[test]
    fn mmrs_csv_rejects_out_of_order_rows() {
        let text = "# serving_id=S total_reports=1 q=2\nneighbor_id,q,count\nA,2,0\nA,1,0\n";
        assert!(matches!(parse_mmrs_csv(text, "m"), Err(Error::Parse { line: 3, .. })));
        let text = "# serving_id=S total_reports=1 q=2\nneighbor_id,q,count\nA,1,0\nA,2,x\n";
        assert!(matches!(parse_mmrs_csv(text, "m"), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn reinforced_round_trip() {
        let b = BinningConfig::default();
        let m = build_mmrs_vector(&[report(&[("A", -70.0)])], &b).unwrap();
        let r = reinforce(&m, (0..20).collect(), &["X".into(), "Y".into()]).unwrap();
        let text = reinforced_csv(&r).unwrap();
        assert!(text.starts_with("# serving_id=S total_reports=1 q=10 appended=2\n"));
        assert_eq!(parse_mmrs_csv(&text, "r").unwrap(), MmrsFile::Reinforced(r));
    }

    #[test]
    fn dt_csv_keeps_undetected_neighbors() {
        let dt = DtMatrix::from_parts(
            "S".into(),
            vec!["B".into(), "A".into()],
            vec![Some(1.5), None, Some(-0.1), None],
            2,
        )
        .unwrap();
        let text = dt_csv(&dt).unwrap();
        assert_eq!(
            text,
            "# serving_id=S records=2 neighbors=B;A\nneighbor_id,record_index,cir_db\nB,0,1.5\nB,1,-0.1\n"
        );
        assert_eq!(parse_dt_csv(&text, "d").unwrap(), dt);
    }

    #[test]
    fn icdm_csv_round_trip_and_flatten() {
        let a = Icdm::new("S", [("A".to_string(), 0.25), ("B".to_string(), 1.0)].into()).unwrap();
        let t = Icdm::new("T", [("A".to_string(), 0.5)].into()).unwrap();
        let text = icdm_csv([&a, &t]);
        assert_eq!(
            text,
            "serving_id,neighbor_id,probability\nS,A,0.250000\nS,B,1.000000\nT,A,0.500000\n"
        );
        let rows = parse_icdm_csv(&text, "i").unwrap();
        assert_eq!(rows, vec![a.clone(), t]);
        let flat = flatten_icdm(&rows).unwrap();
        assert_eq!(flat.get("T/A"), Some(0.5));
        assert_eq!(flatten_icdm(&rows[..1]).unwrap(), a);

        let bad = "serving_id,neighbor_id,probability\nS,A,0.5\nS,B,1.5\n";
        assert!(matches!(parse_icdm_csv(bad, "i"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn report_has_schema() {
        #[derive(Serialize)]
        struct R {
            pearson: f64,
        }
        let v: serde_json::Value = serde_json::from_str(&json_report(&R { pearson: 0.5 }).unwrap()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["pearson"], 0.5);
    }

    fn arb_records() -> impl Strategy<Value = Vec<DtRecord>> {
        let reading = (0usize..6, -1100i32..-300).prop_map(|(c, t)| Reading::new(format!("C{c}"), t as f64 / 10.0));
        let record = (-1e4f64..1e4, -1e4f64..1e4, proptest::collection::vec(reading, 0..6), -900i32..-400).prop_map(
            |(x, y, rs, serving)| {
                let mut readings = vec![Reading::new("S", serving as f64 / 10.0)];
                for r in rs {
                    if !readings.iter().any(|o| o.id == r.id) {
                        readings.push(r);
                    }
                }
                DtRecord { x, y, readings }
            },
        );
        proptest::collection::vec(record, 1..30)
    }

    proptest! {
        #[test]
        fn rebuild_from_files_is_bit_exact(records in arb_records()) {
            let b = BinningConfig::default();
            let text = to_jsonl(&records).unwrap();
            let back = parse_dt_records(&text, "p").unwrap();
            let dt = build_dt_matrix(&records, "S").unwrap();
            let dt_back = build_dt_matrix(&back, "S").unwrap();
            prop_assert_eq!(&dt, &dt_back);
            let csv_back = parse_dt_csv(&dt_csv(&dt).unwrap(), "p").unwrap();
            prop_assert_eq!(&csv_back, &dt);
            for (a, c) in dt.columns().flatten().zip(csv_back.columns().flatten()) {
                prop_assert_eq!(a.map(f64::to_bits), c.map(f64::to_bits));
            }

            let reports: Vec<MmrReport> = records.iter().map(|r| MmrReport {
                serving_id: "S".into(),
                serving_rxlev: r.readings[0].rxlev,
                neighbors: r.readings[1..].to_vec(),
            }).collect();
            let mmrs = build_mmrs_vector(&reports, &b).unwrap();
            let reports_back = parse_mmr_reports(&to_jsonl(&reports).unwrap(), "p").unwrap();
            prop_assert_eq!(&reports_back, &reports);
            let file = parse_mmrs_csv(&mmrs_csv(&mmrs).unwrap(), "p").unwrap();
            prop_assert_eq!(file, MmrsFile::Plain(mmrs));
        }
    }
}
