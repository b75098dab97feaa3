//! CSV and JSON output of trial records, and the matching parsers.
//!
//! Floats are rounded to 12 significant digits before writing, so parsing
//! an emitted file and emitting it again reproduces it byte for byte.

use std::path::Path;

use super::config::Format;
use super::sweep::TrialRecord;
use crate::error::{Error, Result};

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn rounded(rec: &TrialRecord) -> TrialRecord {
    let r = |x: Option<f64>| x.map(round12);
    TrialRecord {
        scc_frac: r(rec.scc_frac),
        norm_diam: r(rec.norm_diam),
        norm_diam_d0: r(rec.norm_diam_d0),
        pi_max: r(rec.pi_max),
        pi_min: r(rec.pi_min),
        exp_max: r(rec.exp_max),
        exp_min: r(rec.exp_min),
        residual: r(rec.residual),
        ..rec.clone()
    }
}

/// Column order of the CSV form.
pub const CSV_COLUMNS: &[&str] = &[
    "n", "r", "seed", "trial", "scc_frac", "attractive", "period", "diam", "diam_d0", "norm_diam",
    "norm_diam_d0", "pi_max", "pi_min", "exp_max", "exp_min", "residual", "iters", "flag_count",
    "flags_in_d0", "gw_extinct", "gen_ms", "scc_ms", "diam_ms", "stat_ms", "flags_ms", "gw_ms", "error",
];

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, msg: e.to_string() }
}

pub fn to_csv(records: &[TrialRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for rec in records {
        w.serialize(rounded(rec)).expect("records serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

pub fn to_json(records: &[TrialRecord]) -> String {
    let recs: Vec<TrialRecord> = records.iter().map(rounded).collect();
    let mut s = serde_json::to_string_pretty(&recs).expect("records serialize");
    s.push('\n');
    s
}

pub fn render(records: &[TrialRecord], format: Format) -> String {
    match format {
        Format::Csv => to_csv(records),
        Format::Json => to_json(records),
    }
}

/// Writes `records` to `path` in `format`.
pub fn emit(records: &[TrialRecord], format: Format, path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::param("no records to emit"));
    }
    std::fs::write(path, render(records, format)).map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Parse { line: 1, msg: "unexpected CSV header".into() });
    }
    rd.deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn parse_json(text: &str) -> Result<Vec<TrialRecord>> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
}

pub fn parse(text: &str, format: Format) -> Result<Vec<TrialRecord>> {
    match format {
        Format::Csv => parse_csv(text),
        Format::Json => parse_json(text),
    }
}
