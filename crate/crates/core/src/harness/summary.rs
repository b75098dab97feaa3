//! Per-`(r, n)` statistics of a sweep against the reference constants.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::emit::round12;
use super::sweep::TrialRecord;
use crate::branching::solve_constants;
use crate::error::{Error, Result};
use crate::stats::{median, Estimate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub stderr: f64,
}

impl Stat {
    fn of(xs: &[f64]) -> Option<Stat> {
        if xs.is_empty() {
            return None;
        }
        let e = Estimate::from_samples(xs);
        Some(Stat { count: xs.len(), mean: e.mean, median: median(xs), stderr: e.stderr })
    }
}

/// The statistics tracked per cell, with their reference values.
pub const STATISTICS: &[&str] = &["scc_frac", "norm_diam", "norm_diam_d0", "exp_max", "exp_min"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub n: u32,
    /// Statistic name to its summary; absent when no record carried it.
    pub stats: BTreeMap<&'static str, Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RSummary {
    pub r: u32,
    pub lambda: f64,
    pub eta: f64,
    /// Cells in increasing `n`.
    pub cells: Vec<CellSummary>,
    /// Statistic name to `(mean at the largest n) - reference`.
    pub gaps: BTreeMap<&'static str, f64>,
}

impl RSummary {
    /// `lambda_r` for `scc_frac`, `1 + eta_r` for the diameters and `exp_min`,
    /// 1 for `exp_max`.
    pub fn reference(&self, statistic: &str) -> f64 {
        match statistic {
            "scc_frac" => self.lambda,
            "exp_max" => 1.0,
            _ => 1.0 + self.eta,
        }
    }

    /// `|mean - reference|` per cell for one statistic, in increasing `n`.
    pub fn gap_trend(&self, statistic: &str) -> Vec<(u32, f64)> {
        let reference = self.reference(statistic);
        self.cells
            .iter()
            .filter_map(|c| c.stats.get(statistic).map(|s| (c.n, (s.mean - reference).abs())))
            .collect()
    }
}

fn value(rec: &TrialRecord, statistic: &str) -> Option<f64> {
    match statistic {
        "scc_frac" => rec.scc_frac,
        "norm_diam" => rec.norm_diam,
        "norm_diam_d0" => rec.norm_diam_d0,
        "exp_max" => rec.exp_max,
        "exp_min" => rec.exp_min,
        _ => None,
    }
}

/// Groups records by `r` and `n`. Each `r` needs at least two distinct `n`.
pub fn estimate_constants(records: &[TrialRecord]) -> Result<Vec<RSummary>> {
    if records.is_empty() {
        return Err(Error::InsufficientData { r: 0, statistic: "records (none given)".into() });
    }
    let mut by_r: BTreeMap<u32, BTreeMap<u32, Vec<&TrialRecord>>> = BTreeMap::new();
    for rec in records {
        by_r.entry(rec.r).or_default().entry(rec.n).or_default().push(rec);
    }
    let mut out = Vec::new();
    for (r, by_n) in by_r {
        if by_n.len() < 2 {
            return Err(Error::InsufficientData { r, statistic: "n values (need at least two)".into() });
        }
        let (lambda, eta) = match solve_constants(r) {
            Ok(c) => (c.lambda, c.eta),
            Err(_) => (f64::NAN, f64::NAN),
        };
        let cells: Vec<CellSummary> = by_n
            .iter()
            .map(|(&n, recs)| {
                let stats = STATISTICS
                    .iter()
                    .filter_map(|&s| {
                        let xs: Vec<f64> = recs.iter().filter_map(|rec| value(rec, s)).collect();
                        Stat::of(&xs).map(|st| (s, st))
                    })
                    .collect();
                CellSummary { n, stats }
            })
            .collect();
        let mut summary = RSummary { r, lambda, eta, cells, gaps: BTreeMap::new() };
        let last = summary.cells.last().expect("two cells");
        let gaps = STATISTICS
            .iter()
            .filter_map(|&s| last.stats.get(s).map(|st| (s, st.mean - summary.reference(s))))
            .collect();
        summary.gaps = gaps;
        out.push(summary);
    }
    Ok(out)
}

/// `r,n,statistic,count,mean,median,stderr,reference` rows.
pub fn summary_csv(summaries: &[RSummary]) -> String {
    let mut s = String::from("r,n,statistic,count,mean,median,stderr,reference\n");
    for rs in summaries {
        for c in &rs.cells {
            for (name, st) in &c.stats {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    rs.r,
                    c.n,
                    name,
                    st.count,
                    round12(st.mean),
                    round12(st.median),
                    round12(st.stderr),
                    round12(rs.reference(name))
                );
            }
        }
    }
    s
}
