//! Seeded trials across `(n, r)` cells.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{FlagScale, Measurement, SweepConfig};
use crate::branching::{gw_sample, DEFAULT_POP_CAP};
use crate::error::Result;
use crate::flags::{find_flags, FlagParams};
use crate::graph::Digraph;
use crate::metrics::diameters;
use crate::par::{map_indices, Execution};
use crate::seed::Seed;
use crate::stationary::stationary_power;
use crate::structure::scc_decompose;

/// One trial. Every value except the `*_ms` timings is a function of
/// `(n, r, seed)` and the configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: u32,
    pub r: u32,
    /// Derived trial seed.
    pub seed: u64,
    pub trial: u64,
    pub scc_frac: Option<f64>,
    pub attractive: Option<bool>,
    pub period: Option<u32>,
    pub diam: Option<u32>,
    pub diam_d0: Option<u32>,
    pub norm_diam: Option<f64>,
    pub norm_diam_d0: Option<f64>,
    pub pi_max: Option<f64>,
    pub pi_min: Option<f64>,
    pub exp_max: Option<f64>,
    pub exp_min: Option<f64>,
    pub residual: Option<f64>,
    pub iters: Option<u64>,
    pub flag_count: Option<u64>,
    pub flags_in_d0: Option<u64>,
    pub gw_extinct: Option<bool>,
    pub gen_ms: Option<u64>,
    pub scc_ms: Option<u64>,
    pub diam_ms: Option<u64>,
    pub stat_ms: Option<u64>,
    pub flags_ms: Option<u64>,
    pub gw_ms: Option<u64>,
    /// Failures of individual measurements, `; `-separated.
    pub error: Option<String>,
}

impl TrialRecord {
    fn note(&mut self, stage: &str, msg: impl std::fmt::Display) {
        let e = format!("{stage}: {msg}");
        self.error = Some(match self.error.take() {
            Some(prev) => format!("{prev}; {e}"),
            None => e,
        });
    }
}

struct Clock {
    on: bool,
    at: Instant,
}

impl Clock {
    fn lap(&mut self) -> Option<u64> {
        let now = Instant::now();
        let ms = (now - self.at).as_millis() as u64;
        self.at = now;
        self.on.then_some(ms)
    }
}

/// Flag parameters for one cell: the configured scale, then any explicit thresholds.
pub fn flag_params(cfg: &SweepConfig, n: u32, r: u32) -> Result<FlagParams> {
    let base = match cfg.flag_scale {
        FlagScale::Literal => FlagParams::new(n, r, cfg.eps)?,
        FlagScale::Desk => FlagParams::desk_scale(n, r, cfg.eps)?,
    };
    Ok(base.with_thresholds(
        cfg.flag_threshold.unwrap_or(base.threshold),
        cfg.flag_size_cap.unwrap_or(base.size_cap),
    ))
}

fn measure(cfg: &SweepConfig, rec: &mut TrialRecord, exec: Execution) {
    let (n, r, seed) = (rec.n, rec.r, Seed(rec.seed));
    let mut clock = Clock { on: cfg.timings, at: Instant::now() };
    let generated = if cfg.simple {
        Digraph::generate_simple(n, r, seed)
    } else {
        Digraph::generate(n, r, seed)
    };
    let g = match generated {
        Ok(g) => g,
        Err(e) => return rec.note("gen", e),
    };
    rec.gen_ms = clock.lap();
    measure_graph(cfg, &g, rec, exec);
}

/// Runs the configured measurements on `g`, filling `rec`. The `gw`
/// measurement draws its tree from `rec.seed`.
pub fn measure_graph(cfg: &SweepConfig, g: &Digraph, rec: &mut TrialRecord, exec: Execution) {
    let (n, r, seed) = (g.n(), g.r(), Seed(rec.seed));
    let mut clock = Clock { on: cfg.timings, at: Instant::now() };
    let needs_dec = [Measurement::Scc, Measurement::Diam, Measurement::Stationary, Measurement::Flags]
        .iter()
        .any(|&m| cfg.wants(m));
    if needs_dec {
        let dec = scc_decompose(g);
        rec.scc_frac = Some(f64::from(dec.d0_size()) / f64::from(n));
        rec.attractive = Some(dec.attractive);
        rec.period = Some(dec.period);
        rec.scc_ms = clock.lap();

        if cfg.wants(Measurement::Diam) {
            let (whole, d0) = diameters(g, &dec, exec);
            rec.diam = Some(whole.value);
            rec.diam_d0 = Some(d0.value);
            rec.norm_diam = Some(whole.normalized);
            rec.norm_diam_d0 = Some(d0.normalized);
            rec.diam_ms = clock.lap();
        }
        if cfg.wants(Measurement::Stationary) {
            match stationary_power(g, &dec, cfg.tol, cfg.max_iter) {
                Ok(p) => {
                    rec.pi_max = Some(p.pi_max);
                    rec.pi_min = Some(p.pi_min);
                    rec.exp_max = Some(p.exp_max);
                    rec.exp_min = Some(p.exp_min);
                    rec.residual = Some(p.residual);
                    rec.iters = Some(p.iterations);
                    if !p.converged {
                        rec.note("stationary", format!("not converged after {} iterations", p.iterations));
                    }
                }
                Err(e) => rec.note("stationary", e),
            }
            rec.stat_ms = clock.lap();
        }
        if cfg.wants(Measurement::Flags) {
            match flag_params(cfg, n, r) {
                Ok(p) => {
                    let found = find_flags(g, &p, Some(&dec), exec);
                    rec.flag_count = Some(found.len() as u64);
                    rec.flags_in_d0 = Some(found.iter().filter(|f| f.in_d0 == Some(true)).count() as u64);
                }
                Err(e) => rec.note("flags", e),
            }
            rec.flags_ms = clock.lap();
        }
    }
    if cfg.wants(Measurement::Gw) {
        let t = gw_sample(r, cfg.gw_depth, DEFAULT_POP_CAP, seed.substream(0));
        rec.gw_extinct = Some(t.extinct());
        rec.gw_ms = clock.lap();
    }
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

pub(crate) fn run_sweep_with<F>(cfg: &SweepConfig, body: F) -> Result<Vec<TrialRecord>>
where
    F: Fn(&SweepConfig, &mut TrialRecord, Execution) + Sync,
{
    cfg.validate()?;
    let exec = if cfg.parallel { Execution::Parallel } else { Execution::Sequential };
    let mut cells: Vec<(u32, u32, u64)> = Vec::new();
    for &n in &cfg.n {
        for &r in &cfg.r {
            cells.extend((0..cfg.trials).map(|t| (n, r, t)));
        }
    }
    cells.sort_unstable();
    cells.dedup();
    let master = Seed(cfg.seed);
    let records = map_indices(exec, cells.len(), |i| {
        let (n, r, trial) = cells[i];
        let mut rec = TrialRecord {
            n,
            r,
            trial,
            seed: Seed::for_trial(master, n, r, trial).0,
            ..TrialRecord::default()
        };
        let outcome = catch_unwind(AssertUnwindSafe(|| body(cfg, &mut rec, exec)));
        if let Err(p) = outcome {
            rec.note("panic", panic_message(p.as_ref()));
        }
        rec
    });
    Ok(records)
}

/// Runs every `(n, r, trial)` cell. A failing or panicking measurement is
/// noted in the record's `error` field and the sweep carries on. Records
/// come back sorted by `(n, r, trial)`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<TrialRecord>> {
    run_sweep_with(cfg, measure)
}
