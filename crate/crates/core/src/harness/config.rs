//! Sweep configuration: flat `key = value` lines, lists comma-separated,
//! `#` starts a comment.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flags::DEFAULT_EPSILON;
use crate::stationary::{DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measurement {
    Scc,
    Diam,
    Stationary,
    Flags,
    Gw,
}

impl FromStr for Measurement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "scc" => Measurement::Scc,
            "diam" => Measurement::Diam,
            "stationary" | "stat" => Measurement::Stationary,
            "flags" => Measurement::Flags,
            "gw" => Measurement::Gw,
            _ => return Err(Error::Config(format!("measurements: unknown measurement `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("format: expected csv or json, got `{s}`"))),
        }
    }
}

/// Which flag thresholds to use when `flag_threshold`/`flag_size_cap` are unset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlagScale {
    /// `ceil(ln^4 n)` and `ceil(ln^7 n)`.
    Literal,
    /// `ceil(ln^2 n)` and `ceil(ln^3 n)`.
    Desk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: Vec<u32>,
    pub r: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    pub measurements: Vec<Measurement>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub max_iter: u64,
    pub eps: f64,
    pub flag_scale: FlagScale,
    pub flag_threshold: Option<u64>,
    pub flag_size_cap: Option<u64>,
    /// Depth of the GW tree drawn per trial by the `gw` measurement.
    pub gw_depth: u32,
    /// Condition on simple digraphs.
    pub simple: bool,
    /// Record per-stage wall-clock times. Off by default so that output is a
    /// function of the configuration alone.
    pub timings: bool,
    pub parallel: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: Vec::new(),
            r: vec![2],
            trials: 1,
            seed: 0,
            measurements: vec![Measurement::Scc, Measurement::Diam, Measurement::Stationary],
            format: Format::Csv,
            out: None,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            eps: DEFAULT_EPSILON,
            flag_scale: FlagScale::Literal,
            flag_threshold: None,
            flag_size_cap: None,
            gw_depth: 30,
            simple: false,
            timings: false,
            parallel: true,
        }
    }
}

/// Parses `4096` or `2^12`.
fn parse_count(key: &str, v: &str) -> Result<u64> {
    let bad = || Error::Config(format!("{key}: cannot parse `{v}` as a count"));
    match v.split_once('^') {
        Some((b, e)) => {
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            b.checked_pow(e).ok_or_else(bad)
        }
        None => v.parse().map_err(|_| bad()),
    }
}

fn parse_u32(key: &str, v: &str) -> Result<u32> {
    u32::try_from(parse_count(key, v)?).map_err(|_| Error::Config(format!("{key}: `{v}` is too large")))
}

fn parse_list<T>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(key, s))
        .collect()
}

fn parse_float(key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse `{v}` as a number")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got `{v}`"))),
    }
}

impl SweepConfig {
    /// Reads `key = value` lines on top of the defaults, then validates.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        cfg.merge_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies `key = value` lines on top of the current values without
    /// validating, so that later overrides can complete the configuration.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Sets one field from its text form.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "n" => self.n = parse_list(key, v, parse_u32)?,
            "r" => self.r = parse_list(key, v, parse_u32)?,
            "trials" => self.trials = parse_count(key, v)?,
            "seed" => self.seed = parse_count(key, v)?,
            "measurements" | "measure" => {
                self.measurements = parse_list(key, v, |_, s| s.parse())?;
                self.measurements.sort();
                self.measurements.dedup();
            }
            "format" => self.format = v.parse()?,
            "out" => self.out = (!v.is_empty()).then(|| PathBuf::from(v)),
            "tol" => self.tol = parse_float(key, v)?,
            "max_iter" => self.max_iter = parse_count(key, v)?,
            "eps" => self.eps = parse_float(key, v)?,
            "flag_scale" => {
                self.flag_scale = match v {
                    "literal" => FlagScale::Literal,
                    "desk" => FlagScale::Desk,
                    _ => return Err(Error::Config(format!("flag_scale: expected literal or desk, got `{v}`"))),
                }
            }
            "flag_threshold" => self.flag_threshold = Some(parse_count(key, v)?),
            "flag_size_cap" => self.flag_size_cap = Some(parse_count(key, v)?),
            "gw_depth" => self.gw_depth = parse_u32(key, v)?,
            "simple" => self.simple = parse_bool(key, v)?,
            "timings" => self.timings = parse_bool(key, v)?,
            "parallel" => self.parallel = parse_bool(key, v)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.n.is_empty() {
            return fail("n: list is empty");
        }
        if self.r.is_empty() {
            return fail("r: list is empty");
        }
        if self.measurements.is_empty() {
            return fail("measurements: list is empty");
        }
        if self.trials == 0 {
            return fail("trials: must be at least 1");
        }
        if self.n.contains(&0) {
            return fail("n: values must be positive");
        }
        if self.r.contains(&0) {
            return fail("r: values must be positive");
        }
        if !(self.tol > 0.0) {
            return fail("tol: must be positive");
        }
        if !(self.eps > 0.0) {
            return fail("eps: must be positive");
        }
        if self.simple {
            if let Some(&(n, r)) = self.cells_nr().iter().find(|(n, r)| n <= r) {
                return Err(Error::Config(format!("simple: needs n > r, got n={n}, r={r}")));
            }
        }
        Ok(())
    }

    fn cells_nr(&self) -> Vec<(u32, u32)> {
        self.n.iter().flat_map(|&n| self.r.iter().map(move |&r| (n, r))).collect()
    }

    pub fn wants(&self, m: Measurement) -> bool {
        self.measurements.contains(&m)
    }
}
