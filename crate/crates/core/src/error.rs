use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library. Vertex ids inside messages are 1-based.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("no simple digraph accepted after {tries} attempts (n={n}, r={r})")]
    Exhausted { n: u32, r: u32, tries: u64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {0} has an out-edge leaving the largest component; it is not attractive")]
    NotAttractive(u32),

    #[error("{what} has {size} states, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("linear system is singular at pivot {0}")]
    Singular(usize),

    #[error("return-time trial {trial} exceeded the step cap of {cap}")]
    StepCap { trial: u64, cap: u64 },

    #[error("entrance layer at depth {k} of vertex {vertex} is empty")]
    EmptyEntrance { vertex: u32, k: u32 },

    #[error("symbol {symbol} is outside the alphabet of size {r}")]
    Symbol { symbol: u32, r: u32 },

    #[error("config error: {0}")]
    Config(String),

    #[error("insufficient data for {statistic} at r={r}")]
    InsufficientData { r: u32, statistic: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by a bad configuration or parameter rather than I/O.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
