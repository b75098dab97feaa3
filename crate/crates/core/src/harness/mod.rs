//! Monte Carlo sweeps: configuration, execution, summaries and output.

pub mod config;
pub mod emit;
pub mod summary;
pub mod sweep;

pub use config::{FlagScale, Format, Measurement, SweepConfig};
pub use emit::{emit, parse, render};
pub use summary::{estimate_constants, RSummary};
pub use sweep::{flag_params, measure_graph, run_sweep, TrialRecord};
