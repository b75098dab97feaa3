//! Random r-out regular digraphs `D(n, r)`: seeded generation, in/out
//! exploration, strongly connected structure, diameters, stationary
//! distributions of the simple random walk, epsilon-flags, Poisson
//! Galton-Watson comparisons, a random DFA layer and a Monte Carlo sweep
//! harness.
//!
//! Vertices are `0..n` internally and `1..=n` in every text, CSV and JSON
//! output.

pub mod branching;
pub mod dfa;
pub mod error;
pub mod exploration;
pub mod flags;
pub mod graph;
pub mod harness;
mod linalg;
pub mod metrics;
pub mod par;
pub mod seed;
pub mod stationary;
pub mod stats;
pub mod structure;

pub use branching::{solve_constants, ModelConstants};
pub use error::{Error, Result};
pub use exploration::{ibfs, obfs, BfsResult, Direction, GrowthProfile};
pub use flags::{FlagParams, FlagReport};
pub use graph::{Digraph, Vertex};
pub use metrics::DiameterReport;
pub use par::Execution;
pub use seed::Seed;
pub use stationary::{MazeHardness, StationaryProfile};
pub use structure::{scc_decompose, SccDecomposition};
