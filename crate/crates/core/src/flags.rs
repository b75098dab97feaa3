//! Epsilon-flags: vertices whose in-neighbourhood up to `k_1` is a small
//! tree reaching the threshold only after at least `k*` levels.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::branching::solve_constants;
use crate::error::{Error, Result};
use crate::exploration::{ceil_ln_pow, default_size_cap, default_threshold, InLayerWalk};
use crate::graph::{Digraph, Vertex};
use crate::par::{map_indices_with, Execution};
use crate::stationary::StationaryProfile;
use crate::structure::SccDecomposition;

pub const DEFAULT_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagParams {
    pub epsilon: f64,
    /// `ceil((eta_r - epsilon / 2) log_r n)`.
    pub k_star: u32,
    /// In-layer size defining `k_1`.
    pub threshold: u64,
    /// Largest admissible `|N_{<=k_1}^-(v)|`.
    pub size_cap: u64,
}

impl FlagParams {
    /// Defaults `threshold = ceil(ln^4 n)` and `size_cap = ceil(ln^7 n)`.
    pub fn new(n: u32, r: u32, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::param("epsilon must be positive"));
        }
        let eta = solve_constants(r)?.eta;
        let k = ((eta - epsilon / 2.0) * f64::from(n).ln() / f64::from(r).ln()).ceil();
        if !(k >= 1.0) {
            return Err(Error::param(format!("epsilon {epsilon} leaves k* = {k} below 1 for n={n}, r={r}")));
        }
        Ok(FlagParams {
            epsilon,
            k_star: k as u32,
            threshold: default_threshold(n),
            size_cap: default_size_cap(n),
        })
    }

    /// Thresholds `ceil(ln^2 n)` and `ceil(ln^3 n)`, for graph sizes where
    /// `ln^4 n` is already a sizeable fraction of `n`.
    pub fn desk_scale(n: u32, r: u32, epsilon: f64) -> Result<Self> {
        Ok(FlagParams::new(n, r, epsilon)?.with_thresholds(ceil_ln_pow(n, 2), ceil_ln_pow(n, 3)))
    }

    pub fn with_thresholds(mut self, threshold: u64, size_cap: u64) -> Self {
        self.threshold = threshold.max(1);
        self.size_cap = size_cap;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReport {
    pub vertex: Vertex,
    pub is_flag: bool,
    /// `None` when the in-layers die out, or when the scan stopped at the size cap.
    pub k1: Option<u32>,
    /// `|N_{<=k}^-(v)|` at the depth where the scan stopped.
    pub maze_size: u64,
    /// The scan passed `size_cap` before `k_1` was reached.
    pub capped: bool,
    pub is_tree: bool,
    /// `|N_{k*}^-(v)|`, recorded when the maze is a tree.
    pub entrance: u64,
    pub in_d0: Option<bool>,
}

fn scan(g: &Digraph, v: Vertex, p: &FlagParams, walk: &mut InLayerWalk, maze: &mut Vec<Vertex>) -> FlagReport {
    let mut report = FlagReport {
        vertex: v,
        is_flag: false,
        k1: None,
        maze_size: 1,
        capped: false,
        is_tree: false,
        entrance: 0,
        in_d0: None,
    };
    walk.start(v);
    maze.clear();
    maze.push(v);
    let mut entrance = if p.k_star == 0 { 1 } else { 0 };
    loop {
        let layer = walk.advance(g);
        let d = layer.len() as u64;
        maze.extend_from_slice(layer);
        report.maze_size = walk.discovered() as u64;
        if walk.depth() == p.k_star {
            entrance = d;
        }
        if d == 0 {
            return report;
        }
        if d >= p.threshold {
            report.k1 = Some(walk.depth());
            break;
        }
        if report.maze_size > p.size_cap {
            report.capped = true;
            return report;
        }
    }
    let k1 = report.k1.expect("set above");
    if k1 < p.k_star || report.maze_size > p.size_cap {
        return report;
    }
    // A tree has exactly |M| - 1 internal edges, counted with multiplicity.
    let limit = maze.len() - 1;
    let mut edges = 0usize;
    'count: for &u in maze.iter() {
        for &w in g.out(u) {
            if walk.contains(w) {
                edges += 1;
                if edges > limit {
                    break 'count;
                }
            }
        }
    }
    report.is_tree = edges == limit;
    report.is_flag = report.is_tree;
    if report.is_tree {
        report.entrance = entrance;
    }
    report
}

pub fn is_flag(g: &Digraph, v: Vertex, p: &FlagParams) -> FlagReport {
    scan(g, v, p, &mut InLayerWalk::new(g.n()), &mut Vec::new())
}

const SCAN_CHUNK: usize = 1024;

/// Scans every vertex and returns the flags in vertex order. With a
/// decomposition, `in_d0` is filled in.
pub fn find_flags(g: &Digraph, p: &FlagParams, dec: Option<&SccDecomposition>, exec: Execution) -> Vec<FlagReport> {
    let n = g.n() as usize;
    map_indices_with(
        exec,
        n.div_ceil(SCAN_CHUNK),
        || (InLayerWalk::new(g.n()), Vec::new()),
        |(walk, maze), c| {
            (c * SCAN_CHUNK..((c + 1) * SCAN_CHUNK).min(n))
                .map(|v| scan(g, v as Vertex, p, walk, maze))
                .filter(|rep| rep.is_flag)
                .map(|mut rep| {
                    rep.in_d0 = dec.map(|d| d.in_d0(rep.vertex));
                    rep
                })
                .collect::<Vec<_>>()
        },
    )
    .concat()
}

/// `n,r,seed,vertex,k1,maze_size,is_tree,is_flag` rows; vertices 1-based,
/// `k1` empty when undefined.
pub fn flags_csv(n: u32, r: u32, seed: u64, reports: &[FlagReport]) -> String {
    let mut s = String::from("n,r,seed,vertex,k1,maze_size,is_tree,is_flag\n");
    for f in reports {
        let k1 = f.k1.map(|k| k.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{n},{r},{seed},{},{k1},{},{},{}", f.vertex + 1, f.maze_size, f.is_tree, f.is_flag);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagStationaryCheck {
    pub pi: f64,
    /// `|N_{k*}^-(v)| r^{-k*} pi_max`.
    pub bound: f64,
    pub holds: bool,
}

/// On a tree maze every length-`k*` path into `v` starts in `N_{k*}^-(v)`
/// and is unique, so `pi(v) = r^{-k*} sum_{u in N_{k*}^-} pi(u)`, which is at
/// most the bound.
pub fn check_flag_stationary(report: &FlagReport, p: &FlagParams, profile: &StationaryProfile) -> FlagStationaryCheck {
    let pi = profile.pi_of(report.vertex);
    let bound = report.entrance as f64 * f64::from(profile.r).powi(-(p.k_star as i32)) * profile.pi_max;
    FlagStationaryCheck {
        pi,
        bound,
        holds: pi <= bound + profile.residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exploration::k1;

    /// A complete binary in-tree of the given depth into vertex 0 whose
    /// vertices otherwise point at `sink`, a vertex with a loop pair.
    fn in_tree(depth: u32) -> (Digraph, u32) {
        let tree = (1u32 << (depth + 1)) - 1;
        let n = tree + 1;
        let sink = tree;
        let mut heads = Vec::new();
        for u in 0..tree {
            let parent = if u == 0 { sink } else { (u - 1) / 2 };
            heads.extend([parent, sink]);
        }
        heads.extend([sink, sink]);
        (Digraph::from_heads(n, 2, heads).unwrap(), sink)
    }

    #[test]
    fn binary_in_tree_is_a_flag() {
        let (g, _) = in_tree(6);
        let p = FlagParams { epsilon: 0.2, k_star: 5, threshold: 64, size_cap: 200 };
        let rep = is_flag(&g, 0, &p);
        assert_eq!(rep.k1, Some(6));
        assert_eq!(rep.maze_size, 127);
        assert!(rep.is_tree && rep.is_flag);
        assert_eq!(rep.entrance, 32);
        assert_eq!(k1(&g, 0, 64), Some(6));

        let shallow = FlagParams { k_star: 7, ..p };
        assert!(!is_flag(&g, 0, &shallow).is_flag);
        let tight = FlagParams { size_cap: 50, ..p };
        let capped = is_flag(&g, 0, &tight);
        assert!(capped.capped && !capped.is_flag);
    }

    #[test]
    fn an_extra_edge_breaks_the_tree() {
        let (g, sink) = in_tree(5);
        let mut heads = g.heads().to_vec();
        // A leaf's second edge now points back into the maze.
        let leaf = g.n() - 2;
        assert_ne!(heads[(leaf * 2 + 1) as usize], 0);
        heads[(leaf * 2 + 1) as usize] = 3;
        assert_eq!(g.heads()[(leaf * 2 + 1) as usize], sink);
        let g = Digraph::from_heads(g.n(), 2, heads).unwrap();
        let p = FlagParams { epsilon: 0.2, k_star: 4, threshold: 31, size_cap: 200 };
        let rep = is_flag(&g, 0, &p);
        assert_eq!(rep.k1, Some(5));
        assert!(!rep.is_tree && !rep.is_flag);
    }

    #[test]
    fn no_in_edges_and_all_loops() {
        let g = Digraph::all_loops(20, 2).unwrap();
        let p = FlagParams { epsilon: 0.2, k_star: 1, threshold: 2, size_cap: 10 };
        assert_eq!(is_flag(&g, 3, &p).k1, None);
        assert!(find_flags(&g, &p, None, Execution::Sequential).is_empty());
    }

    #[test]
    fn params_follow_the_definitions() {
        let p = FlagParams::new(1 << 16, 2, 0.2).unwrap();
        assert_eq!(p.k_star, 11);
        assert_eq!(p.threshold, 15_129);
        let d = FlagParams::desk_scale(1 << 16, 2, 0.2).unwrap();
        assert_eq!((d.threshold, d.size_cap), (123, 1365));
        assert!(FlagParams::new(1 << 16, 2, 3.0).is_err());
    }
}
