//! Exact diameters over finite distances and single-pair distances.
//!
//! All-sources BFS is done in batches of `64 * W` sources at once: every
//! vertex carries a `W`-word bitset of the sources that have reached it, and a
//! level advances by OR-ing frontier bitsets along the edges.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::exploration::INF;
use crate::graph::{Digraph, Vertex};
use crate::par::{map_indices_with, Execution};
use crate::structure::{is_closed, SccDecomposition};

/// Lane width used by [`diameter`] and friends.
pub const DEFAULT_LANES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    /// Largest finite distance `dist(u, v)`.
    pub value: u32,
    /// Smallest `u` with eccentricity `value`, then the smallest `v` at that distance.
    pub witness: (Vertex, Vertex),
    pub restricted_to: Option<Vec<Vertex>>,
    /// `value / log_r n` (0 when `n = 1` or `r = 1`).
    pub normalized: f64,
}

/// Per-worker scratch for the bitset BFS.
struct Lanes<const W: usize> {
    seen: Vec<[u64; W]>,
    frontier: Vec<[u64; W]>,
    next: Vec<[u64; W]>,
    active: Vec<Vertex>,
    touched: Vec<Vertex>,
}

impl<const W: usize> Lanes<W> {
    fn new(n: usize) -> Self {
        Lanes {
            seen: vec![[0; W]; n],
            frontier: vec![[0; W]; n],
            next: vec![[0; W]; n],
            active: Vec::new(),
            touched: Vec::new(),
        }
    }

    /// Eccentricities (largest finite distance) of `sources`, at most `64 * W`
    /// of them. With a mask, walks stay inside the masked vertices.
    ///
    /// Between levels `frontier` is nonzero only on `active` and `next` is all
    /// zero. Small frontiers push along out-edges; large ones pull along
    /// in-edges, skipping vertices every source has already reached.
    fn run(&mut self, g: &Digraph, sources: &[Vertex], mask: Option<&[bool]>) -> Vec<u32> {
        debug_assert!(sources.len() <= 64 * W);
        let n = g.n() as usize;
        for s in self.seen.iter_mut() {
            *s = [0; W];
        }
        self.active.clear();
        let mut full = [0u64; W];
        for (i, &s) in sources.iter().enumerate() {
            let bit = 1u64 << (i % 64);
            let su = s as usize;
            if self.frontier[su] == [0; W] {
                self.active.push(s);
            }
            self.frontier[su][i / 64] |= bit;
            self.seen[su][i / 64] |= bit;
            full[i / 64] |= bit;
        }
        let inside = |w: Vertex| mask.is_none_or(|m| m[w as usize]);
        let mut ecc = vec![0u32; sources.len()];
        let mut level = 0u32;
        while !self.active.is_empty() {
            level += 1;
            let mut reached = [0u64; W];
            self.touched.clear();
            if self.active.len() * PULL_RATIO >= n {
                for v in 0..n as Vertex {
                    let vi = v as usize;
                    if self.seen[vi] == full || !inside(v) {
                        continue;
                    }
                    let mut acc = [0u64; W];
                    for &u in g.in_edges(v) {
                        let f = &self.frontier[u as usize];
                        for k in 0..W {
                            acc[k] |= f[k];
                        }
                    }
                    let mut any = 0;
                    for k in 0..W {
                        acc[k] &= !self.seen[vi][k];
                        any |= acc[k];
                    }
                    if any != 0 {
                        for k in 0..W {
                            self.seen[vi][k] |= acc[k];
                            reached[k] |= acc[k];
                        }
                        self.next[vi] = acc;
                        self.touched.push(v);
                    }
                }
                for &u in &self.active {
                    self.frontier[u as usize] = [0; W];
                }
                std::mem::swap(&mut self.frontier, &mut self.next);
                std::mem::swap(&mut self.active, &mut self.touched);
            } else {
                for &u in &self.active {
                    let f = std::mem::replace(&mut self.frontier[u as usize], [0; W]);
                    for &w in g.out(u) {
                        if !inside(w) {
                            continue;
                        }
                        let slot = &mut self.next[w as usize];
                        if *slot == [0; W] {
                            self.touched.push(w);
                        }
                        for k in 0..W {
                            slot[k] |= f[k];
                        }
                    }
                }
                self.active.clear();
                for &w in &self.touched {
                    let wi = w as usize;
                    let nx = std::mem::replace(&mut self.next[wi], [0; W]);
                    let mut fresh = [0u64; W];
                    let mut any = 0;
                    for k in 0..W {
                        fresh[k] = nx[k] & !self.seen[wi][k];
                        self.seen[wi][k] |= fresh[k];
                        reached[k] |= fresh[k];
                        any |= fresh[k];
                    }
                    if any != 0 {
                        self.frontier[wi] = fresh;
                        self.active.push(w);
                    }
                }
            }
            for (k, mut bits) in reached.into_iter().enumerate() {
                while bits != 0 {
                    let i = k * 64 + bits.trailing_zeros() as usize;
                    ecc[i] = level;
                    bits &= bits - 1;
                }
            }
        }
        ecc
    }
}

/// Switch to pulling once `active * PULL_RATIO >= n`.
const PULL_RATIO: usize = 16;

/// Eccentricity of every source, using `64 * W` lanes per pass.
pub fn eccentricities_lanes<const W: usize>(
    g: &Digraph,
    sources: &[Vertex],
    mask: Option<&[bool]>,
    exec: Execution,
) -> Vec<u32> {
    let batch = 64 * W;
    let n = g.n() as usize;
    let batches = sources.len().div_ceil(batch);
    map_indices_with(
        exec,
        batches,
        || Lanes::<W>::new(n),
        |lanes, b| {
            let end = ((b + 1) * batch).min(sources.len());
            lanes.run(g, &sources[b * batch..end], mask)
        },
    )
    .concat()
}

/// Eccentricity (largest finite out-distance) of every source vertex.
pub fn eccentricities(g: &Digraph, sources: &[Vertex], mask: Option<&[bool]>, exec: Execution) -> Vec<u32> {
    eccentricities_lanes::<DEFAULT_LANES>(g, sources, mask, exec)
}

fn normalized(value: u32, n: u32, r: u32) -> f64 {
    if n < 2 || r < 2 {
        0.0
    } else {
        f64::from(value) / (f64::from(n).ln() / f64::from(r).ln())
    }
}

/// Plain BFS distances from `u`, optionally inside `mask`.
fn bfs_dist(g: &Digraph, u: Vertex, mask: Option<&[bool]>) -> Vec<u32> {
    let mut dist = vec![INF; g.n() as usize];
    dist[u as usize] = 0;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        for &w in g.out(x) {
            if mask.is_some_and(|m| !m[w as usize]) || dist[w as usize] != INF {
                continue;
            }
            dist[w as usize] = dist[x as usize] + 1;
            queue.push_back(w);
        }
    }
    dist
}

fn report(g: &Digraph, sources: &[Vertex], ecc: &[u32], mask: Option<&[bool]>) -> DiameterReport {
    let value = ecc.iter().copied().max().unwrap_or(0);
    let idx = ecc.iter().position(|&e| e == value).unwrap_or(0);
    let u = sources[idx];
    let dist = bfs_dist(g, u, mask);
    let v = (0..g.n()).find(|&v| dist[v as usize] == value).unwrap_or(u);
    DiameterReport {
        value,
        witness: (u, v),
        restricted_to: mask.map(|_| sources.to_vec()),
        normalized: normalized(value, g.n(), g.r()),
    }
}

pub fn diameter(g: &Digraph) -> DiameterReport {
    diameter_with(g, Execution::default())
}

pub fn diameter_with(g: &Digraph, exec: Execution) -> DiameterReport {
    let sources: Vec<Vertex> = (0..g.n()).collect();
    let ecc = eccentricities(g, &sources, None, exec);
    report(g, &sources, &ecc, None)
}

/// Diameter of the induced subgraph on `s`. Duplicates in `s` are ignored.
///
/// # Panics
/// If `s` is empty.
pub fn diameter_restricted(g: &Digraph, s: &[Vertex]) -> DiameterReport {
    diameter_restricted_with(g, s, Execution::default())
}

pub fn diameter_restricted_with(g: &Digraph, s: &[Vertex], exec: Execution) -> DiameterReport {
    assert!(!s.is_empty(), "restriction set must be nonempty");
    let mut mask = vec![false; g.n() as usize];
    for &v in s {
        mask[v as usize] = true;
    }
    let sources: Vec<Vertex> = (0..g.n()).filter(|&v| mask[v as usize]).collect();
    let ecc = eccentricities(g, &sources, Some(&mask), exec);
    report(g, &sources, &ecc, Some(&mask))
}

/// `diam(D)` and `diam(D_0)`. When no edge leaves `D_0`, distances from its
/// vertices are the same in `D` and in `D[D_0]`, so one all-sources pass
/// serves both.
pub fn diameters(g: &Digraph, dec: &SccDecomposition, exec: Execution) -> (DiameterReport, DiameterReport) {
    let sources: Vec<Vertex> = (0..g.n()).collect();
    let ecc = eccentricities(g, &sources, None, exec);
    let whole = report(g, &sources, &ecc, None);
    let d0 = dec.d0_vertices();
    let restricted = if is_closed(g, dec) {
        let sub: Vec<u32> = d0.iter().map(|&v| ecc[v as usize]).collect();
        report(g, &d0, &sub, Some(&dec.d0_mask()))
    } else {
        diameter_restricted_with(g, &d0, exec)
    };
    (whole, restricted)
}

/// `dist(u, v)`, or `None` when `v` is unreachable from `u`.
pub fn sample_distance(g: &Digraph, u: Vertex, v: Vertex) -> Option<u32> {
    if u == v {
        return Some(0);
    }
    let mut dist = vec![INF; g.n() as usize];
    dist[u as usize] = 0;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x as usize] + 1;
        for &w in g.out(x) {
            if w == v {
                return Some(d);
            }
            if dist[w as usize] == INF {
                dist[w as usize] = d;
                queue.push_back(w);
            }
        }
    }
    None
}
