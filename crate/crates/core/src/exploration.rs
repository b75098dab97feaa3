//! Outward and inward breadth-first search.
//!
//! Both searches discover vertices with set semantics: a vertex reached by
//! several parallel edges is discovered once, and the vertices discovered while
//! exploring one vertex join the queue in increasing id order.

use std::fmt::Write as _;

use serde::Serialize;

use crate::graph::{Digraph, Vertex};

/// Distance of an undiscovered vertex.
pub const INF: u32 = u32::MAX;
/// Parent marker of the root and of undiscovered vertices.
pub const NO_PARENT: Vertex = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Outward,
    Inward,
}

#[derive(Debug, Clone)]
pub struct BfsResult {
    pub root: Vertex,
    pub direction: Direction,
    /// `dist[u]`, or [`INF`] when `u` was not reached within the depth bound.
    pub dist: Vec<u32>,
    /// `layers[k]` holds the vertices at distance exactly `k`, in discovery order.
    pub layers: Vec<Vec<Vertex>>,
    /// BFS-tree parent, [`NO_PARENT`] for the root and for unreached vertices.
    pub parent: Vec<Vertex>,
    /// Discovery sequence, root first.
    pub order: Vec<Vertex>,
}

impl BfsResult {
    pub fn distance(&self, u: Vertex) -> Option<u32> {
        let d = self.dist[u as usize];
        (d != INF).then_some(d)
    }

    /// Layer sizes `d_0, d_1, ..`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    /// `{"root":..,"direction":..,"layers":[[..],..]}` with 1-based ids.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            root: u32,
            direction: &'a Direction,
            layers: Vec<Vec<u32>>,
        }
        serde_json::to_string(&Out {
            root: self.root + 1,
            direction: &self.direction,
            layers: self
                .layers
                .iter()
                .map(|l| l.iter().map(|v| v + 1).collect())
                .collect(),
        })
        .expect("bfs result serializes")
    }
}

/// Outward search from `v`: `dist[u] = dist(v, u)` up to `max_depth`.
pub fn obfs(g: &Digraph, v: Vertex, max_depth: Option<u32>) -> BfsResult {
    bfs(g, v, Direction::Outward, max_depth)
}

/// Inward search from `v`: `dist[u] = dist(u, v)` up to `max_depth`.
pub fn ibfs(g: &Digraph, v: Vertex, max_depth: Option<u32>) -> BfsResult {
    bfs(g, v, Direction::Inward, max_depth)
}

fn bfs(g: &Digraph, root: Vertex, direction: Direction, max_depth: Option<u32>) -> BfsResult {
    let n = g.n() as usize;
    assert!((root as usize) < n, "root {} out of range", root + 1);
    let limit = max_depth.unwrap_or(INF);
    let mut dist = vec![INF; n];
    let mut parent = vec![NO_PARENT; n];
    let mut order = vec![root];
    dist[root as usize] = 0;
    let mut found = Vec::new();
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        let du = dist[u as usize];
        if du >= limit {
            break;
        }
        let nbrs = match direction {
            Direction::Outward => g.out(u),
            Direction::Inward => g.in_edges(u),
        };
        found.clear();
        for &w in nbrs {
            if dist[w as usize] == INF {
                dist[w as usize] = du + 1;
                parent[w as usize] = u;
                found.push(w);
            }
        }
        found.sort_unstable();
        order.extend_from_slice(&found);
    }
    let mut layers: Vec<Vec<Vertex>> = Vec::new();
    for &u in &order {
        let d = dist[u as usize] as usize;
        if layers.len() <= d {
            layers.push(Vec::new());
        }
        layers[d].push(u);
    }
    BfsResult {
        root,
        direction,
        dist,
        layers,
        parent,
        order,
    }
}

/// Reusable state for walking in-layers one depth at a time.
///
/// Membership is tracked with epoch stamps so that many walks over the same
/// graph cost nothing to reset.
#[derive(Debug, Clone)]
pub struct InLayerWalk {
    stamp: Vec<u32>,
    epoch: u32,
    current: Vec<Vertex>,
    next: Vec<Vertex>,
    depth: u32,
    discovered: usize,
}

impl InLayerWalk {
    pub fn new(n: u32) -> Self {
        InLayerWalk {
            stamp: vec![0; n as usize],
            epoch: 0,
            current: Vec::new(),
            next: Vec::new(),
            depth: 0,
            discovered: 0,
        }
    }

    /// Restarts the walk at `root`; the current layer becomes `{root}`.
    pub fn start(&mut self, root: Vertex) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.stamp[root as usize] = self.epoch;
        self.current.clear();
        self.current.push(root);
        self.depth = 0;
        self.discovered = 1;
    }

    /// Moves to the next in-layer and returns it.
    pub fn advance(&mut self, g: &Digraph) -> &[Vertex] {
        self.next.clear();
        for &u in &self.current {
            for &w in g.in_edges(u) {
                let s = &mut self.stamp[w as usize];
                if *s != self.epoch {
                    *s = self.epoch;
                    self.next.push(w);
                }
            }
        }
        std::mem::swap(&mut self.current, &mut self.next);
        self.depth += 1;
        self.discovered += self.current.len();
        &self.current
    }

    pub fn layer(&self) -> &[Vertex] {
        &self.current
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `d_{<=depth}`: vertices discovered so far.
    pub fn discovered(&self) -> usize {
        self.discovered
    }

    /// True if `w` lies in some layer visited so far.
    #[inline]
    pub fn contains(&self, w: Vertex) -> bool {
        self.stamp[w as usize] == self.epoch
    }
}

/// Default threshold `ceil(ln^4 n)` for [`k0`] and [`k1`].
pub fn default_threshold(n: u32) -> u64 {
    ceil_ln_pow(n, 4)
}

/// Default cumulative-size cap `ceil(ln^7 n)`.
pub fn default_size_cap(n: u32) -> u64 {
    ceil_ln_pow(n, 7)
}

pub(crate) fn ceil_ln_pow(n: u32, p: i32) -> u64 {
    let x = f64::from(n).ln().powi(p).ceil();
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        (x as u64).max(1)
    }
}

/// `min{k : d_k^-(v) = 0 or d_k^-(v) >= threshold}`.
pub fn k0(g: &Digraph, v: Vertex, threshold: u64) -> u32 {
    assert!(threshold >= 1, "threshold must be positive");
    if threshold <= 1 {
        return 0;
    }
    let mut walk = InLayerWalk::new(g.n());
    walk.start(v);
    loop {
        let d = walk.advance(g).len() as u64;
        if d == 0 || d >= threshold {
            return walk.depth();
        }
    }
}

/// `min{k : d_k^-(v) >= threshold}`, `None` when the in-layers die out first.
pub fn k1(g: &Digraph, v: Vertex, threshold: u64) -> Option<u32> {
    let mut walk = InLayerWalk::new(g.n());
    k1_with(g, v, threshold, &mut walk)
}

pub(crate) fn k1_with(g: &Digraph, v: Vertex, threshold: u64, walk: &mut InLayerWalk) -> Option<u32> {
    assert!(threshold >= 1, "threshold must be positive");
    walk.start(v);
    if threshold <= 1 {
        return Some(0);
    }
    loop {
        let d = walk.advance(g).len() as u64;
        if d == 0 {
            return None;
        }
        if d >= threshold {
            return Some(walk.depth());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthProfile {
    pub root: Vertex,
    /// `d_0^-, .., d_kmax^-`, zero-padded after the layers die out.
    pub sizes: Vec<u64>,
    /// Running sums `d_{<=k}^-`.
    pub cumulative: Vec<u64>,
}

impl GrowthProfile {
    /// CSV with header `k,d_k,cum_k`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,d_k,cum_k\n");
        for (k, (d, c)) in self.sizes.iter().zip(&self.cumulative).enumerate() {
            let _ = writeln!(s, "{k},{d},{c}");
        }
        s
    }
}

/// Exact in-layer sizes of `v` up to depth `kmax`.
pub fn in_growth_profile(g: &Digraph, v: Vertex, kmax: u32) -> GrowthProfile {
    let mut walk = InLayerWalk::new(g.n());
    walk.start(v);
    let mut sizes = vec![1u64];
    while sizes.len() <= kmax as usize {
        let d = if sizes.last() == Some(&0) {
            0
        } else {
            walk.advance(g).len() as u64
        };
        sizes.push(d);
    }
    let cumulative = sizes
        .iter()
        .scan(0u64, |acc, &d| {
            *acc += d;
            Some(*acc)
        })
        .collect();
    GrowthProfile {
        root: v,
        sizes,
        cumulative,
    }
}
