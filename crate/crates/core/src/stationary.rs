//! Simple random walk on the largest component: stationary distribution,
//! return times, maze hardness, escape probabilities and the two bounds that
//! tie them together.
//!
//! The walk picks one of the `r` out-edges uniformly, so `P(u, w)` is
//! `multiplicity(u, w) / r`.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exploration::{ibfs, INF};
use crate::graph::{Digraph, Vertex};
use crate::linalg::solve_dense;
use crate::par::{map_indices, Execution};
use crate::seed::Seed;
use crate::stats::Estimate;
use crate::structure::SccDecomposition;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: u64 = 1_000_000;
pub const DEFAULT_DIRECT_CAP: usize = 2000;
pub const DEFAULT_ESCAPE_CAP: usize = 10_000;
/// Total step budget shared by the trials of [`mean_return_time`].
pub const RETURN_STEP_BUDGET: u64 = 1_000_000_000;

/// One row of the transition matrix, with exact multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionRow {
    pub from: Vertex,
    pub r: u32,
    /// `(head, multiplicity)` sorted by head; multiplicities sum to `r`.
    pub entries: Vec<(Vertex, u32)>,
}

impl TransitionRow {
    pub fn probability(&self, w: Vertex) -> f64 {
        self.entries
            .iter()
            .find(|e| e.0 == w)
            .map_or(0.0, |e| f64::from(e.1) / f64::from(self.r))
    }
}

fn check_closed(g: &Digraph, dec: &SccDecomposition) -> Result<()> {
    for u in dec.d0_vertices() {
        if g.out(u).iter().any(|&w| !dec.in_d0(w)) {
            return Err(Error::NotAttractive(u + 1));
        }
    }
    Ok(())
}

/// Row `v` of `P`. Fails if `v` is outside `D_0` or has an edge leaving it.
pub fn transition_row(g: &Digraph, dec: &SccDecomposition, v: Vertex) -> Result<TransitionRow> {
    if !dec.in_d0(v) {
        return Err(Error::param(format!("vertex {} is not in the largest component", v + 1)));
    }
    let mut heads = g.out(v).to_vec();
    if heads.iter().any(|&w| !dec.in_d0(w)) {
        return Err(Error::NotAttractive(v + 1));
    }
    heads.sort_unstable();
    let mut entries: Vec<(Vertex, u32)> = Vec::new();
    for w in heads {
        match entries.last_mut() {
            Some(e) if e.0 == w => e.1 += 1,
            _ => entries.push((w, 1)),
        }
    }
    Ok(TransitionRow { from: v, r: g.r(), entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryProfile {
    pub n: u32,
    pub r: u32,
    /// Vertices of `D_0`, ascending.
    pub support: Vec<Vertex>,
    /// `pi[i]` belongs to `support[i]`.
    pub pi: Vec<f64>,
    /// `||pi P - pi||_1` for the non-lazy `P`.
    pub residual: f64,
    pub iterations: u64,
    pub converged: bool,
    pub pi_max: f64,
    pub argmax: Vertex,
    pub pi_min: f64,
    pub argmin: Vertex,
    /// `-log_n pi_max`.
    pub exp_max: f64,
    /// `-log_n pi_min`.
    pub exp_min: f64,
}

impl StationaryProfile {
    /// `pi(v)`, zero off the support.
    pub fn pi_of(&self, v: Vertex) -> f64 {
        self.support.binary_search(&v).map_or(0.0, |i| self.pi[i])
    }

    /// `pi` as a dense vector over all `n` vertices.
    pub fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n as usize];
        for (&v, &p) in self.support.iter().zip(&self.pi) {
            out[v as usize] = p;
        }
        out
    }

    /// `{"n":..,"r":..,"pi":{"<vertex>":..}}` with 1-based vertices.
    pub fn to_json(&self) -> String {
        let pi: serde_json::Map<String, serde_json::Value> = self
            .support
            .iter()
            .zip(&self.pi)
            .map(|(&v, &p)| ((v + 1).to_string(), p.into()))
            .collect();
        serde_json::json!({ "n": self.n, "r": self.r, "pi": pi }).to_string()
    }
}

/// `D_0` with local ids `0..m`.
struct LocalChain {
    support: Vec<Vertex>,
    heads: Vec<u32>,
    r: usize,
}

impl LocalChain {
    fn new(g: &Digraph, dec: &SccDecomposition) -> Result<Self> {
        check_closed(g, dec)?;
        let support = dec.d0_vertices();
        let mut local = vec![u32::MAX; g.n() as usize];
        for (i, &v) in support.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let heads = support
            .iter()
            .flat_map(|&v| g.out(v).iter().map(|&w| local[w as usize]))
            .collect();
        Ok(LocalChain { support, heads, r: g.r() as usize })
    }

    fn m(&self) -> usize {
        self.support.len()
    }

    /// `y = x P`.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        let inv = 1.0 / self.r as f64;
        for (u, &xu) in x.iter().enumerate() {
            let share = xu * inv;
            for &w in &self.heads[u * self.r..(u + 1) * self.r] {
                y[w as usize] += share;
            }
        }
    }

    fn residual(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.apply(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum()
    }

    fn profile(&self, g: &Digraph, pi: Vec<f64>, iterations: u64, converged: bool) -> StationaryProfile {
        let residual = self.residual(&pi);
        let (mut imax, mut imin) = (0, 0);
        for (i, &p) in pi.iter().enumerate() {
            if p > pi[imax] {
                imax = i;
            }
            if p < pi[imin] {
                imin = i;
            }
        }
        let ln_n = f64::from(g.n()).ln();
        let exponent = |p: f64| if g.n() > 1 { -p.ln() / ln_n } else { 0.0 };
        StationaryProfile {
            n: g.n(),
            r: g.r(),
            pi_max: pi[imax],
            argmax: self.support[imax],
            pi_min: pi[imin],
            argmin: self.support[imin],
            exp_max: exponent(pi[imax]),
            exp_min: exponent(pi[imin]),
            support: self.support.clone(),
            pi,
            residual,
            iterations,
            converged,
        }
    }
}

/// Lazy power iteration `x <- (x + xP) / 2` from the uniform vector on `D_0`
/// until the l1 change is at most `tol`. The lazy chain has the same
/// stationary vector and converges whatever the period. Exhausting
/// `max_iter` returns the last iterate with `converged = false`.
pub fn stationary_power(g: &Digraph, dec: &SccDecomposition, tol: f64, max_iter: u64) -> Result<StationaryProfile> {
    if !(tol > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }
    let chain = LocalChain::new(g, dec)?;
    let m = chain.m();
    let mut x = vec![1.0 / m as f64; m];
    let mut y = vec![0.0; m];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        chain.apply(&x, &mut y);
        iterations += 1;
        let mut total = 0.0;
        for (yi, &xi) in y.iter_mut().zip(&x) {
            *yi = 0.5 * (*yi + xi);
            total += *yi;
        }
        let mut change = 0.0;
        for (yi, &xi) in y.iter_mut().zip(&x) {
            *yi /= total;
            change += (*yi - xi).abs();
        }
        std::mem::swap(&mut x, &mut y);
        if change <= tol {
            converged = true;
            break;
        }
    }
    Ok(chain.profile(g, x, iterations, converged))
}

/// Solves `pi (P - I) = 0`, `sum pi = 1` by dense elimination.
pub fn stationary_direct(g: &Digraph, dec: &SccDecomposition) -> Result<StationaryProfile> {
    stationary_direct_capped(g, dec, DEFAULT_DIRECT_CAP)
}

pub fn stationary_direct_capped(g: &Digraph, dec: &SccDecomposition, cap: usize) -> Result<StationaryProfile> {
    let chain = LocalChain::new(g, dec)?;
    let m = chain.m();
    if m > cap {
        return Err(Error::CapExceeded { what: "direct stationary solve", size: m, cap });
    }
    // Row i of the system is column i of P^T - I; the last row is replaced by sum = 1.
    let mut a = vec![0.0; m * m];
    let inv = 1.0 / chain.r as f64;
    for u in 0..m {
        a[u * m + u] -= 1.0;
        for &w in &chain.heads[u * chain.r..(u + 1) * chain.r] {
            a[w as usize * m + u] += inv;
        }
    }
    a[(m - 1) * m..].fill(1.0);
    let mut b = vec![0.0; m];
    b[m - 1] = 1.0;
    let pi = solve_dense(&a, m, &b)?;
    Ok(chain.profile(g, pi, 1, true))
}

/// Monte Carlo estimate of `E_v[tau_v^+]` from `trials` walks, each on its
/// own substream of `seed`. Each walk may take at most
/// `RETURN_STEP_BUDGET / trials` steps.
pub fn mean_return_time(
    g: &Digraph,
    dec: &SccDecomposition,
    v: Vertex,
    trials: u64,
    seed: Seed,
    exec: Execution,
) -> Result<Estimate> {
    if !dec.in_d0(v) {
        return Err(Error::param(format!("vertex {} is not in the largest component", v + 1)));
    }
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let cap = (RETURN_STEP_BUDGET / trials).max(1);
    let r = g.r();
    let times = map_indices(exec, trials as usize, |t| {
        let mut rng = seed.substream(t as u64).rng();
        let mut x = v;
        let mut steps = 0u64;
        loop {
            x = g.head(x, rng.random_range(0..r));
            steps += 1;
            if x == v {
                return Ok(steps as f64);
            }
            if steps >= cap {
                return Err(Error::StepCap { trial: t as u64, cap });
            }
        }
    });
    let times: Vec<f64> = times.into_iter().collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&times))
}

/// `N_{<=k}^-(v)` as a membership mask plus the entrance layer `N_k^-(v)`.
fn maze(g: &Digraph, v: Vertex, k: u32) -> Result<(Vec<bool>, Vec<Vertex>, Vec<Vertex>)> {
    let bfs = ibfs(g, v, Some(k));
    let entrance = bfs.layers.get(k as usize).cloned().unwrap_or_default();
    if entrance.is_empty() {
        return Err(Error::EmptyEntrance { vertex: v + 1, k });
    }
    let mask: Vec<bool> = bfs.dist.iter().map(|&d| d != INF).collect();
    let members = bfs.layers.concat();
    Ok((mask, members, entrance))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MazeHardness {
    pub center: Vertex,
    pub depth: u32,
    /// `N_{<=k}^-(v)` in iBFS order.
    pub maze: Vec<Vertex>,
    /// Largest `h` such that the maze is `h`-hard.
    pub h: u32,
    /// A path from the entrance layer to the center attaining `h`.
    pub witness: Vec<Vertex>,
}

/// Number of out-edges of `u`, with multiplicity, landing in `mask`.
fn exits_inside(g: &Digraph, u: Vertex, mask: &[bool]) -> usize {
    g.out(u).iter().filter(|&&w| mask[w as usize]).count()
}

/// Minimum, over directed paths inside the maze from `N_k^-(v)` to `v`, of
/// the number of path vertices other than `v` with exactly one out-edge
/// (counting multiplicity) staying inside the maze. The center is excluded:
/// only the turns taken before arriving at `v` can lead the walk astray.
pub fn maze_hardness(g: &Digraph, v: Vertex, k: u32) -> Result<MazeHardness> {
    let (mask, members, entrance) = maze(g, v, k)?;
    let n = g.n() as usize;
    let weight = |u: Vertex| u32::from(u != v && exits_inside(g, u, &mask) == 1);
    // 0/1 BFS from v against the edge direction; `next[u]` is u's successor on a best path.
    let mut cost = vec![u32::MAX; n];
    let mut next = vec![u32::MAX; n];
    cost[v as usize] = 0;
    let mut deque = VecDeque::from([v]);
    while let Some(x) = deque.pop_front() {
        let cx = cost[x as usize];
        for &u in g.in_edges(x) {
            if !mask[u as usize] {
                continue;
            }
            let w = weight(u);
            if cx + w < cost[u as usize] {
                cost[u as usize] = cx + w;
                next[u as usize] = x;
                if w == 0 {
                    deque.push_front(u);
                } else {
                    deque.push_back(u);
                }
            }
        }
    }
    let start = *entrance
        .iter()
        .min_by_key(|&&u| (cost[u as usize], u))
        .expect("entrance is nonempty");
    let mut witness = vec![start];
    let mut x = start;
    while x != v {
        x = next[x as usize];
        witness.push(x);
    }
    Ok(MazeHardness { center: v, depth: k, maze: members, h: cost[start as usize], witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeProbability {
    pub center: Vertex,
    pub depth: u32,
    /// `P_v(tau_{outside maze} <= tau_v^+)`.
    pub value: f64,
}

/// Exact `P_v(tau_{[n] \ N_{<=k}^-(v)} <= tau_v^+)`, by one step from `v`
/// followed by an absorbing-chain solve on the maze minus `v`.
pub fn escape_probability(g: &Digraph, v: Vertex, k: u32) -> Result<EscapeProbability> {
    escape_probability_capped(g, v, k, DEFAULT_ESCAPE_CAP)
}

/// Above this many transient states the absorbing chain is solved by
/// Gauss-Seidel sweeps instead of dense elimination.
const DENSE_ESCAPE_LIMIT: usize = 2000;

pub fn escape_probability_capped(g: &Digraph, v: Vertex, k: u32, cap: usize) -> Result<EscapeProbability> {
    let (mask, members, _) = maze(g, v, k)?;
    if members.len() > cap {
        return Err(Error::CapExceeded { what: "maze", size: members.len(), cap });
    }
    let states: Vec<Vertex> = members.iter().copied().filter(|&u| u != v).collect();
    let m = states.len();
    let mut local = vec![u32::MAX; g.n() as usize];
    for (i, &u) in states.iter().enumerate() {
        local[u as usize] = i as u32;
    }
    let inv = 1.0 / f64::from(g.r());
    // e = Q e + b, with b the one-step probability of leaving the maze.
    let mut b = vec![0.0; m];
    let mut q: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for (i, &u) in states.iter().enumerate() {
        for &w in g.out(u) {
            if !mask[w as usize] {
                b[i] += inv;
            } else if w != v {
                q[i].push((local[w as usize] as usize, inv));
            }
        }
    }
    let e = if m == 0 {
        Vec::new()
    } else if m <= DENSE_ESCAPE_LIMIT {
        let mut a = vec![0.0; m * m];
        for i in 0..m {
            a[i * m + i] += 1.0;
            for &(j, p) in &q[i] {
                a[i * m + j] -= p;
            }
        }
        solve_dense(&a, m, &b)?
    } else {
        let mut e = vec![0.0; m];
        for _ in 0..1_000_000 {
            let mut delta = 0.0f64;
            for i in 0..m {
                let val = b[i] + q[i].iter().map(|&(j, p)| p * e[j]).sum::<f64>();
                delta = delta.max((val - e[i]).abs());
                e[i] = val;
            }
            if delta <= 1e-15 {
                break;
            }
        }
        e
    };
    let value = g
        .out(v)
        .iter()
        .map(|&w| {
            if !mask[w as usize] {
                1.0
            } else if w == v {
                0.0
            } else {
                e[local[w as usize] as usize]
            }
        })
        .sum::<f64>()
        * inv;
    Ok(EscapeProbability { center: v, depth: k, value: value.clamp(0.0, 1.0) })
}

/// Monte Carlo version of [`escape_probability`], used as a cross-check.
pub fn escape_probability_mc(g: &Digraph, v: Vertex, k: u32, trials: u64, seed: Seed) -> Result<Estimate> {
    let (mask, _, _) = maze(g, v, k)?;
    let mut rng = seed.rng();
    let mut hits = 0;
    for _ in 0..trials {
        let mut x = v;
        loop {
            x = g.head(x, rng.random_range(0..g.r()));
            if !mask[x as usize] {
                hits += 1;
                break;
            }
            if x == v {
                break;
            }
        }
    }
    Ok(Estimate::from_counts(hits, trials))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PimaxCheck {
    pub vertex: Vertex,
    /// `pi(v) * r^h * P_escape`.
    pub product: f64,
    /// `1 - product`.
    pub margin: f64,
    pub holds: bool,
}

/// Checks `pi(v) * r^h * P_v(escape) <= 1 + 1e-9`, evaluated in log space.
pub fn validate_pimax_bound(profile: &StationaryProfile, hardness: &MazeHardness, escape: &EscapeProbability) -> PimaxCheck {
    let v = hardness.center;
    assert_eq!(v, escape.center, "hardness and escape computed for different vertices");
    let pi = profile.pi_of(v);
    let log = pi.ln() + f64::from(hardness.h) * f64::from(profile.r).ln() + escape.value.ln();
    let product = if pi == 0.0 || escape.value == 0.0 { 0.0 } else { log.exp() };
    PimaxCheck {
        vertex: v,
        product,
        margin: 1.0 - product,
        holds: pi == 0.0 || escape.value == 0.0 || log <= (1e-9f64).ln_1p(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiminCheck {
    pub pi_min: f64,
    /// `1 / (1 + d r^d)`.
    pub bound: f64,
    /// `pi_min - bound`.
    pub slack: f64,
    pub holds: bool,
}

/// Checks `pi_min >= 1 / (1 + d r^d)` up to the solver residual.
pub fn validate_pimin_bound(profile: &StationaryProfile, d: u32, r: u32) -> PiminCheck {
    let bound = 1.0 / (1.0 + f64::from(d) * f64::from(r).powi(d as i32));
    let slack = profile.pi_min - bound;
    PiminCheck {
        pi_min: profile.pi_min,
        bound,
        slack,
        holds: slack >= -profile.residual.max(1e-12),
    }
}
