//! Model constants and Poisson(r) Galton-Watson trees.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exploration::{ibfs, NO_PARENT};
use crate::graph::Digraph;
use crate::par::{map_indices, Execution};
use crate::seed::{Seed, StreamRng};
use crate::stats::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub r: u32,
    /// Largest root of `1 - lambda = exp(-r lambda)`; also the GW survival probability.
    pub lambda: f64,
    /// `1 - lambda`, kept separately because it underflows `lambda` for large `r`.
    pub extinction: f64,
    /// `ln r / (lambda r - ln r)`.
    pub eta: f64,
    /// `1 / ((-ln(1 - lambda)) / ln r - 1)`, the same constant by another route.
    pub eta_alt: f64,
    /// `|1 - lambda - exp(-r lambda)|`.
    pub residual: f64,
}

/// Solves for `lambda_r` and `eta_r` by bisection on the extinction
/// probability `mu = 1 - lambda`, the root of `mu = exp(-r (1 - mu))` in
/// `(0, 1/2]`. Working with `mu` keeps full relative precision even when
/// `lambda` rounds to 1.
pub fn solve_constants(r: u32) -> Result<ModelConstants> {
    if r < 2 {
        return Err(Error::param(format!("constants need r >= 2, got {r}")));
    }
    let rf = f64::from(r);
    let f = |mu: f64| mu - (-rf * (1.0 - mu)).exp();
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
    let lambda = 1.0 - mu;
    let ln_r = rf.ln();
    Ok(ModelConstants {
        r,
        lambda,
        extinction: mu,
        eta: ln_r / (lambda * rf - ln_r),
        eta_alt: 1.0 / (-mu.ln() / ln_r - 1.0),
        residual: (mu - (-rf * lambda).exp()).abs(),
    })
}

/// `r,lambda,eta` rows.
pub fn constants_csv(table: &[ModelConstants]) -> String {
    let mut s = String::from("r,lambda,eta\n");
    for c in table {
        let _ = writeln!(s, "{},{},{}", c.r, c.lambda, c.eta);
    }
    s
}

/// Poisson draw: inversion for small means, `rand_distr` above.
pub fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean <= 10.0 {
        let u: f64 = rng.random();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u64;
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if p == 0.0 {
                break;
            }
        }
        k
    } else {
        Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
    }
}

pub const DEFAULT_POP_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwSample {
    /// `|T_0|, .., |T_K|`; `|T_0| = 1`.
    pub generation_sizes: Vec<u64>,
    /// Set when the tree was still alive at `kmax` or a generation passed `pop_cap`.
    pub truncated: bool,
}

impl GwSample {
    pub fn extinct(&self) -> bool {
        self.generation_sizes.last() == Some(&0)
    }
}

/// Generation sizes of a Poisson(r) GW tree. A generation of size `m` has
/// `Poisson(r m)` children in total, the law of a sum of `m` iid
/// `Poisson(r)` draws.
pub fn gw_sample(r: u32, kmax: u32, pop_cap: u64, seed: Seed) -> GwSample {
    gw_sample_rng(r, kmax, pop_cap, &mut seed.rng())
}

pub fn gw_sample_rng(r: u32, kmax: u32, pop_cap: u64, rng: &mut StreamRng) -> GwSample {
    let mut sizes = vec![1u64];
    let mut m = 1u64;
    while sizes.len() <= kmax as usize {
        if m == 0 {
            return GwSample { generation_sizes: sizes, truncated: false };
        }
        m = poisson(f64::from(r) * m as f64, rng);
        sizes.push(m);
        if m > pop_cap {
            return GwSample { generation_sizes: sizes, truncated: true };
        }
    }
    GwSample { truncated: m > 0, generation_sizes: sizes }
}

const TAIL_BLOCK: u64 = 10_000;

/// Monte Carlo estimates of `P(0 < |T_k| < omega)` for `k = 0..=kmax`, all
/// read off the same `trials` trees.
pub fn gw_tail_curve(r: u32, kmax: u32, omega: u64, trials: u64, seed: Seed, exec: Execution) -> Vec<Estimate> {
    let blocks = trials.div_ceil(TAIL_BLOCK);
    let counts = map_indices(exec, blocks as usize, |b| {
        let mut rng = seed.substream(b as u64).rng();
        let here = TAIL_BLOCK.min(trials - b as u64 * TAIL_BLOCK);
        let mut hits = vec![0u64; kmax as usize + 1];
        for _ in 0..here {
            let mut m = 1u64;
            for slot in hits.iter_mut() {
                if m == 0 {
                    break;
                }
                if m < omega {
                    *slot += 1;
                }
                m = poisson(f64::from(r) * m as f64, &mut rng);
            }
        }
        hits
    });
    (0..=kmax as usize)
        .map(|k| Estimate::from_counts(counts.iter().map(|h| h[k]).sum(), trials))
        .collect()
}

/// Monte Carlo estimate of `P(0 < |T_k| < omega)`.
pub fn gw_tail_prob(r: u32, k: u32, omega: u64, trials: u64, seed: Seed) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    Ok(gw_tail_curve(r, k, omega, trials, seed, Execution::default())[k as usize])
}

/// Exact `P(0 < |T_j| < omega)` for `j = 0..=kmax` by propagating the law
/// of the generation size on `0..=M`, `M = max(64 omega, 256)`. Mass above
/// `M` is lumped and never returns below `omega`; from there the chance of
/// falling back is below `exp(-r M / 2)`.
pub fn gw_tail_exact_curve(r: u32, kmax: u32, omega: u64) -> Vec<f64> {
    let big = (64 * omega as usize).max(256);
    let rf = f64::from(r);
    let mut ln_fact = vec![0.0f64; big + 1];
    for i in 1..=big {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let mut law = vec![0.0f64; big + 1];
    law[1] = 1.0;
    let tail = |law: &[f64]| law.iter().take(omega as usize).skip(1).sum::<f64>();
    let mut out = vec![tail(&law)];
    for _ in 0..kmax {
        let mut next = vec![0.0f64; big + 1];
        next[0] = law[0];
        for (m, &pm) in law.iter().enumerate().skip(1) {
            if pm == 0.0 {
                continue;
            }
            let mean = rf * m as f64;
            let ln_mean = mean.ln();
            for (j, slot) in next.iter_mut().enumerate() {
                *slot += pm * (-mean + j as f64 * ln_mean - ln_fact[j]).exp();
            }
        }
        law = next;
        out.push(tail(&law));
    }
    out
}

pub fn gw_tail_exact(r: u32, k: u32, omega: u64) -> f64 {
    gw_tail_exact_curve(r, k, omega)[k as usize]
}

/// One row of `r,k,omega,trials,estimate,stderr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub r: u32,
    pub k: u32,
    pub omega: u64,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
}

pub fn tail_csv(rows: &[TailRow]) -> String {
    let mut s = String::from("r,k,omega,trials,estimate,stderr\n");
    for t in rows {
        let _ = writeln!(s, "{},{},{},{},{},{}", t.r, t.k, t.omega, t.trials, t.estimate, t.stderr);
    }
    s
}

/// Plane-tree shape truncated at depth `k`: child counts of the vertices at
/// depth `< k`, in BFS order.
pub type Shape = Vec<u32>;

pub const DEFAULT_SHAPE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub n: u32,
    pub r: u32,
    pub k: u32,
    pub trials: u64,
    /// Shapes with more vertices than this share one bucket.
    pub shape_cap: usize,
    /// Empirical total variation between the two shape laws.
    pub tv: f64,
    /// Empirical `d_1^-(v)` counts from the graph side, indexed by value.
    pub root_degrees: Vec<u64>,
    /// Root child counts from the GW side.
    pub gw_root_degrees: Vec<u64>,
}

/// Shape of the iBFS tree `T_{<=k}^-(D, v)`; children ordered by label.
/// `None` once it has more than `cap` vertices.
fn graph_shape(g: &Digraph, v: u32, k: u32, cap: usize) -> Option<Shape> {
    let bfs = ibfs(g, v, Some(k));
    let mut children: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut count = 1usize;
    for &u in &bfs.order[1..] {
        count += 1;
        if count > cap {
            return None;
        }
        let p = bfs.parent[u as usize];
        debug_assert_ne!(p, NO_PARENT);
        children.entry(p).or_default().push(u);
    }
    let mut shape = Vec::new();
    let mut queue = std::collections::VecDeque::from([(v, 0u32)]);
    while let Some((u, d)) = queue.pop_front() {
        if d == k {
            continue;
        }
        let mut kids = children.remove(&u).unwrap_or_default();
        kids.sort_unstable();
        shape.push(kids.len() as u32);
        queue.extend(kids.into_iter().map(|c| (c, d + 1)));
    }
    Some(shape)
}

/// Shape of a Poisson(r) GW tree up to depth `k` (`None` past `cap`
/// vertices) and the root's child count (0 when `k = 0`).
fn gw_shape(r: u32, k: u32, cap: usize, rng: &mut StreamRng) -> (Option<Shape>, usize) {
    let mut shape = Vec::new();
    let mut layer = 1u64;
    let mut size = 1usize;
    for _ in 0..k {
        let mut next = 0;
        for _ in 0..layer {
            let c = poisson(f64::from(r), rng);
            size += c as usize;
            if size > cap {
                let root = shape.first().map_or(c as usize, |&x| x as usize);
                return (None, root);
            }
            shape.push(c as u32);
            next += c;
        }
        layer = next;
    }
    let root = shape.first().map_or(0, |&x| x as usize);
    (Some(shape), root)
}

fn tally(map: &mut HashMap<Option<Shape>, u64>, degrees: &mut Vec<u64>, shape: Option<Shape>, root: usize) {
    if degrees.len() <= root {
        degrees.resize(root + 1, 0);
    }
    degrees[root] += 1;
    *map.entry(shape).or_insert(0) += 1;
}

/// Compares the law of the depth-`k` iBFS tree shape at a vertex of
/// `D(n, r)` with the Poisson(r) GW shape law. Each graph-side trial draws a
/// fresh graph and explores vertex 1.
pub fn coupling_tv(n: u32, r: u32, k: u32, trials: u64, seed: Seed, shape_cap: usize) -> Result<CouplingReport> {
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let mut graph_side = HashMap::new();
    let mut gw_side = HashMap::new();
    let mut root_degrees = Vec::new();
    let mut gw_root_degrees = Vec::new();
    let graph_seed = seed.substream(0);
    let mut gw_rng = seed.substream(1).rng();
    for t in 0..trials {
        let g = Digraph::generate(n, r, graph_seed.substream(t))?;
        let shape = graph_shape(&g, 0, k, shape_cap);
        let d1 = g.in_edges(0).iter().filter(|&&u| u != 0).collect::<std::collections::BTreeSet<_>>().len();
        tally(&mut graph_side, &mut root_degrees, shape, d1);

        let (shape, root) = gw_shape(r, k, shape_cap, &mut gw_rng);
        tally(&mut gw_side, &mut gw_root_degrees, shape, root);
    }
    let tf = trials as f64;
    let mut keys: Vec<&Option<Shape>> = graph_side.keys().chain(gw_side.keys()).collect();
    keys.sort();
    keys.dedup();
    let tv = 0.5
        * keys
            .into_iter()
            .map(|s| {
                let a = *graph_side.get(s).unwrap_or(&0) as f64 / tf;
                let b = *gw_side.get(s).unwrap_or(&0) as f64 / tf;
                (a - b).abs()
            })
            .sum::<f64>();
    Ok(CouplingReport {
        n,
        r,
        k,
        trials,
        shape_cap,
        tv,
        root_degrees,
        gw_root_degrees,
    })
}
