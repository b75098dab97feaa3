//! Oracles shared by the integration tests.
#![allow(dead_code)]

use routgraph::{Digraph, Vertex};

pub const INF: u32 = u32::MAX;

/// All-pairs distances by Floyd-Warshall on the subgraph induced by `keep`.
pub fn floyd(g: &Digraph, keep: &[bool]) -> Vec<Vec<u32>> {
    let n = g.n() as usize;
    let mut d = vec![vec![INF; n]; n];
    for u in 0..n {
        if !keep[u] {
            continue;
        }
        d[u][u] = 0;
        for &w in g.out(u as Vertex) {
            if keep[w as usize] && w as usize != u {
                d[u][w as usize] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != INF && d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn floyd_all(g: &Digraph) -> Vec<Vec<u32>> {
    floyd(g, &vec![true; g.n() as usize])
}

/// Largest finite entry over the rows and columns in `keep`.
pub fn max_finite(d: &[Vec<u32>], keep: &[bool]) -> u32 {
    let mut best = 0;
    for (i, row) in d.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if keep[i] && keep[j] && x != INF {
                best = best.max(x);
            }
        }
    }
    best
}

/// Every labelled head assignment of `D(n, r)`, in lexicographic order.
pub fn all_head_vectors(n: u32, r: u32) -> Vec<Vec<Vertex>> {
    let len = (n * r) as usize;
    let total = (n as usize).pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut heads = vec![0; len];
            for slot in heads.iter_mut().rev() {
                *slot = (code % n as usize) as Vertex;
                code /= n as usize;
            }
            heads
        })
        .collect()
}

/// Two-sided Kolmogorov-Smirnov distance between integer samples and a
/// discrete law given by its CDF.
pub fn ks_discrete(samples: &[u64], cdf: impl Fn(u64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_unstable();
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let below = if x == 0 { 0.0 } else { cdf(x - 1) };
        d = d.max((i as f64 / n - below).abs()).max((j as f64 / n - cdf(x)).abs());
        i = j;
    }
    d
}

/// Asymptotic KS critical value at level `alpha` for `n` samples.
pub fn ks_critical(alpha: f64, n: usize) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Pearson statistic for observed counts against equal expected cells.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}
