//! r-out regular directed multigraphs.
//!
//! Vertices are `0..n` internally. Every serializer and every error message
//! uses 1-based ids. The out-edges of vertex `i` live at `heads[i*r..(i+1)*r]`,
//! slot `j` being the `j`-th edge; loops and parallel edges are kept.

use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{Seed, StreamRng};

pub type Vertex = u32;

/// Retry cap used by [`Digraph::generate_simple`].
pub const DEFAULT_SIMPLE_RETRIES: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct Digraph {
    n: u32,
    r: u32,
    heads: Vec<Vertex>,
    reverse: OnceLock<ReverseIndex>,
}

/// In-edge lists in CSR form. The tails of the edges into `v` are sorted
/// ascending and repeated once per parallel edge.
#[derive(Debug, Clone)]
pub(crate) struct ReverseIndex {
    offsets: Vec<u32>,
    tails: Vec<Vertex>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.r == other.r && self.heads == other.heads
    }
}

impl Eq for Digraph {}

fn check_params(n: u32, r: u32) -> Result<()> {
    if n == 0 || r == 0 {
        return Err(Error::param(format!("need n >= 1 and r >= 1, got n={n} r={r}")));
    }
    if u64::from(n) * u64::from(r) > u64::from(u32::MAX) {
        return Err(Error::param(format!("n*r = {} exceeds the edge id range", u64::from(n) * u64::from(r))));
    }
    Ok(())
}

impl Digraph {
    /// Builds a graph from a flat head array (0-based ids).
    pub fn from_heads(n: u32, r: u32, heads: Vec<Vertex>) -> Result<Self> {
        check_params(n, r)?;
        if heads.len() != n as usize * r as usize {
            return Err(Error::param(format!(
                "expected {} heads for n={n} r={r}, got {}",
                n as usize * r as usize,
                heads.len()
            )));
        }
        if let Some(pos) = heads.iter().position(|&h| h >= n) {
            return Err(Error::param(format!(
                "head {} of vertex {} is not a vertex id",
                heads[pos] + 1,
                pos / r as usize + 1
            )));
        }
        Ok(Self::from_heads_unchecked(n, r, heads))
    }

    fn from_heads_unchecked(n: u32, r: u32, heads: Vec<Vertex>) -> Self {
        Digraph {
            n,
            r,
            heads,
            reverse: OnceLock::new(),
        }
    }

    /// Uniform random r-out digraph: the `n*r` heads are independent uniform
    /// draws, taken in `(i, j)` lexicographic order from `seed`'s stream.
    pub fn generate(n: u32, r: u32, seed: Seed) -> Result<Self> {
        check_params(n, r)?;
        let mut rng = seed.rng();
        Ok(Self::draw(n, r, &mut rng))
    }

    fn draw(n: u32, r: u32, rng: &mut StreamRng) -> Self {
        let heads = (0..n as usize * r as usize).map(|_| rng.random_range(0..n)).collect();
        Self::from_heads_unchecked(n, r, heads)
    }

    /// Uniform simple r-out digraph (no loops, no parallel edges) by rejection.
    pub fn generate_simple(n: u32, r: u32, seed: Seed) -> Result<Self> {
        Self::generate_simple_counted(n, r, seed, DEFAULT_SIMPLE_RETRIES).map(|(g, _)| g)
    }

    /// Rejection sampler returning the graph and the number of attempts used.
    ///
    /// An attempt is abandoned as soon as one vertex's slots break simplicity;
    /// the accepted attempt is still a full set of iid uniform heads conditioned
    /// on simplicity.
    pub fn generate_simple_counted(n: u32, r: u32, seed: Seed, max_tries: u64) -> Result<(Self, u64)> {
        check_params(n, r)?;
        if n <= r {
            return Err(Error::param(format!("a simple {r}-out digraph needs n > r, got n={n}")));
        }
        let mut rng = seed.rng();
        let r_us = r as usize;
        let mut heads = vec![0; n as usize * r_us];
        'attempt: for attempt in 1..=max_tries {
            for i in 0..n {
                let slots = &mut heads[i as usize * r_us..(i as usize + 1) * r_us];
                for j in 0..r_us {
                    let h = rng.random_range(0..n);
                    if h == i || slots[..j].contains(&h) {
                        continue 'attempt;
                    }
                    slots[j] = h;
                }
            }
            return Ok((Self::from_heads_unchecked(n, r, heads), attempt));
        }
        Err(Error::Exhausted { n, r, tries: max_tries })
    }

    /// Directed cycle `i -> i+1 mod n` with every edge repeated `r` times.
    pub fn cycle(n: u32, r: u32) -> Result<Self> {
        check_params(n, r)?;
        let heads = (0..n).flat_map(|i| std::iter::repeat_n((i + 1) % n, r as usize)).collect();
        Ok(Self::from_heads_unchecked(n, r, heads))
    }

    /// Every edge is a self-loop.
    pub fn all_loops(n: u32, r: u32) -> Result<Self> {
        check_params(n, r)?;
        let heads = (0..n).flat_map(|i| std::iter::repeat_n(i, r as usize)).collect();
        Ok(Self::from_heads_unchecked(n, r, heads))
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn r(&self) -> u32 {
        self.r
    }

    #[inline]
    pub fn heads(&self) -> &[Vertex] {
        &self.heads
    }

    /// Heads of the `r` out-edges of `v`, in slot order.
    #[inline]
    pub fn out(&self, v: Vertex) -> &[Vertex] {
        let r = self.r as usize;
        &self.heads[v as usize * r..(v as usize + 1) * r]
    }

    #[inline]
    pub fn head(&self, v: Vertex, slot: u32) -> Vertex {
        self.heads[v as usize * self.r as usize + slot as usize]
    }

    /// Tails of the edges into `v`, ascending, one entry per edge.
    #[inline]
    pub fn in_edges(&self, v: Vertex) -> &[Vertex] {
        let rev = self.reverse();
        &rev.tails[rev.offsets[v as usize] as usize..rev.offsets[v as usize + 1] as usize]
    }

    pub fn in_degree(&self, v: Vertex) -> u32 {
        self.in_edges(v).len() as u32
    }

    /// Number of parallel edges `u -> w`.
    pub fn multiplicity(&self, u: Vertex, w: Vertex) -> u32 {
        self.out(u).iter().filter(|&&h| h == w).count() as u32
    }

    pub(crate) fn reverse(&self) -> &ReverseIndex {
        self.reverse.get_or_init(|| {
            let n = self.n as usize;
            let r = self.r as usize;
            let mut offsets = vec![0u32; n + 1];
            for &h in &self.heads {
                offsets[h as usize + 1] += 1;
            }
            for i in 0..n {
                offsets[i + 1] += offsets[i];
            }
            let mut cursor = offsets.clone();
            let mut tails = vec![0; self.heads.len()];
            for (e, &h) in self.heads.iter().enumerate() {
                let c = &mut cursor[h as usize];
                tails[*c as usize] = (e / r) as Vertex;
                *c += 1;
            }
            ReverseIndex { offsets, tails }
        })
    }

    /// Vertices whose `r` out-edges are all self-loops.
    pub fn loop_vertices(&self) -> Vec<Vertex> {
        (0..self.n).filter(|&v| self.out(v).iter().all(|&h| h == v)).collect()
    }

    /// No loops and no repeated head within any vertex's slots.
    pub fn is_simple(&self) -> bool {
        (0..self.n).all(|v| {
            let out = self.out(v);
            out.iter().enumerate().all(|(j, &h)| h != v && !out[..j].contains(&h))
        })
    }

    /// Edge-list text form: a `n=<n> r=<r>` header, then `i: h1 .. hr` per
    /// vertex, 1-based.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.heads.len() * 7 + 32);
        let _ = writeln!(s, "n={} r={}", self.n, self.r);
        for v in 0..self.n {
            let _ = write!(s, "{}:", v + 1);
            for &h in self.out(v) {
                let _ = write!(s, " {}", h + 1);
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (n, r) = parse_header(header).ok_or_else(|| Error::Parse {
            line: hline + 1,
            msg: format!("expected `n=<n> r=<r>`, got `{}`", header.trim()),
        })?;
        check_params(n, r)?;
        let mut heads = vec![u32::MAX; n as usize * r as usize];
        let mut seen = vec![false; n as usize];
        for (idx, line) in lines {
            let bad = |msg: String| Error::Parse { line: idx + 1, msg };
            let (lhs, rhs) = line.split_once(':').ok_or_else(|| bad("expected `i: h1 .. hr`".into()))?;
            let v = parse_vertex(lhs.trim(), n).ok_or_else(|| bad(format!("bad vertex `{}`", lhs.trim())))?;
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(bad(format!("vertex {} listed twice", v + 1)));
            }
            let hs = rhs
                .split_whitespace()
                .map(|t| parse_vertex(t, n).ok_or_else(|| bad(format!("bad head `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            if hs.len() != r as usize {
                return Err(bad(format!("expected {r} heads, got {}", hs.len())));
            }
            heads[v as usize * r as usize..(v as usize + 1) * r as usize].copy_from_slice(&hs);
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("vertex {} has no adjacency line", missing + 1),
            });
        }
        Ok(Self::from_heads_unchecked(n, r, heads))
    }

    /// JSON form `{"n":..,"r":..,"heads":[..]}` with 1-based heads.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson::from(self)).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if j.heads.contains(&0) {
            return Err(Error::param("heads are 1-based; found 0"));
        }
        Self::from_heads(j.n, j.r, j.heads.into_iter().map(|h| h - 1).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: u32,
    r: u32,
    heads: Vec<u32>,
}

impl From<&Digraph> for GraphJson {
    fn from(g: &Digraph) -> Self {
        GraphJson {
            n: g.n,
            r: g.r,
            heads: g.heads.iter().map(|h| h + 1).collect(),
        }
    }
}

fn parse_header(line: &str) -> Option<(u32, u32)> {
    let mut n = None;
    let mut r = None;
    for tok in line.split_whitespace() {
        match tok.split_once('=')? {
            ("n", v) => n = v.parse().ok(),
            ("r", v) => r = v.parse().ok(),
            _ => return None,
        }
    }
    Some((n?, r?))
}

fn parse_vertex(tok: &str, n: u32) -> Option<Vertex> {
    let v: u32 = tok.parse().ok()?;
    (1..=n).contains(&v).then(|| v - 1)
}
