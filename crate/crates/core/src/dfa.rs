//! Random DFA over `D(n, r)`: the edge `(i, j)` reads symbol `j`.
//!
//! Symbols are `0..r` in the library and `1..=r` in text and on the command
//! line, like vertices.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Digraph, Vertex};
use crate::par::{map_indices, Execution};
use crate::seed::Seed;

#[derive(Debug, Clone, PartialEq)]
pub struct Dfa {
    pub graph: Digraph,
    pub start: Vertex,
    pub accepting: Vec<bool>,
}

/// Substream index for the start state and accepting bits, distinct from the
/// stream that draws the transitions.
const LABEL_STREAM: u64 = u64::MAX;

/// Transitions exactly as [`Digraph::generate`] with the same seed; the start
/// state is uniform and every accepting bit a fair coin.
pub fn random_dfa(n: u32, r: u32, seed: Seed) -> Result<Dfa> {
    let graph = Digraph::generate(n, r, seed)?;
    let mut rng = seed.substream(LABEL_STREAM).rng();
    let start = rng.random_range(0..n);
    let accepting = (0..n).map(|_| rng.random_bool(0.5)).collect();
    Ok(Dfa { graph, start, accepting })
}

impl Dfa {
    pub fn new(graph: Digraph, start: Vertex, accepting: Vec<bool>) -> Result<Self> {
        if start >= graph.n() || accepting.len() != graph.n() as usize {
            return Err(Error::param("start state or accepting set does not match the graph"));
        }
        Ok(Dfa { graph, start, accepting })
    }

    pub fn step(&self, x: Vertex, symbol: u32) -> Result<Vertex> {
        if symbol >= self.graph.r() {
            return Err(Error::Symbol { symbol: symbol + 1, r: self.graph.r() });
        }
        Ok(self.graph.head(x, symbol))
    }

    /// States `x_0 = start, .., x_t` visited while reading `word`.
    pub fn trajectory(&self, word: &[u32]) -> Result<Vec<Vertex>> {
        let mut states = Vec::with_capacity(word.len() + 1);
        let mut x = self.start;
        states.push(x);
        for &a in word {
            x = self.step(x, a)?;
            states.push(x);
        }
        Ok(states)
    }

    /// Text form: header `n r start`, then `i: h1 .. hr b` per state, 1-based.
    pub fn to_text(&self) -> String {
        let g = &self.graph;
        let mut s = format!("{} {} {}\n", g.n(), g.r(), self.start + 1);
        for v in 0..g.n() {
            let _ = write!(s, "{}:", v + 1);
            for &h in g.out(v) {
                let _ = write!(s, " {}", h + 1);
            }
            let _ = writeln!(s, " {}", u8::from(self.accepting[v as usize]));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let parse_err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let nums: Vec<u32> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(hl + 1, "header must be `n r start`"))?;
        let [n, r, start] = nums[..] else {
            return Err(parse_err(hl + 1, "header must be `n r start`"));
        };
        if start == 0 || start > n {
            return Err(parse_err(hl + 1, "start state out of range"));
        }
        let mut heads = vec![0; n as usize * r as usize];
        let mut accepting = vec![false; n as usize];
        let mut filled = vec![false; n as usize];
        for (ln, line) in lines {
            let (id, rest) = line.split_once(':').ok_or_else(|| parse_err(ln + 1, "expected `i: h1 .. hr b`"))?;
            let i: u32 = id.trim().parse().map_err(|_| parse_err(ln + 1, "bad state id"))?;
            if i == 0 || i > n || filled[i as usize - 1] {
                return Err(parse_err(ln + 1, "state id out of range or repeated"));
            }
            let vals: Vec<u32> = rest
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(ln + 1, "bad number"))?;
            if vals.len() != r as usize + 1 || vals[r as usize] > 1 {
                return Err(parse_err(ln + 1, "expected r heads and an accept bit"));
            }
            for (j, &h) in vals[..r as usize].iter().enumerate() {
                if h == 0 || h > n {
                    return Err(parse_err(ln + 1, "head out of range"));
                }
                heads[(i as usize - 1) * r as usize + j] = h - 1;
            }
            accepting[i as usize - 1] = vals[r as usize] == 1;
            filled[i as usize - 1] = true;
        }
        if let Some(missing) = filled.iter().position(|&f| !f) {
            return Err(parse_err(0, &format!("state {} missing", missing + 1)));
        }
        Dfa::new(Digraph::from_heads(n, r, heads)?, start - 1, accepting)
    }
}

/// `(Q(w), B(Q(w)))` for the word `w`.
pub fn run_word(d: &Dfa, word: &[u32]) -> Result<(Vertex, bool)> {
    let mut x = d.start;
    for &a in word {
        x = d.step(x, a)?;
    }
    Ok((x, d.accepting[x as usize]))
}

/// A uniform word in `[r]^m` drawn from `seed`.
pub fn uniform_word(r: u32, m: usize, seed: Seed) -> Vec<u32> {
    let mut rng = seed.rng();
    (0..m).map(|_| rng.random_range(0..r)).collect()
}

/// Simple random walk `X_{k+1} = L(X_k, U_k)` from `start` for `m` steps,
/// with `U_k` drawn from `seed` exactly as [`uniform_word`] draws symbols.
pub fn random_walk(g: &Digraph, start: Vertex, m: usize, seed: Seed) -> Vec<Vertex> {
    let mut rng = seed.rng();
    let mut x = start;
    let mut out = vec![x];
    for _ in 0..m {
        x = g.head(x, rng.random_range(0..g.r()));
        out.push(x);
    }
    out
}

const WORD_BLOCK: u64 = 4096;

/// Empirical law of `Q(w)` over `trials` uniform words of length `m`.
pub fn uniform_word_visit_law(d: &Dfa, m: usize, trials: u64, seed: Seed, exec: Execution) -> Vec<f64> {
    let n = d.graph.n() as usize;
    let r = d.graph.r();
    let blocks = trials.div_ceil(WORD_BLOCK);
    let counts = map_indices(exec, blocks as usize, |b| {
        let mut rng = seed.substream(b as u64).rng();
        let mut c = vec![0u64; n];
        for _ in 0..WORD_BLOCK.min(trials - b as u64 * WORD_BLOCK) {
            let mut x = d.start;
            for _ in 0..m {
                x = d.graph.head(x, rng.random_range(0..r));
            }
            c[x as usize] += 1;
        }
        c
    });
    (0..n)
        .map(|v| counts.iter().map(|c| c[v]).sum::<u64>() as f64 / trials as f64)
        .collect()
}

/// Exact law of the `m`-step walk from `start`, by `m` sparse applications
/// of the transition operator.
pub fn exact_step_law(d: &Dfa, m: usize) -> Vec<f64> {
    let g = &d.graph;
    let n = g.n() as usize;
    let inv = 1.0 / f64::from(g.r());
    let mut x = vec![0.0; n];
    x[d.start as usize] = 1.0;
    let mut y = vec![0.0; n];
    for _ in 0..m {
        y.fill(0.0);
        for (u, &p) in x.iter().enumerate() {
            if p != 0.0 {
                for &w in g.out(u as Vertex) {
                    y[w as usize] += p * inv;
                }
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_dfa_and_empty_word() {
        let d = Dfa::new(Digraph::cycle(5, 3).unwrap(), 2, vec![true, false, true, false, true]).unwrap();
        assert_eq!(run_word(&d, &[]).unwrap(), (2, true));
        assert_eq!(run_word(&d, &[0, 2, 1, 1]).unwrap(), (1, false));
        assert!(matches!(run_word(&d, &[3]), Err(Error::Symbol { symbol: 4, r: 3 })));
        let law = exact_step_law(&d, 7);
        assert_eq!(law[4], 1.0);
        let emp = uniform_word_visit_law(&d, 7, 100, Seed(1), Execution::Sequential);
        assert_eq!(emp[4], 1.0);
        assert_eq!(uniform_word_visit_law(&d, 0, 10, Seed(1), Execution::Sequential)[2], 1.0);
    }

    #[test]
    fn single_state() {
        let d = random_dfa(1, 3, Seed(8)).unwrap();
        assert_eq!(d.graph.heads(), &[0, 0, 0]);
        assert_eq!(d.start, 0);
    }

    #[test]
    fn same_graph_as_generate_and_deterministic() {
        let d = random_dfa(40, 2, Seed(77)).unwrap();
        assert_eq!(d.graph, Digraph::generate(40, 2, Seed(77)).unwrap());
        assert_eq!(d, random_dfa(40, 2, Seed(77)).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let d = random_dfa(12, 3, Seed(4)).unwrap();
        let t = d.to_text();
        assert!(t.starts_with("12 3 "));
        assert_eq!(Dfa::from_text(&t).unwrap(), d);
        assert!(Dfa::from_text("2 1 1\n1: 2 0\n").is_err());
        assert!(Dfa::from_text("2 1 3\n1: 2 0\n2: 1 1\n").is_err());
    }
}
