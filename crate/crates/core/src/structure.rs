//! Strongly connected components, the largest component, attractivity and period.

use std::collections::VecDeque;

use serde::Serialize;

use crate::graph::{Digraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Component index per vertex. Components are numbered by increasing
    /// smallest member.
    pub comp_id: Vec<u32>,
    pub comp_sizes: Vec<u32>,
    /// Index of the largest component; ties go to the one with the smallest member.
    pub d0: u32,
    pub attractive: bool,
    /// gcd of the cycle lengths inside the largest component; 0 if it has no cycle.
    pub period: u32,
}

impl SccDecomposition {
    pub fn d0_size(&self) -> u32 {
        self.comp_sizes[self.d0 as usize]
    }

    #[inline]
    pub fn in_d0(&self, v: Vertex) -> bool {
        self.comp_id[v as usize] == self.d0
    }

    pub fn d0_vertices(&self) -> Vec<Vertex> {
        (0..self.comp_id.len() as u32).filter(|&v| self.in_d0(v)).collect()
    }

    pub fn d0_mask(&self) -> Vec<bool> {
        self.comp_id.iter().map(|&c| c == self.d0).collect()
    }

    pub fn component_count(&self) -> usize {
        self.comp_sizes.len()
    }

    /// `{"sizes":[..],"d0_size":..,"attractive":..,"period":..}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            sizes: &'a [u32],
            d0_size: u32,
            attractive: bool,
            period: u32,
        }
        serde_json::to_string(&Out {
            sizes: &self.comp_sizes,
            d0_size: self.d0_size(),
            attractive: self.attractive,
            period: self.period,
        })
        .expect("decomposition serializes")
    }
}

const UNVISITED: u32 = u32::MAX;

/// Tarjan's algorithm with an explicit call stack.
fn tarjan(g: &Digraph) -> Vec<u32> {
    let n = g.n() as usize;
    let r = g.r();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack: Vec<Vertex> = Vec::new();
    let mut calls: Vec<(Vertex, u32)> = Vec::new();
    let mut counter = 0u32;
    let mut ncomp = 0u32;

    for s in 0..n as Vertex {
        if index[s as usize] != UNVISITED {
            continue;
        }
        index[s as usize] = counter;
        low[s as usize] = counter;
        counter += 1;
        stack.push(s);
        on_stack[s as usize] = true;
        calls.push((s, 0));

        while let Some(&mut (v, ref mut slot)) = calls.last_mut() {
            if *slot < r {
                let w = g.head(v, *slot);
                *slot += 1;
                let wi = w as usize;
                if index[wi] == UNVISITED {
                    index[wi] = counter;
                    low[wi] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    calls.push((w, 0));
                } else if on_stack[wi] {
                    low[v as usize] = low[v as usize].min(index[wi]);
                }
                continue;
            }
            calls.pop();
            let vi = v as usize;
            if low[vi] == index[vi] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    comp[w as usize] = ncomp;
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
            if let Some(&(p, _)) = calls.last() {
                low[p as usize] = low[p as usize].min(low[vi]);
            }
        }
    }
    comp
}

/// Full decomposition, including attractivity and period of the largest component.
pub fn scc_decompose(g: &Digraph) -> SccDecomposition {
    let raw = tarjan(g);
    let mut renumber = vec![UNVISITED; raw.len()];
    let mut comp_id = Vec::with_capacity(raw.len());
    let mut comp_sizes: Vec<u32> = Vec::new();
    for &c in &raw {
        let id = &mut renumber[c as usize];
        if *id == UNVISITED {
            *id = comp_sizes.len() as u32;
            comp_sizes.push(0);
        }
        comp_sizes[*id as usize] += 1;
        comp_id.push(*id);
    }
    // Ids follow smallest members, so the first maximum wins ties.
    let max = *comp_sizes.iter().max().expect("graph has vertices");
    let d0 = comp_sizes.iter().position(|&s| s == max).unwrap() as u32;
    let mut dec = SccDecomposition {
        comp_id,
        comp_sizes,
        d0,
        attractive: false,
        period: 0,
    };
    dec.attractive = is_attractive(g, &dec);
    dec.period = period(g, &dec);
    dec
}

/// True iff every vertex has a directed path into the largest component.
pub fn is_attractive(g: &Digraph, dec: &SccDecomposition) -> bool {
    let n = g.n() as usize;
    let mut seen = dec.d0_mask();
    let mut queue: VecDeque<Vertex> = dec.d0_vertices().into();
    let mut count = queue.len();
    while let Some(u) = queue.pop_front() {
        for &w in g.in_edges(u) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

/// True iff no edge leaves the largest component.
pub fn is_closed(g: &Digraph, dec: &SccDecomposition) -> bool {
    dec.d0_vertices()
        .into_iter()
        .all(|u| g.out(u).iter().all(|&w| dec.in_d0(w)))
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Period of the largest component: gcd over its internal edges `(u, w)` of
/// `level(u) + 1 - level(w)`, levels taken from a BFS inside the component.
/// Returns 0 when the component is a single vertex without a loop.
pub fn period(g: &Digraph, dec: &SccDecomposition) -> u32 {
    let members = dec.d0_vertices();
    let root = members[0];
    let mut level = vec![u32::MAX; g.n() as usize];
    level[root as usize] = 0;
    let mut queue = VecDeque::from([root]);
    let mut p = 0u32;
    while let Some(u) = queue.pop_front() {
        let lu = level[u as usize];
        for &w in g.out(u) {
            if !dec.in_d0(w) {
                continue;
            }
            if level[w as usize] == u32::MAX {
                level[w as usize] = lu + 1;
                queue.push_back(w);
            } else {
                let diff = (i64::from(lu) + 1 - i64::from(level[w as usize])).unsigned_abs() as u32;
                p = gcd(p, diff);
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_is_one_periodic_component() {
        let g = Digraph::cycle(9, 2).unwrap();
        let dec = scc_decompose(&g);
        assert_eq!(dec.comp_sizes, vec![9]);
        assert!(dec.attractive);
        assert_eq!(dec.period, 9);
    }

    #[test]
    fn cycle_with_loop_is_aperiodic() {
        let mut heads: Vec<u32> = (0..6).flat_map(|i| [(i + 1) % 6, (i + 1) % 6]).collect();
        heads[7] = 3;
        let g = Digraph::from_heads(6, 2, heads).unwrap();
        assert_eq!(scc_decompose(&g).period, 1);
    }

    #[test]
    fn all_loops_ties_go_to_vertex_one() {
        let dec = scc_decompose(&Digraph::all_loops(5, 2).unwrap());
        assert_eq!(dec.component_count(), 5);
        assert_eq!(dec.d0, dec.comp_id[0]);
        assert_eq!(dec.d0_vertices(), vec![0]);
        assert!(!dec.attractive);
        assert_eq!(dec.period, 1);
    }

    #[test]
    fn two_disjoint_cycles_are_not_attractive() {
        // 0 -> 1 -> 2 -> 0 and 3 -> 4 -> 3.
        let g = Digraph::from_heads(5, 1, vec![1, 2, 0, 4, 3]).unwrap();
        let dec = scc_decompose(&g);
        assert_eq!(dec.d0_size(), 3);
        assert!(!is_attractive(&g, &dec));
        assert_eq!(dec.period, 3);
    }

    #[test]
    fn ties_prefer_smallest_labelled_vertex() {
        // Cycles {3,4} and {0,1}; vertex 2 feeds both.
        let g = Digraph::from_heads(5, 1, vec![1, 0, 3, 4, 3]).unwrap();
        let dec = scc_decompose(&g);
        assert_eq!(dec.d0_vertices(), vec![0, 1]);
    }

    #[test]
    fn deep_path_does_not_overflow() {
        let n = 1_000_000;
        let g = Digraph::cycle(n, 1).unwrap();
        let dec = scc_decompose(&g);
        assert_eq!(dec.d0_size(), n);
        // A long path into a loop: n singleton components.
        let heads: Vec<u32> = (0..n).map(|i| (i + 1).min(n - 1)).collect();
        let dec = scc_decompose(&Digraph::from_heads(n, 1, heads).unwrap());
        assert_eq!(dec.component_count(), n as usize);
        assert_eq!(dec.d0_vertices(), vec![0]);
        assert!(!dec.attractive);
        assert_eq!(dec.period, 0);
    }

    #[test]
    fn json_export() {
        let dec = scc_decompose(&Digraph::cycle(4, 1).unwrap());
        assert_eq!(dec.to_json(), r#"{"sizes":[4],"d0_size":4,"attractive":true,"period":4}"#);
    }
}
