mod common;

use proptest::prelude::*;

use routgraph::metrics::{diameter, diameter_restricted, diameter_with, diameters, eccentricities, sample_distance};
use routgraph::stats::median;
use routgraph::{scc_decompose, Digraph, Execution, Seed};

#[test]
fn restricted_diameter_matches_induced_subgraph_oracle() {
    for s in 0..2000u64 {
        let n = 1 + (s % 8) as u32;
        let g = Digraph::generate(n, 1 + (s % 3) as u32, Seed(s)).unwrap();
        // A pseudo-random vertex subset, never empty.
        let keep: Vec<bool> = (0..n).map(|v| v == 0 || (s >> (v % 16)) & 1 == 1).collect();
        let subset: Vec<u32> = (0..n).filter(|&v| keep[v as usize]).collect();
        let oracle = common::max_finite(&common::floyd(&g, &keep), &keep);
        assert_eq!(diameter_restricted(&g, &subset).value, oracle, "seed {s}");
        let whole = common::max_finite(&common::floyd_all(&g), &vec![true; n as usize]);
        assert_eq!(diameter(&g).value, whole);
    }
}

#[test]
fn d0_diameter_from_the_shared_pass() {
    for s in 0..30u64 {
        let g = Digraph::generate(3000, 2, Seed(s)).unwrap();
        let dec = scc_decompose(&g);
        let (whole, d0) = diameters(&g, &dec, Execution::Parallel);
        assert_eq!(whole, diameter_with(&g, Execution::Sequential));
        assert_eq!(d0.value, diameter_restricted(&g, &dec.d0_vertices()).value);
        assert!(d0.value <= whole.value || !dec.attractive);
    }
}

proptest! {
    #[test]
    fn witness_realises_the_diameter(n in 1u32..200, r in 1u32..4, s in any::<u64>()) {
        let g = Digraph::generate(n, r, Seed(s)).unwrap();
        let rep = diameter(&g);
        let (u, v) = rep.witness;
        prop_assert_eq!(sample_distance(&g, u, v), Some(rep.value));
        let ecc = eccentricities(&g, &(0..n).collect::<Vec<_>>(), None, Execution::Sequential);
        prop_assert_eq!(ecc.iter().copied().max().unwrap(), rep.value);
        // Smallest source with maximal eccentricity.
        prop_assert_eq!(ecc.iter().position(|&e| e == rep.value).unwrap() as u32, u);
    }
}

#[test]
fn lower_bound_on_the_diameter() {
    for (n, r) in [(100u32, 2u32), (1000, 2), (1000, 3), (4096, 2), (5000, 4)] {
        let g = Digraph::generate(n, r, Seed(u64::from(n + r))).unwrap();
        let lb = (f64::from(n - 1).ln() / f64::from(r).ln()).ceil() as u32;
        assert!(diameter(&g).value >= lb, "n={n} r={r}");
    }
}

#[test]
fn typical_distance_into_d0_is_about_log_n() {
    let n = 100_000u32;
    let g = Digraph::generate(n, 2, Seed(31)).unwrap();
    let dec = scc_decompose(&g);
    let members = dec.d0_vertices();
    let mut x = 0x9E37_79B9_7F4A_7C15u64;
    let mut next = || {
        x = routgraph::seed::splitmix64(x);
        x
    };
    let ratios: Vec<f64> = (0..1000)
        .map(|_| {
            let u = (next() % u64::from(n)) as u32;
            let v = members[(next() % members.len() as u64) as usize];
            f64::from(sample_distance(&g, u, v).expect("D0 is attractive")) / f64::from(n).log2()
        })
        .collect();
    let m = median(&ratios);
    assert!((0.9..=1.2).contains(&m), "median {m}");
}
