use rand::Rng;

use routgraph::exploration::{k0, k1};
use routgraph::flags::{check_flag_stationary, find_flags, is_flag, FlagParams};
use routgraph::stationary::{maze_hardness, stationary_power};
use routgraph::{ibfs, scc_decompose, Digraph, Execution, Seed, Vertex};

/// A perfect binary in-tree of the given depth into vertex 0 on vertices
/// `0..2^(depth+1)-1`; every other edge of the graph points at a uniform
/// vertex outside the tree.
fn embedded_in_tree(n: u32, depth: u32, seed: Seed) -> Digraph {
    let tree = (1u32 << (depth + 1)) - 1;
    assert!(tree < n);
    let mut rng = seed.rng();
    let mut outside = || rng.random_range(tree..n);
    let mut heads = Vec::with_capacity(2 * n as usize);
    for u in 0..n {
        if u == 0 || u >= tree {
            heads.extend([outside(), outside()]);
        } else {
            heads.extend([(u - 1) / 2, outside()]);
        }
    }
    Digraph::from_heads(n, 2, heads).unwrap()
}

#[test]
fn constructed_in_tree_is_a_flag() {
    let n = 1 << 12;
    let base = FlagParams::new(n, 2, 0.2).unwrap();
    let depth = base.k_star + 1;
    let p = base.with_thresholds(1 << depth, 1 << (depth + 2));
    let g = embedded_in_tree(n, depth, Seed(4));
    let rep = is_flag(&g, 0, &p);
    assert!(rep.is_flag && rep.is_tree);
    assert_eq!(rep.k1, Some(depth));
    assert_eq!(rep.maze_size, (1 << (depth + 1)) - 1);
    assert_eq!(rep.entrance, 1 << base.k_star);
    assert_eq!(maze_hardness(&g, 0, depth).unwrap().h, depth);

    let found = find_flags(&g, &p, None, Execution::Parallel);
    assert!(found.iter().any(|f| f.vertex == 0));
    // One level short of k*: still a tree, but reached too early.
    let shallow = embedded_in_tree(n, base.k_star - 1, Seed(4));
    let p_shallow = base.with_thresholds(1 << (base.k_star - 1), 1 << (depth + 2));
    assert!(!is_flag(&shallow, 0, &p_shallow).is_flag);
}

/// `pi(v) <= |N_k^-(v)| r^{-k} pi_max` at both `k = k*` and `k = k1`.
fn stationary_linkage(g: &Digraph, v: Vertex, k: u32, pi: &routgraph::StationaryProfile) -> bool {
    let layer = ibfs(g, v, Some(k)).layers.get(k as usize).map_or(0, Vec::len);
    pi.pi_of(v) <= layer as f64 * f64::from(g.r()).powi(-(k as i32)) * pi.pi_max + pi.residual
}

#[test]
fn flag_invariants_on_random_instances() {
    let n = 1 << 14;
    let p = FlagParams::desk_scale(n, 2, 0.2).unwrap();
    let (mut attractive, mut all_inside, mut total) = (0, 0, 0);
    for s in 0..50u64 {
        let g = Digraph::generate(n, 2, Seed(s)).unwrap();
        let dec = scc_decompose(&g);
        let found = find_flags(&g, &p, Some(&dec), Execution::Parallel);
        total += found.len();
        let profile = stationary_power(&g, &dec, 1e-12, 1_000_000).ok();
        for f in &found {
            let k = f.k1.unwrap();
            assert!(k >= p.k_star);
            assert_eq!(k0(&g, f.vertex, p.threshold), k);
            assert_eq!(k1(&g, f.vertex, p.threshold), Some(k));
            assert_eq!(maze_hardness(&g, f.vertex, k).unwrap().h, k);
            if let Some(pi) = &profile {
                assert!(check_flag_stationary(f, &p, pi).holds);
                assert!(stationary_linkage(&g, f.vertex, p.k_star, pi));
                assert!(stationary_linkage(&g, f.vertex, k, pi));
            }
        }
        if dec.attractive {
            attractive += 1;
            all_inside += usize::from(found.iter().all(|f| f.in_d0 == Some(true)));
        }
    }
    assert!(total > 0);
    assert!(all_inside * 100 >= 95 * attractive, "{all_inside}/{attractive}");
}

#[test]
fn every_reported_vertex_passes_the_single_vertex_test() {
    let n = 5000;
    let g = Digraph::generate(n, 2, Seed(12)).unwrap();
    let p = FlagParams::desk_scale(n, 2, 0.2).unwrap();
    let found = find_flags(&g, &p, None, Execution::Sequential);
    let brute: Vec<Vertex> = (0..n).filter(|&v| is_flag(&g, v, &p).is_flag).collect();
    assert_eq!(found.iter().map(|f| f.vertex).collect::<Vec<_>>(), brute);
    assert_eq!(found, find_flags(&g, &p, None, Execution::Parallel));
}
