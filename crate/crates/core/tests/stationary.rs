use routgraph::stationary::{
    escape_probability, escape_probability_mc, maze_hardness, mean_return_time, stationary_direct, stationary_power,
    transition_row, validate_pimax_bound,
};
use routgraph::structure::is_closed;
use routgraph::{scc_decompose, Digraph, Execution, Seed};

fn chain2() -> Digraph {
    Digraph::from_heads(2, 2, vec![0, 1, 0, 0]).unwrap()
}

/// Closed instances of `D(n, r)`, skipping seeds whose largest component leaks.
fn closed_instances(n: u32, r: u32, count: usize, base: u64) -> Vec<Digraph> {
    (base..)
        .map(|s| Digraph::generate(n, r, Seed(s)).unwrap())
        .filter(|g| is_closed(g, &scc_decompose(g)))
        .take(count)
        .collect()
}

#[test]
fn rows_are_exact_distributions() {
    for g in closed_instances(200, 3, 10, 0) {
        let dec = scc_decompose(&g);
        for v in dec.d0_vertices() {
            let row = transition_row(&g, &dec, v).unwrap();
            assert_eq!(row.entries.iter().map(|e| e.1).sum::<u32>(), 3);
            for &(w, m) in &row.entries {
                assert_eq!(g.multiplicity(v, w), m);
            }
        }
    }
}

#[test]
fn power_iteration_agrees_with_the_direct_solve() {
    for (i, g) in closed_instances(300, 2, 25, 100).into_iter().enumerate() {
        let dec = scc_decompose(&g);
        let p = stationary_power(&g, &dec, 1e-13, 1_000_000).unwrap();
        let d = stationary_direct(&g, &dec).unwrap();
        assert!(p.converged, "instance {i}");
        let sum: f64 = p.pi.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
        assert!(p.pi.iter().all(|&x| x >= 0.0));
        assert!(p.residual <= 1e-12);
        let l1: f64 = p.pi.iter().zip(&d.pi).map(|(a, b)| (a - b).abs()).sum();
        assert!(l1 <= 1e-8, "instance {i}: l1 {l1}");
        assert!(p.pi_max >= 1.0 / f64::from(g.n()));
    }
}

#[test]
fn chain_values() {
    let g = chain2();
    let dec = scc_decompose(&g);
    let d = stationary_direct(&g, &dec).unwrap();
    assert!((d.pi[0] - 2.0 / 3.0).abs() < 1e-15 && (d.pi[1] - 1.0 / 3.0).abs() < 1e-15);

    let est = mean_return_time(&g, &dec, 0, 20_000, Seed(3), Execution::Parallel).unwrap();
    assert!(est.within(1.5, 3.0), "{est:?}");

    // Vertex 2 with k = 1: h = 0 and nothing escapes.
    let h = maze_hardness(&g, 1, 1).unwrap();
    let e = escape_probability(&g, 1, 1).unwrap();
    assert_eq!((h.h, e.value), (0, 0.0));
    assert!(validate_pimax_bound(&d, &h, &e).holds);
}

#[test]
fn return_time_on_a_cycle_is_exactly_n() {
    let g = Digraph::cycle(9, 2).unwrap();
    let dec = scc_decompose(&g);
    let est = mean_return_time(&g, &dec, 4, 100, Seed(1), Execution::Sequential).unwrap();
    assert_eq!((est.mean, est.stderr), (9.0, 0.0));
}

#[test]
fn return_time_matches_inverse_stationary_mass() {
    let g = &closed_instances(100, 2, 1, 500)[0];
    let dec = scc_decompose(g);
    let d = stationary_direct(g, &dec).unwrap();
    for v in [d.argmax, d.support[d.support.len() / 2]] {
        let est = mean_return_time(g, &dec, v, 20_000, Seed(u64::from(v)), Execution::Parallel).unwrap();
        assert!(est.within(1.0 / d.pi_of(v), 3.0), "v={v}: {est:?} vs {}", 1.0 / d.pi_of(v));
    }
}

#[test]
fn hardness_depends_on_multiplicity_into_the_maze() {
    // Vertex 2 points at 1 twice: both of its edges stay in the maze.
    let double = Digraph::from_heads(3, 2, vec![2, 2, 0, 0, 2, 2]).unwrap();
    assert_eq!(maze_hardness(&double, 0, 1).unwrap().h, 0);
    // Vertex 2 points at 1 and at 3: a single edge stays in the maze.
    let single = Digraph::from_heads(3, 2, vec![2, 2, 0, 2, 2, 2]).unwrap();
    let h = maze_hardness(&single, 0, 1).unwrap();
    assert_eq!(h.h, 1);
    assert_eq!(h.witness, vec![1, 0]);
}

#[test]
fn escape_matches_monte_carlo() {
    let g = Digraph::generate(1000, 2, Seed(77)).unwrap();
    let trials = 20_000;
    let mut checked = 0;
    for v in (0..1000).step_by(97) {
        for k in [2, 3, 5] {
            let Ok(exact) = escape_probability(&g, v, k) else {
                continue;
            };
            let mc = escape_probability_mc(&g, v, k, trials, Seed(u64::from(v * 10 + k))).unwrap();
            let p = exact.value;
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((mc.mean - p).abs() <= 3.0 * se + 1e-12, "v={v} k={k}: {} vs {p}", mc.mean);
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn pimax_bound_at_larger_depth() {
    for g in closed_instances(2000, 2, 5, 900) {
        let dec = scc_decompose(&g);
        let p = stationary_power(&g, &dec, 1e-13, 1_000_000).unwrap();
        for v in dec.d0_vertices().into_iter().step_by(7) {
            for k in [3, 4] {
                let (Ok(h), Ok(e)) = (maze_hardness(&g, v, k), escape_probability(&g, v, k)) else {
                    continue;
                };
                let c = validate_pimax_bound(&p, &h, &e);
                assert!(c.holds, "v={v} k={k}: {c:?}");
            }
        }
    }
}
