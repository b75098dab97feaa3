use statrs::distribution::{Discrete, Poisson};

use routgraph::branching::{
    coupling_tv, gw_sample, gw_sample_rng, gw_tail_exact, gw_tail_exact_curve, gw_tail_prob, DEFAULT_POP_CAP,
};
use routgraph::stats::Estimate;
use routgraph::{solve_constants, Seed};

#[test]
fn constants_are_monotone_and_limit_correctly() {
    let table: Vec<_> = (2..=64).map(|r| solve_constants(r).unwrap()).collect();
    for w in table.windows(2) {
        assert!(w[1].lambda > w[0].lambda || w[1].lambda == 1.0);
        assert!(w[1].eta < w[0].eta);
    }
    let c3 = solve_constants(3).unwrap();
    assert!((c3.lambda - 0.9405).abs() < 5e-5 && (c3.eta - 0.638).abs() < 5e-4);
    let c64 = &table[62];
    assert!(c64.extinction < 1e-20 && 1.0 - c64.lambda < 1e-15);
    assert!(c64.eta < 0.07);
}

#[test]
fn extinction_frequency_is_one_minus_lambda() {
    for r in [2u32, 3] {
        let trials = 1_000_000u64;
        let mut rng = Seed(u64::from(r)).rng();
        let extinct = (0..trials)
            .filter(|_| gw_sample_rng(r, 30, DEFAULT_POP_CAP, &mut rng).extinct())
            .count() as u64;
        let est = Estimate::from_counts(extinct, trials);
        let target = 1.0 - solve_constants(r).unwrap().lambda;
        let se = (target * (1.0 - target) / trials as f64).sqrt();
        assert!((est.mean - target).abs() <= 3.0 * se, "r={r}: {} vs {target}", est.mean);
    }
}

#[test]
fn mean_generation_size_is_r_to_the_k() {
    let trials = 1_000_000u64;
    let mut rng = Seed(99).rng();
    let sizes: Vec<f64> = (0..trials)
        .map(|_| gw_sample_rng(2, 3, DEFAULT_POP_CAP, &mut rng).generation_sizes.get(3).copied().unwrap_or(0) as f64)
        .collect();
    assert!(Estimate::from_samples(&sizes).within(8.0, 3.0));
}

#[test]
fn single_child_probability() {
    let exact = gw_tail_exact(2, 1, 2);
    assert!((exact - 2.0 * (-2.0f64).exp()).abs() < 1e-14);
    let mc = gw_tail_prob(2, 1, 2, 200_000, Seed(5)).unwrap();
    assert!(mc.within(exact, 3.0), "{mc:?}");
}

#[test]
fn exact_recursion_agrees_with_sampling() {
    let trials = 200_000u64;
    for omega in [2u64, 4, 8] {
        let exact = gw_tail_exact_curve(2, 6, omega);
        for k in 0..=6u32 {
            let mc = gw_tail_prob(2, k, omega, trials, Seed(u64::from(k) * 100 + omega)).unwrap();
            let p = exact[k as usize];
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((mc.mean - p).abs() <= 3.0 * se + 1e-12, "k={k} omega={omega}: {} vs {p}", mc.mean);
        }
    }
}

#[test]
fn samples_are_reproducible() {
    assert_eq!(gw_sample(2, 20, DEFAULT_POP_CAP, Seed(7)), gw_sample(2, 20, DEFAULT_POP_CAP, Seed(7)));
    let t = gw_sample(4, 40, 1000, Seed(1));
    assert!(t.extinct() || t.truncated);
}

#[test]
fn root_in_degree_is_close_to_poisson() {
    let rep = coupling_tv(10_000, 2, 1, 100_000, Seed(21), 8).unwrap();
    let total: u64 = rep.root_degrees.iter().sum();
    let pois = Poisson::new(2.0).unwrap();
    let mut tv = 0.0;
    let mut mass = 0.0;
    for (x, &c) in rep.root_degrees.iter().enumerate() {
        let p = pois.pmf(x as u64);
        tv += (c as f64 / total as f64 - p).abs();
        mass += p;
    }
    tv = 0.5 * (tv + (1.0 - mass));
    assert!(tv <= 0.01, "tv {tv}");
    assert!(rep.tv <= 0.02, "shape tv {}", rep.tv);
}
