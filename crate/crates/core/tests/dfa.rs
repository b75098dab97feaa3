use proptest::prelude::*;

use routgraph::dfa::{exact_step_law, random_dfa, random_walk, run_word, uniform_word, Dfa};
use routgraph::stationary::stationary_power;
use routgraph::structure::is_closed;
use routgraph::{scc_decompose, Digraph, Seed};

#[test]
fn accepting_bits_are_fair_coins() {
    let (n, seeds) = (10u32, 100_000u64);
    let accepting: u64 = (0..seeds)
        .map(|s| random_dfa(n, 2, Seed(s)).unwrap().accepting.iter().filter(|&&b| b).count() as u64)
        .sum();
    let total = seeds * u64::from(n);
    let se = (0.25 / total as f64).sqrt();
    assert!((accepting as f64 / total as f64 - 0.5).abs() <= 3.0 * se);
}

#[test]
fn start_state_is_uniform() {
    let n = 5u32;
    let mut counts = [0u64; 5];
    for s in 0..50_000 {
        counts[random_dfa(n, 2, Seed(s)).unwrap().start as usize] += 1;
    }
    for c in counts {
        let p = c as f64 / 50_000.0;
        assert!((p - 0.2).abs() <= 3.0 * (0.16f64 / 50_000.0).sqrt());
    }
}

proptest! {
    #[test]
    fn run_word_matches_a_naive_interpreter(n in 1u32..30, r in 1u32..5, s in any::<u64>(), word in proptest::collection::vec(0u32..5, 0..60)) {
        let d = random_dfa(n, r, Seed(s)).unwrap();
        let word: Vec<u32> = word.into_iter().map(|a| a % r).collect();
        let mut x = d.start as usize;
        for &a in &word {
            x = d.graph.heads()[x * r as usize + a as usize] as usize;
        }
        prop_assert_eq!(run_word(&d, &word).unwrap(), (x as u32, d.accepting[x]));
        prop_assert_eq!(*d.trajectory(&word).unwrap().last().unwrap(), x as u32);
    }

    #[test]
    fn coupled_walk_and_word_give_the_same_trajectory(n in 1u32..200, r in 1u32..5, s in any::<u64>(), m in 0usize..300) {
        let d = random_dfa(n, r, Seed(s)).unwrap();
        let word = uniform_word(r, m, Seed(s ^ 0xABCD));
        prop_assert_eq!(d.trajectory(&word).unwrap(), random_walk(&d.graph, d.start, m, Seed(s ^ 0xABCD)));
    }

    #[test]
    fn text_form_round_trips(n in 1u32..40, r in 1u32..5, s in any::<u64>()) {
        let d = random_dfa(n, r, Seed(s)).unwrap();
        prop_assert_eq!(Dfa::from_text(&d.to_text()).unwrap(), d);
    }
}

#[test]
fn cycle_dfa_ends_at_start_plus_m() {
    let d = Dfa::new(Digraph::cycle(7, 2).unwrap(), 3, vec![false; 7]).unwrap();
    for m in 0..20 {
        let word = uniform_word(2, m, Seed(m as u64));
        assert_eq!(run_word(&d, &word).unwrap().0, (3 + m as u32) % 7);
    }
}

#[test]
fn step_law_converges_to_the_stationary_distribution() {
    let n = 100u32;
    let mut tested = 0;
    for s in 0..40u64 {
        let d = random_dfa(n, 2, Seed(s)).unwrap();
        let dec = scc_decompose(&d.graph);
        if !(dec.attractive && dec.period == 1 && is_closed(&d.graph, &dec)) {
            continue;
        }
        let pi = stationary_power(&d.graph, &dec, 1e-14, 1_000_000).unwrap().dense();
        let m_final = (50.0 * f64::from(n).ln()).ceil() as usize;
        let mut prev = f64::INFINITY;
        for m in (0..=m_final).step_by(10) {
            let law = exact_step_law(&d, m);
            let l1: f64 = law.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            assert!(l1 <= prev + 1e-12, "seed {s}: l1 rose at m={m}");
            prev = l1;
        }
        let law = exact_step_law(&d, m_final);
        let l1: f64 = law.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        assert!(l1 <= 0.01, "seed {s}: l1 {l1} at m={m_final}");
        tested += 1;
    }
    assert!(tested >= 10);
}
