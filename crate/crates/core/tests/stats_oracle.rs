mod common;

use std::sync::Arc;

use common::checks::*;
use common::*;
use proptest::prelude::*;
use sternet::netcore::NodeSet;
use sternet::stats::{gw_transform, suff_stats_binary, suff_stats_sign, Term};

#[test]
fn exhaustive_small_graphs_match_oracle() {
    for n in 2..=4 {
        let (err, seen) = exhaustive_statistics(n, 8).unwrap();
        assert!(err < 1e-9 && seen > 0, "n = {n}");
    }
}

#[test]
fn random_graphs_match_oracle() {
    let err = random_statistics(200, 10, 11).unwrap();
    assert!(err < 1e-9);
}

#[test]
fn gwesf_neg_is_gwnsp_of_positive_graph() {
    gwesf_neg_equivalence(300, 5).unwrap();
}

#[test]
fn large_decay_approaches_plain_count() {
    let counts = [4u64, 0, 2, 7, 1];
    // w(k) -> k as the decay grows, so the limit counts partner-weighted edges
    let weighted: u64 = counts.iter().zip(1u64..).map(|(c, k)| c * k).sum();
    assert!((gw_transform(&counts, 50.0) - weighted as f64).abs() < 1e-6);
    assert!(gw_transform(&counts, 0.3) >= 0.0);
}

#[test]
fn rational_oracle_for_gw_weights() {
    use num::{BigInt, BigRational, One, ToPrimitive};
    // alpha = ln(p/q): e^alpha = p/q and 1 - e^-alpha = (p - q)/p, both exact
    for (p, q) in [(3i64, 2i64), (5, 1), (11, 10), (7, 3)] {
        let alpha = (p as f64 / q as f64).ln();
        let ea = BigRational::new(BigInt::from(p), BigInt::from(q));
        let r = BigRational::new(BigInt::from(p - q), BigInt::from(p));
        let counts: Vec<u64> = (1..=12).map(|k| (k * 7 % 5) as u64).collect();
        let mut exact = BigRational::from_integer(BigInt::from(0));
        let mut rk = BigRational::one();
        for &c in &counts {
            rk = &rk * &r;
            exact += &ea * (BigRational::one() - &rk) * BigRational::from_integer(BigInt::from(c));
        }
        let want = exact.to_f64().unwrap();
        let got = gw_transform(&counts, alpha);
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "p/q = {p}/{q}: {got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statistics_invariant_under_relabelling(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let nodes = party_nodes(n, &mut r);
        let y = random_signed(nodes.clone(), 0.5, 0.5, &mut r);
        let mut perm: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        perm.shuffle(&mut r);
        let parties = nodes.attribute("party").unwrap();
        let mut moved = vec![String::new(); n];
        for (old, &new) in perm.iter().enumerate() {
            moved[new] = parties[old].clone();
        }
        let pnodes = Arc::new(NodeSet::anonymous(n).with_attribute("party", moved).unwrap());
        let py = permute(&y, &perm, pnodes);
        let st = all_sign_terms();
        let bt = all_binary_terms();
        let a = suff_stats_sign(&y.signs(), &y.interaction(), &st).unwrap();
        let b = suff_stats_sign(&py.signs(), &py.interaction(), &st).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            prop_assert!((u - v).abs() < 1e-9);
        }
        let a = suff_stats_binary(&y.interaction(), &bt).unwrap();
        let b = suff_stats_binary(&py.interaction(), &bt).unwrap();
        for (u, v) in a.iter().zip(b.iter()) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn change_statistics_match_recomputation(seed in any::<u64>(), n in 3usize..9) {
        let mut r = rng(seed);
        let nodes = party_nodes(n, &mut r);
        let y = random_signed(nodes.clone(), 0.6, 0.5, &mut r);
        let prev = random_signed(nodes, 0.4, 0.5, &mut r);
        prop_assert!(check_network(&y, &prev).is_ok());
    }
}

#[test]
fn lagged_terms_need_the_previous_wave() {
    let nodes = Arc::new(NodeSet::anonymous(3));
    let y = random_signed(nodes, 1.0, 0.5, &mut rng(1));
    assert!(suff_stats_sign(&y.signs(), &y.interaction(), &[Term::StablePos]).is_err());
    assert!(suff_stats_binary(&y.interaction(), &[Term::Change]).is_err());
}
