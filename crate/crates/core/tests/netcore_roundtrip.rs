mod common;

use common::checks::round_trip;
use common::{random_signed, rng};
use proptest::prelude::*;
use sternet::netcore::{decompose, recombine, NodeSet};

#[test]
fn random_panels_round_trip() {
    round_trip(2000, 31).unwrap();
}

proptest! {
    #[test]
    fn recombine_inverts_decompose(n in 2usize..15, p in 0.0f64..1.0, q in 0.0f64..1.0, seed in any::<u64>()) {
        let nodes = std::sync::Arc::new(NodeSet::anonymous(n));
        let mut r = rng(seed);
        let a = random_signed(nodes.clone(), p, q, &mut r);
        let b = random_signed(nodes, 1.0 - p, q, &mut r);
        let d = decompose(&a, &b).unwrap();
        prop_assert_eq!(recombine(&a, &d).unwrap(), b);
        prop_assert_eq!(d.free_f.len() + d.free_p.len(), n * (n - 1) / 2);
        prop_assert!(d.x_p.edges().all(|e| d.x_f.has(e)));
    }
}
