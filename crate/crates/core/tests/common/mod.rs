//! Brute-force reference implementations shared by the integration tests.
//! Everything here works on dense `i8` matrices with naive loops and never
//! calls into the library's statistic kernels.
#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sternet::netcore::{all_dyads, BinaryNetwork, Dyad, DyadState, NodeSet, Sign, SignedNetwork};
use sternet::stats::{EspKind, Term};

pub mod checks;

pub type Dense = Vec<Vec<i8>>;

pub fn dense(y: &SignedNetwork) -> Dense {
    let n = y.n();
    let mut m = vec![vec![0i8; n]; n];
    for (d, s) in y.edges() {
        m[d.i][d.j] = s.as_i8();
        m[d.j][d.i] = s.as_i8();
    }
    m
}

pub fn dense_binary(x: &BinaryNetwork) -> Dense {
    let n = x.n();
    let mut m = vec![vec![0i8; n]; n];
    for d in x.edges() {
        m[d.i][d.j] = 1;
        m[d.j][d.i] = 1;
    }
    m
}

/// `e^α Σ_k (1 - (1 - e^{-α})^k) c_k`, straight from the definition.
pub fn gw_naive(counts: &[u64], decay: f64) -> f64 {
    let r = 1.0 - (-decay).exp();
    counts
        .iter()
        .enumerate()
        .map(|(idx, &c)| decay.exp() * (1.0 - r.powi(idx as i32 + 1)) * c as f64)
        .sum()
}

fn sign_of(v: Sign) -> i8 {
    v.as_i8()
}

/// Triple loop over anchor edges and third nodes.
pub fn esp_naive(m: &Dense, kind: EspKind) -> Vec<u64> {
    let n = m.len();
    let a = sign_of(kind.anchor());
    let b = sign_of(kind.path());
    let mut counts = vec![0u64; n.saturating_sub(2)];
    for i in 0..n {
        for j in i + 1..n {
            if m[i][j] != a {
                continue;
            }
            let mut k_shared = 0;
            for k in 0..n {
                if k != i && k != j && m[i][k] == b && m[j][k] == b {
                    k_shared += 1;
                }
            }
            if k_shared > 0 {
                counts[k_shared - 1] += 1;
            }
        }
    }
    counts
}

fn degree_hist(m: &Dense, value: i8) -> Vec<u64> {
    let n = m.len();
    let mut counts = vec![0u64; n.saturating_sub(1)];
    for row in m {
        let d = row.iter().filter(|&&v| v == value).count();
        if d > 0 {
            counts[d - 1] += 1;
        }
    }
    counts
}

fn attr<'a>(nodes: &'a NodeSet, name: &str) -> &'a [String] {
    nodes.attribute(name).expect("attribute present")
}

/// Sign-layer statistic of one term on dense signed matrix `m`.
pub fn sign_stat_naive(m: &Dense, nodes: &NodeSet, prev: Option<&Dense>, term: &Term) -> f64 {
    let n = m.len();
    let pairs = || (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
    match term {
        Term::EdgesPos => pairs().filter(|&(i, j)| m[i][j] == 1).count() as f64,
        Term::HomophilyPos { attr: a, level } => {
            let v = attr(nodes, a);
            pairs()
                .filter(|&(i, j)| m[i][j] == 1 && &v[i] == level && &v[j] == level)
                .count() as f64
        }
        Term::NodematchPos { attr: a } => {
            let v = attr(nodes, a);
            pairs().filter(|&(i, j)| m[i][j] == 1 && v[i] == v[j]).count() as f64
        }
        Term::GwDegreePos { decay } => gw_naive(&degree_hist(m, 1), *decay),
        Term::GwEsp { kind, decay } => gw_naive(&esp_naive(m, *kind), *decay),
        Term::StablePos => {
            let p = prev.expect("lag");
            pairs().filter(|&(i, j)| m[i][j] == 1 && p[i][j] == 1).count() as f64
        }
        other => panic!("not a sign term: {other:?}"),
    }
}

/// Binary statistic of one term on a 0/1 matrix.
pub fn binary_stat_naive(m: &Dense, nodes: &NodeSet, prev: Option<&Dense>, term: &Term) -> f64 {
    let n = m.len();
    let pairs = || (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
    let shared = |i: usize, j: usize| {
        (0..n)
            .filter(|&k| k != i && k != j && m[i][k] != 0 && m[j][k] != 0)
            .count()
    };
    match term {
        Term::Edges => pairs().filter(|&(i, j)| m[i][j] != 0).count() as f64,
        Term::Homophily { attr: a, level } => {
            let v = attr(nodes, a);
            pairs()
                .filter(|&(i, j)| m[i][j] != 0 && &v[i] == level && &v[j] == level)
                .count() as f64
        }
        Term::Nodematch { attr: a } => {
            let v = attr(nodes, a);
            pairs().filter(|&(i, j)| m[i][j] != 0 && v[i] == v[j]).count() as f64
        }
        Term::GwDegree { decay } => {
            let bin: Dense = m
                .iter()
                .map(|r| r.iter().map(|&v| (v != 0) as i8).collect())
                .collect();
            gw_naive(&degree_hist(&bin, 1), *decay)
        }
        Term::Gwesp { decay } | Term::Gwnsp { decay } => {
            let want_edge = matches!(term, Term::Gwesp { .. });
            let mut counts = vec![0u64; n.saturating_sub(2)];
            for (i, j) in pairs() {
                if (m[i][j] != 0) == want_edge {
                    let k = shared(i, j);
                    if k > 0 {
                        counts[k - 1] += 1;
                    }
                }
            }
            gw_naive(&counts, *decay)
        }
        Term::Change => {
            let p = prev.expect("lag");
            pairs()
                .filter(|&(i, j)| (m[i][j] != 0) != (p[i][j] != 0))
                .count() as f64
        }
        other => panic!("not a binary term: {other:?}"),
    }
}

pub fn party_nodes(n: usize, rng: &mut impl Rng) -> Arc<NodeSet> {
    let parties: Vec<&str> = (0..n)
        .map(|_| if rng.random_bool(0.5) { "rep" } else { "dem" })
        .collect();
    let mut parties = parties;
    // both levels present so homophily terms always resolve
    if n >= 2 {
        parties[0] = "rep";
        parties[1] = "dem";
    }
    Arc::new(NodeSet::anonymous(n).with_attribute("party", parties).unwrap())
}

pub fn random_signed(nodes: Arc<NodeSet>, p_edge: f64, p_pos: f64, rng: &mut impl Rng) -> SignedNetwork {
    let n = nodes.len();
    let mut y = SignedNetwork::empty(nodes);
    for d in all_dyads(n) {
        if rng.random_bool(p_edge) {
            let s = if rng.random_bool(p_pos) { Sign::Pos } else { Sign::Neg };
            y.set(d.i, d.j, DyadState::Edge(s)).unwrap();
        }
    }
    y
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn all_sign_terms() -> Vec<Term> {
    vec![
        Term::EdgesPos,
        Term::HomophilyPos { attr: "party".into(), level: "rep".into() },
        Term::NodematchPos { attr: "party".into() },
        Term::GwDegreePos { decay: 0.2 },
        Term::GwEsp { kind: EspKind::EsfPos, decay: 0.6 },
        Term::GwEsp { kind: EspKind::EsePos, decay: 0.6 },
        Term::GwEsp { kind: EspKind::EseNeg, decay: 0.6 },
        Term::GwEsp { kind: EspKind::EsfNeg, decay: 0.6 },
        Term::GwEsp { kind: EspKind::EsfPos, decay: 0.0 },
        Term::GwDegreePos { decay: 1.3 },
    ]
}

pub fn all_binary_terms() -> Vec<Term> {
    vec![
        Term::Edges,
        Term::Homophily { attr: "party".into(), level: "rep".into() },
        Term::Nodematch { attr: "party".into() },
        Term::GwDegree { decay: 0.6 },
        Term::Gwesp { decay: 0.6 },
        Term::Gwnsp { decay: 0.6 },
        Term::Gwesp { decay: 0.0 },
        Term::Gwnsp { decay: 1.1 },
    ]
}

/// Signed network with dyad `d` overwritten.
pub fn with_state(y: &SignedNetwork, d: Dyad, s: DyadState) -> SignedNetwork {
    let mut y = y.clone();
    y.set(d.i, d.j, s).unwrap();
    y
}

pub fn logistic(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Total-variation distance between two distributions over the same index set.
pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
