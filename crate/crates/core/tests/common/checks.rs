//! Reusable correctness sweeps. Each returns the worst discrepancy seen or a
//! description of the first failure.

use std::sync::Arc;

use rand::Rng;
use sternet::netcore::{all_dyads, dyad_count, Dyad, DyadState, NodeSet, Sign, SignedNetwork};
use sternet::stats::{
    change_stat_binary, change_stat_sign, gwnsp_on_support, suff_stats_binary_lagged,
    suff_stats_sign_lagged, EspKind, Term,
};

use super::*;

pub type Check = std::result::Result<f64, String>;

fn worst(acc: &mut f64, a: f64, b: f64, what: impl Fn() -> String) -> std::result::Result<(), String> {
    let e = (a - b).abs();
    if !(e <= 1e-9) {
        return Err(format!("{}: got {a}, oracle {b}", what()));
    }
    *acc = acc.max(e);
    Ok(())
}

/// Compares every statistic and change statistic of `y` against the oracles,
/// with `prev` feeding the lagged terms.
pub fn check_network(y: &SignedNetwork, prev: &SignedNetwork) -> Check {
    let nodes = y.nodes().clone();
    let x = y.interaction();
    let z = y.signs();
    let m = dense(y);
    let pm = dense(prev);
    let mut err = 0.0f64;

    let mut sign_terms = all_sign_terms();
    sign_terms.push(Term::StablePos);
    let got = suff_stats_sign_lagged(&z, &x, &sign_terms, prev).map_err(|e| e.to_string())?;
    for (t, g) in sign_terms.iter().zip(got.iter()) {
        let want = sign_stat_naive(&m, &nodes, Some(&pm), t);
        worst(&mut err, *g, want, || format!("sign stat {t} on {:?}", y.edges().collect::<Vec<_>>()))?;
    }

    let plain_sign = all_sign_terms();
    for d in x.edges() {
        let delta = change_stat_sign(&z, &x, d, &plain_sign).map_err(|e| e.to_string())?;
        let up = dense(&with_state(y, d, DyadState::Edge(Sign::Pos)));
        let down = dense(&with_state(y, d, DyadState::Edge(Sign::Neg)));
        for (t, g) in plain_sign.iter().zip(&delta.delta) {
            let want = sign_stat_naive(&up, &nodes, None, t) - sign_stat_naive(&down, &nodes, None, t);
            worst(&mut err, *g, want, || format!("sign change {t} at {d}"))?;
        }
    }

    let mut bin_terms = all_binary_terms();
    bin_terms.push(Term::Change);
    let px = prev.interaction();
    let got = suff_stats_binary_lagged(&x, &bin_terms, &px).map_err(|e| e.to_string())?;
    let xm = dense_binary(&x);
    let pxm = dense_binary(&px);
    for (t, g) in bin_terms.iter().zip(got.iter()) {
        let want = binary_stat_naive(&xm, &nodes, Some(&pxm), t);
        worst(&mut err, *g, want, || format!("binary stat {t}"))?;
    }

    let plain_bin = all_binary_terms();
    for d in all_dyads(y.n()) {
        let delta = change_stat_binary(&x, d, &plain_bin).map_err(|e| e.to_string())?;
        let mut on = xm.clone();
        let mut off = xm.clone();
        on[d.i][d.j] = 1;
        on[d.j][d.i] = 1;
        off[d.i][d.j] = 0;
        off[d.j][d.i] = 0;
        for (t, g) in plain_bin.iter().zip(&delta.delta) {
            let want = binary_stat_naive(&on, &nodes, None, t) - binary_stat_naive(&off, &nodes, None, t);
            worst(&mut err, *g, want, || format!("binary change {t} at {d}"))?;
        }
    }
    Ok(err)
}

fn decode(nodes: &Arc<NodeSet>, mut code: u64) -> SignedNetwork {
    let mut y = SignedNetwork::empty(nodes.clone());
    for d in all_dyads(nodes.len()) {
        let s = DyadState::from_i8((code % 3) as i8 - 1);
        code /= 3;
        y.set(d.i, d.j, s).unwrap();
    }
    y
}

/// Every signed graph on `n` nodes with at most `max_active` edges.
pub fn exhaustive_statistics(n: usize, max_active: usize) -> std::result::Result<(f64, usize), String> {
    let mut r = rng(n as u64);
    let nodes = party_nodes(n, &mut r);
    let prev = random_signed(nodes.clone(), 0.5, 0.5, &mut r);
    let total = 3u64.pow(dyad_count(n) as u32);
    let mut err = 0.0f64;
    let mut seen = 0;
    for code in 0..total {
        let y = decode(&nodes, code);
        if y.edge_count() > max_active {
            continue;
        }
        seen += 1;
        err = err.max(check_network(&y, &prev)?);
    }
    Ok((err, seen))
}

/// `count` random signed graphs with `2 <= n <= max_n`.
pub fn random_statistics(count: usize, max_n: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut err = 0.0f64;
    for _ in 0..count {
        let n = r.random_range(2..=max_n);
        let nodes = party_nodes(n, &mut r);
        let p = r.random_range(0.05..0.95);
        let q = r.random_range(0.0..=1.0);
        let y = random_signed(nodes.clone(), p, q, &mut r);
        let prev = random_signed(nodes, p, q, &mut r);
        err = err.max(check_network(&y, &prev)?);
    }
    Ok(err)
}

/// gwesf- on `(z, x)` against gwnsp of the positive graph restricted to the
/// non-edges of the positive graph that are active in `x`.
pub fn gwesf_neg_equivalence(count: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut err = 0.0f64;
    for _ in 0..count {
        let n = r.random_range(2..=10);
        let nodes = Arc::new(NodeSet::anonymous(n));
        let y = random_signed(nodes, r.random_range(0.1..0.9), r.random_range(0.0..=1.0), &mut r);
        let x = y.interaction();
        let positive = sternet::netcore::BinaryNetwork::from_dyads(
            y.nodes().clone(),
            y.edges().filter(|(_, s)| *s == Sign::Pos).map(|(d, _)| d),
        )
        .unwrap();
        for decay in [0.0, 0.6, 1.7] {
            let t = [Term::GwEsp { kind: EspKind::EsfNeg, decay }];
            let lhs = sternet::stats::suff_stats_sign(&y.signs(), &x, &t).unwrap()[0];
            let rhs = gwnsp_on_support(&positive, &x, decay);
            worst(&mut err, lhs, rhs, || format!("gwesf- vs gwnsp at decay {decay}"))?;
        }
    }
    Ok(err)
}

/// A dyad helper used by the relabelling property.
pub fn permute(y: &SignedNetwork, perm: &[usize], nodes: Arc<NodeSet>) -> SignedNetwork {
    let mut out = SignedNetwork::empty(nodes);
    for (d, s) in y.edges() {
        let e = Dyad::new(perm[d.i], perm[d.j]);
        out.set(e.i, e.j, DyadState::Edge(s)).unwrap();
    }
    out
}

use sternet::netcore::{BinaryNetwork, SignAssignment};
use sternet::sim::{BinarySampler, SignSampler, SweepMode, UpdateRule};
use sternet::stats::suff_stats_sign;

fn normalise_log(logw: &[f64]) -> Vec<f64> {
    let m = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

pub struct SignFixture {
    pub x: BinaryNetwork,
    pub start: SignAssignment,
    pub free: Vec<Dyad>,
    pub spec: Vec<Term>,
    pub zeta: Vec<f64>,
}

/// Six-node support with `k` free dyads and the rest fixed.
pub fn sign_fixture(k: usize, spec: Vec<Term>, zeta: Vec<f64>) -> SignFixture {
    let nodes = party_nodes(6, &mut rng(77));
    let mut y = SignedNetwork::empty(nodes);
    let active = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (0, 3), (3, 4), (2, 4), (4, 5), (1, 5)];
    for (idx, &(a, b)) in active.iter().enumerate() {
        let s = if idx % 3 == 0 { Sign::Neg } else { Sign::Pos };
        y.set(a, b, DyadState::Edge(s)).unwrap();
    }
    let free: Vec<Dyad> = active[..k].iter().map(|&(a, b)| Dyad::new(a, b)).collect();
    SignFixture { x: y.interaction(), start: y.signs(), free, spec, zeta }
}

fn sign_config(f: &SignFixture, mask: usize) -> SignAssignment {
    let mut z = f.start.clone();
    for (b, &d) in f.free.iter().enumerate() {
        z.set(d, if mask >> b & 1 == 1 { Sign::Pos } else { Sign::Neg });
    }
    z
}

/// Exact law of the free signs by enumeration.
pub fn sign_exact(f: &SignFixture) -> Vec<f64> {
    let logw: Vec<f64> = (0..1usize << f.free.len())
        .map(|mask| {
            let s = suff_stats_sign(&sign_config(f, mask), &f.x, &f.spec).unwrap();
            f.zeta.iter().zip(s.iter()).map(|(a, b)| a * b).sum()
        })
        .collect();
    normalise_log(&logw)
}

/// TV distance between `draws` retained sampler states and the exact law.
pub fn sign_sampler_tv(f: &SignFixture, draws: usize, rule: UpdateRule, mode: SweepMode, seed: u64) -> f64 {
    let exact = sign_exact(f);
    let mut s = SignSampler::new(&f.x, &f.start, f.free.clone(), &f.zeta, &f.spec, None, mode, rule).unwrap();
    let mut r = rng(seed);
    let k = f.free.len();
    s.run(100 * k, &mut r);
    let mut hist = vec![0f64; 1 << k];
    for _ in 0..draws {
        s.run(k, &mut r);
        let mask = f
            .free
            .iter()
            .enumerate()
            .map(|(b, &d)| ((s.sign(d) == Some(Sign::Pos)) as usize) << b)
            .sum::<usize>();
        hist[mask] += 1.0 / draws as f64;
    }
    tv(&hist, &exact)
}

pub struct BinaryFixture {
    pub start: BinaryNetwork,
    pub free: Vec<Dyad>,
    pub spec: Vec<Term>,
    pub xi: Vec<f64>,
}

/// Five nodes; `k` free dyads, the remaining ones forced alternately present
/// and absent.
pub fn binary_fixture(k: usize, spec: Vec<Term>, xi: Vec<f64>) -> BinaryFixture {
    let nodes = party_nodes(5, &mut rng(78));
    let dyads: Vec<Dyad> = all_dyads(5).collect();
    let mut start = BinaryNetwork::empty(nodes);
    for (idx, &d) in dyads[k..].iter().enumerate() {
        start.set(d, idx % 2 == 0);
    }
    BinaryFixture { start, free: dyads[..k].to_vec(), spec, xi }
}

fn binary_config(f: &BinaryFixture, mask: usize) -> BinaryNetwork {
    let mut x = f.start.clone();
    for (b, &d) in f.free.iter().enumerate() {
        x.set(d, mask >> b & 1 == 1);
    }
    x
}

pub fn binary_exact(f: &BinaryFixture) -> Vec<f64> {
    let logw: Vec<f64> = (0..1usize << f.free.len())
        .map(|mask| {
            let s = sternet::stats::suff_stats_binary(&binary_config(f, mask), &f.spec).unwrap();
            f.xi.iter().zip(s.iter()).map(|(a, b)| a * b).sum()
        })
        .collect();
    normalise_log(&logw)
}

pub fn binary_sampler_tv(f: &BinaryFixture, draws: usize, mode: SweepMode, seed: u64) -> f64 {
    let exact = binary_exact(f);
    let mut s = BinarySampler::new(&f.start, f.free.clone(), &f.xi, &f.spec, None, mode).unwrap();
    let mut r = rng(seed);
    let k = f.free.len();
    s.run(100 * k, &mut r);
    let mut hist = vec![0f64; 1 << k];
    for _ in 0..draws {
        s.run(k, &mut r);
        let mask = f
            .free
            .iter()
            .enumerate()
            .map(|(b, &d)| (s.has(d) as usize) << b)
            .sum::<usize>();
        hist[mask] += 1.0 / draws as f64;
    }
    tv(&hist, &exact)
}

pub fn default_sign_fixture(k: usize) -> SignFixture {
    sign_fixture(
        k,
        vec![
            Term::EdgesPos,
            Term::GwEsp { kind: EspKind::EsfPos, decay: 0.6 },
            Term::GwEsp { kind: EspKind::EseNeg, decay: 0.6 },
            Term::HomophilyPos { attr: "party".into(), level: "rep".into() },
        ],
        vec![-0.4, 0.9, 0.5, 0.3],
    )
}

pub fn default_binary_fixture(k: usize) -> BinaryFixture {
    binary_fixture(
        k,
        vec![Term::Edges, Term::Gwesp { decay: 0.6 }, Term::Gwnsp { decay: 0.3 }, Term::GwDegree { decay: 0.2 }],
        vec![-0.5, 0.8, -0.3, 0.4],
    )
}

use sternet::infer::exchange_log_ratio;
use sternet::netcore::decompose;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn add(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

/// Random panels, parameters and auxiliary layers; the closed-form exchange
/// ratio against the direct sum of unnormalised log-likelihood ratios.
pub fn exchange_identity(count: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut err = 0.0f64;
    let sign_terms = all_sign_terms();
    let bin_terms = all_binary_terms();
    for _ in 0..count {
        let n = r.random_range(4..=9);
        let nodes = party_nodes(n, &mut r);
        let waves: Vec<SignedNetwork> = (0..r.random_range(2..=4))
            .map(|_| random_signed(nodes.clone(), r.random_range(0.2..0.8), 0.5, &mut r))
            .collect();
        let kf = r.random_range(1..=sign_terms.len());
        let kp = r.random_range(1..=sign_terms.len());
        let (sf, sp) = (&sign_terms[..kf], &sign_terms[kp - 1..]);
        let bf = &bin_terms[..r.random_range(1..=bin_terms.len())];
        let bp = &bin_terms[r.random_range(0..bin_terms.len())..];
        let mut theta = |k: usize| -> Vec<f64> { (0..k).map(|_| r.random_range(-2.0..2.0)).collect() };
        let (cf, pf, cp, pp) = (theta(sf.len()), theta(sf.len()), theta(sp.len()), theta(sp.len()));
        let (xcf, xpf, xcp, xpp) = (theta(bf.len()), theta(bf.len()), theta(bp.len()), theta(bp.len()));

        let mut obs = [vec![0.0; sf.len()], vec![0.0; sp.len()], vec![0.0; bf.len()], vec![0.0; bp.len()]];
        let mut aux = obs.clone();
        let mut direct_sign = 0.0;
        let mut direct_bin = 0.0;
        for w in waves.windows(2) {
            let (prev, curr) = (&w[0], &w[1]);
            let d = decompose(prev, curr).map_err(|e| e.to_string())?;
            // auxiliary sign layers: formed dyads redrawn, persistence fully redrawn
            let mut za_f = d.z_f.clone();
            for dy in d.formed() {
                za_f.set(dy, if r.random_bool(0.5) { Sign::Pos } else { Sign::Neg });
            }
            let mut za_p = d.z_p.clone();
            for (dy, _) in d.z_p.iter() {
                za_p.set(dy, if r.random_bool(0.5) { Sign::Pos } else { Sign::Neg });
            }
            let mut xa_f = d.x_f.clone();
            for &dy in &d.free_f {
                xa_f.set(dy, r.random_bool(0.5));
            }
            let mut xa_p = d.x_p.clone();
            for &dy in &d.free_p {
                xa_p.set(dy, r.random_bool(0.5));
            }
            let lib_sign = |z: &SignAssignment, x: &BinaryNetwork, t: &[Term]| sternet::stats::suff_stats_sign(z, x, t).unwrap().0;
            let lib_bin = |x: &BinaryNetwork, t: &[Term]| sternet::stats::suff_stats_binary(x, t).unwrap().0;
            add(&mut obs[0], &lib_sign(&d.z_f, &d.x_f, sf));
            add(&mut obs[1], &lib_sign(&d.z_p, &d.x_p, sp));
            add(&mut obs[2], &lib_bin(&d.x_f, bf));
            add(&mut obs[3], &lib_bin(&d.x_p, bp));
            add(&mut aux[0], &lib_sign(&za_f, &d.x_f, sf));
            add(&mut aux[1], &lib_sign(&za_p, &d.x_p, sp));
            add(&mut aux[2], &lib_bin(&xa_f, bf));
            add(&mut aux[3], &lib_bin(&xa_p, bp));

            let nodes = prev.nodes();
            let oracle_sign = |z: &SignAssignment, x: &BinaryNetwork, t: &[Term]| -> Vec<f64> {
                let m = dense(&SignedNetwork::from_layers(x, z).unwrap());
                t.iter().map(|t| sign_stat_naive(&m, nodes, None, t)).collect()
            };
            let oracle_bin = |x: &BinaryNetwork, t: &[Term]| -> Vec<f64> {
                let m = dense_binary(x);
                t.iter().map(|t| binary_stat_naive(&m, nodes, None, t)).collect()
            };
            // log q(aux | cur) + log q(obs | prop) - log q(aux | prop) - log q(obs | cur)
            let ll = |th: &[f64], s: &[f64]| dot(th, s);
            for (c, p, o, a) in [
                (&cf, &pf, oracle_sign(&d.z_f, &d.x_f, sf), oracle_sign(&za_f, &d.x_f, sf)),
                (&cp, &pp, oracle_sign(&d.z_p, &d.x_p, sp), oracle_sign(&za_p, &d.x_p, sp)),
            ] {
                direct_sign += ll(c, &a) + ll(p, &o) - ll(p, &a) - ll(c, &o);
            }
            for (c, p, o, a) in [
                (&xcf, &xpf, oracle_bin(&d.x_f, bf), oracle_bin(&xa_f, bf)),
                (&xcp, &xpp, oracle_bin(&d.x_p, bp), oracle_bin(&xa_p, bp)),
            ] {
                direct_bin += ll(c, &a) + ll(p, &o) - ll(p, &a) - ll(c, &o);
            }
        }
        let got_sign = exchange_log_ratio(&obs[0], &obs[1], &aux[0], &aux[1], &cf, &cp, &pf, &pp).map_err(|e| e.to_string())?;
        let got_bin = exchange_log_ratio(&obs[2], &obs[3], &aux[2], &aux[3], &xcf, &xcp, &xpf, &xpp).map_err(|e| e.to_string())?;
        for (g, w) in [(got_sign, direct_sign), (got_bin, direct_bin)] {
            let e = (g - w).abs();
            if !(e <= 1e-10) {
                return Err(format!("exchange ratio {g} vs direct {w}"));
            }
            err = err.max(e);
        }
    }
    Ok(err)
}

/// Random panels: every transition recombines exactly, and each layer agrees
/// with the per-dyad transition table.
pub fn round_trip(count: usize, seed: u64) -> Check {
    use sternet::netcore::recombine;
    let mut r = rng(seed);
    for _ in 0..count {
        let n = r.random_range(2..=12);
        let nodes = Arc::new(NodeSet::anonymous(n));
        let waves: Vec<SignedNetwork> = (0..r.random_range(2..=5))
            .map(|_| random_signed(nodes.clone(), r.random_range(0.0..1.0), r.random_range(0.0..1.0), &mut r))
            .collect();
        let mut rebuilt = vec![waves[0].clone()];
        for w in waves.windows(2) {
            let d = decompose(&w[0], &w[1]).map_err(|e| e.to_string())?;
            for dy in all_dyads(n) {
                let (a, b) = (w[0].get(dy), w[1].get(dy));
                let f = match (a, b) {
                    (DyadState::Absent, s) => s,
                    (s, _) => s,
                };
                let p = match (a, b) {
                    (DyadState::Edge(_), s) => s,
                    _ => DyadState::Absent,
                };
                let got_f = if d.x_f.has(dy) { DyadState::Edge(d.z_f.get(dy).ok_or("unsigned F edge")?) } else { DyadState::Absent };
                let got_p = if d.x_p.has(dy) { DyadState::Edge(d.z_p.get(dy).ok_or("unsigned P edge")?) } else { DyadState::Absent };
                if got_f != f || got_p != p || d.free_f.contains(&dy) != (a == DyadState::Absent) || d.free_p.contains(&dy) == (a == DyadState::Absent) {
                    return Err(format!("dyad {dy:?}: {a:?} -> {b:?} decomposed as {got_f:?}/{got_p:?}"));
                }
            }
            rebuilt.push(recombine(&w[0], &d).map_err(|e| e.to_string())?);
        }
        if rebuilt != waves {
            return Err(format!("panel on {n} nodes did not recombine"));
        }
    }
    Ok(0.0)
}
