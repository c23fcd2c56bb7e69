//! Mutable bitset graphs and the statistic kernels that run on them.
//!
//! `SignGraph` holds the positive and negative relations of a sign layer; the
//! support `x` is their union. `BinGraph` holds a binary layer. Both keep
//! degree counters so sampler updates stay O(deg) per term.

use std::sync::Arc;

use super::gw::GwTable;
use super::terms::{Layer, Term};
use crate::error::{Error, Result};
use crate::netcore::bits::BitRows;
use crate::netcore::{BinaryNetwork, Dyad, NodeSet, Sign, SignAssignment, SignedNetwork};

#[derive(Clone, Debug)]
pub(crate) struct SignGraph {
    pub pos: BitRows,
    pub neg: BitRows,
    pub pos_deg: Vec<u32>,
}

impl SignGraph {
    pub fn from_layers(z: &SignAssignment, x: &BinaryNetwork) -> Result<Self> {
        if !z.is_defined_on(x) {
            return Err(Error::Structural(
                "sign assignment must be defined exactly on the active dyads".into(),
            ));
        }
        let n = x.n();
        let mut g = SignGraph {
            pos: BitRows::new(n),
            neg: BitRows::new(n),
            pos_deg: vec![0; n],
        };
        for d in x.edges() {
            g.set(d.i, d.j, z.get(d).expect("checked domain"));
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.pos.len()
    }

    #[inline]
    pub fn rows(&self, s: Sign) -> &BitRows {
        match s {
            Sign::Pos => &self.pos,
            Sign::Neg => &self.neg,
        }
    }

    #[inline]
    pub fn sign(&self, i: usize, j: usize) -> Option<Sign> {
        if self.pos.get(i, j) {
            Some(Sign::Pos)
        } else if self.neg.get(i, j) {
            Some(Sign::Neg)
        } else {
            None
        }
    }

    /// Sets the sign of an active (or newly activated) dyad.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, s: Sign) {
        let was_pos = self.pos.get(i, j);
        match s {
            Sign::Pos => {
                if !was_pos {
                    self.pos_deg[i] += 1;
                    self.pos_deg[j] += 1;
                }
                self.pos.set_sym(i, j, true);
                self.neg.set_sym(i, j, false);
            }
            Sign::Neg => {
                if was_pos {
                    self.pos_deg[i] -= 1;
                    self.pos_deg[j] -= 1;
                }
                self.pos.set_sym(i, j, false);
                self.neg.set_sym(i, j, true);
            }
        }
    }

    pub fn to_assignment(&self) -> SignAssignment {
        let n = self.n();
        let mut z = SignAssignment::empty(n);
        for i in 0..n {
            for j in self.pos.ones(i).filter(|&j| j > i) {
                z.set(Dyad { i, j }, Sign::Pos);
            }
            for j in self.neg.ones(i).filter(|&j| j > i) {
                z.set(Dyad { i, j }, Sign::Neg);
            }
        }
        z
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BinGraph {
    pub adj: BitRows,
    pub deg: Vec<u32>,
}

impl BinGraph {
    pub fn from_network(x: &BinaryNetwork) -> Self {
        let adj = x.rows().clone();
        let deg = (0..x.n()).map(|i| adj.degree(i) as u32).collect();
        BinGraph { adj, deg }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn has(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        if self.adj.get(i, j) != on {
            if on {
                self.deg[i] += 1;
                self.deg[j] += 1;
            } else {
                self.deg[i] -= 1;
                self.deg[j] -= 1;
            }
            self.adj.set_sym(i, j, on);
        }
    }

    pub fn to_network(&self, nodes: Arc<NodeSet>) -> BinaryNetwork {
        BinaryNetwork::from_rows(nodes, self.adj.clone())
    }
}

/// Previous-wave relations read by lagged terms.
#[derive(Clone, Debug)]
pub(crate) struct Lag {
    pub pos: BitRows,
    pub adj: BitRows,
}

impl Lag {
    pub fn from_signed(y: &SignedNetwork) -> Self {
        let pos = y.pos_rows().clone();
        let mut adj = pos.clone();
        for i in 0..y.n() {
            for j in y.neg_rows().ones(i) {
                adj.set_sym(i, j, true);
            }
        }
        Lag { pos, adj }
    }
}

#[derive(Clone, Debug)]
enum Kernel {
    EdgesPos,
    LevelPos(Vec<bool>),
    MatchPos(Vec<u32>),
    GwDegreePos(GwTable),
    Esp { anchor: Sign, path: Sign, table: GwTable },
    StablePos,
    Edges,
    Level(Vec<bool>),
    Match(Vec<u32>),
    GwDegree(GwTable),
    Gwesp(GwTable),
    Gwnsp(GwTable),
    Change,
}

/// Model terms resolved against a node set, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    kernels: Vec<Kernel>,
    lagged: bool,
}

fn level_mask(nodes: &NodeSet, attr: &str, level: &str) -> Result<Vec<bool>> {
    let values = nodes
        .attribute(attr)
        .ok_or_else(|| Error::Spec(format!("node attribute {attr:?} does not exist")))?;
    if !values.iter().any(|v| v == level) {
        return Err(Error::Spec(format!(
            "attribute {attr:?} has no level {level:?}"
        )));
    }
    Ok(values.iter().map(|v| v == level).collect())
}

fn match_codes(nodes: &NodeSet, attr: &str) -> Result<Vec<u32>> {
    let values = nodes
        .attribute(attr)
        .ok_or_else(|| Error::Spec(format!("node attribute {attr:?} does not exist")))?;
    let mut seen: Vec<&str> = Vec::new();
    Ok(values
        .iter()
        .map(|v| match seen.iter().position(|s| s == v) {
            Some(p) => p as u32,
            None => {
                seen.push(v);
                (seen.len() - 1) as u32
            }
        })
        .collect())
}

impl Compiled {
    pub fn new(terms: &[Term], layer: Layer, nodes: &NodeSet) -> Result<Self> {
        let n = nodes.len();
        let mut kernels = Vec::with_capacity(terms.len());
        for t in terms {
            t.validate()?;
            if t.layer() != layer {
                return Err(Error::Spec(format!(
                    "term {t} belongs to the {:?} layer, not the {layer:?} layer",
                    t.layer()
                )));
            }
            let table = |d: f64| GwTable::new(d, n);
            kernels.push(match t {
                Term::EdgesPos => Kernel::EdgesPos,
                Term::HomophilyPos { attr, level } => Kernel::LevelPos(level_mask(nodes, attr, level)?),
                Term::NodematchPos { attr } => Kernel::MatchPos(match_codes(nodes, attr)?),
                Term::GwDegreePos { decay } => Kernel::GwDegreePos(table(*decay)),
                Term::GwEsp { kind, decay } => Kernel::Esp {
                    anchor: kind.anchor(),
                    path: kind.path(),
                    table: table(*decay),
                },
                Term::StablePos => Kernel::StablePos,
                Term::Edges => Kernel::Edges,
                Term::Homophily { attr, level } => Kernel::Level(level_mask(nodes, attr, level)?),
                Term::Nodematch { attr } => Kernel::Match(match_codes(nodes, attr)?),
                Term::GwDegree { decay } => Kernel::GwDegree(table(*decay)),
                Term::Gwesp { decay } => Kernel::Gwesp(table(*decay)),
                Term::Gwnsp { decay } => Kernel::Gwnsp(table(*decay)),
                Term::Change => Kernel::Change,
            });
        }
        Ok(Self {
            kernels,
            lagged: terms.iter().any(Term::is_lagged),
        })
    }

    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    fn lag<'a>(&self, lag: Option<&'a Lag>) -> &'a Lag {
        lag.expect("lagged term evaluated without the previous wave")
    }

    pub fn check_lag(&self, lag: Option<&Lag>) -> Result<()> {
        if self.lagged && lag.is_none() {
            return Err(Error::Spec(
                "lagged terms need the previous wave; use the transition-aware evaluation".into(),
            ));
        }
        Ok(())
    }

    /// Full sign-layer statistics.
    pub fn sign_stats(&self, g: &SignGraph, lag: Option<&Lag>, out: &mut [f64]) {
        let n = g.n();
        let pos_edges = || (0..n).flat_map(move |i| g.pos.ones(i).filter(move |&j| j > i).map(move |j| (i, j)));
        for (slot, k) in out.iter_mut().zip(&self.kernels) {
            *slot = match k {
                Kernel::EdgesPos => g.pos_deg.iter().map(|&d| d as f64).sum::<f64>() / 2.0,
                Kernel::LevelPos(m) => pos_edges().filter(|&(i, j)| m[i] && m[j]).count() as f64,
                Kernel::MatchPos(c) => pos_edges().filter(|&(i, j)| c[i] == c[j]).count() as f64,
                Kernel::GwDegreePos(t) => g.pos_deg.iter().map(|&d| t.w(d as usize)).sum(),
                Kernel::Esp { anchor, path, table } => {
                    let a = g.rows(*anchor);
                    let b = g.rows(*path);
                    let mut s = 0.0;
                    for i in 0..n {
                        for j in a.ones(i).filter(|&j| j > i) {
                            s += table.w(BitRows::common(b, i, b, j));
                        }
                    }
                    s
                }
                Kernel::StablePos => {
                    let l = self.lag(lag);
                    (0..n).map(|i| BitRows::common(&g.pos, i, &l.pos, i)).sum::<usize>() as f64 / 2.0
                }
                _ => unreachable!("binary kernel in a sign model"),
            };
        }
    }

    /// `s(z_ij = +1) - s(z_ij = -1)` for an active dyad.
    pub fn sign_change(&self, g: &SignGraph, i: usize, j: usize, lag: Option<&Lag>, out: &mut [f64]) {
        let cur = g.sign(i, j).expect("sign change on an inactive dyad");
        for (slot, k) in out.iter_mut().zip(&self.kernels) {
            *slot = match k {
                Kernel::EdgesPos => 1.0,
                Kernel::LevelPos(m) => (m[i] && m[j]) as u8 as f64,
                Kernel::MatchPos(c) => (c[i] == c[j]) as u8 as f64,
                Kernel::GwDegreePos(t) => {
                    let own = (cur == Sign::Pos) as u32;
                    t.inc((g.pos_deg[i] - own) as usize) + t.inc((g.pos_deg[j] - own) as usize)
                }
                Kernel::Esp { anchor, path, table } => {
                    esp_sign_change(g, i, j, cur, *anchor, *path, table)
                }
                Kernel::StablePos => self.lag(lag).pos.get(i, j) as u8 as f64,
                _ => unreachable!("binary kernel in a sign model"),
            };
        }
    }

    /// Full binary-layer statistics.
    pub fn binary_stats(&self, g: &BinGraph, lag: Option<&Lag>, out: &mut [f64]) {
        let n = g.n();
        let edges = || (0..n).flat_map(move |i| g.adj.ones(i).filter(move |&j| j > i).map(move |j| (i, j)));
        for (slot, k) in out.iter_mut().zip(&self.kernels) {
            *slot = match k {
                Kernel::Edges => g.deg.iter().map(|&d| d as f64).sum::<f64>() / 2.0,
                Kernel::Level(m) => edges().filter(|&(i, j)| m[i] && m[j]).count() as f64,
                Kernel::Match(c) => edges().filter(|&(i, j)| c[i] == c[j]).count() as f64,
                Kernel::GwDegree(t) => g.deg.iter().map(|&d| t.w(d as usize)).sum(),
                Kernel::Gwesp(t) => edges()
                    .map(|(i, j)| t.w(BitRows::common(&g.adj, i, &g.adj, j)))
                    .sum(),
                Kernel::Gwnsp(t) => {
                    let mut s = 0.0;
                    for i in 0..n {
                        for j in i + 1..n {
                            if !g.adj.get(i, j) {
                                s += t.w(BitRows::common(&g.adj, i, &g.adj, j));
                            }
                        }
                    }
                    s
                }
                Kernel::Change => {
                    let l = self.lag(lag);
                    let mut c = 0usize;
                    for i in 0..n {
                        c += g
                            .adj
                            .row(i)
                            .iter()
                            .zip(l.adj.row(i))
                            .map(|(a, b)| (a ^ b).count_ones() as usize)
                            .sum::<usize>();
                    }
                    c as f64 / 2.0
                }
                _ => unreachable!("sign kernel in a binary model"),
            };
        }
    }

    /// `s(x_ij = 1) - s(x_ij = 0)`.
    pub fn binary_change(&self, g: &BinGraph, i: usize, j: usize, lag: Option<&Lag>, out: &mut [f64]) {
        let cur = g.has(i, j);
        let own = cur as u32;
        let own_us = cur as usize;
        let adj = &g.adj;
        for (slot, k) in out.iter_mut().zip(&self.kernels) {
            *slot = match k {
                Kernel::Edges => 1.0,
                Kernel::Level(m) => (m[i] && m[j]) as u8 as f64,
                Kernel::Match(c) => (c[i] == c[j]) as u8 as f64,
                Kernel::GwDegree(t) => {
                    t.inc((g.deg[i] - own) as usize) + t.inc((g.deg[j] - own) as usize)
                }
                Kernel::Gwesp(t) => {
                    let mut d = t.w(BitRows::common(adj, i, adj, j));
                    for k in BitRows::ones_and(adj, i, adj, j) {
                        d += t.inc(BitRows::common(adj, i, adj, k) - own_us);
                        d += t.inc(BitRows::common(adj, j, adj, k) - own_us);
                    }
                    d
                }
                Kernel::Gwnsp(t) => {
                    let mut d = -t.w(BitRows::common(adj, i, adj, j));
                    // non-edges (j, k) gain partner i, non-edges (i, k) gain partner j
                    for k in BitRows::ones_and_not(adj, i, adj, j).filter(|&k| k != j) {
                        d += t.inc(BitRows::common(adj, j, adj, k) - own_us);
                    }
                    for k in BitRows::ones_and_not(adj, j, adj, i).filter(|&k| k != i) {
                        d += t.inc(BitRows::common(adj, i, adj, k) - own_us);
                    }
                    d
                }
                Kernel::Change => {
                    if self.lag(lag).adj.get(i, j) {
                        -1.0
                    } else {
                        1.0
                    }
                }
                _ => unreachable!("sign kernel in a binary model"),
            };
        }
    }
}

/// Change in `Σ_{anchor edges} w(#path-sign shared partners)` when the dyad
/// `(i, j)` goes from `-1` to `+1`, evaluated from its current sign `cur`.
#[inline]
fn esp_sign_change(
    g: &SignGraph,
    i: usize,
    j: usize,
    cur: Sign,
    anchor: Sign,
    path: Sign,
    table: &GwTable,
) -> f64 {
    let a = g.rows(anchor);
    let b = g.rows(path);
    let sp = BitRows::common(b, i, b, j);
    let mut d = match anchor {
        Sign::Pos => table.w(sp),
        Sign::Neg => -table.w(sp),
    };
    // Other anchor edges (i,k) with partner j (path edges ij, jk), and (j,k) with partner i.
    // Counts are re-based to the state where ij = -1.
    let here = (cur == path) as usize;
    let base = (path == Sign::Neg) as usize;
    let mut add = |count: usize| {
        let s0 = count - here + base;
        match path {
            Sign::Pos => d += table.inc(s0),
            Sign::Neg => d -= table.inc(s0 - 1),
        }
    };
    for k in BitRows::ones_and(a, i, b, j) {
        add(BitRows::common(b, i, b, k));
    }
    for k in BitRows::ones_and(a, j, b, i) {
        add(BitRows::common(b, j, b, k));
    }
    d
}
