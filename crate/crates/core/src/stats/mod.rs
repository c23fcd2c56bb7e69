//! Sufficient statistics and change statistics for the conditional sign
//! process and the marginal interaction process.
//!
//! Sign-layer statistics are evaluated on `z` restricted to the active dyads
//! of `x`; change statistics are always `s(z_ij = +1) - s(z_ij = -1)` for sign
//! layers and `s(x_ij = 1) - s(x_ij = 0)` for binary layers, whatever the
//! current state of the dyad.

mod graph;
mod gw;
mod model;
mod terms;

use std::ops::Deref;

use serde::{Deserialize, Serialize};

pub(crate) use graph::{BinGraph, Compiled, Lag, SignGraph};
pub use gw::{gw_increment, gw_transform, gw_weight};
pub use model::{ModelSpec, ProcessSpec};
pub use terms::{EspKind, Layer, Term, DEFAULT_ATTRIBUTE};

use crate::error::{Error, Result};
use crate::netcore::bits::BitRows;
use crate::netcore::{BinaryNetwork, Dyad, SignAssignment, SignedNetwork};

/// Statistic values aligned with a term list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatVector(pub Vec<f64>);

impl Deref for StatVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Difference of statistic vectors between the two states of one dyad.
#[derive(Clone, Debug, PartialEq)]
pub struct ChangeStat {
    pub dyad: Dyad,
    pub delta: Vec<f64>,
}

/// Edgewise shared-partner distribution of a sign layer: element `k - 1` is
/// the number of anchor edges with exactly `k` shared partners (`k = 1..=n-2`).
pub fn esp_counts(z: &SignAssignment, x: &BinaryNetwork, kind: EspKind) -> Result<Vec<u64>> {
    let g = SignGraph::from_layers(z, x)?;
    let n = x.n();
    let mut counts = vec![0u64; n.saturating_sub(2)];
    let a = g.rows(kind.anchor());
    let b = g.rows(kind.path());
    for i in 0..n {
        for j in a.ones(i).filter(|&j| j > i) {
            let k = BitRows::common(b, i, b, j);
            if k > 0 {
                counts[k - 1] += 1;
            }
        }
    }
    Ok(counts)
}

/// Degree distribution of a binary layer: element `k - 1` counts nodes of degree `k`.
pub fn degree_counts(x: &BinaryNetwork) -> Vec<u64> {
    let n = x.n();
    let mut counts = vec![0u64; n.saturating_sub(1)];
    for i in 0..n {
        let d = x.degree(i);
        if d > 0 {
            counts[d - 1] += 1;
        }
    }
    counts
}

fn sign_model(terms: &[Term], x: &BinaryNetwork) -> Result<Compiled> {
    Compiled::new(terms, Layer::Sign, x.nodes())
}

fn binary_model(terms: &[Term], x: &BinaryNetwork) -> Result<Compiled> {
    Compiled::new(terms, Layer::Interaction, x.nodes())
}

/// `s(z; x)` for sign-layer terms. Lagged terms need [`suff_stats_sign_lagged`].
pub fn suff_stats_sign(z: &SignAssignment, x: &BinaryNetwork, spec: &[Term]) -> Result<StatVector> {
    sign_stats_impl(z, x, spec, None)
}

/// `s(z; x, y_{t-1})`, for models that include lagged terms.
pub fn suff_stats_sign_lagged(
    z: &SignAssignment,
    x: &BinaryNetwork,
    spec: &[Term],
    prev: &SignedNetwork,
) -> Result<StatVector> {
    sign_stats_impl(z, x, spec, Some(&Lag::from_signed(prev)))
}

fn sign_stats_impl(
    z: &SignAssignment,
    x: &BinaryNetwork,
    spec: &[Term],
    lag: Option<&Lag>,
) -> Result<StatVector> {
    let model = sign_model(spec, x)?;
    model.check_lag(lag)?;
    let g = SignGraph::from_layers(z, x)?;
    let mut out = vec![0.0; model.len()];
    model.sign_stats(&g, lag, &mut out);
    Ok(StatVector(out))
}

/// `s(x)` for interaction-layer terms.
pub fn suff_stats_binary(x: &BinaryNetwork, spec: &[Term]) -> Result<StatVector> {
    binary_stats_impl(x, spec, None)
}

pub fn suff_stats_binary_lagged(
    x: &BinaryNetwork,
    spec: &[Term],
    prev: &BinaryNetwork,
) -> Result<StatVector> {
    let lag = Lag {
        pos: prev.rows().clone(),
        adj: prev.rows().clone(),
    };
    binary_stats_impl(x, spec, Some(&lag))
}

fn binary_stats_impl(x: &BinaryNetwork, spec: &[Term], lag: Option<&Lag>) -> Result<StatVector> {
    let model = binary_model(spec, x)?;
    model.check_lag(lag)?;
    let g = BinGraph::from_network(x);
    let mut out = vec![0.0; model.len()];
    model.binary_stats(&g, lag, &mut out);
    Ok(StatVector(out))
}

/// Sign-toggle change statistic of an active dyad.
pub fn change_stat_sign(
    z: &SignAssignment,
    x: &BinaryNetwork,
    dyad: Dyad,
    spec: &[Term],
) -> Result<ChangeStat> {
    if dyad.j >= x.n() || !x.has(dyad) {
        return Err(Error::Support(dyad));
    }
    let model = sign_model(spec, x)?;
    model.check_lag(None)?;
    let g = SignGraph::from_layers(z, x)?;
    let mut delta = vec![0.0; model.len()];
    model.sign_change(&g, dyad.i, dyad.j, None, &mut delta);
    Ok(ChangeStat { dyad, delta })
}

/// Presence-toggle change statistic of any dyad.
pub fn change_stat_binary(x: &BinaryNetwork, dyad: Dyad, spec: &[Term]) -> Result<ChangeStat> {
    if dyad.j >= x.n() {
        return Err(Error::Support(dyad));
    }
    let model = binary_model(spec, x)?;
    model.check_lag(None)?;
    let g = BinGraph::from_network(x);
    let mut delta = vec![0.0; model.len()];
    model.binary_change(&g, dyad.i, dyad.j, None, &mut delta);
    Ok(ChangeStat { dyad, delta })
}

/// Geometrically weighted non-edgewise shared partners of `x`, counting only
/// the non-edges of `x` that belong to `support`.
pub fn gwnsp_on_support(x: &BinaryNetwork, support: &BinaryNetwork, decay: f64) -> f64 {
    let n = x.n();
    let adj = x.rows();
    let mut counts = vec![0u64; n.saturating_sub(2)];
    for d in support.edges() {
        if !x.has(d) {
            let k = BitRows::common(adj, d.i, adj, d.j);
            if k > 0 {
                counts[k - 1] += 1;
            }
        }
    }
    gw_transform(&counts, decay)
}
