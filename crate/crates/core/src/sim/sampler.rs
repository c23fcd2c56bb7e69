//! Single-dyad MCMC samplers on constrained supports.

use rand::Rng;

use super::{SweepMode, UpdateRule};
use crate::error::{Error, Result};
use crate::netcore::{BinaryNetwork, Dyad, Sign, SignAssignment, SignedNetwork};
use crate::stats::{BinGraph, Compiled, Lag, Layer, SignGraph, StatVector, Term};

fn check_params(spec: &[Term], theta: &[f64]) -> Result<()> {
    if spec.len() != theta.len() {
        return Err(Error::Spec(format!(
            "{} parameters given for {} terms",
            theta.len(),
            spec.len()
        )));
    }
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Spec("parameters must be finite".into()));
    }
    Ok(())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Debug)]
struct Scan {
    free: Vec<Dyad>,
    mode: SweepMode,
    cursor: usize,
}

impl Scan {
    #[inline]
    fn next(&mut self, rng: &mut impl Rng) -> Dyad {
        match self.mode {
            SweepMode::RandomScan => self.free[rng.random_range(0..self.free.len())],
            SweepMode::Systematic => {
                let d = self.free[self.cursor];
                self.cursor = (self.cursor + 1) % self.free.len();
                d
            }
        }
    }
}

/// Sampler for `p(z | x) ∝ exp(ζᵀ s(z; x, y_{t-1}))` where only the `free`
/// dyads of `x` change.
#[derive(Clone, Debug)]
pub struct SignSampler {
    model: Compiled,
    graph: SignGraph,
    lag: Option<Lag>,
    zeta: Vec<f64>,
    scan: Scan,
    rule: UpdateRule,
    delta: Vec<f64>,
    #[cfg(debug_assertions)]
    frozen: Vec<(Dyad, Sign)>,
}

impl SignSampler {
    /// `start` must be defined exactly on `x`; `free` must be active in `x`.
    pub fn new(
        x: &BinaryNetwork,
        start: &SignAssignment,
        free: Vec<Dyad>,
        zeta: &[f64],
        spec: &[Term],
        prev: Option<&SignedNetwork>,
        mode: SweepMode,
        rule: UpdateRule,
    ) -> Result<Self> {
        check_params(spec, zeta)?;
        let model = Compiled::new(spec, Layer::Sign, x.nodes())?;
        let lag = prev.map(Lag::from_signed);
        model.check_lag(lag.as_ref())?;
        if let Some(&d) = free.iter().find(|d| d.j >= x.n() || !x.has(**d)) {
            return Err(Error::Support(d));
        }
        let graph = SignGraph::from_layers(start, x)?;
        #[cfg(debug_assertions)]
        let frozen = {
            let set: std::collections::BTreeSet<_> = free.iter().copied().collect();
            start.iter().filter(|(d, _)| !set.contains(d)).collect()
        };
        Ok(Self {
            delta: vec![0.0; model.len()],
            model,
            graph,
            lag,
            zeta: zeta.to_vec(),
            scan: Scan { free, mode, cursor: 0 },
            rule,
            #[cfg(debug_assertions)]
            frozen,
        })
    }

    pub fn free_count(&self) -> usize {
        self.scan.free.len()
    }

    pub fn set_params(&mut self, zeta: &[f64]) -> Result<()> {
        if zeta.len() != self.zeta.len() || zeta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Spec("parameter vector does not fit the sampler".into()));
        }
        self.zeta.copy_from_slice(zeta);
        Ok(())
    }

    /// Redraws every free sign uniformly.
    pub fn randomize_free(&mut self, rng: &mut impl Rng) {
        for &d in &self.scan.free {
            let s = if rng.random_bool(0.5) { Sign::Pos } else { Sign::Neg };
            self.graph.set(d.i, d.j, s);
        }
    }

    /// Log-odds of `z_ij = +1` against `-1` given the rest.
    pub fn log_odds(&mut self, d: Dyad) -> f64 {
        self.model
            .sign_change(&self.graph, d.i, d.j, self.lag.as_ref(), &mut self.delta);
        dot(&self.zeta, &self.delta)
    }

    /// One dyad-level update. No-op when nothing is free.
    pub fn update(&mut self, rng: &mut impl Rng) {
        if self.scan.free.is_empty() {
            return;
        }
        let d = self.scan.next(rng);
        let eta = self.log_odds(d);
        let cur = self.graph.sign(d.i, d.j).expect("free dyads are active");
        let next = match self.rule {
            UpdateRule::Gibbs => {
                if rng.random::<f64>() < logistic(eta) {
                    Sign::Pos
                } else {
                    Sign::Neg
                }
            }
            UpdateRule::Metropolis => {
                let lr = match cur {
                    Sign::Pos => -eta,
                    Sign::Neg => eta,
                };
                if lr >= 0.0 || rng.random::<f64>() < lr.exp() {
                    cur.flip()
                } else {
                    cur
                }
            }
        };
        if next != cur {
            self.graph.set(d.i, d.j, next);
        }
    }

    pub fn run(&mut self, updates: usize, rng: &mut impl Rng) {
        for _ in 0..updates {
            self.update(rng);
        }
        self.debug_check_support();
    }

    #[inline]
    fn debug_check_support(&self) {
        #[cfg(debug_assertions)]
        for &(d, s) in &self.frozen {
            debug_assert_eq!(self.graph.sign(d.i, d.j), Some(s), "fixed dyad {d} changed");
        }
    }

    pub fn sign(&self, d: Dyad) -> Option<Sign> {
        self.graph.sign(d.i, d.j)
    }

    pub fn assignment(&self) -> SignAssignment {
        self.graph.to_assignment()
    }

    /// Current sufficient statistics, recomputed in full.
    pub fn stats(&self) -> StatVector {
        let mut out = vec![0.0; self.model.len()];
        self.model.sign_stats(&self.graph, self.lag.as_ref(), &mut out);
        StatVector(out)
    }
}

/// Metropolis toggle sampler for `p(x) ∝ exp(ξᵀ s(x))` over the `free` dyads.
#[derive(Clone, Debug)]
pub struct BinarySampler {
    model: Compiled,
    graph: BinGraph,
    lag: Option<Lag>,
    xi: Vec<f64>,
    scan: Scan,
    delta: Vec<f64>,
    n: usize,
}

impl BinarySampler {
    pub fn new(
        start: &BinaryNetwork,
        free: Vec<Dyad>,
        xi: &[f64],
        spec: &[Term],
        prev: Option<&BinaryNetwork>,
        mode: SweepMode,
    ) -> Result<Self> {
        check_params(spec, xi)?;
        let model = Compiled::new(spec, Layer::Interaction, start.nodes())?;
        let lag = prev.map(|p| {
            let rows = BinGraph::from_network(p).adj;
            Lag { pos: rows.clone(), adj: rows }
        });
        model.check_lag(lag.as_ref())?;
        if let Some(&d) = free.iter().find(|d| d.j >= start.n()) {
            return Err(Error::Support(d));
        }
        Ok(Self {
            delta: vec![0.0; model.len()],
            model,
            graph: BinGraph::from_network(start),
            lag,
            xi: xi.to_vec(),
            scan: Scan { free, mode, cursor: 0 },
            n: start.n(),
        })
    }

    pub fn free_count(&self) -> usize {
        self.scan.free.len()
    }

    pub fn set_params(&mut self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.xi.len() || xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Spec("parameter vector does not fit the sampler".into()));
        }
        self.xi.copy_from_slice(xi);
        Ok(())
    }

    /// Removes every free dyad.
    pub fn clear_free(&mut self) {
        for &d in &self.scan.free {
            self.graph.set(d.i, d.j, false);
        }
    }

    /// Log-odds of `x_ij = 1` against `0` given the rest.
    pub fn log_odds(&mut self, d: Dyad) -> f64 {
        self.model
            .binary_change(&self.graph, d.i, d.j, self.lag.as_ref(), &mut self.delta);
        dot(&self.xi, &self.delta)
    }

    pub fn update(&mut self, rng: &mut impl Rng) {
        if self.scan.free.is_empty() {
            return;
        }
        let d = self.scan.next(rng);
        let eta = self.log_odds(d);
        let cur = self.graph.has(d.i, d.j);
        let lr = if cur { -eta } else { eta };
        if lr >= 0.0 || rng.random::<f64>() < lr.exp() {
            self.graph.set(d.i, d.j, !cur);
        }
    }

    pub fn run(&mut self, updates: usize, rng: &mut impl Rng) {
        for _ in 0..updates {
            self.update(rng);
        }
    }

    pub fn has(&self, d: Dyad) -> bool {
        self.graph.has(d.i, d.j)
    }

    pub fn network(&self, nodes: std::sync::Arc<crate::netcore::NodeSet>) -> BinaryNetwork {
        debug_assert_eq!(nodes.len(), self.n);
        self.graph.to_network(nodes)
    }

    pub fn stats(&self) -> StatVector {
        let mut out = vec![0.0; self.model.len()];
        self.model.binary_stats(&self.graph, self.lag.as_ref(), &mut out);
        StatVector(out)
    }
}

#[inline]
pub fn logistic(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}
