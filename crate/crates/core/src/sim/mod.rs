//! Constrained-support simulation of sign and interaction layers, and forward
//! simulation of signed transitions and panels.
//!
//! One auxiliary iteration is one dyad-level update proposal. A run performs
//! `burn_in + aux_iterations` updates and returns the final state.

mod sampler;

use std::sync::Arc;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use sampler::{logistic, BinarySampler, SignSampler};

use crate::error::{Error, Result};
use crate::netcore::{
    all_dyads, recombine, BinaryNetwork, Dyad, DyadSet, DyadState, NetworkPanel, NodeSet, Sign,
    SignAssignment, SignedNetwork, TransitionDecomposition,
};
use crate::stats::{ModelSpec, ProcessSpec, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    RandomScan,
    Systematic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    /// Draw the sign from its two-state full conditional.
    Gibbs,
    /// Propose a flip and accept with the Metropolis ratio.
    Metropolis,
}

/// Where auxiliary chains start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartState {
    /// From the observed layer on the constrained support.
    Observed,
    /// Free sign dyads drawn uniformly, free binary dyads absent.
    Cold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub aux_iterations: usize,
    pub burn_in: usize,
    pub sweep: SweepMode,
    pub seed: u64,
    pub start: StartState,
    pub sign_update: UpdateRule,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            aux_iterations: 5000,
            burn_in: 0,
            sweep: SweepMode::RandomScan,
            seed: 0,
            start: StartState::Observed,
            sign_update: UpdateRule::Gibbs,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.aux_iterations == 0 {
            return Err(Error::Spec("aux_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn updates(&self) -> usize {
        self.burn_in + self.aux_iterations
    }
}

/// Deterministic RNG for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Parameter vectors of the four processes, aligned with a [`ModelSpec`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessParams {
    pub zeta_f: Vec<f64>,
    pub zeta_p: Vec<f64>,
    pub xi_f: Vec<f64>,
    pub xi_p: Vec<f64>,
}

impl ProcessParams {
    pub fn zeros(model: &ModelSpec) -> Self {
        let (sf, sp) = model.sign.dims();
        let (xf, xp) = model.interaction.dims();
        Self {
            zeta_f: vec![0.0; sf],
            zeta_p: vec![0.0; sp],
            xi_f: vec![0.0; xf],
            xi_p: vec![0.0; xp],
        }
    }

    pub fn check(&self, model: &ModelSpec) -> Result<()> {
        let dims = [
            ("zeta_f", self.zeta_f.len(), model.sign.formation.len()),
            ("zeta_p", self.zeta_p.len(), model.sign.persistence.len()),
            ("xi_f", self.xi_f.len(), model.interaction.formation.len()),
            ("xi_p", self.xi_p.len(), model.interaction.persistence.len()),
        ];
        for (name, got, want) in dims {
            if got != want {
                return Err(Error::Spec(format!("{name} has {got} entries, model has {want} terms")));
            }
        }
        Ok(())
    }
}

fn random_sign(rng: &mut impl Rng) -> Sign {
    if rng.random_bool(0.5) {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

/// Samples signs on the active dyads of `x`, keeping the dyads of `fixed`.
pub fn sample_sign_layer(
    x: &BinaryNetwork,
    fixed: &SignAssignment,
    zeta: &[f64],
    spec: &[Term],
    cfg: &SimConfig,
) -> Result<SignAssignment> {
    let mut rng = substream(cfg.seed, 0);
    sample_sign_layer_with(x, fixed, None, zeta, spec, cfg, &mut rng)
}

/// As [`sample_sign_layer`], with the previous wave for lagged terms and an
/// explicit RNG.
pub fn sample_sign_layer_with(
    x: &BinaryNetwork,
    fixed: &SignAssignment,
    prev: Option<&SignedNetwork>,
    zeta: &[f64],
    spec: &[Term],
    cfg: &SimConfig,
    rng: &mut impl Rng,
) -> Result<SignAssignment> {
    cfg.validate()?;
    let mut start = SignAssignment::empty(x.n());
    let mut free = Vec::new();
    for (d, _) in fixed.iter() {
        if !x.has(d) {
            return Err(Error::Support(d));
        }
    }
    for d in x.edges() {
        match fixed.get(d) {
            Some(s) => start.set(d, s),
            None => {
                free.push(d);
                start.set(d, random_sign(rng));
            }
        }
    }
    if free.is_empty() {
        warn!("sign layer has no free dyads; returning the fixed assignment");
        return Ok(start);
    }
    let mut s = SignSampler::new(x, &start, free, zeta, spec, prev, cfg.sweep, cfg.sign_update)?;
    s.run(cfg.updates(), rng);
    Ok(s.assignment())
}

/// Samples a binary layer over the dyads outside both forced sets.
pub fn sample_binary_layer(
    base: &BinaryNetwork,
    forced_present: &DyadSet,
    forced_absent: &DyadSet,
    xi: &[f64],
    spec: &[Term],
    cfg: &SimConfig,
) -> Result<BinaryNetwork> {
    let mut rng = substream(cfg.seed, 0);
    sample_binary_layer_with(base, forced_present, forced_absent, None, xi, spec, cfg, &mut rng)
}

#[allow(clippy::too_many_arguments)]
pub fn sample_binary_layer_with(
    base: &BinaryNetwork,
    forced_present: &DyadSet,
    forced_absent: &DyadSet,
    prev: Option<&BinaryNetwork>,
    xi: &[f64],
    spec: &[Term],
    cfg: &SimConfig,
    rng: &mut impl Rng,
) -> Result<BinaryNetwork> {
    cfg.validate()?;
    if let Some(d) = forced_present.intersection(forced_absent).next() {
        return Err(Error::Spec(format!("dyad {d} is forced both present and absent")));
    }
    let mut start = base.clone();
    let mut free = Vec::new();
    for d in all_dyads(base.n()) {
        if forced_present.contains(&d) {
            start.set(d, true);
        } else if forced_absent.contains(&d) {
            start.set(d, false);
        } else {
            free.push(d);
            if cfg.start == StartState::Cold {
                start.set(d, false);
            }
        }
    }
    let mut s = BinarySampler::new(&start, free, xi, spec, prev, cfg.sweep)?;
    s.run(cfg.updates(), rng);
    Ok(s.network(base.nodes().clone()))
}

fn stream_id(t: usize, process: u64) -> u64 {
    1 + 4 * t as u64 + process
}

/// Draws one signed transition `y_{t-1} -> y_t` from the two-layer model.
pub fn simulate_transition(
    y_prev: &SignedNetwork,
    model: &ModelSpec,
    params: &ProcessParams,
    cfg: &SimConfig,
) -> Result<SignedNetwork> {
    simulate_transition_at(y_prev, model, params, cfg, 0)
}

fn simulate_transition_at(
    y_prev: &SignedNetwork,
    model: &ModelSpec,
    params: &ProcessParams,
    cfg: &SimConfig,
    t: usize,
) -> Result<SignedNetwork> {
    model.validate()?;
    params.check(model)?;
    let x_prev = y_prev.interaction();
    let present: DyadSet = x_prev.edges().collect();
    let absent: DyadSet = all_dyads(y_prev.n()).filter(|d| !present.contains(d)).collect();
    let none = DyadSet::new();
    let im = &model.interaction;
    let x_f = sample_binary_layer_with(
        &x_prev,
        &present,
        &none,
        Some(&x_prev),
        &params.xi_f,
        &im.formation,
        cfg,
        &mut substream(cfg.seed, stream_id(t, 0)),
    )?;
    let x_p = sample_binary_layer_with(
        &x_prev,
        &none,
        &absent,
        Some(&x_prev),
        &params.xi_p,
        &im.persistence,
        cfg,
        &mut substream(cfg.seed, stream_id(t, 1)),
    )?;
    sign_step(y_prev, x_f, x_p, &model.sign, &params.zeta_f, &params.zeta_p, cfg, t)
}

/// Draws the signs of `y_t` given `y_{t-1}` and an observed `x_t`.
pub fn simulate_sign_transition(
    y_prev: &SignedNetwork,
    x_curr: &BinaryNetwork,
    spec: &ProcessSpec,
    zeta_f: &[f64],
    zeta_p: &[f64],
    cfg: &SimConfig,
) -> Result<SignedNetwork> {
    let x_prev = y_prev.interaction();
    let mut x_f = x_prev.clone();
    let mut x_p = BinaryNetwork::empty(x_prev.nodes().clone());
    for d in x_curr.edges() {
        x_f.set(d, true);
        if x_prev.has(d) {
            x_p.set(d, true);
        }
    }
    sign_step(y_prev, x_f, x_p, spec, zeta_f, zeta_p, cfg, 0)
}

#[allow(clippy::too_many_arguments)]
fn sign_step(
    y_prev: &SignedNetwork,
    x_f: BinaryNetwork,
    x_p: BinaryNetwork,
    spec: &ProcessSpec,
    zeta_f: &[f64],
    zeta_p: &[f64],
    cfg: &SimConfig,
    t: usize,
) -> Result<SignedNetwork> {
    let z_prev = y_prev.signs();
    let fixed_f = z_prev.clone();
    let z_f = sample_sign_layer_with(
        &x_f,
        &fixed_f,
        Some(y_prev),
        zeta_f,
        &spec.formation,
        cfg,
        &mut substream(cfg.seed, stream_id(t, 2)),
    )?;
    let z_p = sample_sign_layer_with(
        &x_p,
        &SignAssignment::empty(y_prev.n()),
        Some(y_prev),
        zeta_p,
        &spec.persistence,
        cfg,
        &mut substream(cfg.seed, stream_id(t, 3)),
    )?;
    let (free_f, free_p): (DyadSet, DyadSet) = {
        let x_prev = y_prev.interaction();
        all_dyads(y_prev.n()).partition(|d| !x_prev.has(*d))
    };
    let d = TransitionDecomposition { x_f, z_f, x_p, z_p, free_f, free_p };
    recombine(y_prev, &d)
}

/// Iterates [`simulate_transition`] `steps` times from `y0`.
pub fn simulate_panel(
    y0: &SignedNetwork,
    model: &ModelSpec,
    params: &ProcessParams,
    steps: usize,
    cfg: &SimConfig,
) -> Result<NetworkPanel> {
    if steps == 0 {
        return Err(Error::Spec("a panel needs at least one transition".into()));
    }
    let mut waves = vec![y0.clone()];
    for t in 0..steps {
        let next = simulate_transition_at(&waves[t], model, params, cfg, t)?;
        waves.push(next);
    }
    NetworkPanel::from_waves(waves)
}

/// One step of the binary TERGM with edge-count and change-count statistics.
pub fn simulate_tergm_binary(
    x_prev: &BinaryNetwork,
    theta_density: f64,
    theta_change: f64,
    cfg: &SimConfig,
) -> Result<BinaryNetwork> {
    cfg.validate()?;
    let free: Vec<Dyad> = all_dyads(x_prev.n()).collect();
    let mut s = BinarySampler::new(
        x_prev,
        free,
        &[theta_density, theta_change],
        &[Term::Edges, Term::Change],
        Some(x_prev),
        cfg.sweep,
    )?;
    s.run(cfg.updates(), &mut substream(cfg.seed, 0));
    Ok(s.network(x_prev.nodes().clone()))
}

/// Independent dyads present with probability `p_edge`, each positive with
/// probability `p_pos`.
pub fn erdos_renyi_signed(
    nodes: Arc<NodeSet>,
    p_edge: f64,
    p_pos: f64,
    rng: &mut impl Rng,
) -> SignedNetwork {
    let mut y = SignedNetwork::empty(nodes);
    for d in all_dyads(y.n()) {
        if rng.random_bool(p_edge) {
            let s = if rng.random_bool(p_pos) { Sign::Pos } else { Sign::Neg };
            y.put(d, DyadState::Edge(s));
        }
    }
    y
}

/// Settings of the two-wave simulation study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudySetup {
    pub nodes: usize,
    pub p_edge: f64,
    pub p_pos: f64,
    pub theta_density: f64,
    pub theta_change: f64,
    pub decay: f64,
    pub zeta_f: [f64; 2],
    pub zeta_p: [f64; 2],
    pub tergm_iterations: usize,
}

impl Default for StudySetup {
    fn default() -> Self {
        Self {
            nodes: 40,
            p_edge: 0.2,
            p_pos: 0.5,
            theta_density: -2.0,
            theta_change: -2.0,
            decay: 0.6,
            zeta_f: [0.0, 0.2],
            zeta_p: [0.0, 0.0],
            tergm_iterations: 50_000,
        }
    }
}

impl StudySetup {
    /// `{edges+, gwesf+(decay)}` for both blocks.
    pub fn sign_spec(&self) -> ProcessSpec {
        ProcessSpec::symmetric(vec![
            Term::EdgesPos,
            Term::GwEsp { kind: crate::stats::EspKind::EsfPos, decay: self.decay },
        ])
    }

    /// Signed Erdős–Rényi start, binary TERGM step for the interactions, then
    /// the sign step. Returns the two-wave panel.
    pub fn simulate(&self, cfg: &SimConfig) -> Result<NetworkPanel> {
        let nodes = Arc::new(NodeSet::anonymous(self.nodes));
        let y1 = erdos_renyi_signed(nodes, self.p_edge, self.p_pos, &mut substream(cfg.seed, 100));
        let tergm_cfg = SimConfig {
            aux_iterations: self.tergm_iterations,
            burn_in: 0,
            seed: cfg.seed ^ 0x7465_7267,
            ..cfg.clone()
        };
        let x2 = simulate_tergm_binary(&y1.interaction(), self.theta_density, self.theta_change, &tergm_cfg)?;
        let y2 = simulate_sign_transition(&y1, &x2, &self.sign_spec(), &self.zeta_f, &self.zeta_p, cfg)?;
        NetworkPanel::from_waves(vec![y1, y2])
    }
}
