//! Posterior sampling for the sign and interaction processes with the adaptive
//! approximate exchange algorithm.
//!
//! Each iteration proposes formation and persistence parameters jointly,
//! simulates auxiliary layers on the observed constrained supports for every
//! transition, and accepts with the exchange ratio. Normalising constants
//! cancel, so only statistic differences are needed.

mod chain;
mod prior;
mod proposal;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use chain::{Block, Chain, ChainFormat, ChainKind, ChainMeta, ParamLabel};
pub use prior::{log_prior, BlockPrior, ModelPrior, NormalPrior, DEFAULT_PRIOR_SD};
pub use proposal::{adapt_proposal, propose, ProposalSettings, ProposalState};

use crate::error::{Error, Result};
use crate::netcore::{decompose, NetworkPanel};
use crate::sim::{substream, BinarySampler, SignSampler, SimConfig, StartState};
use crate::stats::{ModelSpec, ProcessSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Blocking {
    /// One proposal covariance over formation and persistence together.
    Joint,
    /// Cross-block covariances set to zero.
    Blockwise,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MCMCConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub aux: SimConfig,
    pub adapt_start: usize,
    /// Defaults to `2.38² / d`.
    pub adapt_scale: Option<f64>,
    pub adapt_jitter: f64,
    /// Proposal standard deviation before adaptation starts.
    pub initial_sd: f64,
    pub blocking: Blocking,
    pub seed: u64,
}

impl Default for MCMCConfig {
    fn default() -> Self {
        Self {
            iterations: 35_000,
            burn_in: 10_000,
            aux: SimConfig::default(),
            adapt_start: 500,
            adapt_scale: None,
            adapt_jitter: 1e-5,
            initial_sd: 0.1,
            blocking: Blocking::Joint,
            seed: 0,
        }
    }
}

impl MCMCConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.iterations {
            return Err(Error::Spec(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if !(self.adapt_jitter > 0.0) {
            return Err(Error::Spec("adapt_jitter must be positive".into()));
        }
        if !(self.initial_sd > 0.0 && self.initial_sd.is_finite()) {
            return Err(Error::Spec("initial_sd must be positive".into()));
        }
        if let Some(s) = self.adapt_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Spec("adapt_scale must be positive".into()));
            }
        }
        self.aux.validate()
    }

    fn settings(&self, nf: usize, d: usize) -> ProposalSettings {
        ProposalSettings {
            adapt_start: self.adapt_start,
            scale: self.adapt_scale.unwrap_or(2.38 * 2.38 / d.max(1) as f64),
            jitter: self.adapt_jitter,
            initial_sd: vec![self.initial_sd; d],
            split: (self.blocking == Blocking::Blockwise).then_some(nf),
        }
    }
}

fn dot_diff(cur: &[f64], prop: &[f64], aux: &[f64], obs: &[f64]) -> f64 {
    cur.iter()
        .zip(prop)
        .zip(aux.iter().zip(obs))
        .map(|((c, p), (a, o))| (c - p) * (a - o))
        .sum()
}

/// `(θ_cur^F − θ_prop^F)ᵀ (aux_F − obs_F) + (θ_cur^P − θ_prop^P)ᵀ (aux_P − obs_P)`,
/// with statistics summed over transitions.
#[allow(clippy::too_many_arguments)]
pub fn exchange_log_ratio(
    obs_f: &[f64],
    obs_p: &[f64],
    aux_f: &[f64],
    aux_p: &[f64],
    cur_f: &[f64],
    cur_p: &[f64],
    prop_f: &[f64],
    prop_p: &[f64],
) -> Result<f64> {
    let nf = obs_f.len();
    let np = obs_p.len();
    if [aux_f.len(), cur_f.len(), prop_f.len()].iter().any(|&l| l != nf)
        || [aux_p.len(), cur_p.len(), prop_p.len()].iter().any(|&l| l != np)
    {
        return Err(Error::Spec("exchange ratio inputs have mismatched dimensions".into()));
    }
    Ok(dot_diff(cur_f, prop_f, aux_f, obs_f) + dot_diff(cur_p, prop_p, aux_p, obs_p))
}

/// Data side of the exchange algorithm: observed statistics and auxiliary
/// simulation at proposed parameters.
pub trait ExchangeTarget: Sync {
    fn dims(&self) -> (usize, usize);
    /// Observed statistics summed over transitions.
    fn observed(&self) -> (Vec<f64>, Vec<f64>);
    /// Auxiliary statistics summed over transitions. `key` identifies the
    /// iteration; equal keys give equal draws.
    fn auxiliary(&self, theta_f: &[f64], theta_p: &[f64], key: u64) -> Result<(Vec<f64>, Vec<f64>)>;
}

/// A target without data: the chain samples the prior.
pub struct PriorOnly {
    pub nf: usize,
    pub np: usize,
}

impl ExchangeTarget for PriorOnly {
    fn dims(&self) -> (usize, usize) {
        (self.nf, self.np)
    }
    fn observed(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0; self.nf], vec![0.0; self.np])
    }
    fn auxiliary(&self, _: &[f64], _: &[f64], _: u64) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok(self.observed())
    }
}

#[derive(Clone, Debug)]
enum Sampler {
    Sign(SignSampler),
    Binary(BinarySampler),
}

#[derive(Clone, Debug)]
struct Job {
    block: Block,
    sampler: Sampler,
    observed: Vec<f64>,
    free: usize,
}

impl Job {
    fn new(block: Block, sampler: Sampler) -> Self {
        let (observed, free) = match &sampler {
            Sampler::Sign(s) => (s.stats().0, s.free_count()),
            Sampler::Binary(s) => (s.stats().0, s.free_count()),
        };
        Self { block, sampler, observed, free }
    }

    fn simulate(&self, theta: &[f64], updates: usize, start: StartState, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        if self.free == 0 {
            return Ok(self.observed.clone());
        }
        let stats = match &self.sampler {
            Sampler::Sign(t) => {
                let mut s = t.clone();
                s.set_params(theta)?;
                if start == StartState::Cold {
                    s.randomize_free(rng);
                }
                s.run(updates, rng);
                s.stats()
            }
            Sampler::Binary(t) => {
                let mut s = t.clone();
                s.set_params(theta)?;
                if start == StartState::Cold {
                    s.clear_free();
                }
                s.run(updates, rng);
                s.stats()
            }
        };
        if stats.iter().any(|v| !v.is_finite()) {
            return Err(Error::Inference("auxiliary statistics are not finite".into()));
        }
        Ok(stats.0)
    }
}

/// Per-transition constrained layers of one process.
pub struct LayerTarget {
    jobs: Vec<Job>,
    nf: usize,
    np: usize,
    aux: SimConfig,
}

fn mix(a: u64, b: u64) -> u64 {
    // splitmix64 finaliser over the combined words
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl LayerTarget {
    /// Sign layers on the observed formation and persistence supports.
    pub fn sign(panel: &NetworkPanel, spec: &ProcessSpec, aux: &SimConfig) -> Result<Self> {
        spec.validate(crate::stats::Layer::Sign)?;
        let mut jobs = Vec::new();
        let zf = vec![0.0; spec.formation.len()];
        let zp = vec![0.0; spec.persistence.len()];
        for (prev, curr) in panel.pairs() {
            let d = decompose(prev, curr)?;
            let formed: Vec<_> = d.formed().collect();
            let f = SignSampler::new(&d.x_f, &d.z_f, formed, &zf, &spec.formation, Some(prev), aux.sweep, aux.sign_update)?;
            let all: Vec<_> = d.x_p.edges().collect();
            let p = SignSampler::new(&d.x_p, &d.z_p, all, &zp, &spec.persistence, Some(prev), aux.sweep, aux.sign_update)?;
            jobs.push(Job::new(Block::F, Sampler::Sign(f)));
            jobs.push(Job::new(Block::P, Sampler::Sign(p)));
        }
        Ok(Self { jobs, nf: zf.len(), np: zp.len(), aux: aux.clone() })
    }

    /// Binary layers: formation keeps `x_{t-1}` present, persistence keeps
    /// its non-edges absent.
    pub fn interaction(panel: &NetworkPanel, spec: &ProcessSpec, aux: &SimConfig) -> Result<Self> {
        spec.validate(crate::stats::Layer::Interaction)?;
        let mut jobs = Vec::new();
        let xf = vec![0.0; spec.formation.len()];
        let xp = vec![0.0; spec.persistence.len()];
        for (prev, curr) in panel.pairs() {
            let d = decompose(prev, curr)?;
            let x_prev = prev.interaction();
            let f = BinarySampler::new(&d.x_f, d.free_f.iter().copied().collect(), &xf, &spec.formation, Some(&x_prev), aux.sweep)?;
            let p = BinarySampler::new(&d.x_p, d.free_p.iter().copied().collect(), &xp, &spec.persistence, Some(&x_prev), aux.sweep)?;
            jobs.push(Job::new(Block::F, Sampler::Binary(f)));
            jobs.push(Job::new(Block::P, Sampler::Binary(p)));
        }
        Ok(Self { jobs, nf: xf.len(), np: xp.len(), aux: aux.clone() })
    }

    pub fn free_dyads(&self) -> usize {
        self.jobs.iter().map(|j| j.free).sum()
    }

    fn sum(&self, per_job: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
        let mut f = vec![0.0; self.nf];
        let mut p = vec![0.0; self.np];
        for (job, s) in self.jobs.iter().zip(per_job) {
            let dst = match job.block {
                Block::F => &mut f,
                Block::P => &mut p,
            };
            for (a, b) in dst.iter_mut().zip(s) {
                *a += b;
            }
        }
        (f, p)
    }
}

impl ExchangeTarget for LayerTarget {
    fn dims(&self) -> (usize, usize) {
        (self.nf, self.np)
    }

    fn observed(&self) -> (Vec<f64>, Vec<f64>) {
        let obs: Vec<Vec<f64>> = self.jobs.iter().map(|j| j.observed.clone()).collect();
        self.sum(&obs)
    }

    fn auxiliary(&self, theta_f: &[f64], theta_p: &[f64], key: u64) -> Result<(Vec<f64>, Vec<f64>)> {
        let updates = self.aux.updates();
        let seed = mix(self.aux.seed, key);
        let per_job = self
            .jobs
            .par_iter()
            .enumerate()
            .map(|(idx, job)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(idx as u64 + 1);
                let theta = match job.block {
                    Block::F => theta_f,
                    Block::P => theta_p,
                };
                job.simulate(theta, updates, self.aux.start, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.sum(&per_job))
    }
}

fn labels(spec: &ProcessSpec) -> Vec<ParamLabel> {
    let f = spec.formation.iter().map(|t| ParamLabel { block: Block::F, term: t.to_string() });
    let p = spec.persistence.iter().map(|t| ParamLabel { block: Block::P, term: t.to_string() });
    f.chain(p).collect()
}

/// The exchange sampler over any target.
pub fn run_exchange(
    target: &dyn ExchangeTarget,
    kind: ChainKind,
    labels: Vec<ParamLabel>,
    prior: &[NormalPrior],
    cfg: &MCMCConfig,
) -> Result<Chain> {
    cfg.validate()?;
    let (nf, np) = target.dims();
    let d = nf + np;
    if labels.len() != d || prior.len() != d {
        return Err(Error::Spec("labels, priors and target dimensions disagree".into()));
    }
    let settings = cfg.settings(nf, d);
    let (obs_f, obs_p) = target.observed();
    let mut rng = substream(cfg.seed, 0);
    let mut theta: Vec<f64> = prior.iter().map(|p| p.mean).collect();
    let mut lp_cur = log_prior(&theta, prior)?;
    let mut state = ProposalState::new(d);
    let keep = cfg.iterations - cfg.burn_in;
    let mut draws = Vec::with_capacity(keep * d);
    let mut iterations = Vec::with_capacity(keep);
    let mut accepted = 0usize;

    for it in 0..cfg.iterations {
        let cov = state.covariance(it, &settings);
        let prop = propose(&theta, &cov, &mut rng);
        let u: f64 = rng.random();
        let (pf, pp) = prop.split_at(nf);
        let (cf, cp) = theta.split_at(nf);
        let (aux_f, aux_p) = target.auxiliary(pf, pp, it as u64)?;
        let lp_prop = log_prior(&prop, prior)?;
        let lr = exchange_log_ratio(&obs_f, &obs_p, &aux_f, &aux_p, cf, cp, pf, pp)? + lp_prop - lp_cur;
        if !lr.is_finite() {
            warn!("non-finite exchange ratio at iteration {it}; proposal rejected");
        } else if u.ln() < lr {
            theta = prop;
            lp_cur = lp_prop;
            accepted += 1;
        }
        state.push(&theta);
        if it >= cfg.burn_in {
            iterations.push(it);
            draws.extend_from_slice(&theta);
        }
    }
    Ok(Chain {
        kind,
        labels,
        iterations,
        draws,
        acceptance_rate: accepted as f64 / cfg.iterations as f64,
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

/// Auxiliary settings with the seed tied to the chain seed.
fn chain_aux(cfg: &MCMCConfig) -> SimConfig {
    SimConfig { seed: mix(cfg.seed, cfg.aux.seed.wrapping_add(1)), ..cfg.aux.clone() }
}

fn check_panel(target: &LayerTarget) -> Result<()> {
    if target.free_dyads() == 0 {
        return Err(Error::Inference(
            "no free dyads in any transition; the parameters are not identifiable".into(),
        ));
    }
    Ok(())
}

/// Posterior of `(ζ^F, ζ^P)` given the panel. Interaction layers are treated
/// as observed and fixed.
pub fn aea_sign(panel: &NetworkPanel, spec: &ProcessSpec, prior: &BlockPrior, cfg: &MCMCConfig) -> Result<Chain> {
    prior.check(spec)?;
    cfg.validate()?;
    let target = LayerTarget::sign(panel, spec, &chain_aux(cfg))?;
    check_panel(&target)?;
    run_exchange(&target, ChainKind::Sign, labels(spec), &prior.joint(), cfg)
}

/// Posterior of `(ξ^F, ξ^P)` given the interaction layers of the panel.
pub fn aea_interaction(
    panel: &NetworkPanel,
    spec: &ProcessSpec,
    prior: &BlockPrior,
    cfg: &MCMCConfig,
) -> Result<Chain> {
    prior.check(spec)?;
    cfg.validate()?;
    let target = LayerTarget::interaction(panel, spec, &chain_aux(cfg))?;
    check_panel(&target)?;
    run_exchange(&target, ChainKind::Interaction, labels(spec), &prior.joint(), cfg)
}

/// Both posteriors of a model. The sign fit reads only the sign parts of
/// `model` and `prior`, and the interaction fit only the interaction parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub sign: Chain,
    pub interaction: Chain,
}

pub fn fit(panel: &NetworkPanel, model: &ModelSpec, prior: &ModelPrior, cfg: &MCMCConfig) -> Result<Fit> {
    Ok(Fit {
        sign: aea_sign(panel, &model.sign, &prior.sign, cfg)?,
        interaction: aea_interaction(panel, &model.interaction, &prior.interaction, cfg)?,
    })
}
