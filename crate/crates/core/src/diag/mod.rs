//! Chain diagnostics, posterior predictive checks and marginal edge
//! probabilities.

use std::io::Write;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infer::{Block, Chain, ChainKind, ExchangeTarget, LayerTarget, ParamLabel};
use crate::netcore::{decompose, NetworkPanel};
use crate::sim::{logistic, simulate_panel, ProcessParams, SimConfig};
use crate::stats::{suff_stats_binary_lagged, suff_stats_sign_lagged, ModelSpec, ProcessSpec};

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn centred_ss(x: &[f64], m: f64) -> f64 {
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

fn autocov(x: &[f64], m: f64, k: usize) -> f64 {
    x.iter().zip(&x[k..]).map(|(a, b)| (a - m) * (b - m)).sum()
}

/// Sample autocorrelations at lags `1..=max_lag`.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= series.len() {
        return Err(Error::Spec(format!(
            "max_lag {max_lag} must be below the series length {}",
            series.len()
        )));
    }
    let m = mean(series);
    let c0 = centred_ss(series, m);
    if c0 == 0.0 {
        warn!("autocorrelation of a constant series is undefined; returning zeros");
        return Ok(vec![0.0; max_lag]);
    }
    Ok((1..=max_lag).map(|k| autocov(series, m, k) / c0).collect())
}

/// Effective sample size `N / (1 + 2 Σ ρ_k)`, truncated by Geyer's initial
/// positive sequence and capped at `N`.
pub fn ess(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 10 {
        return Err(Error::Spec(format!("ess needs at least 10 draws, got {n}")));
    }
    let m = mean(series);
    let c0 = centred_ss(series, m);
    if c0 == 0.0 {
        warn!("effective sample size of a constant series is defined as 0");
        return Ok(0.0);
    }
    let rho = |k: usize| if k == 0 { 1.0 } else { autocov(series, m, k) / c0 };
    let mut tau = -1.0;
    let mut k = 0;
    while k + 1 < n {
        let pair = rho(k) + rho(k + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 2;
    }
    Ok((n as f64 / tau).min(n as f64))
}

/// Linear interpolation between order statistics (`h = (n - 1) p`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub label: ParamLabel,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub median: f64,
    pub q975: f64,
    pub ess: f64,
    /// Lags `1..=acf.len()`.
    pub acf: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub kind: ChainKind,
    pub draws: usize,
    pub acceptance_rate: f64,
    pub params: Vec<ParamSummary>,
}

pub const DEFAULT_ACF_LAGS: usize = 50;

pub fn summarize(chain: &Chain) -> Result<ChainSummary> {
    summarize_with(chain, DEFAULT_ACF_LAGS)
}

pub fn summarize_with(chain: &Chain, max_lag: usize) -> Result<ChainSummary> {
    if chain.len() < 100 {
        return Err(Error::Spec(format!("summaries need at least 100 draws, got {}", chain.len())));
    }
    let lags = max_lag.min(chain.len() - 1);
    let params = chain
        .labels
        .iter()
        .enumerate()
        .map(|(j, label)| {
            let x = chain.column(j);
            let m = mean(&x);
            let mut sorted = x.clone();
            sorted.sort_by(f64::total_cmp);
            Ok(ParamSummary {
                label: label.clone(),
                mean: m,
                sd: (centred_ss(&x, m) / (x.len() - 1) as f64).sqrt(),
                q025: quantile(&sorted, 0.025),
                median: quantile(&sorted, 0.5),
                q975: quantile(&sorted, 0.975),
                ess: ess(&x)?,
                acf: acf(&x, lags)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ChainSummary {
        kind: chain.kind,
        draws: chain.len(),
        acceptance_rate: chain.acceptance_rate,
        params,
    })
}

impl ChainSummary {
    pub fn get(&self, block: Block, term: &str) -> Option<&ParamSummary> {
        self.params.iter().find(|p| p.label.block == block && p.label.term == term)
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    /// One row per term with formation and persistence columns side by side.
    pub fn write_table_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "term", "F_mean", "F_q025", "F_median", "F_q975", "F_ess", "P_mean", "P_q025", "P_median", "P_q975",
            "P_ess",
        ])?;
        let mut terms: Vec<&str> = Vec::new();
        for p in &self.params {
            if !terms.contains(&p.label.term.as_str()) {
                terms.push(&p.label.term);
            }
        }
        for term in terms {
            let mut rec = vec![term.to_string()];
            for block in [Block::F, Block::P] {
                match self.get(block, term) {
                    Some(p) => rec.extend([p.mean, p.q025, p.median, p.q975, p.ess].map(|v| v.to_string())),
                    None => rec.extend(std::iter::repeat_n(String::new(), 5)),
                }
            }
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// `term,block,lag,acf` rows.
    pub fn write_acf_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["block", "term", "lag", "acf"])?;
        for p in &self.params {
            for (k, r) in p.acf.iter().enumerate() {
                out.write_record([p.label.block.to_string(), p.label.term.clone(), (k + 1).to_string(), r.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Centred cumulative differences `Σ_t s(simulated) − Σ_t s(observed)`, one
/// sample per posterior draw and statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PPCResult {
    pub kind: ChainKind,
    pub labels: Vec<ParamLabel>,
    /// `values[j][k]`: statistic `j`, draw `k`.
    pub values: Vec<Vec<f64>>,
}

impl PPCResult {
    pub fn draws(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Long format `process,term,draw,value`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["process", "term", "draw", "value"])?;
        for (l, vals) in self.labels.iter().zip(&self.values) {
            for (k, v) in vals.iter().enumerate() {
                out.write_record([l.block.to_string(), l.term.clone(), k.to_string(), v.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Median and interquartile range of each statistic's differences.
    pub fn median_iqr(&self) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .map(|v| {
                let mut s = v.clone();
                s.sort_by(f64::total_cmp);
                (quantile(&s, 0.5), quantile(&s, 0.75) - quantile(&s, 0.25))
            })
            .collect()
    }
}

fn target_for(panel: &NetworkPanel, kind: ChainKind, spec: &ProcessSpec, aux: &SimConfig) -> Result<LayerTarget> {
    match kind {
        ChainKind::Sign => LayerTarget::sign(panel, spec, aux),
        ChainKind::Interaction => LayerTarget::interaction(panel, spec, aux),
    }
}

fn ppc_rows(
    panel: &NetworkPanel,
    kind: ChainKind,
    spec: &ProcessSpec,
    labels: Vec<ParamLabel>,
    params: impl Fn(usize) -> (Vec<f64>, Vec<f64>),
    n_draws: usize,
    cfg: &SimConfig,
) -> Result<PPCResult> {
    let target = target_for(panel, kind, spec, cfg)?;
    let (of, op) = target.observed();
    let mut values = vec![Vec::with_capacity(n_draws); of.len() + op.len()];
    for k in 0..n_draws {
        let (tf, tp) = params(k);
        let (af, ap) = target.auxiliary(&tf, &tp, k as u64)?;
        for (j, v) in af.iter().zip(&of).chain(ap.iter().zip(&op)).map(|(a, o)| a - o).enumerate() {
            values[j].push(v);
        }
    }
    Ok(PPCResult { kind, labels, values })
}

/// Posterior predictive check on the observed supports, using `n_draws`
/// evenly spaced rows of `chain`.
pub fn ppc(panel: &NetworkPanel, spec: &ProcessSpec, chain: &Chain, n_draws: usize, cfg: &SimConfig) -> Result<PPCResult> {
    let nf = spec.formation.len();
    let want: Vec<String> = spec
        .formation
        .iter()
        .chain(&spec.persistence)
        .map(|t| t.to_string())
        .collect();
    let have: Vec<&str> = chain.labels.iter().map(|l| l.term.as_str()).collect();
    if want.iter().map(String::as_str).collect::<Vec<_>>() != have
        || chain.labels.iter().take(nf).any(|l| l.block != Block::F)
    {
        return Err(Error::Spec("chain labels do not match the model".into()));
    }
    if chain.is_empty() || n_draws == 0 {
        return Err(Error::Spec("ppc needs a non-empty chain and at least one draw".into()));
    }
    let rows: Vec<usize> = (0..n_draws).map(|k| k * chain.len() / n_draws).collect();
    ppc_rows(panel, chain.kind, spec, chain.labels.clone(), |k| chain.split_row(rows[k]), n_draws, cfg)
}

/// Posterior predictive check at fixed parameters.
pub fn ppc_params(
    panel: &NetworkPanel,
    kind: ChainKind,
    spec: &ProcessSpec,
    theta_f: &[f64],
    theta_p: &[f64],
    n_draws: usize,
    cfg: &SimConfig,
) -> Result<PPCResult> {
    let labels = spec
        .formation
        .iter()
        .map(|t| ParamLabel { block: Block::F, term: t.to_string() })
        .chain(spec.persistence.iter().map(|t| ParamLabel { block: Block::P, term: t.to_string() }))
        .collect();
    ppc_rows(panel, kind, spec, labels, |_| (theta_f.to_vec(), theta_p.to_vec()), n_draws, cfg)
}

/// Sum over transitions of the formation/persistence statistics of both
/// processes: sign F, sign P, interaction F, interaction P.
fn panel_stats(panel: &NetworkPanel, model: &ModelSpec) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::new();
    for (prev, curr) in panel.pairs() {
        let d = decompose(prev, curr)?;
        let xp = prev.interaction();
        let mut s = suff_stats_sign_lagged(&d.z_f, &d.x_f, &model.sign.formation, prev)?.0;
        s.extend(suff_stats_sign_lagged(&d.z_p, &d.x_p, &model.sign.persistence, prev)?.0);
        s.extend(suff_stats_binary_lagged(&d.x_f, &model.interaction.formation, &xp)?.0);
        s.extend(suff_stats_binary_lagged(&d.x_p, &model.interaction.persistence, &xp)?.0);
        if out.is_empty() {
            out = s;
        } else {
            for (a, b) in out.iter_mut().zip(s) {
                *a += b;
            }
        }
    }
    Ok(out)
}

/// Full-trajectory check: whole panels are simulated forward from the first
/// observed wave, so both processes vary together. Labels are prefixed with
/// the process (`sign`/`interaction`).
pub fn ppc_trajectory(
    panel: &NetworkPanel,
    model: &ModelSpec,
    params: &ProcessParams,
    n_draws: usize,
    cfg: &SimConfig,
) -> Result<(Vec<ParamLabel>, Vec<Vec<f64>>)> {
    let obs = panel_stats(panel, model)?;
    let mut labels = Vec::new();
    for (tag, spec) in [("sign", &model.sign), ("interaction", &model.interaction)] {
        for (block, terms) in [(Block::F, &spec.formation), (Block::P, &spec.persistence)] {
            labels.extend(terms.iter().map(|t| ParamLabel { block, term: format!("{tag}:{t}") }));
        }
    }
    let mut values = vec![Vec::with_capacity(n_draws); obs.len()];
    for k in 0..n_draws {
        let c = SimConfig { seed: cfg.seed.wrapping_add(k as u64), ..cfg.clone() };
        let sim = simulate_panel(&panel.waves()[0], model, params, panel.transitions(), &c)?;
        for (j, (a, o)) in panel_stats(&sim, model)?.iter().zip(&obs).enumerate() {
            values[j].push(a - o);
        }
    }
    Ok((labels, values))
}

/// Probabilities of interacting, of a positive sign given an interaction,
/// and of a positive edge, from summed linear predictors.
pub fn marginal_positive_probability(xi_effects: f64, zeta_effects: f64) -> (f64, f64, f64) {
    let p_interact = logistic(xi_effects);
    let p_pos_given = logistic(zeta_effects);
    (p_interact, p_pos_given, p_interact * p_pos_given)
}
