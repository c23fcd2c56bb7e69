use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::info;
use serde::Serialize;
use sternet::diag::{ppc, ppc_trajectory, summarize_with, ChainSummary, PPCResult};
use sternet::infer::{aea_interaction, aea_sign, Block, BlockPrior, Chain, ChainFormat, ChainKind, ChainMeta, MCMCConfig};
use sternet::netcore::{NetworkPanel, NodeSet};
use sternet::sim::{erdos_renyi_signed, simulate_panel, substream, ProcessParams, SimConfig};
use sternet::stats::{ModelSpec, ProcessSpec};

use crate::config::{check_attributes, PpcMode, RunConfig};
use crate::error::{CliError, CliResult};
use crate::io::{read_panel, report, write_atomic, write_panel, write_with};

fn kind_name(kind: ChainKind) -> &'static str {
    match kind {
        ChainKind::Sign => "sign",
        ChainKind::Interaction => "interaction",
    }
}

fn json<T: Serialize>(path: &Path, v: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

fn load_panel(cfg: &RunConfig) -> CliResult<NetworkPanel> {
    let d = cfg.require_data()?;
    let panel = read_panel(&d.edges, d.attributes.as_deref())?;
    for w in report(&panel) {
        info!(
            "wave {}: {} edges, density {:.4}, positive fraction {}",
            w.time,
            w.edges,
            w.density,
            w.positive_fraction.map_or("-".into(), |p| format!("{p:.3}"))
        );
    }
    Ok(panel)
}

fn spec_of(model: &ModelSpec, kind: ChainKind) -> &ProcessSpec {
    match kind {
        ChainKind::Sign => &model.sign,
        ChainKind::Interaction => &model.interaction,
    }
}

fn write_summary(dir: &Path, name: &str, s: &ChainSummary) -> CliResult<()> {
    write_with(&dir.join(format!("{name}_summary.json")), |w| s.write_json(w))?;
    write_with(&dir.join(format!("{name}_summary.csv")), |w| s.write_table_csv(w))?;
    write_with(&dir.join(format!("{name}_acf.csv")), |w| s.write_acf_csv(w))
}

fn write_chain(dir: &Path, name: &str, chain: &Chain, format: ChainFormat) -> CliResult<()> {
    write_with(&dir.join(format!("{name}_chain.csv")), |w| chain.write_csv(w, format))?;
    write_with(&dir.join(format!("{name}_chain.json")), |w| chain.write_meta(w))
}

fn summary_lines(s: &ChainSummary, out: &mut String) {
    let _ = writeln!(out, "{} chain: {} draws, acceptance {:.3}", kind_name(s.kind), s.draws, s.acceptance_rate);
    for p in &s.params {
        let _ = writeln!(
            out,
            "  {:<22} mean {:>8.3}  95% ({:>8.3}, {:>8.3})  ess {:>7.1}",
            p.label.to_string(),
            p.mean,
            p.q025,
            p.q975,
            p.ess
        );
    }
}

fn fit_one(panel: &NetworkPanel, kind: ChainKind, spec: &ProcessSpec, prior: &BlockPrior, cfg: &MCMCConfig) -> CliResult<Chain> {
    info!("fitting the {} process", kind_name(kind));
    Ok(match kind {
        ChainKind::Sign => aea_sign(panel, spec, prior, cfg)?,
        ChainKind::Interaction => aea_interaction(panel, spec, prior, cfg)?,
    })
}

fn check_retained(mcmc: &MCMCConfig) -> CliResult<()> {
    if mcmc.iterations - mcmc.burn_in < 100 {
        return Err(CliError::Config("summaries need at least 100 retained draws (iterations - burn_in)".into()));
    }
    Ok(())
}

pub fn fit(cfg: &RunConfig) -> CliResult<String> {
    let seed = cfg.require_seed()?;
    let (model, prior) = cfg.model()?;
    let mcmc = cfg.mcmc_for(seed)?;
    check_retained(&mcmc)?;
    if cfg.fit.processes.is_empty() {
        return Err(CliError::Config("fit.processes is empty".into()));
    }
    let panel = load_panel(cfg)?;
    check_attributes(&model, panel.nodes())?;
    let out = cfg.out_dir();
    json(&out.join("panel_report.json"), &report(&panel))?;
    let mut text = String::new();
    for &kind in &cfg.fit.processes {
        let p = match kind {
            ChainKind::Sign => &prior.sign,
            ChainKind::Interaction => &prior.interaction,
        };
        let chain = fit_one(&panel, kind, spec_of(&model, kind), p, &mcmc)?;
        let name = kind_name(kind);
        write_chain(&out, name, &chain, cfg.fit.chain_format)?;
        let s = summarize_with(&chain, cfg.diagnose.max_lag)?;
        write_summary(&out, name, &s)?;
        summary_lines(&s, &mut text);
    }
    Ok(text)
}

pub fn simulate(cfg: &RunConfig) -> CliResult<String> {
    let seed = cfg.require_seed()?;
    let sc = cfg.simulate.as_ref().ok_or_else(|| CliError::Config("missing [simulate] section".into()))?;
    let sim = SimConfig { seed, ..sc.sim.clone() };
    sim.validate()?;
    let panel = match sc.preset.as_deref() {
        Some("sim-study") => {
            if sc.params.is_some() || sc.initial.is_some() {
                return Err(CliError::Config("the sim-study preset takes its parameters from [simulate.study]".into()));
            }
            sc.study.simulate(&sim)?
        }
        Some(other) => return Err(CliError::Config(format!("unknown simulate preset {other:?}"))),
        None => {
            let (model, _) = cfg.model()?;
            let params: &ProcessParams = sc
                .params
                .as_ref()
                .ok_or_else(|| CliError::Config("simulate needs [simulate.params] or a preset".into()))?;
            params.check(&model)?;
            if sc.steps == 0 {
                return Err(CliError::Config("simulate.steps must be at least 1".into()));
            }
            let y0 = match sc.initial {
                Some(init) => {
                    if !(0.0..=1.0).contains(&init.p_edge) || !(0.0..=1.0).contains(&init.p_pos) || init.nodes < 2 {
                        return Err(CliError::Config("simulate.initial needs nodes >= 2 and probabilities in [0, 1]".into()));
                    }
                    let nodes = Arc::new(NodeSet::anonymous(init.nodes));
                    erdos_renyi_signed(nodes, init.p_edge, init.p_pos, &mut substream(seed, 100))
                }
                None => load_panel(cfg)?.waves().last().cloned().expect("panels have waves"),
            };
            check_attributes(&model, y0.nodes())?;
            simulate_panel(&y0, &model, params, sc.steps, &sim)?
        }
    };
    let out = cfg.out_dir();
    write_panel(&panel, &out)?;
    json(&out.join("panel_report.json"), &report(&panel))?;
    Ok(format!("wrote {} waves on {} nodes to {}\n", panel.waves().len(), panel.nodes().len(), out.display()))
}

fn chains_dir(cfg: &RunConfig, explicit: &Option<PathBuf>) -> PathBuf {
    explicit.clone().unwrap_or_else(|| cfg.out_dir())
}

/// Chains found in `dir`, in the order sign, interaction.
fn read_chains(dir: &Path) -> CliResult<Vec<Chain>> {
    let mut out = Vec::new();
    for kind in [ChainKind::Sign, ChainKind::Interaction] {
        let name = kind_name(kind);
        let meta_path = dir.join(format!("{name}_chain.json"));
        if !meta_path.is_file() {
            continue;
        }
        let meta: ChainMeta = serde_json::from_slice(&std::fs::read(&meta_path)?)
            .map_err(|e| CliError::Data(format!("{}: {e}", meta_path.display())))?;
        if meta.kind != kind {
            return Err(CliError::Data(format!("{} describes a {:?} chain", meta_path.display(), meta.kind)));
        }
        let csv_path = dir.join(format!("{name}_chain.csv"));
        let file = std::fs::File::open(&csv_path).map_err(|e| CliError::Data(format!("{}: {e}", csv_path.display())))?;
        out.push(Chain::read_csv(file, meta)?);
    }
    if out.is_empty() {
        return Err(CliError::Data(format!("no chain files in {}", dir.display())));
    }
    Ok(out)
}

pub fn diagnose(cfg: &RunConfig) -> CliResult<String> {
    let dir = chains_dir(cfg, &cfg.diagnose.chains);
    let out = cfg.out_dir();
    let mut text = String::new();
    for chain in read_chains(&dir)? {
        let s = summarize_with(&chain, cfg.diagnose.max_lag)?;
        write_summary(&out, kind_name(chain.kind), &s)?;
        summary_lines(&s, &mut text);
    }
    Ok(text)
}

#[derive(Serialize)]
struct PpcRow {
    block: Block,
    term: String,
    median: f64,
    iqr: f64,
}

fn ppc_rows(r: &PPCResult) -> Vec<PpcRow> {
    r.labels
        .iter()
        .zip(r.median_iqr())
        .map(|(l, (median, iqr))| PpcRow { block: l.block, term: l.term.clone(), median, iqr })
        .collect()
}

fn posterior_mean(c: &Chain) -> (Vec<f64>, Vec<f64>) {
    let n = c.len() as f64;
    let means: Vec<f64> = (0..c.dim()).map(|j| c.column(j).iter().sum::<f64>() / n).collect();
    let nf = c.labels.iter().filter(|l| l.block == Block::F).count();
    (means[..nf].to_vec(), means[nf..].to_vec())
}

pub fn run_ppc(cfg: &RunConfig) -> CliResult<String> {
    let (model, _) = cfg.model()?;
    let sim = SimConfig { seed: cfg.seed.unwrap_or(cfg.ppc.sim.seed), ..cfg.ppc.sim.clone() };
    sim.validate()?;
    if cfg.ppc.draws == 0 {
        return Err(CliError::Config("ppc.draws must be at least 1".into()));
    }
    let chains = read_chains(&chains_dir(cfg, &cfg.ppc.chains))?;
    let panel = load_panel(cfg)?;
    check_attributes(&model, panel.nodes())?;
    let out = cfg.out_dir();
    let mut text = String::new();
    match cfg.ppc.mode {
        PpcMode::Support => {
            for chain in &chains {
                let name = kind_name(chain.kind);
                let res = ppc(&panel, spec_of(&model, chain.kind), chain, cfg.ppc.draws, &sim)?;
                write_with(&out.join(format!("{name}_ppc.csv")), |w| res.write_csv(w))?;
                let rows = ppc_rows(&res);
                json(&out.join(format!("{name}_ppc_summary.json")), &rows)?;
                let _ = writeln!(text, "{name} ppc: {} draws", res.draws());
                for r in rows {
                    let _ = writeln!(text, "  {}.{:<20} median {:>9.3}  iqr {:>9.3}", r.block, r.term, r.median, r.iqr);
                }
            }
        }
        PpcMode::Trajectory => {
            let find = |k: ChainKind| {
                chains
                    .iter()
                    .find(|c| c.kind == k)
                    .ok_or_else(|| CliError::Data(format!("trajectory ppc needs the {} chain", kind_name(k))))
            };
            let (zeta_f, zeta_p) = posterior_mean(find(ChainKind::Sign)?);
            let (xi_f, xi_p) = posterior_mean(find(ChainKind::Interaction)?);
            let params = ProcessParams { zeta_f, zeta_p, xi_f, xi_p };
            params.check(&model)?;
            let (labels, values) = ppc_trajectory(&panel, &model, &params, cfg.ppc.draws, &sim)?;
            let res = PPCResult { kind: ChainKind::Sign, labels, values };
            write_with(&out.join("trajectory_ppc.csv"), |w| res.write_csv(w))?;
            let rows = ppc_rows(&res);
            json(&out.join("trajectory_ppc_summary.json"), &rows)?;
            let _ = writeln!(text, "trajectory ppc: {} draws, {} statistics", res.draws(), rows.len());
        }
    }
    Ok(text)
}

#[derive(Serialize)]
struct Coverage {
    label: String,
    truth: f64,
    q025: f64,
    q975: f64,
    covered: bool,
}

#[derive(Serialize)]
struct RecoveryReport {
    parameters: Vec<Coverage>,
    covered: usize,
    /// Posterior probability that the formation gwesf+ effect is positive.
    p_formation_gwesf_positive: f64,
}

pub fn recover(cfg: &RunConfig) -> CliResult<String> {
    let seed = cfg.require_seed()?;
    let study = &cfg.recover.study;
    let sim = SimConfig { seed, ..cfg.recover.sim.clone() };
    sim.validate()?;
    let mcmc = cfg.mcmc_for(seed)?;
    check_retained(&mcmc)?;
    let out = cfg.out_dir();
    let panel = study.simulate(&sim)?;
    write_panel(&panel, &out)?;
    let spec = study.sign_spec();
    let chain = fit_one(&panel, ChainKind::Sign, &spec, &BlockPrior::default_for(&spec), &mcmc)?;
    write_chain(&out, "sign", &chain, cfg.fit.chain_format)?;
    let s = summarize_with(&chain, cfg.diagnose.max_lag)?;
    write_summary(&out, "sign", &s)?;
    let truth = [study.zeta_f[0], study.zeta_f[1], study.zeta_p[0], study.zeta_p[1]];
    let parameters: Vec<Coverage> = s
        .params
        .iter()
        .zip(truth)
        .map(|(p, t)| Coverage {
            label: p.label.to_string(),
            truth: t,
            q025: p.q025,
            q975: p.q975,
            covered: p.q025 <= t && t <= p.q975,
        })
        .collect();
    let g = chain.column(1);
    let rep = RecoveryReport {
        covered: parameters.iter().filter(|c| c.covered).count(),
        p_formation_gwesf_positive: g.iter().filter(|v| **v > 0.0).count() as f64 / g.len() as f64,
        parameters,
    };
    json(&out.join("recovery.json"), &rep)?;
    let mut text = String::new();
    summary_lines(&s, &mut text);
    let _ = writeln!(
        text,
        "{} of 4 true values inside the 95% intervals; P(F.gwesf+ > 0) = {:.3}",
        rep.covered, rep.p_formation_gwesf_positive
    );
    Ok(text)
}
