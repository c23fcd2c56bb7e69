//! Run configuration, read from a TOML file.
//!
//! Every section rejects unknown keys. See `configs/` for annotated examples.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sternet::infer::{BlockPrior, ChainFormat, ChainKind, MCMCConfig, ModelPrior, NormalPrior};
use sternet::sim::{ProcessParams, SimConfig, StudySetup};
use sternet::stats::{ModelSpec, ProcessSpec, Term};

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "STERNET_SEED";
pub const OUT_ENV: &str = "STERNET_OUT";

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub data: Option<DataConfig>,
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub mcmc: MCMCConfig,
    #[serde(default)]
    pub fit: FitConfig,
    pub simulate: Option<SimulateConfig>,
    #[serde(default)]
    pub ppc: PpcConfig,
    #[serde(default)]
    pub diagnose: DiagnoseConfig,
    #[serde(default)]
    pub recover: RecoverConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// `time,node_a,node_b,sign[,order]`
    pub edges: PathBuf,
    /// `node,attr,value`
    pub attributes: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// `senate` (the application model); explicit processes are then not allowed.
    pub preset: Option<String>,
    /// Node attribute used by homophily/nodematch terms without their own.
    pub attribute: Option<String>,
    pub sign: Option<ProcessConfig>,
    pub interaction: Option<ProcessConfig>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    #[serde(default)]
    pub formation: Vec<TermConfig>,
    #[serde(default)]
    pub persistence: Vec<TermConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub term: String,
    pub decay: Option<f64>,
    pub attr: Option<String>,
    pub prior: Option<PriorConfig>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub processes: Vec<ChainKind>,
    pub chain_format: ChainFormat,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { processes: vec![ChainKind::Sign, ChainKind::Interaction], chain_format: ChainFormat::Long }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// `sim-study`: the two-wave study pipeline driven by `study`.
    pub preset: Option<String>,
    #[serde(default)]
    pub study: StudySetup,
    #[serde(default)]
    pub sim: SimConfig,
    /// Start network when no preset is used; defaults to the last observed
    /// wave of `[data]`.
    pub initial: Option<InitialConfig>,
    #[serde(default = "one")]
    pub steps: usize,
    pub params: Option<ProcessParams>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub nodes: usize,
    pub p_edge: f64,
    pub p_pos: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PpcMode {
    /// Redraw the layers on the observed supports, as in fitting.
    #[default]
    Support,
    /// Simulate whole panels forward at the posterior means.
    Trajectory,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PpcConfig {
    pub draws: usize,
    pub mode: PpcMode,
    pub sim: SimConfig,
    /// Directory holding the chain files; defaults to the output directory.
    pub chains: Option<PathBuf>,
}

impl Default for PpcConfig {
    fn default() -> Self {
        Self { draws: 200, mode: PpcMode::Support, sim: SimConfig::default(), chains: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnoseConfig {
    pub chains: Option<PathBuf>,
    pub max_lag: usize,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        Self { chains: None, max_lag: sternet::diag::DEFAULT_ACF_LAGS }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecoverConfig {
    pub study: StudySetup,
    pub sim: SimConfig,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads `path` (the empty configuration when `None`), then applies the
    /// environment and the command line, in that order.
    pub fn load(path: Option<&Path>, ov: &Overrides) -> CliResult<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                let mut c = Self::from_toml(&text)?;
                c.rebase(p.parent().unwrap_or(Path::new(".")));
                c
            }
            None => Self::default(),
        };
        if let Ok(v) = std::env::var(SEED_ENV) {
            cfg.seed = Some(v.parse().map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not a u64")))?);
        }
        if let Ok(v) = std::env::var(OUT_ENV) {
            cfg.out = Some(PathBuf::from(v));
        }
        if ov.seed.is_some() {
            cfg.seed = ov.seed;
        }
        if ov.out.is_some() {
            cfg.out = ov.out.clone();
        }
        if ov.threads.is_some() {
            cfg.threads = ov.threads;
        }
        Ok(cfg)
    }

    /// Relative paths in the file are taken relative to the file.
    fn rebase(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let Some(d) = &mut self.data {
            fix(&mut d.edges);
            if let Some(a) = &mut d.attributes {
                fix(a);
            }
        }
        if let Some(o) = &mut self.out {
            fix(o);
        }
        for c in [&mut self.ppc.chains, &mut self.diagnose.chains].into_iter().flatten() {
            fix(c);
        }
    }

    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| CliError::Config(format!("a seed is required (config `seed`, --seed or {SEED_ENV})")))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn require_data(&self) -> CliResult<&DataConfig> {
        let d = self.data.as_ref().ok_or_else(|| CliError::Config("missing [data] section".into()))?;
        for p in std::iter::once(&d.edges).chain(&d.attributes) {
            if !p.is_file() {
                return Err(CliError::Config(format!("data file {} does not exist", p.display())));
            }
        }
        Ok(d)
    }

    /// The model and its priors.
    pub fn model(&self) -> CliResult<(ModelSpec, ModelPrior)> {
        let m = self.model.as_ref().ok_or_else(|| CliError::Config("missing [model] section".into()))?;
        let (spec, prior) = match m.preset.as_deref() {
            Some("senate") => {
                if m.sign.is_some() || m.interaction.is_some() {
                    return Err(CliError::Config("model.preset excludes explicit term lists".into()));
                }
                let spec = ModelSpec::senate();
                let prior = ModelPrior::default_for(&spec);
                (spec, prior)
            }
            Some(other) => return Err(CliError::Config(format!("unknown model preset {other:?}"))),
            None => {
                let attr = m.attribute.as_deref();
                let empty = ProcessConfig::default();
                let (ss, sp) = process(m.sign.as_ref().unwrap_or(&empty), attr)?;
                let (is, ip) = process(m.interaction.as_ref().unwrap_or(&empty), attr)?;
                (ModelSpec { sign: ss, interaction: is }, ModelPrior { sign: sp, interaction: ip })
            }
        };
        spec.validate()?;
        Ok((spec, prior))
    }

    pub fn mcmc_for(&self, seed: u64) -> CliResult<MCMCConfig> {
        let cfg = MCMCConfig { seed, ..self.mcmc.clone() };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn process(p: &ProcessConfig, attr: Option<&str>) -> CliResult<(ProcessSpec, BlockPrior)> {
    let block = |terms: &[TermConfig]| -> CliResult<(Vec<Term>, Vec<NormalPrior>)> {
        terms
            .iter()
            .map(|t| {
                let term = Term::parse(&t.term, t.decay, t.attr.as_deref().or(if takes_attr(&t.term) { attr } else { None }))?;
                let prior = match t.prior {
                    Some(p) => NormalPrior::new(p.mean, p.sd)?,
                    None => NormalPrior::default_for(&term),
                };
                Ok((term, prior))
            })
            .collect::<CliResult<Vec<_>>>()
            .map(|v| v.into_iter().unzip())
    };
    let (ft, fp) = block(&p.formation)?;
    let (pt, pp) = block(&p.persistence)?;
    Ok((ProcessSpec::new(ft, pt), BlockPrior { formation: fp, persistence: pp }))
}

fn takes_attr(name: &str) -> bool {
    name.starts_with("homophily") || name.starts_with("nodematch")
}

/// Attributes referenced by the model must exist on the nodes.
pub fn check_attributes(model: &ModelSpec, nodes: &sternet::netcore::NodeSet) -> CliResult<()> {
    let all = [&model.sign, &model.interaction];
    for t in all.iter().flat_map(|p| p.formation.iter().chain(&p.persistence)) {
        let attr = match t {
            Term::HomophilyPos { attr, .. } | Term::Homophily { attr, .. } | Term::NodematchPos { attr } | Term::Nodematch { attr } => attr,
            _ => continue,
        };
        if nodes.attribute(attr).is_none() {
            return Err(CliError::Config(format!("term {t} needs node attribute {attr:?}, which the data lacks")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("seed = 1\nsed = 2").is_err());
        assert!(RunConfig::from_toml("[mcmc]\niteration = 5").is_err());
        assert!(RunConfig::from_toml("[mcmc.aux]\naux_iterations = -1").is_err());
    }

    #[test]
    fn explicit_model_with_priors() {
        let c = RunConfig::from_toml(
            r#"
            [model]
            attribute = "party"
            [[model.sign.formation]]
            term = "edges+"
            prior = { mean = -2.0, sd = 3.0 }
            [[model.sign.formation]]
            term = "homophily+(rep)"
            [[model.sign.persistence]]
            term = "gwesf+"
            decay = 0.6
            "#,
        )
        .unwrap();
        let (spec, prior) = c.model().unwrap();
        assert_eq!(spec.sign.formation.len(), 2);
        assert_eq!(prior.sign.formation[0].mean, -2.0);
        assert_eq!(prior.sign.persistence[0].sd, sternet::infer::DEFAULT_PRIOR_SD);
        assert!(spec.interaction.formation.is_empty());
    }

    #[test]
    fn bad_models() {
        for text in [
            "[model]\npreset = \"house\"",
            "[[model.sign.formation]]\nterm = \"gwesf+\"",
            "[[model.sign.formation]]\nterm = \"edges\"",
            "[[model.sign.formation]]\nterm = \"edges+\"\nprior = { mean = 0.0, sd = 0.0 }",
            "[model]\npreset = \"senate\"\n[[model.sign.formation]]\nterm = \"edges+\"",
        ] {
            assert!(RunConfig::from_toml(text).unwrap().model().is_err(), "{text}");
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let ov = Overrides { seed: Some(9), out: Some("x".into()), threads: None };
        let c = RunConfig::load(None, &ov).unwrap();
        assert_eq!(c.seed, Some(9));
        assert_eq!(c.out_dir(), PathBuf::from("x"));
    }
}
