use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{ProcessSpec, Term};

/// Default prior standard deviation (variance 25).
pub const DEFAULT_PRIOR_SD: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalPrior {
    pub mean: f64,
    pub sd: f64,
}

impl NormalPrior {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0 && sd.is_finite() && mean.is_finite()) {
            return Err(Error::Spec(format!("invalid normal prior N({mean}, {sd}^2)")));
        }
        Ok(Self { mean, sd })
    }

    /// Mean -1 for baseline density terms, 0 otherwise.
    pub fn default_for(term: &Term) -> Self {
        let mean = if term.is_edges() { -1.0 } else { 0.0 };
        Self { mean, sd: DEFAULT_PRIOR_SD }
    }

    pub fn log_density(&self, v: f64) -> f64 {
        let z = (v - self.mean) / self.sd;
        -0.5 * z * z - self.sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
    }
}

/// Independent normal priors for the formation and persistence parameters of
/// one process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPrior {
    pub formation: Vec<NormalPrior>,
    pub persistence: Vec<NormalPrior>,
}

impl BlockPrior {
    pub fn default_for(spec: &ProcessSpec) -> Self {
        Self {
            formation: spec.formation.iter().map(NormalPrior::default_for).collect(),
            persistence: spec.persistence.iter().map(NormalPrior::default_for).collect(),
        }
    }

    pub fn check(&self, spec: &ProcessSpec) -> Result<()> {
        if self.formation.len() != spec.formation.len() || self.persistence.len() != spec.persistence.len() {
            return Err(Error::Spec("prior dimensions do not match the model".into()));
        }
        for p in self.formation.iter().chain(&self.persistence) {
            NormalPrior::new(p.mean, p.sd)?;
        }
        Ok(())
    }

    /// Formation then persistence.
    pub fn joint(&self) -> Vec<NormalPrior> {
        self.formation.iter().chain(&self.persistence).copied().collect()
    }
}

/// Priors of both processes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelPrior {
    pub sign: BlockPrior,
    pub interaction: BlockPrior,
}

impl ModelPrior {
    pub fn default_for(model: &crate::stats::ModelSpec) -> Self {
        Self {
            sign: BlockPrior::default_for(&model.sign),
            interaction: BlockPrior::default_for(&model.interaction),
        }
    }
}

/// Sum of independent normal log-densities.
pub fn log_prior(theta: &[f64], prior: &[NormalPrior]) -> Result<f64> {
    if theta.len() != prior.len() {
        return Err(Error::Spec(format!(
            "{} parameters against {} prior components",
            theta.len(),
            prior.len()
        )));
    }
    Ok(theta.iter().zip(prior).map(|(v, p)| p.log_density(*v)).sum())
}
