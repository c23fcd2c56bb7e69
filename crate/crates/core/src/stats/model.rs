use serde::{Deserialize, Serialize};

use super::terms::{Layer, Term};
use crate::error::{Error, Result};

/// Formation and persistence term lists of one process.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub formation: Vec<Term>,
    pub persistence: Vec<Term>,
}

impl ProcessSpec {
    pub fn new(formation: Vec<Term>, persistence: Vec<Term>) -> Self {
        Self { formation, persistence }
    }

    /// Same terms for both blocks.
    pub fn symmetric(terms: Vec<Term>) -> Self {
        Self {
            formation: terms.clone(),
            persistence: terms,
        }
    }

    pub fn validate(&self, layer: Layer) -> Result<()> {
        for (block, terms) in [("formation", &self.formation), ("persistence", &self.persistence)] {
            let mut labels = Vec::new();
            for t in terms {
                t.validate()?;
                if t.layer() != layer {
                    return Err(Error::Spec(format!(
                        "{block} term {t} does not belong to the {layer:?} process"
                    )));
                }
                let l = t.to_string();
                if labels.contains(&l) {
                    return Err(Error::Spec(format!("{block} lists {l} twice")));
                }
                labels.push(l);
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.formation.len(), self.persistence.len())
    }
}

/// Term lists of the conditional sign process and the interaction process.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub sign: ProcessSpec,
    pub interaction: ProcessSpec,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        self.sign.validate(Layer::Sign)?;
        self.interaction.validate(Layer::Interaction)
    }

    /// The signed-network model used for the Senate application: the six sign
    /// terms and four interaction terms in both blocks.
    pub fn senate() -> Self {
        let sign = vec![
            Term::EdgesPos,
            Term::HomophilyPos { attr: "party".into(), level: "rep".into() },
            Term::GwDegreePos { decay: 0.2 },
            Term::GwEsp { kind: super::EspKind::EsfPos, decay: 0.6 },
            Term::GwEsp { kind: super::EspKind::EsePos, decay: 0.6 },
            Term::GwEsp { kind: super::EspKind::EseNeg, decay: 0.6 },
        ];
        let interaction = vec![
            Term::Edges,
            Term::Homophily { attr: "party".into(), level: "rep".into() },
            Term::GwDegree { decay: 0.2 },
            Term::Gwesp { decay: 0.6 },
        ];
        Self {
            sign: ProcessSpec::symmetric(sign),
            interaction: ProcessSpec::symmetric(interaction),
        }
    }
}
