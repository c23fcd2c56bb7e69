use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::Sign;

/// Which layer a term is defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Layer {
    /// Conditional sign process `z | x`.
    Sign,
    /// Marginal interaction process `x`.
    Interaction,
}

/// Edgewise shared-partner configuration on a signed layer: the sign of the
/// anchoring edge and the sign shared by both edges of each two-path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EspKind {
    /// Positive edge, positive two-paths.
    EsfPos,
    /// Positive edge, negative two-paths.
    EsePos,
    /// Negative edge, negative two-paths.
    EseNeg,
    /// Negative edge, positive two-paths.
    EsfNeg,
}

impl EspKind {
    pub const ALL: [EspKind; 4] = [EspKind::EsfPos, EspKind::EsePos, EspKind::EseNeg, EspKind::EsfNeg];

    pub fn anchor(self) -> Sign {
        match self {
            EspKind::EsfPos | EspKind::EsePos => Sign::Pos,
            EspKind::EseNeg | EspKind::EsfNeg => Sign::Neg,
        }
    }

    pub fn path(self) -> Sign {
        match self {
            EspKind::EsfPos | EspKind::EsfNeg => Sign::Pos,
            EspKind::EsePos | EspKind::EseNeg => Sign::Neg,
        }
    }

    fn name(self) -> &'static str {
        match self {
            EspKind::EsfPos => "gwesf+",
            EspKind::EsePos => "gwese+",
            EspKind::EseNeg => "gwese-",
            EspKind::EsfNeg => "gwesf-",
        }
    }
}

/// A sufficient-statistic term with its fixed constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Term {
    /// Number of positive edges.
    EdgesPos,
    /// Positive edges with both endpoints at `level` of `attr`.
    HomophilyPos { attr: String, level: String },
    /// Positive edges whose endpoints share the value of `attr`.
    NodematchPos { attr: String },
    GwDegreePos { decay: f64 },
    GwEsp { kind: EspKind, decay: f64 },
    /// Positive edges that were already positive at `t-1`.
    StablePos,
    Edges,
    Homophily { attr: String, level: String },
    Nodematch { attr: String },
    GwDegree { decay: f64 },
    Gwesp { decay: f64 },
    Gwnsp { decay: f64 },
    /// Dyads whose presence differs from `t-1`.
    Change,
}

pub const DEFAULT_ATTRIBUTE: &str = "party";

impl Term {
    pub fn layer(&self) -> Layer {
        match self {
            Term::EdgesPos
            | Term::HomophilyPos { .. }
            | Term::NodematchPos { .. }
            | Term::GwDegreePos { .. }
            | Term::GwEsp { .. }
            | Term::StablePos => Layer::Sign,
            _ => Layer::Interaction,
        }
    }

    pub fn decay(&self) -> Option<f64> {
        match *self {
            Term::GwDegreePos { decay }
            | Term::GwEsp { decay, .. }
            | Term::GwDegree { decay }
            | Term::Gwesp { decay }
            | Term::Gwnsp { decay } => Some(decay),
            _ => None,
        }
    }

    /// Terms that read the previous wave beyond its support constraint.
    pub fn is_lagged(&self) -> bool {
        matches!(self, Term::StablePos | Term::Change)
    }

    /// Base name as written in configuration files, e.g. `homophily+(rep)`.
    pub fn name(&self) -> String {
        match self {
            Term::EdgesPos => "edges+".into(),
            Term::HomophilyPos { level, .. } => format!("homophily+({level})"),
            Term::NodematchPos { .. } => "nodematch+".into(),
            Term::GwDegreePos { .. } => "gwdegree+".into(),
            Term::GwEsp { kind, .. } => kind.name().into(),
            Term::StablePos => "stable+".into(),
            Term::Edges => "edges".into(),
            Term::Homophily { level, .. } => format!("homophily({level})"),
            Term::Nodematch { .. } => "nodematch".into(),
            Term::GwDegree { .. } => "gwdegree".into(),
            Term::Gwesp { .. } => "gwesp".into(),
            Term::Gwnsp { .. } => "gwnsp".into(),
            Term::Change => "change".into(),
        }
    }

    /// Parses a configuration term name. `decay` is required exactly for the
    /// geometrically weighted terms; `attr` names the node attribute of
    /// homophily/nodematch terms (default `party`).
    pub fn parse(name: &str, decay: Option<f64>, attr: Option<&str>) -> Result<Term> {
        let attr_s = attr.unwrap_or(DEFAULT_ATTRIBUTE).to_string();
        let level_of = |prefix: &str| -> Option<String> {
            name.strip_prefix(prefix)
                .and_then(|r| r.strip_suffix(')'))
                .filter(|l| !l.is_empty())
                .map(str::to_string)
        };
        let term = if let Some(level) = level_of("homophily+(") {
            Term::HomophilyPos { attr: attr_s, level }
        } else if let Some(level) = level_of("homophily(") {
            Term::Homophily { attr: attr_s, level }
        } else {
            let need = |d: Option<f64>| {
                d.ok_or_else(|| Error::Spec(format!("term {name} requires a decay")))
            };
            match name {
                "edges+" => Term::EdgesPos,
                "nodematch+" => Term::NodematchPos { attr: attr_s },
                "gwdegree+" => Term::GwDegreePos { decay: need(decay)? },
                "gwesf+" => Term::GwEsp { kind: EspKind::EsfPos, decay: need(decay)? },
                "gwese+" => Term::GwEsp { kind: EspKind::EsePos, decay: need(decay)? },
                "gwese-" => Term::GwEsp { kind: EspKind::EseNeg, decay: need(decay)? },
                "gwesf-" => Term::GwEsp { kind: EspKind::EsfNeg, decay: need(decay)? },
                "stable+" => Term::StablePos,
                "edges" => Term::Edges,
                "nodematch" => Term::Nodematch { attr: attr_s },
                "gwdegree" => Term::GwDegree { decay: need(decay)? },
                "gwesp" => Term::Gwesp { decay: need(decay)? },
                "gwnsp" => Term::Gwnsp { decay: need(decay)? },
                "change" => Term::Change,
                _ => return Err(Error::Spec(format!("unknown term {name:?}"))),
            }
        };
        if term.decay().is_none() && decay.is_some() {
            return Err(Error::Spec(format!("term {name} takes no decay")));
        }
        let takes_attr = matches!(
            term,
            Term::HomophilyPos { .. } | Term::Homophily { .. } | Term::NodematchPos { .. } | Term::Nodematch { .. }
        );
        if !takes_attr && attr.is_some() {
            return Err(Error::Spec(format!("term {name} takes no attribute")));
        }
        term.validate()?;
        Ok(term)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.decay() {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::Spec(format!(
                    "decay of {} must be finite and nonnegative, got {d}",
                    self.name()
                )));
            }
        }
        Ok(())
    }

    /// `true` for the baseline density terms.
    pub fn is_edges(&self) -> bool {
        matches!(self, Term::EdgesPos | Term::Edges)
    }
}

impl fmt::Display for Term {
    /// Unique label including the decay, e.g. `gwesf+(0.6)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decay() {
            Some(d) => write!(f, "{}({d})", self.name()),
            None => f.write_str(&self.name()),
        }
    }
}
