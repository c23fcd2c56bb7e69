use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::MCMCConfig;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    F,
    P,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::F => "F",
            Block::P => "P",
        })
    }
}

impl std::str::FromStr for Block {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" => Ok(Block::F),
            "P" => Ok(Block::P),
            _ => Err(Error::Data(format!("unknown block {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    Sign,
    Interaction,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamLabel {
    pub block: Block,
    pub term: String,
}

impl fmt::Display for ParamLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.block, self.term)
    }
}

/// Retained posterior draws, one row per iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub kind: ChainKind,
    pub labels: Vec<ParamLabel>,
    /// Absolute iteration index of each retained row.
    pub iterations: Vec<usize>,
    /// Row-major, `iterations.len() × labels.len()`.
    pub draws: Vec<f64>,
    pub acceptance_rate: f64,
    pub seed: u64,
    pub config: MCMCConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainFormat {
    /// `iteration,block,term,value`
    Long,
    /// `iteration,<block.term>...`
    Wide,
}

/// Everything about a chain except its draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainMeta {
    pub kind: ChainKind,
    pub labels: Vec<ParamLabel>,
    pub retained: usize,
    pub acceptance_rate: f64,
    pub seed: u64,
    pub config: MCMCConfig,
}

impl Chain {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let d = self.dim();
        &self.draws[k * d..(k + 1) * d]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.len()).map(|k| self.draws[k * self.dim() + j]).collect()
    }

    pub fn index_of(&self, block: Block, term: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.block == block && l.term == term)
    }

    /// Formation and persistence parts of row `k`.
    pub fn split_row(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        let row = self.row(k);
        let nf = self.labels.iter().filter(|l| l.block == Block::F).count();
        (row[..nf].to_vec(), row[nf..].to_vec())
    }

    pub fn meta(&self) -> ChainMeta {
        ChainMeta {
            kind: self.kind,
            labels: self.labels.clone(),
            retained: self.len(),
            acceptance_rate: self.acceptance_rate,
            seed: self.seed,
            config: self.config.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W, format: ChainFormat) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        match format {
            ChainFormat::Long => {
                out.write_record(["iteration", "block", "term", "value"])?;
                for (k, it) in self.iterations.iter().enumerate() {
                    for (l, v) in self.labels.iter().zip(self.row(k)) {
                        out.write_record([it.to_string(), l.block.to_string(), l.term.clone(), v.to_string()])?;
                    }
                }
            }
            ChainFormat::Wide => {
                let mut header = vec!["iteration".to_string()];
                header.extend(self.labels.iter().map(|l| l.to_string()));
                out.write_record(&header)?;
                for (k, it) in self.iterations.iter().enumerate() {
                    let mut rec = vec![it.to_string()];
                    rec.extend(self.row(k).iter().map(|v| v.to_string()));
                    out.write_record(&rec)?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_meta<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.meta())?;
        Ok(())
    }

    /// Reads draws written by [`Chain::write_csv`] in either format and
    /// attaches the metadata.
    pub fn read_csv<R: Read>(r: R, meta: ChainMeta) -> Result<Chain> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.clone();
        let d = meta.labels.len();
        let mut iterations = Vec::new();
        let mut draws = Vec::new();
        let bad = |m: String| Error::Data(format!("chain file: {m}"));
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
        if header.iter().collect::<Vec<_>>() == ["iteration", "block", "term", "value"] {
            let mut row = Vec::with_capacity(d);
            for rec in rd.records() {
                let rec = rec?;
                let it: usize = rec[0].parse().map_err(|_| bad(format!("bad iteration {:?}", &rec[0])))?;
                let label = ParamLabel { block: rec[1].parse()?, term: rec[2].to_string() };
                if meta.labels.get(row.len()) != Some(&label) {
                    return Err(bad(format!("unexpected parameter {label} at iteration {it}")));
                }
                row.push(num(&rec[3])?);
                if row.len() == d {
                    iterations.push(it);
                    draws.append(&mut row);
                }
            }
            if !row.is_empty() {
                return Err(bad("truncated final iteration".into()));
            }
        } else {
            let want: Vec<String> = std::iter::once("iteration".to_string())
                .chain(meta.labels.iter().map(|l| l.to_string()))
                .collect();
            if header.iter().collect::<Vec<_>>() != want {
                return Err(bad("header does not match the metadata labels".into()));
            }
            for rec in rd.records() {
                let rec = rec?;
                iterations.push(rec[0].parse().map_err(|_| bad(format!("bad iteration {:?}", &rec[0])))?);
                for v in rec.iter().skip(1) {
                    draws.push(num(v)?);
                }
            }
        }
        if iterations.len() != meta.retained {
            return Err(bad(format!("{} rows, metadata says {}", iterations.len(), meta.retained)));
        }
        Ok(Chain {
            kind: meta.kind,
            labels: meta.labels,
            iterations,
            draws,
            acceptance_rate: meta.acceptance_rate,
            seed: meta.seed,
            config: meta.config,
        })
    }
}
