//! Delimited panel files and atomic output.
//!
//! Edge files have the header `time,node_a,node_b,sign` plus an optional
//! numeric `order` column; signs are `+1`, `1` or `-1` and absent dyads are
//! omitted. A row with empty `node_a`, `node_b` and `sign` declares a time
//! slice without edges. Attribute files have the header `node,attr,value`; a
//! row with empty `attr` and `value` declares a node without attributes.
//! Comma or tab delimiters are detected from the header line.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use sternet::netcore::{densities, Dyad, DyadState, NetworkPanel, NodeSet, Sign, SignedNetwork};

use crate::error::{CliError, CliResult};

fn data_err(path: &Path, line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}:{line}: {msg}", path.display()))
}

fn reader(path: &Path) -> CliResult<csv::Reader<std::fs::File>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let header = text.lines().next().unwrap_or("");
    let delim = if header.contains('\t') { b'\t' } else { b',' };
    let file = std::fs::File::open(path)?;
    Ok(csv::ReaderBuilder::new().delimiter(delim).trim(csv::Trim::All).from_reader(file))
}

fn columns(path: &Path, rd: &mut csv::Reader<std::fs::File>, want: &[&str]) -> CliResult<HashMap<String, usize>> {
    let header = rd.headers()?.clone();
    let cols: HashMap<String, usize> = header.iter().enumerate().map(|(k, h)| (h.to_string(), k)).collect();
    for w in want {
        if !cols.contains_key(*w) {
            return Err(data_err(path, 1, format!("header lacks column {w:?}")));
        }
    }
    Ok(cols)
}

/// Per-wave summary printed after ingestion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaveReport {
    pub time: String,
    pub edges: usize,
    pub density: f64,
    pub positive_fraction: Option<f64>,
}

pub fn report(panel: &NetworkPanel) -> Vec<WaveReport> {
    panel
        .waves()
        .iter()
        .zip(panel.times())
        .map(|(w, t)| {
            let d = densities(w);
            WaveReport {
                time: t.clone(),
                edges: w.edge_count(),
                density: d.interaction,
                positive_fraction: d.positive_fraction,
            }
        })
        .collect()
}

fn read_nodes(path: &Path) -> CliResult<NodeSet> {
    let mut rd = reader(path)?;
    let cols = columns(path, &mut rd, &["node", "attr", "value"])?;
    let mut labels: Vec<String> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut values: BTreeMap<String, HashMap<usize, String>> = BTreeMap::new();
    let mut where_set: HashMap<(usize, String), u64> = HashMap::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let node = &rec[cols["node"]];
        if node.is_empty() {
            return Err(data_err(path, line, "empty node label"));
        }
        let k = *seen.entry(node.to_string()).or_insert_with(|| {
            labels.push(node.to_string());
            labels.len() - 1
        });
        let (attr, value) = (&rec[cols["attr"]], &rec[cols["value"]]);
        match (attr.is_empty(), value.is_empty()) {
            (true, true) => continue,
            (false, false) => {}
            _ => return Err(data_err(path, line, "attr and value must both be set or both be empty")),
        }
        if let Some(first) = where_set.insert((k, attr.to_string()), line) {
            return Err(data_err(path, line, format!("attribute {attr:?} of node {node:?} already set on line {first}")));
        }
        values.entry(attr.to_string()).or_default().insert(k, value.to_string());
    }
    let mut nodes = NodeSet::new(labels.clone())?;
    for (attr, by_node) in values {
        let mut col = Vec::with_capacity(labels.len());
        for (k, l) in labels.iter().enumerate() {
            match by_node.get(&k) {
                Some(v) => col.push(v.clone()),
                None => return Err(CliError::Data(format!("{}: node {l:?} has no value for attribute {attr:?}", path.display()))),
            }
        }
        nodes.set_attribute(&attr, col)?;
    }
    Ok(nodes)
}

struct EdgeRow {
    line: u64,
    a: String,
    b: String,
    sign: Sign,
}

fn parse_sign(s: &str) -> Option<Sign> {
    match s {
        "+1" | "1" => Some(Sign::Pos),
        "-1" => Some(Sign::Neg),
        _ => None,
    }
}

/// Reads a panel. Nodes come from the attribute file when given, otherwise
/// from the edge file in order of first appearance.
pub fn read_panel(edges: &Path, attributes: Option<&Path>) -> CliResult<NetworkPanel> {
    let declared = attributes.map(read_nodes).transpose()?;
    let mut rd = reader(edges)?;
    let cols = columns(edges, &mut rd, &["time", "node_a", "node_b", "sign"])?;
    let order_col = cols.get("order").copied();
    // time label -> (order, rows)
    let mut slices: BTreeMap<String, (Option<(f64, u64)>, Vec<EdgeRow>)> = BTreeMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut known: HashSet<String> = HashSet::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let time = rec[cols["time"]].to_string();
        if time.is_empty() {
            return Err(data_err(edges, line, "empty time label"));
        }
        let slice = slices.entry(time.clone()).or_insert((None, Vec::new()));
        if let Some(c) = order_col {
            let v: f64 = rec[c].parse().map_err(|_| data_err(edges, line, format!("order {:?} is not a number", &rec[c])))?;
            match slice.0 {
                None => slice.0 = Some((v, line)),
                Some((o, first)) if o != v => {
                    return Err(data_err(edges, line, format!("time {time:?} has order {v}, but {o} on line {first}")));
                }
                _ => {}
            }
        }
        let (a, b, s) = (&rec[cols["node_a"]], &rec[cols["node_b"]], &rec[cols["sign"]]);
        if a.is_empty() && b.is_empty() && s.is_empty() {
            continue;
        }
        let sign = parse_sign(s).ok_or_else(|| data_err(edges, line, format!("sign {s:?} is not +1 or -1")))?;
        for n in [a, b] {
            match &declared {
                Some(nodes) if nodes.index_of(n).is_none() => {
                    return Err(data_err(edges, line, format!("unknown node {n:?}")));
                }
                None if !known.contains(n) => {
                    if n.is_empty() {
                        return Err(data_err(edges, line, "empty node label"));
                    }
                    known.insert(n.to_string());
                    labels.push(n.to_string());
                }
                _ => {}
            }
        }
        if a == b {
            return Err(data_err(edges, line, format!("self-loop on node {a:?}")));
        }
        slice.1.push(EdgeRow { line, a: a.to_string(), b: b.to_string(), sign });
    }
    let nodes = Arc::new(match declared {
        Some(n) => n,
        None => NodeSet::new(labels)?,
    });
    if slices.len() < 2 {
        return Err(CliError::Data(format!(
            "{}: {} time slice(s); a panel needs at least two",
            edges.display(),
            slices.len()
        )));
    }
    let mut ordered: Vec<(String, Option<(f64, u64)>, Vec<EdgeRow>)> =
        slices.into_iter().map(|(t, (o, rows))| (t, o, rows)).collect();
    if order_col.is_some() {
        ordered.sort_by(|x, y| x.1.unwrap().0.total_cmp(&y.1.unwrap().0));
        for w in ordered.windows(2) {
            if w[0].1.unwrap().0 == w[1].1.unwrap().0 {
                return Err(data_err(edges, w[1].1.unwrap().1, format!("times {:?} and {:?} share an order value", w[0].0, w[1].0)));
            }
        }
    }
    let mut waves = Vec::with_capacity(ordered.len());
    let mut times = Vec::with_capacity(ordered.len());
    for (time, _, rows) in ordered {
        let mut y = SignedNetwork::empty(nodes.clone());
        let mut first_line: HashMap<Dyad, u64> = HashMap::new();
        for r in rows {
            let (i, j) = (nodes.index_of(&r.a).unwrap(), nodes.index_of(&r.b).unwrap());
            let d = Dyad::new(i, j);
            if let Some(prev) = first_line.insert(d, r.line) {
                return Err(data_err(edges, r.line, format!("duplicate dyad ({}, {}) at time {time:?}, first on line {prev}", r.a, r.b)));
            }
            y.set(i, j, DyadState::Edge(r.sign))?;
        }
        waves.push(y);
        times.push(time);
    }
    Ok(NetworkPanel::new(waves, times)?)
}

fn sign_text(s: Sign) -> &'static str {
    match s {
        Sign::Pos => "+1",
        Sign::Neg => "-1",
    }
}

pub fn edges_csv(panel: &NetworkPanel) -> CliResult<Vec<u8>> {
    let nodes = panel.nodes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["time", "node_a", "node_b", "sign", "order"])?;
    for (k, (y, t)) in panel.waves().iter().zip(panel.times()).enumerate() {
        let order = k.to_string();
        if y.edge_count() == 0 {
            w.write_record([t.as_str(), "", "", "", &order])?;
        }
        for (d, s) in y.edges() {
            w.write_record([t.as_str(), nodes.label(d.i), nodes.label(d.j), sign_text(s), &order])?;
        }
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

pub fn attributes_csv(nodes: &NodeSet) -> CliResult<Vec<u8>> {
    let attrs: Vec<(&str, &[String])> = nodes.attributes().collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["node", "attr", "value"])?;
    for (k, label) in nodes.labels().iter().enumerate() {
        if attrs.is_empty() {
            w.write_record([label.as_str(), "", ""])?;
        }
        for (name, values) in &attrs {
            w.write_record([label.as_str(), name, &values[k]])?;
        }
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

/// Writes `edges.csv` and `attributes.csv` into `dir`.
pub fn write_panel(panel: &NetworkPanel, dir: &Path) -> CliResult<()> {
    write_atomic(&dir.join("edges.csv"), &edges_csv(panel)?)?;
    write_atomic(&dir.join("attributes.csv"), &attributes_csv(panel.nodes())?)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Data(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Serialises with `f` into memory, then writes atomically.
pub fn write_with(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> sternet::Result<()>) -> CliResult<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    write_atomic(path, &buf)
}
