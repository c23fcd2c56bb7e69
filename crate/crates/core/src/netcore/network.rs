use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bits::BitRows;
use crate::error::{Error, Result};

/// Unordered node pair, stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dyad {
    pub i: usize,
    pub j: usize,
}

impl Dyad {
    /// Normalises the pair so that `i < j`. Panics on a self-loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert!(a != b, "self-loop ({a}, {a}) is not a dyad");
        if a < b {
            Dyad { i: a, j: b }
        } else {
            Dyad { i: b, j: a }
        }
    }

    pub fn try_new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::Structural(format!("self-loop on node {a}")));
        }
        Ok(Self::new(a, b))
    }

    /// Position of the dyad in the row-major upper triangle of an `n`-node graph.
    #[inline]
    pub fn index(self, n: usize) -> usize {
        self.i * n - self.i * (self.i + 1) / 2 + (self.j - self.i - 1)
    }
}

impl fmt::Display for Dyad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Number of unordered pairs on `n` nodes.
#[inline]
pub fn dyad_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// All dyads of an `n`-node graph in upper-triangular order.
pub fn all_dyads(n: usize) -> impl Iterator<Item = Dyad> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| Dyad { i, j }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    #[inline]
    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }
}

/// State of a dyad in a signed network: `+1`, `-1` or `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DyadState {
    Absent,
    Edge(Sign),
}

impl DyadState {
    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            DyadState::Absent => 0,
            DyadState::Edge(s) => s.as_i8(),
        }
    }

    #[inline]
    pub fn from_i8(v: i8) -> DyadState {
        Sign::from_i8(v).map_or(DyadState::Absent, DyadState::Edge)
    }

    pub fn sign(self) -> Option<Sign> {
        match self {
            DyadState::Absent => None,
            DyadState::Edge(s) => Some(s),
        }
    }
}

/// Node labels plus categorical node attributes (e.g. party).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    attributes: BTreeMap<String, Vec<String>>,
}

impl NodeSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (k, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), k).is_some() {
                return Err(Error::Structural(format!("duplicate node label {l:?}")));
            }
        }
        Ok(Self {
            labels,
            index,
            attributes: BTreeMap::new(),
        })
    }

    /// Nodes labelled `0..n`.
    pub fn anonymous(n: usize) -> Self {
        Self::new((0..n).map(|k| k.to_string())).expect("integer labels are unique")
    }

    pub fn with_attribute<S: Into<String>>(
        mut self,
        name: &str,
        values: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        self.set_attribute(name, values)?;
        Ok(self)
    }

    pub fn set_attribute<S: Into<String>>(
        &mut self,
        name: &str,
        values: impl IntoIterator<Item = S>,
    ) -> Result<()> {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.len() != self.labels.len() {
            return Err(Error::Structural(format!(
                "attribute {name:?} has {} values for {} nodes",
                values.len(),
                self.labels.len()
            )));
        }
        self.attributes.insert(name.to_string(), values);
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, k: usize) -> &str {
        &self.labels[k]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn attribute(&self, name: &str) -> Option<&[String]> {
        self.attributes.get(name).map(Vec::as_slice)
    }

    pub fn attributes(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.attributes.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

fn same_nodes(a: &Arc<NodeSet>, b: &Arc<NodeSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Undirected binary network.
#[derive(Clone, Debug)]
pub struct BinaryNetwork {
    nodes: Arc<NodeSet>,
    adj: BitRows,
    edges: usize,
}

impl PartialEq for BinaryNetwork {
    fn eq(&self, other: &Self) -> bool {
        same_nodes(&self.nodes, &other.nodes) && self.adj == other.adj
    }
}

impl BinaryNetwork {
    pub fn empty(nodes: Arc<NodeSet>) -> Self {
        let n = nodes.len();
        Self {
            nodes,
            adj: BitRows::new(n),
            edges: 0,
        }
    }

    pub fn from_dyads(nodes: Arc<NodeSet>, dyads: impl IntoIterator<Item = Dyad>) -> Result<Self> {
        let mut x = Self::empty(nodes);
        for d in dyads {
            x.check(d)?;
            x.set(d, true);
        }
        Ok(x)
    }

    fn check(&self, d: Dyad) -> Result<()> {
        if d.j >= self.n() {
            return Err(Error::Structural(format!("dyad {d} outside {} nodes", self.n())));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &Arc<NodeSet> {
        &self.nodes
    }

    #[inline]
    pub fn has(&self, d: Dyad) -> bool {
        self.adj.get(d.i, d.j)
    }

    pub fn set(&mut self, d: Dyad, on: bool) {
        let was = self.has(d);
        if was != on {
            self.adj.set_sym(d.i, d.j, on);
            if on {
                self.edges += 1;
            } else {
                self.edges -= 1;
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn edges(&self) -> impl Iterator<Item = Dyad> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.adj
                .ones(i)
                .filter(move |&j| j > i)
                .map(move |j| Dyad { i, j })
        })
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj.degree(i)
    }

    pub(crate) fn rows(&self) -> &BitRows {
        &self.adj
    }

    pub(crate) fn from_rows(nodes: Arc<NodeSet>, adj: BitRows) -> Self {
        let edges = (0..adj.len()).map(|i| adj.degree(i)).sum::<usize>() / 2;
        Self { nodes, adj, edges }
    }

    /// Edges in `self` that are not in `other`.
    pub fn minus(&self, other: &BinaryNetwork) -> Vec<Dyad> {
        self.edges().filter(|d| !other.has(*d)).collect()
    }
}

/// Signs on the active dyads of an interaction layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    n: usize,
    signs: Vec<i8>,
    defined: usize,
}

impl SignAssignment {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            signs: vec![0; super::network::dyad_count(n)],
            defined: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, d: Dyad) -> Option<Sign> {
        Sign::from_i8(self.signs[d.index(self.n)])
    }

    pub fn set(&mut self, d: Dyad, s: Sign) {
        let slot = &mut self.signs[d.index(self.n)];
        if *slot == 0 {
            self.defined += 1;
        }
        *slot = s.as_i8();
    }

    pub fn remove(&mut self, d: Dyad) {
        let slot = &mut self.signs[d.index(self.n)];
        if *slot != 0 {
            self.defined -= 1;
        }
        *slot = 0;
    }

    pub fn len(&self) -> usize {
        self.defined
    }

    pub fn is_empty(&self) -> bool {
        self.defined == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Dyad, Sign)> + '_ {
        all_dyads(self.n).filter_map(move |d| self.get(d).map(|s| (d, s)))
    }

    /// `true` when the domain equals the active dyads of `x`.
    pub fn is_defined_on(&self, x: &BinaryNetwork) -> bool {
        self.n == x.n()
            && self.defined == x.edge_count()
            && x.edges().all(|d| self.get(d).is_some())
    }

    pub fn restricted_to(&self, x: &BinaryNetwork) -> SignAssignment {
        let mut out = SignAssignment::empty(self.n);
        for d in x.edges() {
            if let Some(s) = self.get(d) {
                out.set(d, s);
            }
        }
        out
    }
}

/// Undirected signed network with dyad states `{+1, -1, 0}`.
#[derive(Clone, Debug)]
pub struct SignedNetwork {
    nodes: Arc<NodeSet>,
    state: Vec<i8>,
    pos: BitRows,
    neg: BitRows,
}

impl PartialEq for SignedNetwork {
    fn eq(&self, other: &Self) -> bool {
        same_nodes(&self.nodes, &other.nodes) && self.state == other.state
    }
}

impl SignedNetwork {
    pub fn empty(nodes: Arc<NodeSet>) -> Self {
        let n = nodes.len();
        Self {
            nodes,
            state: vec![0; dyad_count(n)],
            pos: BitRows::new(n),
            neg: BitRows::new(n),
        }
    }

    pub fn from_edges(
        nodes: Arc<NodeSet>,
        edges: impl IntoIterator<Item = (usize, usize, Sign)>,
    ) -> Result<Self> {
        let mut y = Self::empty(nodes);
        for (a, b, s) in edges {
            y.insert(a, b, s)?;
        }
        Ok(y)
    }

    /// Composes `y = x * z`. The sign assignment must be defined exactly on `x`.
    pub fn from_layers(x: &BinaryNetwork, z: &SignAssignment) -> Result<Self> {
        if !z.is_defined_on(x) {
            return Err(Error::Structural(
                "sign assignment domain differs from the interaction layer".into(),
            ));
        }
        let mut y = Self::empty(x.nodes().clone());
        for d in x.edges() {
            y.put(d, DyadState::Edge(z.get(d).expect("checked domain")));
        }
        Ok(y)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &Arc<NodeSet> {
        &self.nodes
    }

    #[inline]
    pub fn get(&self, d: Dyad) -> DyadState {
        DyadState::from_i8(self.state[d.index(self.n())])
    }

    /// Adds a new edge; fails if the dyad already carries a sign.
    pub fn insert(&mut self, a: usize, b: usize, s: Sign) -> Result<()> {
        let d = self.checked(a, b)?;
        if let DyadState::Edge(old) = self.get(d) {
            return Err(Error::Structural(format!(
                "dyad {d} already has sign {:+}; cannot also be {:+}",
                old.as_i8(),
                s.as_i8()
            )));
        }
        self.put(d, DyadState::Edge(s));
        Ok(())
    }

    /// Overwrites the dyad state.
    pub fn set(&mut self, a: usize, b: usize, state: DyadState) -> Result<()> {
        let d = self.checked(a, b)?;
        self.put(d, state);
        Ok(())
    }

    fn checked(&self, a: usize, b: usize) -> Result<Dyad> {
        let d = Dyad::try_new(a, b)?;
        if d.j >= self.n() {
            return Err(Error::Structural(format!("dyad {d} outside {} nodes", self.n())));
        }
        Ok(d)
    }

    pub(crate) fn put(&mut self, d: Dyad, state: DyadState) {
        let k = d.index(self.n());
        self.state[k] = state.as_i8();
        self.pos.set_sym(d.i, d.j, state == DyadState::Edge(Sign::Pos));
        self.neg.set_sym(d.i, d.j, state == DyadState::Edge(Sign::Neg));
    }

    pub fn edges(&self) -> impl Iterator<Item = (Dyad, Sign)> + '_ {
        let n = self.n();
        all_dyads(n).filter_map(move |d| Sign::from_i8(self.state[d.index(n)]).map(|s| (d, s)))
    }

    pub fn edge_count(&self) -> usize {
        self.state.iter().filter(|&&v| v != 0).count()
    }

    pub fn positive_count(&self) -> usize {
        self.state.iter().filter(|&&v| v == 1).count()
    }

    /// Interaction layer `x`.
    pub fn interaction(&self) -> BinaryNetwork {
        let mut adj = self.pos.clone();
        for i in 0..self.n() {
            for j in self.neg.ones(i) {
                adj.set_sym(i, j, true);
            }
        }
        BinaryNetwork::from_rows(self.nodes.clone(), adj)
    }

    /// Sign layer `z`, defined on the active dyads.
    pub fn signs(&self) -> SignAssignment {
        let mut z = SignAssignment::empty(self.n());
        for (d, s) in self.edges() {
            z.set(d, s);
        }
        z
    }

    pub(crate) fn pos_rows(&self) -> &BitRows {
        &self.pos
    }

    pub(crate) fn neg_rows(&self) -> &BitRows {
        &self.neg
    }
}

/// Ordered waves `y_0 .. y_T` over a shared node set.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkPanel {
    nodes: Arc<NodeSet>,
    waves: Vec<SignedNetwork>,
    times: Vec<String>,
}

impl NetworkPanel {
    pub fn new(waves: Vec<SignedNetwork>, times: Vec<String>) -> Result<Self> {
        if waves.len() < 2 {
            return Err(Error::Structural(format!(
                "a panel needs at least two waves, got {}",
                waves.len()
            )));
        }
        if times.len() != waves.len() {
            return Err(Error::Structural("one time label per wave is required".into()));
        }
        let nodes = waves[0].nodes().clone();
        if waves.iter().any(|w| !same_nodes(w.nodes(), &nodes)) {
            return Err(Error::Structural("waves do not share a node set".into()));
        }
        Ok(Self {
            nodes,
            waves,
            times,
        })
    }

    /// Panel with time labels `0..=T`.
    pub fn from_waves(waves: Vec<SignedNetwork>) -> Result<Self> {
        let times = (0..waves.len()).map(|t| t.to_string()).collect();
        Self::new(waves, times)
    }

    pub fn nodes(&self) -> &Arc<NodeSet> {
        &self.nodes
    }

    pub fn waves(&self) -> &[SignedNetwork] {
        &self.waves
    }

    pub fn times(&self) -> &[String] {
        &self.times
    }

    /// Number of transitions `T`.
    pub fn transitions(&self) -> usize {
        self.waves.len() - 1
    }

    /// `(y_{t-1}, y_t)` for `t = 1..=T`.
    pub fn pairs(&self) -> impl Iterator<Item = (&SignedNetwork, &SignedNetwork)> {
        self.waves.windows(2).map(|w| (&w[0], &w[1]))
    }
}

/// Interaction density and the share of active dyads that are positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Densities {
    pub interaction: f64,
    /// `None` when the network has no active dyads.
    pub positive_fraction: Option<f64>,
}

pub fn densities(y: &SignedNetwork) -> Densities {
    let total = dyad_count(y.n());
    let active = y.edge_count();
    let interaction = if total == 0 {
        0.0
    } else {
        active as f64 / total as f64
    };
    let positive_fraction = (active > 0).then(|| y.positive_count() as f64 / active as f64);
    Densities {
        interaction,
        positive_fraction,
    }
}
