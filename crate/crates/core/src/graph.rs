//! Weighted undirected graphs and the matrices derived from them.
//!
//! A [`Graph`] stores its edges sorted by `(i, j)` with `i < j`, so that every
//! matrix assembled from it is built in the same summation order. Isolated
//! nodes are legal here; operations that divide by degrees reject them.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single undirected edge with `i < j` and a positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Weighted undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a validated graph. Each edge may be given in either orientation;
    /// it is stored as `(min, max)`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (a, b, weight) in edges {
            for index in [a, b] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidWeight { i, j, weight });
            }
            if map.insert((i, j), weight).is_some() {
                return Err(Error::DuplicateEdge(i, j));
            }
        }
        let edges = map.into_iter().map(|((i, j), weight)| Edge { i, j, weight }).collect();
        Ok(Self { n, edges })
    }

    /// Unit-weight graph from index pairs.
    pub fn unweighted(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, pairs.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges sorted by `(i, j)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Same topology with new weights, given in edge order.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::LengthMismatch(weights.len(), self.edges.len()));
        }
        Self::new(self.n, self.edges.iter().zip(weights).map(|(e, &w)| (e.i, e.j, w)))
    }

    /// Symmetric adjacency matrix with zero diagonal.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.i, e.j)] = e.weight;
            a[(e.j, e.i)] = e.weight;
        }
        a
    }

    /// Weighted degrees `d_i = Σ_j A_ij`, summed as row sums of the adjacency.
    pub fn degrees(&self) -> Vec<f64> {
        let a = self.adjacency();
        (0..self.n).map(|i| a.row(i).iter().sum()).collect()
    }

    /// Graph Laplacian `L = D − A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.adjacency();
        for (i, d) in self.degrees().into_iter().enumerate() {
            l[(i, i)] = d;
        }
        l
    }

    /// Total edge weight `m = ½ Σ_ij A_ij`.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Index of the first isolated node, if any.
    pub fn first_isolated(&self) -> Option<usize> {
        let mut seen = vec![false; self.n];
        for e in &self.edges {
            seen[e.i] = true;
            seen[e.j] = true;
        }
        seen.iter().position(|s| !s)
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.neighbours();
        let mut label = vec![usize::MAX; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![start];
            label[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = id;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    /// Subgraph induced by `nodes` (relabelled `0..nodes.len()` in the given order).
    pub fn induced(&self, nodes: &[usize]) -> Result<Self> {
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in nodes.iter().enumerate() {
            if old >= self.n {
                return Err(Error::IndexOutOfRange { index: old, n: self.n });
            }
            index[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.i] != usize::MAX && index[e.j] != usize::MAX)
            .map(|e| (index[e.i], index[e.j], e.weight));
        Self::new(nodes.len(), edges)
    }

    /// Largest connected component together with the map from new to old
    /// indices. Ties go to the component with the smallest minimum index.
    pub fn giant_component(&self) -> Result<(Graph, Vec<usize>)> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        let comps = self.components();
        // components are ordered by smallest member, so max_by keeps the first on ties
        let best = comps
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
            .map(|(_, c)| c.clone())
            .expect("non-empty graph has a component");
        Ok((self.induced(&best)?, best))
    }
}

/// A graph with optional node names.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Option<Vec<String>>,
}

impl LabeledGraph {
    pub fn new(graph: Graph, labels: Option<Vec<String>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != graph.n() {
                return Err(Error::LengthMismatch(l.len(), graph.n()));
            }
        }
        Ok(Self { graph, labels })
    }
}

/// On-disk graph formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    EdgeList,
}

impl GraphFormat {
    /// Guess from the file extension; anything but `.json` is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => GraphFormat::Json,
            _ => GraphFormat::EdgeList,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeRow {
    Weighted(usize, usize, f64),
    Unit(usize, usize),
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<EdgeRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<LabeledGraph> {
    let text = fs::read_to_string(path)?;
    match format {
        GraphFormat::Json => parse_graph_json(&text),
        GraphFormat::EdgeList => parse_edge_list(&text),
    }
}

/// Parses `{"n": int, "edges": [[i, j, w], ...]}`; `w` defaults to 1 and
/// `i < j` is required.
pub fn parse_graph_json(text: &str) -> Result<LabeledGraph> {
    let raw: GraphJson = serde_json::from_str(text)?;
    let mut edges = Vec::with_capacity(raw.edges.len());
    for row in raw.edges {
        let (i, j, w) = match row {
            EdgeRow::Weighted(i, j, w) => (i, j, w),
            EdgeRow::Unit(i, j) => (i, j, 1.0),
        };
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if i > j {
            return Err(Error::InvalidParameter(format!("edge ({i}, {j}) must satisfy i < j")));
        }
        edges.push((i, j, w));
    }
    LabeledGraph::new(Graph::new(raw.n, edges)?, raw.labels)
}

pub fn graph_to_json(g: &LabeledGraph) -> String {
    let raw = GraphJson {
        n: g.graph.n(),
        edges: g.graph.edges().iter().map(|e| EdgeRow::Weighted(e.i, e.j, e.weight)).collect(),
        labels: g.labels.clone(),
    };
    serde_json::to_string(&raw).expect("graph serialization cannot fail")
}

/// Parses one `i j [w]` per line with `#` comments. If any endpoint is not a
/// non-negative integer, all endpoints are treated as names and indexed in
/// order of first appearance.
pub fn parse_edge_list(text: &str) -> Result<LabeledGraph> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected `i j [w]`, got {} fields", fields.len()),
            });
        }
        let w = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno + 1,
                message: format!("bad weight `{s}`: {e}"),
            })?,
            None => 1.0,
        };
        rows.push((fields[0].to_string(), fields[1].to_string(), w));
    }

    let numeric = rows
        .iter()
        .all(|(a, b, _)| a.parse::<usize>().is_ok() && b.parse::<usize>().is_ok());
    if numeric {
        let edges: Vec<(usize, usize, f64)> = rows
            .iter()
            .map(|(a, b, w)| (a.parse().unwrap(), b.parse().unwrap(), *w))
            .collect();
        let n = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        return LabeledGraph::new(Graph::new(n, edges)?, None);
    }

    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |s: &str| -> usize {
        *index.entry(s.to_string()).or_insert_with(|| {
            names.push(s.to_string());
            names.len() - 1
        })
    };
    let edges: Vec<(usize, usize, f64)> =
        rows.iter().map(|(a, b, w)| (intern(a), intern(b), *w)).collect();
    let n = names.len();
    LabeledGraph::new(Graph::new(n, edges)?, Some(names))
}
