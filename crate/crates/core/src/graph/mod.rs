//! Graph, partition and node-feature representations plus the structural
//! primitives shared by every other module.
//!
//! Graphs are undirected and simple. Node ids are dense `0..n`. Edges are
//! stored canonically as `(min, max)` pairs sorted lexicographically, so
//! iteration order is deterministic everywhere.

mod io;

use std::collections::{BTreeMap, VecDeque};

use ndarray::Array2;

use crate::error::{Error, Result};

pub use io::{
    load_edge_list, load_features, load_named_edge_list, load_partition, parse_edge_list,
    save_edge_list, save_features, save_id_map, save_partition, EdgeListLoad,
};

pub type Edge = (usize, usize);

/// Canonical `(min, max)` ordering of an unordered pair.
#[inline]
pub fn canonical(u: usize, v: usize) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Strict constructor: rejects self-loops, duplicates and out-of-range ids.
    pub fn new(n: usize, edge_list: &[Edge]) -> Result<Self> {
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            edges.push(canonical(u, v));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unique(n, edges))
    }

    /// Lenient constructor used on ingestion: symmetrizes, collapses duplicate
    /// pairs and drops self-loops. Returns the graph and the number of input
    /// pairs that were discarded.
    pub fn from_edges_lenient(n: usize, edge_list: &[Edge]) -> Result<(Self, usize)> {
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut dropped = 0;
        for &(u, v) in edge_list {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                dropped += 1;
                continue;
            }
            edges.push(canonical(u, v));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        dropped += before - edges.len();
        Ok((Self::from_sorted_unique(n, edges), dropped))
    }

    /// `edges` must already be canonical, sorted and duplicate-free.
    pub(crate) fn from_sorted_unique(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            n,
            edges,
            adjacency,
        }
    }

    /// Builds from an arbitrary set of canonical pairs (sorted internally).
    pub(crate) fn from_canonical_set(n: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Self::from_sorted_unique(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Induced subgraph on `nodes` (sorted, unique). New id `i` maps to `nodes[i]`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &u) in nodes.iter().enumerate() {
            index[u] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| canonical(index[u], index[v]))
            .collect();
        Graph::from_canonical_set(nodes.len(), edges)
    }
}

/// Edges with both endpoints inside `community`.
pub fn intra_edges(g: &Graph, community: &[usize]) -> Result<Vec<Edge>> {
    let mask = membership_mask(g.n(), community)?;
    Ok(g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| mask[u] && mask[v])
        .collect())
}

pub(crate) fn membership_mask(n: usize, nodes: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &u in nodes {
        if u >= n {
            return Err(Error::NodeOutOfRange { node: u, n });
        }
        mask[u] = true;
    }
    Ok(mask)
}

/// Largest connected component and the map from new ids to original ids.
/// Ties go to the component holding the smallest original id.
pub fn largest_connected_component(g: &Graph) -> (Graph, Vec<usize>) {
    let components = g.connected_components();
    // components are ordered by smallest member, so the first maximum wins ties
    let best = components
        .iter()
        .enumerate()
        .fold(None::<(usize, usize)>, |acc, (i, c)| match acc {
            Some((_, len)) if len >= c.len() => acc,
            _ => Some((i, c.len())),
        });
    match best {
        Some((i, _)) => {
            let nodes = components[i].clone();
            (g.induced_subgraph(&nodes), nodes)
        }
        None => (g.clone(), Vec::new()),
    }
}

/// Contracts every community to a single node; two community nodes are
/// adjacent iff at least one edge crosses between them.
pub fn quotient_graph(g: &Graph, p: &Partition) -> Graph {
    let labels = p.labels();
    let edges = g
        .edges()
        .iter()
        .filter(|&&(u, v)| labels[u] != labels[v])
        .map(|&(u, v)| canonical(labels[u], labels[v]))
        .collect();
    Graph::from_canonical_set(p.k(), edges)
}

/// Hard community assignment with labels canonicalized to `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Canonicalizes by dense rank of the distinct input labels, so labels
    /// that are already contiguous keep their ids.
    pub fn new(raw: Vec<usize>) -> Self {
        let mut distinct: Vec<usize> = raw.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let rank: BTreeMap<usize, usize> = distinct
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect();
        let labels = raw.iter().map(|l| rank[l]).collect();
        Self {
            labels,
            k: distinct.len(),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> usize {
        self.labels[u]
    }

    /// Sorted member lists, indexed by label.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (u, &l) in self.labels.iter().enumerate() {
            out[l].push(u);
        }
        out
    }

    pub fn members(&self, label: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == label)
            .map(|(u, _)| u)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// One-hot `n × k` membership matrix.
    pub fn membership_matrix(&self) -> Array2<f64> {
        let mut c = Array2::zeros((self.labels.len(), self.k));
        for (u, &l) in self.labels.iter().enumerate() {
            c[[u, l]] = 1.0;
        }
        c
    }

    pub(crate) fn check_covers(&self, n: usize) -> Result<()> {
        if self.labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.labels.len(),
            });
        }
        Ok(())
    }
}

/// `n × d` real feature matrix, one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFeatures {
    data: Array2<f64>,
}

impl NodeFeatures {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParam(format!("non-finite feature value {bad}")));
        }
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut data = Array2::zeros((rows.len(), d));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                data[[i, j]] = x;
            }
        }
        Self::new(data)
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn d(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn row(&self, u: usize) -> ndarray::ArrayView1<'_, f64> {
        self.data.row(u)
    }

    pub(crate) fn set_row(&mut self, u: usize, values: ndarray::ArrayView1<'_, f64>) {
        self.data.row_mut(u).assign(&values);
    }

    pub fn check_rows(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.n(),
            });
        }
        Ok(())
    }
}
