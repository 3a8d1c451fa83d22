//! Louvain modularity maximization and seeded consensus clustering.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::seeding::{derive_seed, rng, Rng};

/// Undirected weighted graph with self-loop weights, as produced by
/// community aggregation.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl WeightedGraph {
    pub fn from_graph(g: &Graph) -> Self {
        let adjacency = (0..g.n())
            .map(|u| g.neighbors(u).iter().map(|&v| (v, 1.0)).collect())
            .collect();
        Self {
            adjacency,
            self_loops: vec![0.0; g.n()],
        }
    }

    /// Builds from canonical `(u, v, w)` triples with `u < v`.
    pub fn from_weighted_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        Self {
            adjacency,
            self_loops: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    fn strength(&self, u: usize) -> f64 {
        self.adjacency[u].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loops[u]
    }

    fn total_weight(&self) -> f64 {
        (0..self.n()).map(|u| self.strength(u)).sum()
    }

    fn aggregate(&self, labels: &[usize], k: usize) -> Self {
        let mut self_loops = vec![0.0; k];
        let mut merged: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for u in 0..self.n() {
            let cu = labels[u];
            self_loops[cu] += self.self_loops[u];
            for &(v, w) in &self.adjacency[u] {
                let cv = labels[v];
                if cu == cv {
                    // each internal edge is seen from both ends
                    self_loops[cu] += w / 2.0;
                } else {
                    *merged[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        Self {
            adjacency: merged.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }
}

/// One pass of local moves. Returns the labels and whether any node moved.
fn local_moves(g: &WeightedGraph, rng: &mut Rng) -> (Vec<usize>, bool) {
    let n = g.n();
    let two_m = g.total_weight();
    let strength: Vec<f64> = (0..n).map(|u| g.strength(u)).collect();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut totals = strength.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut links = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any_move = false;
    loop {
        let mut moved = false;
        for &u in &order {
            let own = labels[u];
            for &(v, w) in &g.adjacency[u] {
                let c = labels[v];
                if !touched.contains(&c) {
                    touched.push(c);
                }
                links[c] += w;
            }
            totals[own] -= strength[u];
            let gain = |c: usize, links: &[f64]| links[c] - totals[c] * strength[u] / two_m;
            let mut best = own;
            let mut best_gain = gain(own, &links);
            for &c in &touched {
                let candidate = gain(c, &links);
                if candidate > best_gain + 1e-12 {
                    best = c;
                    best_gain = candidate;
                }
            }
            totals[best] += strength[u];
            if best != own {
                labels[u] = best;
                moved = true;
                any_move = true;
            }
            for &c in &touched {
                links[c] = 0.0;
            }
            links[own] = 0.0;
            touched.clear();
        }
        if !moved {
            break;
        }
    }
    (labels, any_move)
}

fn dense_labels(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let dense = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (dense, map.len())
}

/// Louvain on a weighted graph; labels are dense but not canonicalized.
pub fn louvain_weighted(g: &WeightedGraph, rng: &mut Rng) -> Vec<usize> {
    let mut membership: Vec<usize> = (0..g.n()).collect();
    let mut current = g.clone();
    loop {
        let (labels, moved) = local_moves(&current, rng);
        if !moved {
            break;
        }
        let (dense, k) = dense_labels(&labels);
        for label in membership.iter_mut() {
            *label = dense[*label];
        }
        current = current.aggregate(&dense, k);
    }
    membership
}

/// Splits every community into its connected pieces and labels
/// communities by their smallest member.
fn split_and_canonicalize(adjacent: impl Fn(usize) -> Vec<usize>, labels: &[usize]) -> Partition {
    let n = labels.len();
    let mut out = vec![usize::MAX; n];
    for s in 0..n {
        if out[s] != usize::MAX {
            continue;
        }
        out[s] = s;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for v in adjacent(u) {
                if out[v] == usize::MAX && labels[v] == labels[s] {
                    out[v] = s;
                    stack.push(v);
                }
            }
        }
    }
    Partition::new(out)
}

/// Louvain on an unweighted graph. Communities are returned connected and
/// numbered in order of their smallest node.
pub fn louvain(g: &Graph, rng: &mut Rng) -> Result<Partition> {
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    let labels = louvain_weighted(&WeightedGraph::from_graph(g), rng);
    Ok(split_and_canonicalize(|u| g.neighbors(u).to_vec(), &labels))
}

/// Generator for consensus run `run` under `master_seed`.
pub fn consensus_run_rng(master_seed: u64, run: usize) -> Rng {
    rng(derive_seed(&["louvain-run", &master_seed.to_string(), &run.to_string()]))
}

/// Consensus of `runs` seeded Louvain runs.
///
/// Co-assignment frequencies are tracked on graph edges only. Edges with
/// agreement at least `tau` define the agreement graph whose connected
/// components are the candidate communities; a component whose mean
/// agreement over its internal graph edges falls below `tau` is
/// re-clustered once with Louvain on the agreement weights.
pub fn consensus_louvain(g: &Graph, runs: usize, tau: f64, master_seed: u64) -> Result<Partition> {
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    if runs == 0 {
        return Err(Error::InvalidParam("consensus needs at least one run".into()));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidParam(format!("tau {tau} outside (0, 1]")));
    }
    let partitions: Vec<Partition> = (0..runs)
        .into_par_iter()
        .map(|run| louvain(g, &mut consensus_run_rng(master_seed, run)))
        .collect::<Result<_>>()?;
    let agreement: Vec<f64> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            partitions.iter().filter(|p| p.label(u) == p.label(v)).count() as f64 / runs as f64
        })
        .collect();

    let n = g.n();
    let mut strong: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (&(u, v), &a) in g.edges().iter().zip(&agreement) {
        if a >= tau {
            strong[u].push(v);
            strong[v].push(u);
        }
    }
    let components = split_and_canonicalize(|u| strong[u].clone(), &vec![0; n]);

    let k = components.k();
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (&(u, v), &a) in g.edges().iter().zip(&agreement) {
        if components.label(u) == components.label(v) {
            sums[components.label(u)] += a;
            counts[components.label(u)] += 1;
        }
    }
    let mut labels: Vec<usize> = components.labels().to_vec();
    let mut next_label = k;
    for c in 0..k {
        if counts[c] == 0 || sums[c] / counts[c] as f64 >= tau {
            continue;
        }
        let members = components.members(c);
        let local: std::collections::HashMap<usize, usize> =
            members.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let weighted: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .zip(&agreement)
            .filter(|(&(u, v), &a)| a > 0.0 && local.contains_key(&u) && local.contains_key(&v))
            .map(|(&(u, v), &a)| (local[&u], local[&v], a))
            .collect();
        let mut r = rng(derive_seed(&["consensus-recluster", &master_seed.to_string(), &c.to_string()]));
        let sub = louvain_weighted(&WeightedGraph::from_weighted_edges(members.len(), &weighted), &mut r);
        for (i, &u) in members.iter().enumerate() {
            labels[u] = next_label + sub[i];
        }
        next_label += members.len();
    }
    Ok(split_and_canonicalize(|u| g.neighbors(u).to_vec(), &labels))
}
