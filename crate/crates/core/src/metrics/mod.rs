//! Evaluation quantities: modularity, concealment scores, partition
//! similarity, feature separability, community descriptors and reference
//! clusterings.

mod centrality;
mod louvain;

use std::collections::{BTreeMap, HashMap};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{membership_mask, quotient_graph, Graph, NodeFeatures, Partition};
use crate::perturb::community_centroids;

pub use centrality::{betweenness, closeness};
pub use louvain::{consensus_louvain, consensus_run_rng, louvain, louvain_weighted, WeightedGraph};

/// Dense modularity matrix `B = A - k̂k̂ᵀ/2m`.
#[derive(Debug, Clone)]
pub struct ModularityContext {
    pub b: Array2<f64>,
    pub m: usize,
    pub degrees: Vec<usize>,
}

impl ModularityContext {
    pub fn new(g: &Graph) -> Result<Self> {
        if g.m() == 0 {
            return Err(Error::EmptyGraph);
        }
        let degrees = g.degrees();
        let two_m = 2.0 * g.m() as f64;
        let mut b = Array2::from_shape_fn((g.n(), g.n()), |(i, j)| {
            -((degrees[i] * degrees[j]) as f64) / two_m
        });
        for &(u, v) in g.edges() {
            b[[u, v]] += 1.0;
            b[[v, u]] += 1.0;
        }
        Ok(Self {
            b,
            m: g.m(),
            degrees,
        })
    }
}

/// Newman modularity over ordered pairs, null-model diagonal included.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    p.check_covers(g.n())?;
    let two_m = 2.0 * g.m() as f64;
    let internal = g
        .edges()
        .iter()
        .filter(|&&(u, v)| p.label(u) == p.label(v))
        .count() as f64;
    let mut degree_sums = vec![0.0; p.k()];
    for u in 0..g.n() {
        degree_sums[p.label(u)] += g.degree(u) as f64;
    }
    let expected: f64 = degree_sums.iter().map(|s| s * s).sum::<f64>() / two_m;
    Ok((2.0 * internal - expected) / two_m)
}

/// `(1/2m) Tr(CᵀBC)` for a one-hot or row-stochastic membership matrix.
pub fn spectral_modularity(g: &Graph, c: &Array2<f64>) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    if c.nrows() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: c.nrows(),
        });
    }
    let two_m = 2.0 * g.m() as f64;
    let mut trace_ac = 0.0;
    for &(u, v) in g.edges() {
        trace_ac += 2.0 * c.row(u).dot(&c.row(v));
    }
    let degrees = Array2::from_shape_fn((1, g.n()), |(_, u)| g.degree(u) as f64);
    let kc = degrees.dot(c);
    let null = kc.iter().map(|v| v * v).sum::<f64>() / two_m;
    Ok((trace_ac - null) / two_m)
}

fn check_target(target: &[usize]) -> Result<()> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    Ok(())
}

/// Overlap `|C_i ∩ target|` for every detected community touching the target.
fn overlaps(target: &[usize], detected: &Partition) -> Result<HashMap<usize, usize>> {
    let mut counts = HashMap::new();
    for &u in target {
        if u >= detected.len() {
            return Err(Error::NodeOutOfRange {
                node: u,
                n: detected.len(),
            });
        }
        *counts.entry(detected.label(u)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Spread of the target over detected communities.
pub fn m1(target: &[usize], detected: &Partition) -> Result<f64> {
    check_target(target)?;
    let counts = overlaps(target, detected)?;
    let touched = counts.len() as f64;
    let largest = *counts.values().max().expect("target non-empty") as f64;
    let denom = (detected.k().saturating_sub(1)).max(1) as f64 * largest;
    Ok((touched - 1.0) / denom)
}

/// Share of non-target nodes that sit in communities containing target nodes.
pub fn m2(target: &[usize], detected: &Partition, n: usize) -> Result<f64> {
    check_target(target)?;
    detected.check_covers(n)?;
    let counts = overlaps(target, detected)?;
    let sizes = detected.sizes();
    let outsiders: usize = counts.iter().map(|(&c, &inside)| sizes[c] - inside).sum();
    let target_size = membership_mask(n, target)?.iter().filter(|&&b| b).count();
    Ok(outsiders as f64 / (n.saturating_sub(target_size)).max(1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcsParams {
    pub alpha: f64,
}

impl Default for EcsParams {
    fn default() -> Self {
        Self { alpha: 0.9 }
    }
}

/// Element-centric similarity of two hard partitions.
///
/// Node `u`'s affinity vector puts `alpha / |c(u)|` on every member of its
/// cluster and an extra `1 - alpha` on `u` itself. Per-node similarity is
/// `1 - L1 / (2 alpha)`; the result is the mean over nodes. For clusters
/// `A ∋ u` and `B ∋ u` with overlap `I` the L1 distance has the closed form
/// `alpha (I |1/|A| - 1/|B|| + (|A|-I)/|A| + (|B|-I)/|B|)`, so the whole
/// computation runs over the contingency table.
pub fn element_centric_similarity(a: &Partition, b: &Partition, params: EcsParams) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(a.len(), b.len()));
    }
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(Error::InvalidParam(format!("ECS alpha {} outside (0, 1)", params.alpha)));
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    let (size_a, size_b) = (a.sizes(), b.sizes());
    let mut overlap: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for u in 0..a.len() {
        *overlap.entry((a.label(u), b.label(u))).or_insert(0) += 1;
    }
    let mut total = 0.0;
    for (&(ca, cb), &inter) in &overlap {
        let (sa, sb, i) = (size_a[ca] as f64, size_b[cb] as f64, inter as f64);
        // alpha cancels between the distance and the 1/(2 alpha) factor
        let l1 = i * (1.0 / sa - 1.0 / sb).abs() + (sa - i) / sa + (sb - i) / sb;
        total += i * (1.0 - 0.5 * l1);
    }
    Ok(total / a.len() as f64)
}

/// Mean squared distance from the target's feature centroid to every other
/// community centroid.
pub fn centroid_sq_distance(target_id: usize, p: &Partition, x: &NodeFeatures) -> Result<f64> {
    if p.k() < 2 {
        return Err(Error::SingleCommunity);
    }
    if target_id >= p.k() {
        return Err(Error::TargetMissing(target_id));
    }
    let centroids = community_centroids(x, p)?.centroids;
    let own = centroids.row(target_id);
    let sum: f64 = (0..p.k())
        .filter(|&c| c != target_id)
        .map(|c| {
            own.iter()
                .zip(centroids.row(c).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum();
    Ok(sum / (p.k() - 1) as f64)
}

/// Structural and feature descriptors of one community.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorRecord {
    pub avg_centroid_sq_distance: f64,
    pub community_size: usize,
    /// `|E_inter| / |E_intra|`; `None` when the community has no internal edge.
    pub inter_intra_ratio: Option<f64>,
    pub mean_degree: f64,
    /// Number of edges leaving the community.
    pub community_degree: usize,
    pub mean_betweenness: f64,
    pub community_betweenness: f64,
    pub mean_closeness: f64,
    pub community_closeness: f64,
}

/// Descriptors with node-level centralities (unnormalized betweenness,
/// reachable-set closeness) averaged over the target, and super-node
/// centralities read off the quotient graph.
pub fn community_descriptors(
    g: &Graph,
    p: &Partition,
    x: &NodeFeatures,
    target_id: usize,
) -> Result<DescriptorRecord> {
    p.check_covers(g.n())?;
    if target_id >= p.k() {
        return Err(Error::TargetMissing(target_id));
    }
    let members = p.members(target_id);
    let (mut intra, mut inter) = (0usize, 0usize);
    for &(u, v) in g.edges() {
        match (p.label(u) == target_id, p.label(v) == target_id) {
            (true, true) => intra += 1,
            (true, false) | (false, true) => inter += 1,
            _ => {}
        }
    }
    let node_betweenness = betweenness(g);
    let node_closeness = closeness(g);
    let mean_over = |values: &[f64]| members.iter().map(|&u| values[u]).sum::<f64>() / members.len() as f64;
    let degrees: Vec<f64> = g.degrees().iter().map(|&k| k as f64).collect();

    let quotient = quotient_graph(g, p);
    Ok(DescriptorRecord {
        avg_centroid_sq_distance: centroid_sq_distance(target_id, p, x)?,
        community_size: members.len(),
        inter_intra_ratio: (intra > 0).then(|| inter as f64 / intra as f64),
        mean_degree: mean_over(&degrees),
        community_degree: inter,
        mean_betweenness: mean_over(&node_betweenness),
        community_betweenness: betweenness(&quotient)[target_id],
        mean_closeness: mean_over(&node_closeness),
        community_closeness: closeness(&quotient)[target_id],
    })
}
