//! Budgeted concealment of a target community.
//!
//! Both methods delete a uniform sample of the target's internal edges. DICE
//! then adds uniformly sampled non-edges from the target to the outside;
//! FCom-DICE sends each addition to the most feature-similar feasible
//! community and overwrites the source node's features with that community's
//! centroid.

use std::collections::BTreeSet;

use ndarray::Array2;
use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{canonical, intra_edges, membership_mask, Edge, Graph, NodeFeatures, Partition};
use crate::seeding::Rng;

/// Guards floor() against products like `0.29 * 100 = 28.999999999999996`.
const FLOOR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dice,
    FcomDice,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Dice => "dice",
            Method::FcomDice => "fcom-dice",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dice" => Ok(Method::Dice),
            "fcom-dice" | "fcom_dice" => Ok(Method::FcomDice),
            other => Err(Error::InvalidParam(format!("unknown method {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbSpec {
    pub target: Vec<usize>,
    pub beta_b: f64,
    pub p: f64,
}

impl PerturbSpec {
    pub fn new(mut target: Vec<usize>, beta_b: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta_b) || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParam(format!(
                "budget fraction {beta_b} and deletion ratio {p} must lie in [0, 1]"
            )));
        }
        target.sort_unstable();
        target.dedup();
        if target.is_empty() {
            return Err(Error::EmptyTarget);
        }
        Ok(Self { target, beta_b, p })
    }

    fn check_target(&self, n: usize) -> Result<Vec<bool>> {
        if let Some(&bad) = self.target.iter().find(|&&u| u >= n) {
            return Err(Error::TargetOutOfRange(bad));
        }
        membership_mask(n, &self.target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub total: usize,
    pub deletions: usize,
    pub additions: usize,
}

/// `b = floor(beta_b * e_intra)`, `b_del = floor(b * p)`, `b_add = b - b_del`.
pub fn budget_from_fraction(beta_b: f64, e_intra: usize, p: f64) -> Budget {
    let total = (beta_b * e_intra as f64 + FLOOR_EPS).floor().max(0.0) as usize;
    let deletions = ((total as f64 * p + FLOOR_EPS).floor() as usize).min(total);
    Budget {
        total,
        deletions,
        additions: total - deletions,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exhaustion {
    pub deletion: bool,
    pub addition: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureEdit {
    pub node: usize,
    pub community: usize,
}

#[derive(Debug, Clone)]
pub struct PerturbationResult {
    pub graph: Graph,
    /// Present for FCom-DICE only.
    pub features: Option<NodeFeatures>,
    pub budget: Budget,
    pub deleted: Vec<Edge>,
    pub added: Vec<Edge>,
    pub feature_edits: Vec<FeatureEdit>,
    pub exhausted: Exhaustion,
}

/// JSON-serializable view of the edit ledger.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ledger {
    pub method: Method,
    pub budget: Budget,
    pub deleted: Vec<Edge>,
    pub added: Vec<Edge>,
    pub feature_edits: Vec<FeatureEdit>,
    pub exhausted: Exhaustion,
}

impl PerturbationResult {
    pub fn ledger(&self, method: Method) -> Ledger {
        Ledger {
            method,
            budget: self.budget,
            deleted: self.deleted.clone(),
            added: self.added.clone(),
            feature_edits: self.feature_edits.clone(),
            exhausted: self.exhausted,
        }
    }
}

/// Uniform sample of `min(b_del, |E_intra|)` internal edges.
fn sample_deletions(g: &Graph, target: &[usize], b_del: usize, rng: &mut Rng) -> Result<(Vec<Edge>, bool)> {
    let intra = intra_edges(g, target)?;
    let take = b_del.min(intra.len());
    let mut deleted: Vec<Edge> = index::sample(rng, intra.len(), take)
        .into_iter()
        .map(|i| intra[i])
        .collect();
    deleted.sort_unstable();
    Ok((deleted, b_del > intra.len()))
}

fn apply_edits(g: &Graph, deleted: &[Edge], added: &[Edge]) -> Graph {
    let removed: BTreeSet<Edge> = deleted.iter().copied().collect();
    let mut edges: Vec<Edge> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| !removed.contains(e))
        .collect();
    edges.extend_from_slice(added);
    Graph::from_canonical_set(g.n(), edges)
}

/// DICE: random internal deletions, then random additions from the target to
/// non-adjacent outside nodes.
pub fn dice(g: &Graph, spec: &PerturbSpec, rng: &mut Rng) -> Result<PerturbationResult> {
    let inside = spec.check_target(g.n())?;
    let e_intra = intra_edges(g, &spec.target)?.len();
    let budget = budget_from_fraction(spec.beta_b, e_intra, spec.p);
    let (deleted, del_exhausted) = sample_deletions(g, &spec.target, budget.deletions, rng)?;

    let inside = &inside;
    let candidates: Vec<Edge> = spec
        .target
        .iter()
        .flat_map(|&u| {
            (0..g.n())
                .filter(move |&v| !inside[v] && !g.has_edge(u, v))
                .map(move |v| canonical(u, v))
        })
        .collect();
    let take = budget.additions.min(candidates.len());
    let mut added: Vec<Edge> = index::sample(rng, candidates.len(), take)
        .into_iter()
        .map(|i| candidates[i])
        .collect();
    added.sort_unstable();

    Ok(PerturbationResult {
        graph: apply_edits(g, &deleted, &added),
        features: None,
        budget,
        deleted,
        added,
        feature_edits: Vec::new(),
        exhausted: Exhaustion {
            deletion: del_exhausted,
            addition: budget.additions > candidates.len(),
        },
    })
}

/// Community centroids and the node-community similarity
/// `S[u][i] = -||x_u - centroid_i||^2`.
#[derive(Debug, Clone)]
pub struct CentroidIndex {
    pub centroids: Array2<f64>,
    pub similarity: Array2<f64>,
}

pub fn community_centroids(x: &NodeFeatures, p: &Partition) -> Result<CentroidIndex> {
    p.check_covers(x.n())?;
    let (k, d) = (p.k(), x.d());
    let mut centroids = Array2::<f64>::zeros((k, d));
    let sizes = p.sizes();
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCommunity(empty));
    }
    for (u, &c) in p.labels().iter().enumerate() {
        let mut row = centroids.row_mut(c);
        row += &x.row(u);
    }
    for (c, &s) in sizes.iter().enumerate() {
        centroids.row_mut(c).mapv_inplace(|v| v / s as f64);
    }
    let mut similarity = Array2::<f64>::zeros((x.n(), k));
    for u in 0..x.n() {
        let xu = x.row(u);
        for c in 0..k {
            let dist: f64 = xu
                .iter()
                .zip(centroids.row(c).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            similarity[[u, c]] = -dist;
        }
    }
    Ok(CentroidIndex {
        centroids,
        similarity,
    })
}

/// Consecutive infeasible draws allowed per target node before additions stop.
const SKIP_FACTOR: usize = 10;

/// FCom-DICE. `index` must be built from the unperturbed features `x`; it is
/// never refreshed during the run.
pub fn fcom_dice(
    g: &Graph,
    x: &NodeFeatures,
    p: &Partition,
    index: &CentroidIndex,
    spec: &PerturbSpec,
    rng: &mut Rng,
) -> Result<PerturbationResult> {
    let inside = spec.check_target(g.n())?;
    p.check_covers(g.n())?;
    x.check_rows(g.n())?;
    let target_label = p.label(spec.target[0]);
    if p.members(target_label) != spec.target {
        return Err(Error::TargetNotACommunity);
    }

    let e_intra = intra_edges(g, &spec.target)?.len();
    let budget = budget_from_fraction(spec.beta_b, e_intra, spec.p);
    let (deleted, del_exhausted) = sample_deletions(g, &spec.target, budget.deletions, rng)?;

    let communities = p.communities();
    let mut adjacency: Vec<BTreeSet<usize>> = (0..g.n())
        .map(|u| g.neighbors(u).iter().copied().collect())
        .collect();
    for &(u, v) in &deleted {
        adjacency[u].remove(&v);
        adjacency[v].remove(&u);
    }

    let mut features = x.clone();
    let mut added = Vec::new();
    let mut edits = Vec::new();
    let mut skips = 0;
    let mut add_exhausted = false;
    let skip_limit = SKIP_FACTOR * spec.target.len();
    while added.len() < budget.additions {
        let u = spec.target[rng.random_range(0..spec.target.len())];
        let cu = p.label(u);
        // non-neighbours of u per community, outside the target
        let mut open = vec![0usize; p.k()];
        for (c, members) in communities.iter().enumerate() {
            if c == cu {
                continue;
            }
            let linked = adjacency[u].iter().filter(|&&v| p.label(v) == c).count();
            open[c] = members.len() - linked;
        }
        let best = (0..p.k())
            .filter(|&c| c != cu && open[c] > 0)
            .fold(None::<usize>, |best, c| match best {
                Some(b) if index.similarity[[u, b]] >= index.similarity[[u, c]] => Some(b),
                _ => Some(c),
            });
        let Some(dest) = best else {
            skips += 1;
            if skips >= skip_limit {
                add_exhausted = true;
                break;
            }
            continue;
        };
        skips = 0;
        let choices: Vec<usize> = communities[dest]
            .iter()
            .copied()
            .filter(|&v| !inside[v] && !adjacency[u].contains(&v))
            .collect();
        let v = choices[rng.random_range(0..choices.len())];
        adjacency[u].insert(v);
        adjacency[v].insert(u);
        added.push(canonical(u, v));
        features.set_row(u, index.centroids.row(dest));
        edits.push(FeatureEdit {
            node: u,
            community: dest,
        });
    }
    let mut added_sorted = added.clone();
    added_sorted.sort_unstable();

    Ok(PerturbationResult {
        graph: apply_edits(g, &deleted, &added_sorted),
        features: Some(features),
        budget,
        deleted,
        added,
        feature_edits: edits,
        exhausted: Exhaustion {
            deletion: del_exhausted,
            addition: add_exhausted,
        },
    })
}
