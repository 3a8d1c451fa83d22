//! LFR benchmark graphs with planted communities, plus Gaussian node features
//! aligned with the planted partition.
//!
//! Construction:
//! 1. degrees from a truncated discrete power law on `[k_min, k_max]`, with
//!    `k_min` found by bisection so the mean is as close as possible to the
//!    requested average degree;
//! 2. community sizes from a power law on `[s_min, s_max]` until they cover
//!    `n`, trimming the last;
//! 3. nodes assigned to communities big enough for their internal degree;
//! 4. internal stubs matched per community, external stubs matched globally
//!    (configuration model);
//! 5. swap-based repair of self-loops / multi-edges / misplaced external
//!    edges, then degree-preserving rewiring until the empirical mixing is
//!    within tolerance.

use std::collections::HashSet;

use ndarray::Array2;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{canonical, Edge, Graph, NodeFeatures, Partition};
use crate::seeding::{self, stream, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfrParams {
    pub n: usize,
    pub avg_degree: f64,
    pub k_max: usize,
    /// Degree exponent, negative.
    pub alpha: f64,
    /// Community-size exponent, negative.
    pub beta: f64,
    pub s_min: usize,
    pub s_max: usize,
    pub mu: f64,
    #[serde(default = "default_mixing_tolerance")]
    pub mixing_tolerance: f64,
    /// Rewiring proposals allowed; `None` means `50 * m`.
    #[serde(default)]
    pub max_rewire_iters: Option<usize>,
}

fn default_mixing_tolerance() -> f64 {
    0.03
}

impl LfrParams {
    /// Table-1 style defaults: `k_max = s_max = n / 10`, `<k> = 25`,
    /// `alpha = -2`, `beta = -1.1`.
    pub fn benchmark(n: usize, s_min: usize, mu: f64) -> Self {
        Self {
            n,
            avg_degree: 25.0,
            k_max: n / 10,
            alpha: -2.0,
            beta: -1.1,
            s_min,
            s_max: n / 10,
            mu,
            mixing_tolerance: default_mixing_tolerance(),
            max_rewire_iters: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InfeasibleParams(msg));
        if self.n < 2 {
            return bad(format!("n = {} is too small", self.n));
        }
        if self.alpha >= 0.0 || self.beta >= 0.0 {
            return bad("power-law exponents must be negative".into());
        }
        if !(0.0..1.0).contains(&self.mu) {
            return bad(format!("mu = {} outside [0, 1)", self.mu));
        }
        if self.k_max == 0 || self.k_max > self.n - 1 {
            return bad(format!("k_max = {} outside [1, n-1]", self.k_max));
        }
        if !(self.avg_degree >= 1.0 && self.avg_degree <= self.k_max as f64) {
            return bad(format!("average degree {} outside [1, k_max]", self.avg_degree));
        }
        if self.s_min == 0 || self.s_min > self.s_max || self.s_max > self.n {
            return bad(format!(
                "community sizes [{}, {}] invalid for n = {}",
                self.s_min, self.s_max, self.n
            ));
        }
        if self.s_max < self.k_max {
            return bad(format!(
                "s_max = {} smaller than k_max = {}",
                self.s_max, self.k_max
            ));
        }
        if !(self.mixing_tolerance > 0.0) {
            return bad("mixing tolerance must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureGenParams {
    pub d: usize,
    pub sigma_c: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

fn default_sigma() -> f64 {
    1.0
}

impl FeatureGenParams {
    pub fn new(sigma_c: f64) -> Self {
        Self {
            d: 32,
            sigma_c,
            sigma: 1.0,
        }
    }
}

/// Discrete distribution with `P(x) ∝ x^exponent` on `[min, max]`.
#[derive(Debug, Clone)]
pub struct DiscretePowerLaw {
    min: usize,
    cdf: Vec<f64>,
    mean: f64,
}

impl DiscretePowerLaw {
    pub fn new(exponent: f64, min: usize, max: usize) -> Result<Self> {
        if min == 0 || min > max {
            return Err(Error::EmptySupport { min, max });
        }
        let mut cdf = Vec::with_capacity(max - min + 1);
        let (mut total, mut first_moment) = (0.0, 0.0);
        for x in min..=max {
            let w = (x as f64).powf(exponent);
            total += w;
            first_moment += w * x as f64;
            cdf.push(total);
        }
        Ok(Self {
            min,
            cdf,
            mean: first_moment / total,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample(&self, rng: &mut Rng) -> usize {
        let total = *self.cdf.last().expect("non-empty support");
        let u = rng.random::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.min + idx
    }
}

/// `count` draws from the discrete power law on `[x_min, x_max]` by inverse CDF.
pub fn sample_power_law(
    exponent: f64,
    x_min: usize,
    x_max: usize,
    count: usize,
    rng: &mut Rng,
) -> Result<Vec<usize>> {
    let law = DiscretePowerLaw::new(exponent, x_min, x_max)?;
    Ok((0..count).map(|_| law.sample(rng)).collect())
}

/// Smallest degree whose truncated power law has mean closest to `target`.
/// The mean increases with the lower bound, so this is a bisection.
fn solve_min_degree(exponent: f64, target: f64, k_max: usize) -> Result<usize> {
    let mean = |k: usize| DiscretePowerLaw::new(exponent, k, k_max).map(|d| d.mean());
    let (mut lo, mut hi) = (1usize, k_max);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if mean(mid)? < target {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if lo > 1 && (mean(lo - 1)? - target).abs() < (mean(lo)? - target).abs() {
        lo -= 1;
    }
    Ok(lo)
}

/// Fraction of edge endpoints whose edge crosses communities.
pub fn empirical_mixing(g: &Graph, p: &Partition) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    p.check_covers(g.n())?;
    let cross = g
        .edges()
        .iter()
        .filter(|&&(u, v)| p.label(u) != p.label(v))
        .count();
    Ok(cross as f64 / g.m() as f64)
}

fn stochastic_round(x: f64, rng: &mut Rng) -> usize {
    let floor = x.floor();
    let frac = x - floor;
    floor as usize + usize::from(rng.random::<f64>() < frac)
}

fn sample_sizes(params: &LfrParams, rng: &mut Rng) -> Result<Vec<usize>> {
    let law = DiscretePowerLaw::new(params.beta, params.s_min, params.s_max)?;
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < params.n {
        let s = law.sample(rng);
        sizes.push(s);
        total += s;
    }
    let excess = total - params.n;
    let last = sizes.pop().expect("at least one community") - excess;
    if last >= params.s_min {
        sizes.push(last);
    } else {
        // spread the leftover nodes over communities that still have room
        for _ in 0..last {
            let open: Vec<usize> = (0..sizes.len())
                .filter(|&i| sizes[i] < params.s_max)
                .collect();
            let &i = open.choose(rng).ok_or_else(|| {
                Error::InfeasibleParams("community size bounds cannot cover n".into())
            })?;
            sizes[i] += 1;
        }
    }
    Ok(sizes)
}

/// Assigns nodes to communities so that every node's required internal
/// degree is strictly below its community size. Returns `None` if the
/// attempt fails.
fn assign_communities(required: &[usize], sizes: &[usize], rng: &mut Rng) -> Option<Vec<usize>> {
    let n = required.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| required[b].cmp(&required[a]));
    let mut queue: std::collections::VecDeque<usize> = order.into();
    let mut members: Vec<Vec<usize>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    let mut label = vec![usize::MAX; n];
    let mut steps = 0;
    while let Some(u) = queue.pop_front() {
        steps += 1;
        if steps > 20 * n + 100 {
            return None;
        }
        let fits: Vec<usize> = (0..sizes.len()).filter(|&c| sizes[c] > required[u]).collect();
        if fits.is_empty() {
            return None;
        }
        let open: Vec<usize> = fits
            .iter()
            .copied()
            .filter(|&c| members[c].len() < sizes[c])
            .collect();
        let c = if open.is_empty() {
            let &c = fits.choose(rng)?;
            let slot = rng.random_range(0..members[c].len());
            let evicted = members[c].swap_remove(slot);
            label[evicted] = usize::MAX;
            queue.push_back(evicted);
            c
        } else {
            let free: Vec<usize> = open.iter().map(|&c| sizes[c] - members[c].len()).collect();
            let total: usize = free.iter().sum();
            let mut pick = rng.random_range(0..total);
            let mut chosen = open[0];
            for (i, &f) in free.iter().enumerate() {
                if pick < f {
                    chosen = open[i];
                    break;
                }
                pick -= f;
            }
            chosen
        };
        members[c].push(u);
        label[u] = c;
    }
    Some(label)
}

/// Random stub matching followed by edge-swap repair. Edges that stay
/// invalid after the swap budget are dropped.
fn match_stubs<F>(
    mut stubs: Vec<usize>,
    valid: F,
    existing: &mut HashSet<Edge>,
    rng: &mut Rng,
) -> Vec<Edge>
where
    F: Fn(usize, usize) -> bool,
{
    stubs.shuffle(rng);
    let mut pool: Vec<Edge> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let mut good = vec![false; pool.len()];
    let mut bad = Vec::new();
    for (i, &(u, v)) in pool.iter().enumerate() {
        let e = canonical(u, v);
        if valid(u, v) && !existing.contains(&e) {
            existing.insert(e);
            good[i] = true;
        } else {
            bad.push(i);
        }
    }
    let budget = 200 * pool.len() + 1000;
    let mut iters = 0;
    while let Some(&i) = bad.last() {
        if iters >= budget || pool.len() < 2 {
            break;
        }
        iters += 1;
        let j = rng.random_range(0..pool.len());
        if j == i {
            continue;
        }
        let (a, b) = pool[i];
        let (c, d) = pool[j];
        let (e1, e2) = if rng.random::<bool>() {
            ((a, c), (b, d))
        } else {
            ((a, d), (b, c))
        };
        let (k1, k2) = (canonical(e1.0, e1.1), canonical(e2.0, e2.1));
        let old_j = canonical(c, d);
        let blocked = |k: &Edge| existing.contains(k) && !(good[j] && *k == old_j);
        if !valid(e1.0, e1.1) || !valid(e2.0, e2.1) || k1 == k2 || blocked(&k1) || blocked(&k2) {
            continue;
        }
        if good[j] {
            existing.remove(&old_j);
        } else {
            bad.retain(|&x| x != j);
        }
        existing.insert(k1);
        existing.insert(k2);
        pool[i] = e1;
        pool[j] = e2;
        good[i] = true;
        good[j] = true;
        bad.pop();
    }
    pool.iter()
        .zip(&good)
        .filter(|(_, &ok)| ok)
        .map(|(&(u, v), _)| canonical(u, v))
        .collect()
}

/// Degree-preserving swaps that move the cross-edge fraction toward `mu`.
fn rewire_mixing(
    edges: &mut [Edge],
    labels: &[usize],
    mu: f64,
    tolerance: f64,
    max_iters: usize,
    rng: &mut Rng,
) -> f64 {
    let m = edges.len();
    let mut existing: HashSet<Edge> = edges.iter().copied().collect();
    let is_cross = |e: &Edge| labels[e.0] != labels[e.1];
    let mut cross = edges.iter().filter(|e| is_cross(e)).count();
    let target = 0.5 * tolerance;
    for _ in 0..max_iters {
        let mixing = cross as f64 / m as f64;
        if (mixing - mu).abs() <= target || m < 2 {
            break;
        }
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        let (e1, e2) = if mixing < mu {
            // two internal edges of different communities become two cross edges
            if is_cross(&edges[i]) || is_cross(&edges[j]) || labels[a] == labels[c] {
                continue;
            }
            ((a, c), (b, d))
        } else {
            // two cross edges between the same community pair become internal
            if !is_cross(&edges[i]) || !is_cross(&edges[j]) {
                continue;
            }
            if labels[c] != labels[a] {
                std::mem::swap(&mut c, &mut d);
            }
            if labels[c] != labels[a] || labels[d] != labels[b] {
                continue;
            }
            ((a, c), (b, d))
        };
        if e1.0 == e1.1 || e2.0 == e2.1 {
            continue;
        }
        let (k1, k2) = (canonical(e1.0, e1.1), canonical(e2.0, e2.1));
        if k1 == k2 || existing.contains(&k1) || existing.contains(&k2) {
            continue;
        }
        existing.remove(&edges[i]);
        existing.remove(&edges[j]);
        existing.insert(k1);
        existing.insert(k2);
        edges[i] = k1;
        edges[j] = k2;
        if mixing < mu {
            cross += 2;
        } else {
            cross -= 2;
        }
    }
    cross as f64 / m as f64
}

/// Generates an LFR graph and its planted partition from `seed`. Degrees,
/// community sizes and wiring use separate streams of the seed.
pub fn generate_lfr(params: &LfrParams, seed: u64) -> Result<(Graph, Partition)> {
    params.validate()?;
    let n = params.n;
    let mut degree_rng = seeding::sub_rng(seed, stream::DEGREES);
    let mut size_rng = seeding::sub_rng(seed, stream::SIZES);
    let mut wiring_rng = seeding::sub_rng(seed, stream::WIRING);

    let k_min = solve_min_degree(params.alpha, params.avg_degree, params.k_max)?;
    let top_required = ((1.0 - params.mu) * params.k_max as f64).ceil() as usize;
    if params.s_max <= top_required {
        return Err(Error::InfeasibleParams(format!(
            "s_max = {} cannot host internal degree {top_required}",
            params.s_max
        )));
    }
    let mut degrees = sample_power_law(params.alpha, k_min, params.k_max, n, &mut degree_rng)?;
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let open: Vec<usize> = (0..n).filter(|&u| degrees[u] < params.k_max).collect();
        let &u = open
            .choose(&mut degree_rng)
            .ok_or_else(|| Error::InfeasibleParams("degree sum parity".into()))?;
        degrees[u] += 1;
    }

    let required: Vec<usize> = degrees
        .iter()
        .map(|&k| ((1.0 - params.mu) * k as f64).ceil() as usize)
        .collect();
    let mut assignment = None;
    let mut sizes = Vec::new();
    for _ in 0..100 {
        sizes = sample_sizes(params, &mut size_rng)?;
        if sizes.len() < 2 {
            continue;
        }
        assignment = assign_communities(&required, &sizes, &mut size_rng);
        if assignment.is_some() {
            break;
        }
    }
    let labels = assignment.ok_or_else(|| {
        Error::InfeasibleParams("no community assignment fits the internal degrees".into())
    })?;

    // internal degree: stochastic rounding of (1 - mu) k, bounded by the ceil rule
    let mut internal: Vec<usize> = degrees
        .iter()
        .zip(&required)
        .map(|(&k, &req)| stochastic_round((1.0 - params.mu) * k as f64, &mut wiring_rng).min(req))
        .collect();
    let mut by_community: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    for u in 0..n {
        by_community[labels[u]].push(u);
    }
    for members in &by_community {
        if members.iter().map(|&u| internal[u]).sum::<usize>() % 2 == 1 {
            let candidates: Vec<usize> = members.iter().copied().filter(|&u| internal[u] > 0).collect();
            let &u = candidates.choose(&mut wiring_rng).expect("odd sum has a positive entry");
            internal[u] -= 1;
        }
    }

    let mut existing = HashSet::new();
    let mut edges = Vec::new();
    for members in &by_community {
        let stubs: Vec<usize> = members
            .iter()
            .flat_map(|&u| std::iter::repeat_n(u, internal[u]))
            .collect();
        edges.extend(match_stubs(stubs, |u, v| u != v, &mut existing, &mut wiring_rng));
    }
    let external_stubs: Vec<usize> = (0..n)
        .flat_map(|u| std::iter::repeat_n(u, degrees[u] - internal[u]))
        .collect();
    edges.extend(match_stubs(
        external_stubs,
        |u, v| u != v && labels[u] != labels[v],
        &mut existing,
        &mut wiring_rng,
    ));
    edges.sort_unstable();

    let max_iters = params.max_rewire_iters.unwrap_or(50 * edges.len());
    let achieved = rewire_mixing(
        &mut edges,
        &labels,
        params.mu,
        params.mixing_tolerance,
        max_iters,
        &mut wiring_rng,
    );
    if (achieved - params.mu).abs() > params.mixing_tolerance {
        return Err(Error::RewireBudgetExceeded {
            achieved,
            target: params.mu,
        });
    }
    let graph = Graph::from_canonical_set(n, edges);
    if let Some(u) = (0..n).find(|&u| graph.degree(u) == 0) {
        return Err(Error::InfeasibleParams(format!(
            "node {u} lost all edges during repair"
        )));
    }
    Ok((graph, Partition::new(labels)))
}

/// Gaussian features: one centroid per community drawn from
/// `N(0, sigma_c^2 I)`, then each node drawn from `N(centroid, sigma^2 I)`.
pub fn generate_features(p: &Partition, fp: &FeatureGenParams, rng: &mut Rng) -> Result<NodeFeatures> {
    if fp.d == 0 || !(fp.sigma_c > 0.0) || !(fp.sigma > 0.0) {
        return Err(Error::InvalidParam(format!(
            "feature parameters d = {}, sigma_c = {}, sigma = {}",
            fp.d, fp.sigma_c, fp.sigma
        )));
    }
    if p.k() == 0 {
        return Err(Error::InvalidParam("partition has no communities".into()));
    }
    let mut centroids = Array2::<f64>::zeros((p.k(), fp.d));
    for v in centroids.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *v = fp.sigma_c * z;
    }
    let mut x = Array2::<f64>::zeros((p.len(), fp.d));
    for (u, &c) in p.labels().iter().enumerate() {
        for j in 0..fp.d {
            let z: f64 = StandardNormal.sample(rng);
            x[[u, j]] = centroids[[c, j]] + fp.sigma * z;
        }
    }
    NodeFeatures::new(x)
}

/// Graph, planted partition and aligned features from a single master seed.
/// Features use their own stream, so changing `sigma_c` leaves the topology
/// untouched.
pub fn generate_featurized(
    params: &LfrParams,
    features: &FeatureGenParams,
    seed: u64,
) -> Result<(Graph, Partition, NodeFeatures)> {
    let (g, p) = generate_lfr(params, seed)?;
    let x = generate_features(&p, features, &mut seeding::sub_rng(seed, stream::FEATURES))?;
    Ok((g, p, x))
}
