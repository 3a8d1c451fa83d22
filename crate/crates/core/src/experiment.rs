//! Configuration-driven sweeps: generate, perturb, cluster, evaluate, persist.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dmon::{self, DmonHyper};
use crate::error::{Error, Result};
use crate::graph::{self, largest_connected_component, Graph, NodeFeatures, Partition};
use crate::lfr::{self, FeatureGenParams, LfrParams};
use crate::metrics::{self, EcsParams};
use crate::perturb::{self, Method, PerturbSpec, PerturbationResult};
use crate::records::{self, ExperimentRecord};
use crate::seeding::{self, derive_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfrGrid {
    pub n: usize,
    pub avg_degree: f64,
    pub k_max: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Defaults to `k_max`.
    #[serde(default)]
    pub s_max: Option<usize>,
    pub s_min: Vec<usize>,
    pub mu: Vec<f64>,
    #[serde(default = "default_tolerance")]
    pub mixing_tolerance: f64,
}

fn default_tolerance() -> f64 {
    0.03
}

impl LfrGrid {
    pub fn params(&self, s_min: usize, mu: f64) -> LfrParams {
        LfrParams {
            n: self.n,
            avg_degree: self.avg_degree,
            k_max: self.k_max,
            alpha: self.alpha,
            beta: self.beta,
            s_min,
            s_max: self.s_max.unwrap_or(self.k_max),
            mu,
            mixing_tolerance: self.mixing_tolerance,
            max_rewire_iters: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureGrid {
    pub sigma_c: Vec<f64>,
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

fn default_d() -> usize {
    32
}
fn default_sigma() -> f64 {
    1.0
}

impl FeatureGrid {
    pub fn params(&self, sigma_c: f64) -> FeatureGenParams {
        FeatureGenParams {
            d: self.d,
            sigma_c,
            sigma: self.sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationGrid {
    pub beta_b: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Dice, Method::FcomDice]
}

/// DMoN settings shared by every cell; `k` comes from the reference partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmonSettings {
    #[serde(default = "default_hidden")]
    pub hidden_dims: Vec<usize>,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_dropout")]
    pub dropout_rate: f64,
    #[serde(default = "default_scale")]
    pub init_scale: f64,
}

fn default_hidden() -> Vec<usize> {
    vec![64]
}
fn default_lr() -> f64 {
    0.01
}
fn default_epochs() -> usize {
    500
}
fn default_dropout() -> f64 {
    0.5
}
fn default_scale() -> f64 {
    1.0
}

impl Default for DmonSettings {
    fn default() -> Self {
        Self {
            hidden_dims: default_hidden(),
            learning_rate: default_lr(),
            epochs: default_epochs(),
            dropout_rate: default_dropout(),
            init_scale: default_scale(),
        }
    }
}

impl DmonSettings {
    pub fn hyper(&self, k: usize, seed: u64) -> DmonHyper {
        DmonHyper {
            k,
            hidden_dims: self.hidden_dims.clone(),
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            dropout_rate: self.dropout_rate,
            init_scale: self.init_scale,
            seed,
            dropout_enabled: self.dropout_rate > 0.0,
        }
    }
}

/// An observed network swept in place of the synthetic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealNetworkSpec {
    pub name: String,
    pub edges: PathBuf,
    #[serde(default)]
    pub features: Option<PathBuf>,
    /// Use the features file; otherwise synthesize per `sigma_c`.
    #[serde(default)]
    pub use_original_features: bool,
    #[serde(default)]
    pub sigma_c: Option<f64>,
    #[serde(default = "default_true")]
    pub take_lcc: bool,
    #[serde(default = "default_runs")]
    pub consensus_runs: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
}

fn default_true() -> bool {
    true
}
fn default_runs() -> usize {
    50
}
fn default_tau() -> f64 {
    0.3
}

impl RealNetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.use_original_features && self.features.is_none() {
            return Err(Error::Config(format!(
                "network {}: original features requested without a features file",
                self.name
            )));
        }
        if !self.use_original_features && self.sigma_c.is_none() {
            return Err(Error::Config(format!(
                "network {}: synthetic features need sigma_c",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default)]
    pub lfr: Option<LfrGrid>,
    pub features: FeatureGrid,
    pub perturbation: PerturbationGrid,
    #[serde(default)]
    pub dmon: DmonSettings,
    pub realizations: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Target community ids; all communities when absent.
    #[serde(default)]
    pub targets: Option<Vec<usize>>,
    #[serde(default)]
    pub real_network: Option<RealNetworkSpec>,
    /// Write every perturbed graph under `artifacts/<content hash>/`.
    #[serde(default)]
    pub save_artifacts: bool,
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.realizations == 0 {
            return bad("realizations must be at least 1");
        }
        if self.perturbation.beta_b.is_empty() || self.perturbation.p.is_empty() || self.perturbation.methods.is_empty() {
            return bad("perturbation grids must be nonempty");
        }
        if self.lfr.is_none() && self.real_network.is_none() {
            return bad("config needs an lfr grid or a real network");
        }
        if let Some(lfr) = &self.lfr {
            if lfr.mu.is_empty() || lfr.s_min.is_empty() || self.features.sigma_c.is_empty() {
                return bad("lfr and feature grids must be nonempty");
            }
        }
        if let Some(net) = &self.real_network {
            net.validate()?;
        }
        if matches!(&self.targets, Some(t) if t.is_empty()) {
            return bad("target list must be nonempty when given");
        }
        if self.threads == Some(0) {
            return bad("threads must be positive");
        }
        self.dmon.hyper(2, 0).validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn records_path(&self) -> PathBuf {
        self.output_dir.join("records.csv")
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.output_dir.join("manifest.json")
    }
}

/// Loads an observed network, optionally keeps its largest component,
/// labels it by consensus Louvain and attaches original or synthetic
/// features.
pub fn ingest_real_network(spec: &RealNetworkSpec, seed: u64) -> Result<(Graph, NodeFeatures, Partition)> {
    spec.validate()?;
    let loaded = graph::load_edge_list(&spec.edges)?;
    let full_n = loaded.n();
    let (g, kept) = if spec.take_lcc {
        largest_connected_component(&loaded)
    } else {
        (loaded, (0..full_n).collect())
    };
    let partition = metrics::consensus_louvain(&g, spec.consensus_runs, spec.tau, derive_seed(&["consensus", &seed.to_string()]))?;
    let features = if spec.use_original_features {
        let path = spec.features.as_ref().expect("validated");
        let all = graph::load_features(path, Some(full_n))?;
        let rows: Vec<Vec<f64>> = kept.iter().map(|&u| all.row(u).to_vec()).collect();
        NodeFeatures::from_rows(&rows)?
    } else {
        let params = FeatureGenParams::new(spec.sigma_c.expect("validated"));
        lfr::generate_features(&partition, &params, &mut seeding::sub_rng(seed, seeding::stream::FEATURES))?
    };
    Ok((g, features, partition))
}

/// One clean graph with features, its reference partition and the grid
/// coordinates it stands for.
struct Instance {
    dataset: String,
    mu: f64,
    sigma_c: f64,
    s_min: usize,
    realization: usize,
    seed: u64,
}

struct Prepared {
    g: Graph,
    x: NodeFeatures,
    truth: Partition,
    mixing: f64,
}

#[derive(Debug, Clone)]
struct Task {
    target: usize,
    beta_b: f64,
    p: f64,
    method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub cell: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: SweepConfig,
    pub records: usize,
    pub new_records: usize,
    pub failures: Vec<CellFailure>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub records: usize,
    pub new_records: usize,
    pub failures: Vec<CellFailure>,
    pub records_path: PathBuf,
}

fn instances(cfg: &SweepConfig) -> Vec<Instance> {
    let master = cfg.master_seed.to_string();
    let mut out = Vec::new();
    if let Some(lfr) = &cfg.lfr {
        for &mu in &lfr.mu {
            for &s_min in &lfr.s_min {
                for &sigma_c in &cfg.features.sigma_c {
                    for realization in 0..cfg.realizations {
                        // topology depends on (mu, s_min, realization) only
                        let seed = derive_seed(&["lfr", &master, &format!("{mu:?}"), &s_min.to_string(), &realization.to_string()]);
                        out.push(Instance { dataset: "lfr".into(), mu, sigma_c, s_min, realization, seed });
                    }
                }
            }
        }
    }
    if let Some(net) = &cfg.real_network {
        let sigma_c = if net.use_original_features { 0.0 } else { net.sigma_c.expect("validated") };
        let dataset = if net.use_original_features { format!("{}-original", net.name) } else { net.name.clone() };
        for realization in 0..cfg.realizations {
            let seed = derive_seed(&["real", &master, &net.name, &realization.to_string()]);
            out.push(Instance { dataset: dataset.clone(), mu: 0.0, sigma_c, s_min: 0, realization, seed });
        }
    }
    out
}

fn prepare(cfg: &SweepConfig, inst: &Instance) -> Result<Prepared> {
    let (g, x, truth) = match (&cfg.lfr, inst.dataset.as_str()) {
        (Some(grid), "lfr") => {
            let (g, p) = lfr::generate_lfr(&grid.params(inst.s_min, inst.mu), inst.seed)?;
            let x = lfr::generate_features(&p, &cfg.features.params(inst.sigma_c), &mut seeding::sub_rng(inst.seed, seeding::stream::FEATURES))?;
            (g, x, p)
        }
        _ => {
            let net = cfg.real_network.as_ref().expect("instance from real network");
            ingest_real_network(net, inst.seed)?
        }
    };
    let mixing = lfr::empirical_mixing(&g, &truth)?;
    Ok(Prepared { g, x, truth, mixing })
}

fn cell_key(inst: &Instance, t: &Task) -> String {
    format!(
        "{}|{:?}|{:?}|{}|{:?}|{:?}|{}|{}|{}",
        inst.dataset, inst.mu, inst.sigma_c, inst.s_min, t.beta_b, t.p, inst.realization, t.target, t.method
    )
}

fn record_key(r: &ExperimentRecord) -> String {
    format!("{}|{}", r.pair_key(), r.method)
}

fn tasks_for(cfg: &SweepConfig, k: Option<usize>) -> Vec<Task> {
    let targets: Vec<usize> = match (&cfg.targets, k) {
        (Some(list), Some(k)) => list.iter().copied().filter(|&t| t < k).collect(),
        (Some(list), None) => list.clone(),
        (None, Some(k)) => (0..k).collect(),
        (None, None) => Vec::new(),
    };
    let mut out = Vec::new();
    for &target in &targets {
        for &beta_b in &cfg.perturbation.beta_b {
            for &p in &cfg.perturbation.p {
                for &method in &cfg.perturbation.methods {
                    out.push(Task { target, beta_b, p, method });
                }
            }
        }
    }
    out
}

fn save_artifact(dir: &Path, result: &PerturbationResult, method: Method) -> Result<()> {
    let mut edges = Vec::new();
    for &(u, v) in result.graph.edges() {
        edges.extend_from_slice(format!("{u}\t{v}\n").as_bytes());
    }
    let digest = Sha256::digest(&edges);
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    let sub = dir.join("artifacts").join(hex);
    std::fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
    graph::save_edge_list(sub.join("graph.tsv"), &result.graph)?;
    if let Some(x) = &result.features {
        graph::save_features(sub.join("features.csv"), x)?;
    }
    let ledger = serde_json::to_string_pretty(&result.ledger(method))?;
    let path = sub.join("ledger.json");
    std::fs::write(&path, ledger).map_err(|e| Error::io(&path, e))
}

fn evaluate_cell(cfg: &SweepConfig, inst: &Instance, prep: &Prepared, task: &Task) -> Result<ExperimentRecord> {
    let master = cfg.master_seed.to_string();
    let (mu, sigma_c, beta_b, p) = (format!("{:?}", inst.mu), format!("{:?}", inst.sigma_c), format!("{:?}", task.beta_b), format!("{:?}", task.p));
    let (realization, target) = (inst.realization.to_string(), task.target.to_string());
    let base = [master.as_str(), inst.dataset.as_str(), &mu, &sigma_c, &inst.s_min.to_string(), &beta_b, &p, &realization, &target];
    let mut perturb_parts = base.to_vec();
    perturb_parts.push(task.method.as_str());
    perturb_parts.insert(0, "perturb");
    let mut rng = seeding::rng(derive_seed(&perturb_parts));
    // the clustering seed is shared by both methods of a cell
    let mut dmon_parts = base.to_vec();
    dmon_parts.insert(0, "dmon");
    let dmon_seed = derive_seed(&dmon_parts);

    let members = prep.truth.members(task.target);
    let spec = PerturbSpec::new(members.clone(), task.beta_b, task.p)?;
    let result = match task.method {
        Method::Dice => perturb::dice(&prep.g, &spec, &mut rng)?,
        Method::FcomDice => {
            let index = perturb::community_centroids(&prep.x, &prep.truth)?;
            perturb::fcom_dice(&prep.g, &prep.x, &prep.truth, &index, &spec, &mut rng)?
        }
    };
    if cfg.save_artifacts {
        save_artifact(&cfg.output_dir, &result, task.method)?;
    }
    let features = result.features.as_ref().unwrap_or(&prep.x);
    let trained = dmon::train(&result.graph, features, &cfg.dmon.hyper(prep.truth.k(), dmon_seed))?;
    let detected = dmon::hard_assignment(&trained.assignment);

    let descriptors = metrics::community_descriptors(&prep.g, &prep.truth, &prep.x, task.target)?;
    let q_after = if result.graph.m() == 0 { 0.0 } else { metrics::modularity(&result.graph, &prep.truth)? };
    let mut record = ExperimentRecord {
        dataset: inst.dataset.clone(),
        mu: inst.mu,
        sigma_c: inst.sigma_c,
        s_min: inst.s_min,
        beta_b: task.beta_b,
        p: task.p,
        method: task.method,
        realization: inst.realization,
        seed: inst.seed,
        target: task.target,
        target_size: members.len(),
        mixing_achieved: prep.mixing,
        budget: result.budget.total,
        deletions: result.deleted.len(),
        additions: result.added.len(),
        exhausted_deletion: result.exhausted.deletion,
        exhausted_addition: result.exhausted.addition,
        k_true: prep.truth.k(),
        k_detected: detected.k(),
        m1: metrics::m1(&members, &detected)?,
        m2: metrics::m2(&members, &detected, prep.g.n())?,
        ecs: metrics::element_centric_similarity(&prep.truth, &detected, EcsParams::default())?,
        q_before: metrics::modularity(&prep.g, &prep.truth)?,
        q_after,
        avg_centroid_sq_distance: 0.0,
        community_size: 0,
        inter_intra_ratio: None,
        mean_degree: 0.0,
        community_degree: 0,
        mean_betweenness: 0.0,
        community_betweenness: 0.0,
        mean_closeness: 0.0,
        community_closeness: 0.0,
    };
    record.set_descriptors(&descriptors);
    Ok(record)
}

fn write_manifest(cfg: &SweepConfig, records: usize, new_records: usize, failures: &[CellFailure]) -> Result<()> {
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        records,
        new_records,
        failures: failures.to_vec(),
    };
    let path = cfg.manifest_path();
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))
}

/// Runs every missing cell of the sweep and rewrites the records file in
/// canonical order after each clean graph completes.
pub fn run_experiment(cfg: &SweepConfig) -> Result<RunSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    let path = cfg.records_path();
    let existing = if path.exists() { records::read_records(&path)? } else { Vec::new() };
    let done: BTreeSet<String> = existing.iter().map(record_key).collect();
    let state = Mutex::new((existing, 0usize, Vec::<CellFailure>::new()));

    let work = || {
        instances(cfg).par_iter().for_each(|inst| {
            // the target list is only known after generation when unrestricted
            if let Some(pending) = cfg.targets.as_ref().map(|_| tasks_for(cfg, None)) {
                if pending.iter().all(|t| done.contains(&cell_key(inst, t))) {
                    return;
                }
            }
            let prep = match prepare(cfg, inst) {
                Ok(p) => p,
                Err(e) => {
                    let mut guard = state.lock().expect("state lock");
                    guard.2.push(CellFailure {
                        cell: format!("{}|{:?}|{:?}|{}|{}|*", inst.dataset, inst.mu, inst.sigma_c, inst.s_min, inst.realization),
                        error: e.to_string(),
                    });
                    return;
                }
            };
            let tasks: Vec<Task> = tasks_for(cfg, Some(prep.truth.k()))
                .into_iter()
                .filter(|t| !done.contains(&cell_key(inst, t)))
                .collect();
            if tasks.is_empty() {
                return;
            }
            let outcomes: Vec<(String, Result<ExperimentRecord>)> = tasks
                .par_iter()
                .map(|t| (cell_key(inst, t), evaluate_cell(cfg, inst, &prep, t)))
                .collect();
            let mut guard = state.lock().expect("state lock");
            for (key, outcome) in outcomes {
                match outcome {
                    Ok(r) => {
                        guard.0.push(r);
                        guard.1 += 1;
                    }
                    Err(e) => {
                        log::warn!("cell {key} failed: {e}");
                        guard.2.push(CellFailure { cell: key, error: e.to_string() });
                    }
                }
            }
            if let Err(e) = records::write_records(&path, &mut guard.0) {
                log::error!("writing {}: {e}", path.display());
            }
        });
    };
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }

    let (mut all, new_records, mut failures) = state.into_inner().expect("state lock");
    records::write_records(&path, &mut all)?;
    failures.sort_by(|a, b| a.cell.cmp(&b.cell));
    write_manifest(cfg, all.len(), new_records, &failures)?;
    Ok(RunSummary {
        records: all.len(),
        new_records,
        failures,
        records_path: path,
    })
}
