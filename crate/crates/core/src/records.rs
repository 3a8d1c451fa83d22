//! Experiment records and their canonical CSV form.

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::DescriptorRecord;
use crate::perturb::Method;

/// One evaluated (configuration, realization, target, method) cell.
///
/// `q_before` is the ground-truth modularity on the clean graph and `q_after`
/// the same partition's modularity on the perturbed graph. Descriptors are
/// computed on the clean graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub mu: f64,
    pub sigma_c: f64,
    pub s_min: usize,
    pub beta_b: f64,
    pub p: f64,
    pub method: Method,
    pub realization: usize,
    pub seed: u64,
    pub target: usize,
    pub target_size: usize,
    /// Mixing of the reference partition on the clean graph.
    pub mixing_achieved: f64,
    pub budget: usize,
    pub deletions: usize,
    pub additions: usize,
    pub exhausted_deletion: bool,
    pub exhausted_addition: bool,
    pub k_true: usize,
    pub k_detected: usize,
    pub m1: f64,
    pub m2: f64,
    pub ecs: f64,
    pub q_before: f64,
    pub q_after: f64,
    pub avg_centroid_sq_distance: f64,
    pub community_size: usize,
    pub inter_intra_ratio: Option<f64>,
    pub mean_degree: f64,
    pub community_degree: usize,
    pub mean_betweenness: f64,
    pub community_betweenness: f64,
    pub mean_closeness: f64,
    pub community_closeness: f64,
}

impl ExperimentRecord {
    pub fn descriptors(&self) -> DescriptorRecord {
        DescriptorRecord {
            avg_centroid_sq_distance: self.avg_centroid_sq_distance,
            community_size: self.community_size,
            inter_intra_ratio: self.inter_intra_ratio,
            mean_degree: self.mean_degree,
            community_degree: self.community_degree,
            mean_betweenness: self.mean_betweenness,
            community_betweenness: self.community_betweenness,
            mean_closeness: self.mean_closeness,
            community_closeness: self.community_closeness,
        }
    }

    pub fn set_descriptors(&mut self, d: &DescriptorRecord) {
        self.avg_centroid_sq_distance = d.avg_centroid_sq_distance;
        self.community_size = d.community_size;
        self.inter_intra_ratio = d.inter_intra_ratio;
        self.mean_degree = d.mean_degree;
        self.community_degree = d.community_degree;
        self.mean_betweenness = d.mean_betweenness;
        self.community_betweenness = d.community_betweenness;
        self.mean_closeness = d.mean_closeness;
        self.community_closeness = d.community_closeness;
    }

    /// Sort order of the records file.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.dataset
            .cmp(&other.dataset)
            .then(self.mu.total_cmp(&other.mu))
            .then(self.sigma_c.total_cmp(&other.sigma_c))
            .then(self.s_min.cmp(&other.s_min))
            .then(self.beta_b.total_cmp(&other.beta_b))
            .then(self.p.total_cmp(&other.p))
            .then(self.realization.cmp(&other.realization))
            .then(self.target.cmp(&other.target))
            .then(self.method.as_str().cmp(other.method.as_str()))
    }

    /// Identity of the cell shared by the two methods.
    pub fn pair_key(&self) -> String {
        format!(
            "{}|{:?}|{:?}|{}|{:?}|{:?}|{}|{}",
            self.dataset, self.mu, self.sigma_c, self.s_min, self.beta_b, self.p, self.realization, self.target
        )
    }
}

/// Which concealment or similarity column to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    M1,
    M2,
    Ecs,
}

impl Metric {
    pub fn of(&self, r: &ExperimentRecord) -> f64 {
        match self {
            Metric::M1 => r.m1,
            Metric::M2 => r.m2,
            Metric::Ecs => r.ecs,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::M1 => "m1",
            Metric::M2 => "m2",
            Metric::Ecs => "ecs",
        }
    }
}

pub fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by(|a, b| a.canonical_cmp(b));
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        if [r.m1, r.m2, r.ecs, r.q_before, r.q_after].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam(format!("non-finite metric in cell {}", r.pair_key())));
        }
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidParam(format!("csv buffer: {e}")))
}

/// Writes records in canonical order, replacing `path` atomically.
pub fn write_records(path: &Path, records: &mut [ExperimentRecord]) -> Result<()> {
    sort_records(records);
    let bytes = records_to_csv(records)?;
    let tmp = path.with_extension("csv.tmp");
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}
