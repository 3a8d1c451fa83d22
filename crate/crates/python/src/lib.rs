//! Python bindings: graphs, partitions, features, generators, perturbations,
//! DMoN training and evaluation metrics.

use comconceal::dmon::{self, DmonHyper};
use comconceal::graph::{self, Edge};
use comconceal::lfr::{self, FeatureGenParams, LfrParams};
use comconceal::metrics::{self, EcsParams};
use comconceal::perturb::{self, PerturbSpec, PerturbationResult};
use comconceal::seeding;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: comconceal::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Graph", module = "pycomconceal", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: graph::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<Edge>) -> PyResult<Self> {
        graph::Graph::new(n, &edges).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        graph::load_edge_list(path).map(|inner| Self { inner }).map_err(py_err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        graph::save_edge_list(path, &self.inner).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn edges(&self) -> Vec<Edge> {
        self.inner.edges().to_vec()
    }

    fn neighbors(&self, u: usize) -> PyResult<Vec<usize>> {
        self.check(u)?;
        Ok(self.inner.neighbors(u).to_vec())
    }

    fn degree(&self, u: usize) -> PyResult<usize> {
        self.check(u)?;
        Ok(self.inner.degree(u))
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.inner.n() && v < self.inner.n() && self.inner.has_edge(u, v)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

impl PyGraph {
    fn check(&self, u: usize) -> PyResult<()> {
        if u >= self.inner.n() {
            return Err(PyValueError::new_err(format!("node {u} out of range")));
        }
        Ok(())
    }
}

#[pyclass(name = "Partition", module = "pycomconceal", skip_from_py_object)]
#[derive(Clone)]
struct PyPartition {
    inner: graph::Partition,
}

#[pymethods]
impl PyPartition {
    #[new]
    fn new(labels: Vec<usize>) -> Self {
        Self {
            inner: graph::Partition::new(labels),
        }
    }

    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn members(&self, community: usize) -> PyResult<Vec<usize>> {
        if community >= self.inner.k() {
            return Err(PyValueError::new_err(format!("no community {community}")));
        }
        Ok(self.inner.members(community))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Partition(n={}, k={})", self.inner.len(), self.inner.k())
    }
}

#[pyclass(name = "Features", module = "pycomconceal", skip_from_py_object)]
#[derive(Clone)]
struct PyFeatures {
    inner: graph::NodeFeatures,
}

#[pymethods]
impl PyFeatures {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        graph::NodeFeatures::from_rows(&rows).map(|inner| Self { inner }).map_err(py_err)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.n(), self.inner.d())
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.matrix().rows().into_iter().map(|r| r.to_vec()).collect()
    }
}

#[pyclass(name = "Perturbation", module = "pycomconceal")]
struct PyPerturbation {
    #[pyo3(get)]
    graph: PyGraph,
    #[pyo3(get)]
    features: Option<PyFeatures>,
    #[pyo3(get)]
    deleted: Vec<Edge>,
    #[pyo3(get)]
    added: Vec<Edge>,
    #[pyo3(get)]
    budget: usize,
    #[pyo3(get)]
    exhausted_deletion: bool,
    #[pyo3(get)]
    exhausted_addition: bool,
}

impl From<PerturbationResult> for PyPerturbation {
    fn from(r: PerturbationResult) -> Self {
        Self {
            graph: PyGraph { inner: r.graph },
            features: r.features.map(|inner| PyFeatures { inner }),
            deleted: r.deleted,
            added: r.added,
            budget: r.budget.total,
            exhausted_deletion: r.exhausted.deletion,
            exhausted_addition: r.exhausted.addition,
        }
    }
}

/// LFR benchmark graph and its planted partition.
#[pyfunction]
#[pyo3(signature = (n, avg_degree, k_max, s_min, s_max, mu, seed=0, alpha=-2.0, beta=-1.1))]
#[allow(clippy::too_many_arguments)]
fn generate_lfr(
    n: usize,
    avg_degree: f64,
    k_max: usize,
    s_min: usize,
    s_max: usize,
    mu: f64,
    seed: u64,
    alpha: f64,
    beta: f64,
) -> PyResult<(PyGraph, PyPartition)> {
    let params = LfrParams {
        n,
        avg_degree,
        k_max,
        alpha,
        beta,
        s_min,
        s_max,
        mu,
        mixing_tolerance: 0.03,
        max_rewire_iters: None,
    };
    let (g, p) = lfr::generate_lfr(&params, seed).map_err(py_err)?;
    Ok((PyGraph { inner: g }, PyPartition { inner: p }))
}

/// Gaussian features clustered by the partition.
#[pyfunction]
#[pyo3(signature = (partition, sigma_c, d=32, seed=0))]
fn generate_features(partition: &PyPartition, sigma_c: f64, d: usize, seed: u64) -> PyResult<PyFeatures> {
    let params = FeatureGenParams { d, sigma_c, sigma: 1.0 };
    let mut rng = seeding::sub_rng(seed, seeding::stream::FEATURES);
    lfr::generate_features(&partition.inner, &params, &mut rng)
        .map(|inner| PyFeatures { inner })
        .map_err(py_err)
}

#[pyfunction]
fn empirical_mixing(g: &PyGraph, p: &PyPartition) -> PyResult<f64> {
    lfr::empirical_mixing(&g.inner, &p.inner).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (g, target, beta_b, p=0.5, seed=0))]
fn dice(g: &PyGraph, target: Vec<usize>, beta_b: f64, p: f64, seed: u64) -> PyResult<PyPerturbation> {
    let spec = PerturbSpec::new(target, beta_b, p).map_err(py_err)?;
    perturb::dice(&g.inner, &spec, &mut seeding::rng(seed))
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (g, x, partition, target, beta_b, p=0.5, seed=0))]
fn fcom_dice(
    g: &PyGraph,
    x: &PyFeatures,
    partition: &PyPartition,
    target: usize,
    beta_b: f64,
    p: f64,
    seed: u64,
) -> PyResult<PyPerturbation> {
    if target >= partition.inner.k() {
        return Err(PyValueError::new_err(format!("no community {target}")));
    }
    let spec = PerturbSpec::new(partition.inner.members(target), beta_b, p).map_err(py_err)?;
    let index = perturb::community_centroids(&x.inner, &partition.inner).map_err(py_err)?;
    perturb::fcom_dice(&g.inner, &x.inner, &partition.inner, &index, &spec, &mut seeding::rng(seed))
        .map(Into::into)
        .map_err(py_err)
}

/// Trains DMoN and returns the hard partition and per-epoch total loss.
#[pyfunction]
#[pyo3(signature = (g, x, k, learning_rate=0.01, epochs=500, dropout=0.5, seed=0, hidden=vec![64]))]
#[allow(clippy::too_many_arguments)]
fn train_dmon(
    g: &PyGraph,
    x: &PyFeatures,
    k: usize,
    learning_rate: f64,
    epochs: usize,
    dropout: f64,
    seed: u64,
    hidden: Vec<usize>,
) -> PyResult<(PyPartition, Vec<f64>)> {
    let hyper = DmonHyper {
        hidden_dims: hidden,
        learning_rate,
        epochs,
        dropout_rate: dropout,
        seed,
        dropout_enabled: dropout > 0.0,
        ..DmonHyper::new(k)
    };
    let out = dmon::train(&g.inner, &x.inner, &hyper).map_err(py_err)?;
    let losses = out.loss_trace.iter().map(|t| t.total).collect();
    Ok((
        PyPartition {
            inner: dmon::hard_assignment(&out.assignment),
        },
        losses,
    ))
}

#[pyfunction]
fn modularity(g: &PyGraph, p: &PyPartition) -> PyResult<f64> {
    metrics::modularity(&g.inner, &p.inner).map_err(py_err)
}

#[pyfunction]
fn m1(target: Vec<usize>, detected: &PyPartition) -> PyResult<f64> {
    metrics::m1(&target, &detected.inner).map_err(py_err)
}

#[pyfunction]
fn m2(target: Vec<usize>, detected: &PyPartition) -> PyResult<f64> {
    metrics::m2(&target, &detected.inner, detected.inner.len()).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (a, b, alpha=0.9))]
fn ecs(a: &PyPartition, b: &PyPartition, alpha: f64) -> PyResult<f64> {
    metrics::element_centric_similarity(&a.inner, &b.inner, EcsParams { alpha }).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (g, seed=0))]
fn louvain(g: &PyGraph, seed: u64) -> PyResult<PyPartition> {
    metrics::louvain(&g.inner, &mut seeding::rng(seed))
        .map(|inner| PyPartition { inner })
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (g, runs=50, tau=0.3, seed=0))]
fn consensus_louvain(g: &PyGraph, runs: usize, tau: f64, seed: u64) -> PyResult<PyPartition> {
    metrics::consensus_louvain(&g.inner, runs, tau, seed)
        .map(|inner| PyPartition { inner })
        .map_err(py_err)
}

#[pymodule]
fn pycomconceal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPartition>()?;
    m.add_class::<PyFeatures>()?;
    m.add_class::<PyPerturbation>()?;
    m.add_function(wrap_pyfunction!(generate_lfr, m)?)?;
    m.add_function(wrap_pyfunction!(generate_features, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_mixing, m)?)?;
    m.add_function(wrap_pyfunction!(dice, m)?)?;
    m.add_function(wrap_pyfunction!(fcom_dice, m)?)?;
    m.add_function(wrap_pyfunction!(train_dmon, m)?)?;
    m.add_function(wrap_pyfunction!(modularity, m)?)?;
    m.add_function(wrap_pyfunction!(m1, m)?)?;
    m.add_function(wrap_pyfunction!(m2, m)?)?;
    m.add_function(wrap_pyfunction!(ecs, m)?)?;
    m.add_function(wrap_pyfunction!(louvain, m)?)?;
    m.add_function(wrap_pyfunction!(consensus_louvain, m)?)?;
    Ok(())
}
