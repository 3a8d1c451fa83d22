//! DMoN-style unsupervised clustering, trained from scratch.
//!
//! Encoder layers compute `H' = selu(Â H W + X W_skip)` where `Â` is the
//! symmetrically normalized adjacency without self-loops and `X` the raw
//! features. The last representation goes through dropout (training only), a
//! linear map to `k` logits and a row softmax, giving soft assignments `C`.
//!
//! Loss: `-(1/2m) Tr(Cᵀ B C) + (√k / n) ‖1ᵀ C‖ - 1` with the modularity matrix
//! `B = A - k̂ k̂ᵀ / 2m`. `B` is never materialized: `Tr(CᵀBC) = Tr(CᵀAC) -
//! ‖k̂ᵀC‖² / 2m`. Gradients are exact reverse-mode derivatives written out by
//! hand; training is plain full-batch gradient descent.

use ndarray::{Array2, Axis};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeFeatures, Partition};
use crate::seeding::{self, Rng};

pub const SELU_LAMBDA: f64 = 1.0507009873554805;
pub const SELU_ALPHA: f64 = 1.6732632423543772;

pub fn selu(v: f64) -> f64 {
    if v > 0.0 {
        SELU_LAMBDA * v
    } else {
        SELU_LAMBDA * SELU_ALPHA * v.exp_m1()
    }
}

fn selu_derivative(v: f64) -> f64 {
    if v > 0.0 {
        SELU_LAMBDA
    } else {
        SELU_LAMBDA * SELU_ALPHA * v.exp()
    }
}

/// Elementwise SeLU.
pub fn selu_vec(values: &[f64]) -> Vec<f64> {
    values.iter().map(|&v| selu(v)).collect()
}

/// `D^{-1/2} A D^{-1/2}` in compressed sparse row form. Zero-degree nodes
/// have empty rows.
#[derive(Debug, Clone)]
pub struct NormalizedAdjacency {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl NormalizedAdjacency {
    pub fn new(g: &Graph) -> Self {
        let mut row_ptr = Vec::with_capacity(g.n() + 1);
        let mut cols = Vec::with_capacity(2 * g.m());
        let mut vals = Vec::with_capacity(2 * g.m());
        row_ptr.push(0);
        for u in 0..g.n() {
            for &v in g.neighbors(u) {
                cols.push(v);
                vals.push(1.0 / ((g.degree(u) * g.degree(v)) as f64).sqrt());
            }
            row_ptr.push(cols.len());
        }
        Self {
            n: g.n(),
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[[i, self.cols[idx]]] = self.vals[idx];
            }
        }
        out
    }

    /// `Â · m`.
    pub fn matmul(&self, m: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros((self.n, m.ncols()));
        for i in 0..self.n {
            let mut row = out.row_mut(i);
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                row.scaled_add(self.vals[idx], &m.row(self.cols[idx]));
            }
        }
        out
    }
}

pub fn normalized_adjacency(g: &Graph) -> NormalizedAdjacency {
    NormalizedAdjacency::new(g)
}

/// `A · m` for the unweighted adjacency of `g`.
fn adjacency_matmul(g: &Graph, m: &Array2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros((g.n(), m.ncols()));
    for u in 0..g.n() {
        let mut row = out.row_mut(u);
        for &v in g.neighbors(u) {
            row += &m.row(v);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmonHyper {
    pub k: usize,
    #[serde(default = "default_hidden")]
    pub hidden_dims: Vec<usize>,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_dropout")]
    pub dropout_rate: f64,
    /// Multiplier on the Glorot-uniform bound.
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub dropout_enabled: bool,
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
fn default_init_scale() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}

impl DmonHyper {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            hidden_dims: default_hidden(),
            learning_rate: default_lr(),
            epochs: default_epochs(),
            dropout_rate: default_dropout(),
            init_scale: default_init_scale(),
            seed: 0,
            dropout_enabled: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParam(format!("k = {} must be at least 2", self.k)));
        }
        if self.epochs == 0 || !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidParam(
                "epochs must be positive and the learning rate finite and non-negative".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::InvalidParam(format!(
                "dropout rate {} outside [0, 1)",
                self.dropout_rate
            )));
        }
        if self.hidden_dims.is_empty() || self.hidden_dims.contains(&0) {
            return Err(Error::InvalidParam("hidden widths must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderLayer {
    /// `d_l × d_{l+1}`, applied to `Â H`.
    pub weight: Array2<f64>,
    /// `d × d_{l+1}`, applied to the raw features.
    pub skip: Array2<f64>,
}

/// Learnable weights; also used to hold gradients of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DmonParams {
    pub layers: Vec<EncoderLayer>,
    /// `d_L × k` projection to logits.
    pub output: Array2<f64>,
}

fn glorot(rows: usize, cols: usize, scale: f64, rng: &mut Rng) -> Array2<f64> {
    let bound = scale * (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-bound..=bound))
}

impl DmonParams {
    pub fn init(d: usize, hyper: &DmonHyper, rng: &mut Rng) -> Self {
        let mut width = d;
        let mut layers = Vec::with_capacity(hyper.hidden_dims.len());
        for &h in &hyper.hidden_dims {
            let weight = glorot(width, h, hyper.init_scale, rng);
            let skip = glorot(d, h, hyper.init_scale, rng);
            layers.push(EncoderLayer { weight, skip });
            width = h;
        }
        let output = glorot(width, hyper.k, hyper.init_scale, rng);
        Self { layers, output }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| EncoderLayer {
                    weight: Array2::zeros(l.weight.raw_dim()),
                    skip: Array2::zeros(l.skip.raw_dim()),
                })
                .collect(),
            output: Array2::zeros(self.output.raw_dim()),
        }
    }

    pub fn k(&self) -> usize {
        self.output.ncols()
    }

    /// All matrices in a fixed order: per layer weight then skip, then output.
    pub fn matrices(&self) -> Vec<&Array2<f64>> {
        let mut out: Vec<&Array2<f64>> = Vec::new();
        for l in &self.layers {
            out.push(&l.weight);
            out.push(&l.skip);
        }
        out.push(&self.output);
        out
    }

    pub fn matrices_mut(&mut self) -> Vec<&mut Array2<f64>> {
        let mut out: Vec<&mut Array2<f64>> = Vec::new();
        for l in &mut self.layers {
            out.push(&mut l.weight);
            out.push(&mut l.skip);
        }
        out.push(&mut self.output);
        out
    }

    fn check_dims(&self, d: usize) -> Result<()> {
        let mut width = d;
        for l in &self.layers {
            for (expected, found) in [
                (width, l.weight.nrows()),
                (d, l.skip.nrows()),
                (l.weight.ncols(), l.skip.ncols()),
            ] {
                if expected != found {
                    return Err(Error::DimensionMismatch { expected, found });
                }
            }
            width = l.weight.ncols();
        }
        if self.output.nrows() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                found: self.output.nrows(),
            });
        }
        Ok(())
    }
}

/// Row-stochastic `n × k` soft membership matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftAssignment {
    pub c: Array2<f64>,
}

/// Per-entry dropout multipliers (`0` or `1 / (1 - rate)`) for the final
/// encoder representation.
pub type DropoutMask = Array2<f64>;

pub fn sample_dropout_mask(rows: usize, cols: usize, rate: f64, rng: &mut Rng) -> DropoutMask {
    let keep = 1.0 / (1.0 - rate);
    Array2::from_shape_simple_fn((rows, cols), || {
        if rng.random::<f64>() < rate {
            0.0
        } else {
            keep
        }
    })
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// `Â H_l` for every layer input.
    propagated: Vec<Array2<f64>>,
    /// Pre-activations per layer.
    pre: Vec<Array2<f64>>,
    /// `H_0 = X, H_1, ..., H_L`.
    pub hidden: Vec<Array2<f64>>,
    /// `H_L` after dropout.
    dropped: Array2<f64>,
    pub assignment: SoftAssignment,
}

fn row_softmax(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

pub fn forward_with_mask(
    params: &DmonParams,
    a: &NormalizedAdjacency,
    x: &NodeFeatures,
    mask: Option<&DropoutMask>,
) -> Result<ForwardPass> {
    params.check_dims(x.d())?;
    if a.n() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: x.n(),
        });
    }
    let xm = x.matrix();
    let mut propagated = Vec::with_capacity(params.layers.len());
    let mut pre = Vec::with_capacity(params.layers.len());
    let mut hidden = vec![xm.clone()];
    for layer in &params.layers {
        let ah = a.matmul(hidden.last().expect("input present"));
        let z = ah.dot(&layer.weight) + xm.dot(&layer.skip);
        hidden.push(z.mapv(selu));
        propagated.push(ah);
        pre.push(z);
    }
    let last = hidden.last().expect("at least the input");
    let dropped = match mask {
        Some(m) => {
            if m.dim() != last.dim() {
                return Err(Error::DimensionMismatch {
                    expected: last.len(),
                    found: m.len(),
                });
            }
            last * m
        }
        None => last.clone(),
    };
    let c = row_softmax(&dropped.dot(&params.output));
    Ok(ForwardPass {
        propagated,
        pre,
        hidden,
        dropped,
        assignment: SoftAssignment { c },
    })
}

/// Forward pass; draws a dropout mask from `rng` when dropout is enabled.
pub fn forward(
    params: &DmonParams,
    a: &NormalizedAdjacency,
    x: &NodeFeatures,
    hyper: &DmonHyper,
    rng: &mut Rng,
) -> Result<ForwardPass> {
    let width = params.layers.last().map_or(x.d(), |l| l.weight.ncols());
    let mask = (hyper.dropout_enabled && hyper.dropout_rate > 0.0)
        .then(|| sample_dropout_mask(x.n(), width, hyper.dropout_rate, rng));
    forward_with_mask(params, a, x, mask.as_ref())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossTerms {
    pub total: f64,
    /// `-(1/2m) Tr(CᵀBC)`, i.e. minus the relaxed modularity.
    pub modularity: f64,
    pub collapse: f64,
}

fn check_loss_inputs(c: &Array2<f64>, g: &Graph) -> Result<()> {
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    if c.nrows() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: c.nrows(),
        });
    }
    Ok(())
}

fn degree_vector(g: &Graph) -> Array2<f64> {
    Array2::from_shape_fn((1, g.n()), |(_, u)| g.degree(u) as f64)
}

pub fn dmon_loss(c: &SoftAssignment, g: &Graph) -> Result<LossTerms> {
    let c = &c.c;
    check_loss_inputs(c, g)?;
    let two_m = 2.0 * g.m() as f64;
    let ac = adjacency_matmul(g, c);
    let kc = degree_vector(g).dot(c);
    let trace = (c * &ac).sum() - kc.iter().map(|v| v * v).sum::<f64>() / two_m;
    let modularity = -trace / two_m;
    let (n, k) = (c.nrows() as f64, c.ncols() as f64);
    let col_norm = c.sum_axis(Axis(0)).iter().map(|v| v * v).sum::<f64>().sqrt();
    let collapse = k.sqrt() / n * col_norm - 1.0;
    Ok(LossTerms {
        total: modularity + collapse,
        modularity,
        collapse,
    })
}

/// Loss gradient with respect to the soft assignment, split into the
/// modularity and collapse contributions.
fn loss_gradient_wrt_assignment(c: &Array2<f64>, g: &Graph) -> (Array2<f64>, Array2<f64>) {
    let m = g.m() as f64;
    let degrees = degree_vector(g);
    let kc = degrees.dot(c);
    // d/dC of -(1/2m)(Tr(CᵀAC) - ‖k̂ᵀC‖²/2m)
    let mut modularity = adjacency_matmul(g, c) * (-1.0 / m);
    let outer = degrees.t().dot(&kc) * (1.0 / (2.0 * m * m));
    modularity += &outer;

    let (n, k) = (c.nrows(), c.ncols());
    let sums = c.sum_axis(Axis(0));
    let norm = sums.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = (k as f64).sqrt() / n as f64 / norm;
    let row = sums.mapv(|s| s * scale);
    let collapse = Array2::from_shape_fn((n, k), |(_, j)| row[j]);
    (modularity, collapse)
}

/// Exact gradients of `dmon_loss ∘ forward` for a fixed dropout mask
/// (`None` disables dropout).
pub fn loss_gradients(
    params: &DmonParams,
    a: &NormalizedAdjacency,
    x: &NodeFeatures,
    g: &Graph,
    mask: Option<&DropoutMask>,
) -> Result<(LossTerms, DmonParams)> {
    let pass = forward_with_mask(params, a, x, mask)?;
    let c = &pass.assignment.c;
    let terms = dmon_loss(&pass.assignment, g)?;
    let (g_mod, g_col) = loss_gradient_wrt_assignment(c, g);
    let grad_c = g_mod + g_col;

    // softmax backward, row by row
    let inner = (&grad_c * c).sum_axis(Axis(1));
    let mut grad_logits = grad_c;
    for (i, mut row) in grad_logits.rows_mut().into_iter().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = c[[i, j]] * (*v - inner[i]);
        }
    }

    let mut grads = params.zeros_like();
    grads.output = pass.dropped.t().dot(&grad_logits);
    let mut grad_h = grad_logits.dot(&params.output.t());
    if let Some(m) = mask {
        grad_h *= m;
    }
    let xm = x.matrix();
    for l in (0..params.layers.len()).rev() {
        let mut grad_z = grad_h;
        grad_z.zip_mut_with(&pass.pre[l], |gz, &z| *gz *= selu_derivative(z));
        grads.layers[l].weight = pass.propagated[l].t().dot(&grad_z);
        grads.layers[l].skip = xm.t().dot(&grad_z);
        // Â is symmetric
        grad_h = a.matmul(&grad_z.dot(&params.layers[l].weight.t()));
    }
    Ok((terms, grads))
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub params: DmonParams,
    pub assignment: SoftAssignment,
    /// Training loss per epoch, evaluated before that epoch's update.
    pub loss_trace: Vec<LossTerms>,
}

/// Full-batch gradient descent for `hyper.epochs` steps. The returned
/// assignment is computed with dropout off.
pub fn train(g: &Graph, x: &NodeFeatures, hyper: &DmonHyper) -> Result<TrainOutput> {
    hyper.validate()?;
    x.check_rows(g.n())?;
    let mut rng = seeding::rng(hyper.seed);
    let a = NormalizedAdjacency::new(g);
    let mut params = DmonParams::init(x.d(), hyper, &mut rng);
    let width = *hyper.hidden_dims.last().expect("validated non-empty");
    let use_dropout = hyper.dropout_enabled && hyper.dropout_rate > 0.0;
    let mut trace = Vec::with_capacity(hyper.epochs);
    for epoch in 0..hyper.epochs {
        let mask = use_dropout.then(|| sample_dropout_mask(g.n(), width, hyper.dropout_rate, &mut rng));
        let (terms, grads) = loss_gradients(&params, &a, x, g, mask.as_ref())?;
        if !terms.total.is_finite() {
            return Err(Error::DivergenceDetected(epoch));
        }
        trace.push(terms);
        for (p, gr) in params.matrices_mut().into_iter().zip(grads.matrices()) {
            p.scaled_add(-hyper.learning_rate, gr);
        }
    }
    let assignment = forward_with_mask(&params, &a, x, None)?.assignment;
    if assignment.c.iter().any(|v| !v.is_finite()) {
        return Err(Error::DivergenceDetected(hyper.epochs));
    }
    Ok(TrainOutput {
        params,
        assignment,
        loss_trace: trace,
    })
}

/// Row argmax with ties to the smallest cluster index; empty clusters dropped.
pub fn hard_assignment(c: &SoftAssignment) -> Partition {
    let labels = c
        .c
        .rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
                .0
        })
        .collect();
    Partition::new(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn selu_values() {
        assert_eq!(selu(0.0), 0.0);
        assert_abs_diff_eq!(selu(1.0), SELU_LAMBDA);
        assert_abs_diff_eq!(selu(-50.0), -SELU_LAMBDA * SELU_ALPHA, epsilon = 1e-12);
        assert_abs_diff_eq!(SELU_LAMBDA * SELU_ALPHA, 1.7580993408473766, epsilon = 1e-15);
        assert_eq!(selu_vec(&[0.0, 1.0]), vec![0.0, SELU_LAMBDA]);
    }

    #[test]
    fn normalized_adjacency_small_graphs() {
        let edge = NormalizedAdjacency::new(&Graph::new(2, &[(0, 1)]).unwrap()).to_dense();
        assert_eq!(edge[[0, 1]], 1.0);
        assert_eq!(edge[[1, 0]], 1.0);
        let tri = NormalizedAdjacency::new(&Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()).to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(tri[[i, j]], if i == j { 0.0 } else { 0.5 });
            }
        }
        let star = Graph::new(6, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let s = NormalizedAdjacency::new(&star).to_dense();
        assert_abs_diff_eq!(s[[0, 3]], 1.0 / (4.0f64).sqrt());
        assert!(s.row(5).iter().all(|&v| v == 0.0));
        assert_eq!(s, s.t());
    }

    fn toy() -> (Graph, NodeFeatures) {
        let g = Graph::new(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap();
        let x = NodeFeatures::from_rows(&[
            vec![1.0, 0.2, -0.3],
            vec![0.9, -0.1, 0.0],
            vec![1.1, 0.3, 0.2],
            vec![-1.0, 0.5, 0.1],
            vec![-0.8, -0.4, 0.3],
            vec![-1.2, 0.0, -0.2],
        ])
        .unwrap();
        (g, x)
    }

    #[test]
    fn zero_weights_give_uniform_rows() {
        let (g, x) = toy();
        let hyper = DmonHyper {
            hidden_dims: vec![4],
            ..DmonHyper::new(3)
        };
        let params = DmonParams::init(3, &hyper, &mut seeding::rng(0)).zeros_like();
        let pass = forward_with_mask(&params, &NormalizedAdjacency::new(&g), &x, None).unwrap();
        assert!(pass.assignment.c.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn loss_of_two_triangles() {
        let g = Graph::new(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let c = SoftAssignment {
            c: Partition::new(vec![0, 0, 0, 1, 1, 1]).membership_matrix(),
        };
        let terms = dmon_loss(&c, &g).unwrap();
        assert_abs_diff_eq!(terms.modularity, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(terms.collapse, 0.0, epsilon = 1e-12);

        let collapsed = SoftAssignment {
            c: Partition::new(vec![0; 6]).membership_matrix(),
        };
        let mut wide = Array2::zeros((6, 4));
        wide.column_mut(0).assign(&collapsed.c.column(0));
        let terms = dmon_loss(&SoftAssignment { c: wide }, &g).unwrap();
        assert_abs_diff_eq!(terms.collapse, 1.0, epsilon = 1e-12); // √4 - 1
    }

    #[test]
    fn zero_features_zero_gradients() {
        let (g, _) = toy();
        let x = NodeFeatures::new(Array2::zeros((6, 3))).unwrap();
        let hyper = DmonHyper {
            hidden_dims: vec![4],
            ..DmonHyper::new(2)
        };
        let params = DmonParams::init(3, &hyper, &mut seeding::rng(3));
        let (_, grads) = loss_gradients(&params, &NormalizedAdjacency::new(&g), &x, &g, None).unwrap();
        // H_1 = selu(0) = 0 so every weight sees a zero input
        for m in grads.matrices() {
            assert!(m.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn zero_learning_rate_keeps_initial_assignment() {
        let (g, x) = toy();
        let hyper = DmonHyper {
            hidden_dims: vec![4],
            learning_rate: 0.0,
            epochs: 1,
            ..DmonHyper::new(2)
        };
        let out = train(&g, &x, &hyper).unwrap();
        let init = DmonParams::init(3, &hyper, &mut seeding::rng(hyper.seed));
        assert_eq!(out.params, init);
        let expected = forward_with_mask(&init, &NormalizedAdjacency::new(&g), &x, None).unwrap();
        assert_eq!(out.assignment, expected.assignment);
        assert_eq!(out.loss_trace.len(), 1);
    }

    #[test]
    fn hard_assignment_rules() {
        let one_hot = Partition::new(vec![1, 0, 1]).membership_matrix();
        assert_eq!(
            hard_assignment(&SoftAssignment { c: one_hot }).labels(),
            &[1, 0, 1]
        );
        let uniform = Array2::from_elem((4, 3), 1.0 / 3.0);
        assert_eq!(hard_assignment(&SoftAssignment { c: uniform }).labels(), &[0; 4]);
        // empty cluster 1 dropped: labels {0, 2} → {0, 1}
        let c = ndarray::array![[0.6, 0.1, 0.3], [0.2, 0.1, 0.7]];
        assert_eq!(hard_assignment(&SoftAssignment { c }).labels(), &[0, 1]);
    }

    #[test]
    fn hyper_validation() {
        let (g, x) = toy();
        assert!(train(&g, &x, &DmonHyper::new(1)).is_err());
        let hyper = DmonHyper {
            epochs: 0,
            ..DmonHyper::new(2)
        };
        assert!(train(&g, &x, &hyper).is_err());
    }
}
