//! Two-layer topological neural network `sigmoid(P relu(P s W1) W2)`.
//!
//! The shift operator `P` is a sparse `N x N` matrix over all cells, the
//! input `s` holds `F_in` features per cell, `W1` is `F_in x H` and `W2` is
//! `H x 1`. Only vertex outputs are supervised, through a binary
//! cross-entropy averaged over a vertex mask. Gradients are derived by hand
//! and the weights are trained full-batch with Adam.
//!
//! Dense products are written as plain loops in a fixed order so results are
//! reproducible bit for bit.

use std::io::Write;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::CombinatorialComplex;
use crate::sparse::{MatrixError, SparseMatrix};

/// Predictions are clamped to `[CLAMP, 1 - CLAMP]` inside the loss.
pub const CLAMP: f64 = 1e-7;

const INIT_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TnnError {
    #[error("dimension mismatch: {what} expected {expected}, got {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("mask is empty")]
    EmptyMask,
    #[error("mask index {index} is out of range ({len} labelled vertices)")]
    MaskOutOfRange { index: usize, len: usize },
    #[error("masks do not partition the {0} vertices")]
    NotAPartition(usize),
    #[error("gradient contains a non-finite entry")]
    NonFiniteGradient,
}

fn expect_dim(what: &'static str, expected: usize, found: usize) -> Result<(), TnnError> {
    if expected != found {
        return Err(TnnError::DimensionMismatch { what, expected, found });
    }
    Ok(())
}

/// Per-rank scalar signals of a complex of rank at most two.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBundle {
    pub s0: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
}

impl SignalBundle {
    pub fn new(cc: &CombinatorialComplex, s0: Vec<f64>, s1: Vec<f64>, s2: Vec<f64>) -> Result<Self, TnnError> {
        expect_dim("s0 length", cc.cells_of_rank(0).len(), s0.len())?;
        expect_dim("s1 length", cc.cells_of_rank(1).len(), s1.len())?;
        expect_dim("s2 length", cc.cells_of_rank(2).len(), s2.len())?;
        Ok(Self { s0, s1, s2 })
    }

    pub fn len(&self) -> usize {
        self.s0.len() + self.s1.len() + self.s2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `[s0; s1; s2]`.
    pub fn concat(&self) -> Vec<f64> {
        self.s0.iter().chain(&self.s1).chain(&self.s2).copied().collect()
    }

    /// The concatenation as an `N x 1` input matrix.
    pub fn as_input(&self) -> Array2<f64> {
        let s = self.concat();
        Array2::from_shape_vec((s.len(), 1), s).expect("length matches shape")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// Weights plus Adam state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub w1: Array2<f64>,
    pub w2: Array2<f64>,
    m1: Array2<f64>,
    v1: Array2<f64>,
    m2: Array2<f64>,
    v2: Array2<f64>,
    step: u64,
    pub adam: AdamConfig,
    seed: u64,
}

impl ModelState {
    /// Wraps given weights with fresh optimiser state.
    pub fn from_weights(w1: Array2<f64>, w2: Array2<f64>, adam: AdamConfig, seed: u64) -> Result<Self, TnnError> {
        expect_dim("W2 rows", w1.ncols(), w2.nrows())?;
        expect_dim("W2 cols", 1, w2.ncols())?;
        Ok(Self {
            m1: Array2::zeros(w1.raw_dim()),
            v1: Array2::zeros(w1.raw_dim()),
            m2: Array2::zeros(w2.raw_dim()),
            v2: Array2::zeros(w2.raw_dim()),
            w1,
            w2,
            step: 0,
            adam,
            seed,
        })
    }

    pub fn f_in(&self) -> usize {
        self.w1.nrows()
    }

    pub fn hidden(&self) -> usize {
        self.w1.ncols()
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn moments(&self) -> [&Array2<f64>; 4] {
        [&self.m1, &self.v1, &self.m2, &self.v2]
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile { w1: rows_of(&self.w1), w2: rows_of(&self.w2), hidden: self.hidden(), seed: self.seed }
    }
}

fn rows_of(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// Model JSON: `{"w1": [[...]], "w2": [[...]], "hidden": H, "seed": s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub w1: Vec<Vec<f64>>,
    pub w2: Vec<Vec<f64>>,
    pub hidden: usize,
    pub seed: u64,
}

impl ModelFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialisation is infallible")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn into_state(self, adam: AdamConfig) -> Result<ModelState, TnnError> {
        fn matrix(rows: Vec<Vec<f64>>, what: &'static str) -> Result<Array2<f64>, TnnError> {
            let ncols = rows.first().map_or(0, Vec::len);
            let nrows = rows.len();
            let mut flat = Vec::with_capacity(nrows * ncols);
            for r in rows {
                expect_dim(what, ncols, r.len())?;
                flat.extend(r);
            }
            Ok(Array2::from_shape_vec((nrows, ncols), flat).expect("rows are rectangular"))
        }
        let w1 = matrix(self.w1, "W1 row length")?;
        let w2 = matrix(self.w2, "W2 row length")?;
        expect_dim("hidden width", self.hidden, w1.ncols())?;
        ModelState::from_weights(w1, w2, adam, self.seed)
    }
}

/// Glorot-uniform weights, bound `sqrt(6 / (fan_in + fan_out))` per matrix.
pub fn init_params(f_in: usize, hidden: usize, seed: u64) -> ModelState {
    init_params_with(f_in, hidden, seed, AdamConfig::default())
}

pub fn init_params_with(f_in: usize, hidden: usize, seed: u64, adam: AdamConfig) -> ModelState {
    assert!(f_in >= 1 && hidden >= 1, "layer widths must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INIT_STREAM);
    let mut glorot = |rows: usize, cols: usize| {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-bound..=bound))
    };
    let w1 = glorot(f_in, hidden);
    let w2 = glorot(hidden, 1);
    ModelState::from_weights(w1, w2, adam, seed).expect("shapes agree by construction")
}

/// `a * b` with a fixed summation order.
fn matmul(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Array2<f64> {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = Array2::zeros((a.nrows(), b.ncols()));
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            let aik = a[[i, k]];
            for j in 0..b.ncols() {
                out[[i, j]] += aik * b[[k, j]];
            }
        }
    }
    out
}

/// `aᵀ * b` with a fixed summation order.
fn matmul_tn(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Array2<f64> {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = Array2::zeros((a.ncols(), b.ncols()));
    for k in 0..a.nrows() {
        for i in 0..a.ncols() {
            let aki = a[[k, i]];
            for j in 0..b.ncols() {
                out[[i, j]] += aki * b[[k, j]];
            }
        }
    }
    out
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Intermediate values kept for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `P s`
    pub ps: Array2<f64>,
    /// `P s W1`
    pub z1: Array2<f64>,
    /// `relu(z1)`
    pub a1: Array2<f64>,
    /// `P a1 W2`
    pub z2: Array1<f64>,
}

/// Evaluates the network; returns per-cell probabilities.
pub fn forward(
    p: &SparseMatrix<f64>,
    s: &Array2<f64>,
    m: &ModelState,
) -> Result<(Array1<f64>, ForwardCache), TnnError> {
    if !p.is_square() {
        return Err(MatrixError::NotSquare { rows: p.rows(), cols: p.cols() }.into());
    }
    expect_dim("input rows", p.rows(), s.nrows())?;
    expect_dim("input features", m.f_in(), s.ncols())?;
    let ps = p.mul_dense(s.view())?;
    let z1 = matmul(ps.view(), m.w1.view());
    let a1 = z1.mapv(|x| x.max(0.0));
    let y = matmul(a1.view(), m.w2.view());
    let z2 = p.mul_dense(y.view())?.index_axis_move(Axis(1), 0);
    let pred = z2.mapv(sigmoid);
    Ok((pred, ForwardCache { ps, z1, a1, z2 }))
}

fn check_mask(mask: &[usize], len: usize) -> Result<(), TnnError> {
    if mask.is_empty() {
        return Err(TnnError::EmptyMask);
    }
    if let Some(&index) = mask.iter().find(|&&i| i >= len) {
        return Err(TnnError::MaskOutOfRange { index, len });
    }
    Ok(())
}

/// Mean binary cross-entropy over the masked entries, with clamped
/// predictions. `labels` covers the vertices (a prefix of `pred`).
pub fn masked_bce(pred: &Array1<f64>, labels: &[u8], mask: &[usize]) -> Result<f64, TnnError> {
    check_mask(mask, labels.len().min(pred.len()))?;
    let total: f64 = mask
        .iter()
        .map(|&i| {
            let q = pred[i].clamp(CLAMP, 1.0 - CLAMP);
            if labels[i] == 1 {
                -q.ln()
            } else {
                -(1.0 - q).ln()
            }
        })
        .sum();
    Ok(total / mask.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Array2<f64>,
    pub w2: Array2<f64>,
}

/// Loss and exact gradients of `masked_bce ∘ forward` w.r.t. `W1`, `W2`.
///
/// Where a prediction is clamped the loss is locally constant and contributes
/// no gradient; the ReLU derivative at 0 is taken as 0.
pub fn loss_and_gradients(
    p: &SparseMatrix<f64>,
    s: &Array2<f64>,
    m: &ModelState,
    labels: &[u8],
    mask: &[usize],
) -> Result<(f64, Gradients), TnnError> {
    let (pred, cache) = forward(p, s, m)?;
    let loss = masked_bce(&pred, labels, mask)?;
    let scale = 1.0 / mask.len() as f64;
    let mut dz2 = Array2::zeros((pred.len(), 1));
    for &i in mask {
        let q = pred[i];
        if q > CLAMP && q < 1.0 - CLAMP {
            dz2[[i, 0]] = (q - f64::from(labels[i])) * scale;
        }
    }
    let dy = p.transpose_mul_dense(dz2.view())?;
    let gw2 = matmul_tn(cache.a1.view(), dy.view());
    let mut dz1 = matmul(dy.view(), m.w2.t());
    dz1.zip_mut_with(&cache.z1, |d, &z| {
        if z <= 0.0 {
            *d = 0.0;
        }
    });
    let gw1 = matmul_tn(cache.ps.view(), dz1.view());
    Ok((loss, Gradients { w1: gw1, w2: gw2 }))
}

pub fn gradients(
    p: &SparseMatrix<f64>,
    s: &Array2<f64>,
    m: &ModelState,
    labels: &[u8],
    mask: &[usize],
) -> Result<Gradients, TnnError> {
    loss_and_gradients(p, s, m, labels, mask).map(|(_, g)| g)
}

/// One bias-corrected Adam update. Leaves `m` untouched on error.
pub fn adam_step(m: &mut ModelState, g: &Gradients) -> Result<(), TnnError> {
    expect_dim("gW1 rows", m.w1.nrows(), g.w1.nrows())?;
    expect_dim("gW1 cols", m.w1.ncols(), g.w1.ncols())?;
    expect_dim("gW2 rows", m.w2.nrows(), g.w2.nrows())?;
    expect_dim("gW2 cols", m.w2.ncols(), g.w2.ncols())?;
    if g.w1.iter().chain(g.w2.iter()).any(|x| !x.is_finite()) {
        return Err(TnnError::NonFiniteGradient);
    }
    m.step += 1;
    let AdamConfig { lr, beta1, beta2, eps } = m.adam;
    let t = m.step as i32;
    let (c1, c2) = (1.0 - beta1.powi(t), 1.0 - beta2.powi(t));
    let update = |w: &mut Array2<f64>, mo: &mut Array2<f64>, ve: &mut Array2<f64>, g: &Array2<f64>| {
        for (((w, mo), ve), &g) in w.iter_mut().zip(mo.iter_mut()).zip(ve.iter_mut()).zip(g.iter()) {
            *mo = beta1 * *mo + (1.0 - beta1) * g;
            *ve = beta2 * *ve + (1.0 - beta2) * g * g;
            let (m_hat, v_hat) = (*mo / c1, *ve / c2);
            *w -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    };
    update(&mut m.w1, &mut m.m1, &mut m.v1, &g.w1);
    update(&mut m.w2, &mut m.m2, &mut m.v2, &g.w2);
    Ok(())
}

/// Fraction of masked vertices with `(pred > 0.5) == label`.
pub fn accuracy(pred: &Array1<f64>, labels: &[u8], mask: &[usize]) -> Result<f64, TnnError> {
    check_mask(mask, labels.len().min(pred.len()))?;
    let hits = mask.iter().filter(|&&i| u8::from(pred[i] > 0.5) == labels[i]).count();
    Ok(hits as f64 / mask.len() as f64)
}

pub fn evaluate(
    m: &ModelState,
    p: &SparseMatrix<f64>,
    s: &Array2<f64>,
    labels: &[u8],
    mask: &[usize],
) -> Result<f64, TnnError> {
    let (pred, _) = forward(p, s, m)?;
    accuracy(&pred, labels, mask)
}

/// Inputs, vertex labels and a train/validation/test split of the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Supervision {
    inputs: Array2<f64>,
    labels: Vec<u8>,
    train: Vec<usize>,
    val: Vec<usize>,
    test: Vec<usize>,
}

impl Supervision {
    /// The three masks must partition `0..labels.len()`.
    pub fn new(
        inputs: Array2<f64>,
        labels: Vec<u8>,
        train: Vec<usize>,
        val: Vec<usize>,
        test: Vec<usize>,
    ) -> Result<Self, TnnError> {
        let n = labels.len();
        if inputs.nrows() < n {
            return Err(TnnError::DimensionMismatch { what: "input rows", expected: n, found: inputs.nrows() });
        }
        let mut hit = vec![false; n];
        for &i in train.iter().chain(&val).chain(&test) {
            if i >= n || std::mem::replace(&mut hit[i], true) {
                return Err(TnnError::NotAPartition(n));
            }
        }
        if hit.iter().any(|h| !h) {
            return Err(TnnError::NotAPartition(n));
        }
        Ok(Self { inputs, labels, train, val, test })
    }

    pub fn inputs(&self) -> &Array2<f64> {
        &self.inputs
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn train(&self) -> &[usize] {
        &self.train
    }

    pub fn val(&self) -> &[usize] {
        &self.val
    }

    pub fn test(&self) -> &[usize] {
        &self.test
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { hidden: 16, epochs: 1000, adam: AdamConfig::default(), seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    /// 1-based.
    pub epoch: usize,
    /// Training loss before this epoch's update.
    pub train_loss: f64,
    /// Validation accuracy after this epoch's update.
    pub val_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Weights from the epoch with the best validation accuracy.
    pub model: ModelState,
    /// 0 when no epoch ran.
    pub best_epoch: usize,
    pub metrics: Vec<EpochMetrics>,
}

/// Full-batch training; keeps the earliest epoch with the best validation
/// accuracy.
pub fn train(p: &SparseMatrix<f64>, sup: &Supervision, config: &TrainConfig) -> Result<TrainOutcome, TnnError> {
    let s = sup.inputs();
    let mut model = init_params_with(s.ncols(), config.hidden, config.seed, config.adam);
    let mut best = (f64::NEG_INFINITY, 0, model.clone());
    let mut metrics = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        let (train_loss, grads) = loss_and_gradients(p, s, &model, sup.labels(), sup.train())?;
        adam_step(&mut model, &grads)?;
        let val_accuracy = evaluate(&model, p, s, sup.labels(), sup.val())?;
        metrics.push(EpochMetrics { epoch, train_loss, val_accuracy });
        if val_accuracy > best.0 {
            best = (val_accuracy, epoch, model.clone());
        }
    }
    Ok(TrainOutcome { model: best.2, best_epoch: best.1, metrics })
}

/// Writes `epoch,train_loss,val_accuracy` rows.
pub fn write_metrics_csv<W: Write>(metrics: &[EpochMetrics], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["epoch", "train_loss", "val_accuracy"])?;
    for m in metrics {
        out.write_record([m.epoch.to_string(), m.train_loss.to_string(), m.val_accuracy.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn eye(n: usize) -> SparseMatrix<f64> {
        SparseMatrix::identity(n)
    }

    #[test]
    fn init_bounds_and_determinism() {
        let m = init_params(1, 16, 9);
        assert_eq!(m.w1.dim(), (1, 16));
        assert_eq!(m.w2.dim(), (16, 1));
        let bound = (6.0f64 / 17.0).sqrt();
        assert!(m.w1.iter().chain(m.w2.iter()).all(|w| w.abs() <= bound));
        assert_eq!(m, init_params(1, 16, 9));
        assert_ne!(m.w1, init_params(1, 16, 10).w1);
        assert!(m.moments().iter().all(|a| a.iter().all(|&x| x == 0.0)));
        assert_eq!(m.step(), 0);
    }

    #[test]
    fn init_mean_vanishes() {
        let m = init_params(1, 10_000, 4);
        assert!(m.w1.mean().unwrap().abs() < 0.02);
    }

    #[test]
    fn zero_input_gives_half() {
        let m = init_params(1, 4, 1);
        let (pred, _) = forward(&eye(5), &Array2::zeros((5, 1)), &m).unwrap();
        assert!(pred.iter().all(|&q| q == 0.5));
    }

    #[test]
    fn identity_collapse() {
        let m = ModelState::from_weights(array![[1.0]], array![[1.0]], AdamConfig::default(), 0).unwrap();
        let x = 0.7;
        let (pred, _) = forward(&eye(1), &array![[x]], &m).unwrap();
        assert!((pred[0] - sigmoid(x)).abs() < 1e-15);
    }

    #[test]
    fn forward_shape_errors() {
        let m = init_params(1, 2, 0);
        assert!(matches!(
            forward(&eye(3), &Array2::zeros((4, 1)), &m),
            Err(TnnError::DimensionMismatch { what: "input rows", .. })
        ));
        assert!(matches!(
            forward(&eye(3), &Array2::zeros((3, 2)), &m),
            Err(TnnError::DimensionMismatch { what: "input features", .. })
        ));
        let rect = SparseMatrix::<f64>::zeros(3, 2);
        assert!(matches!(forward(&rect, &Array2::zeros((3, 1)), &m), Err(TnnError::Matrix(_))));
    }

    #[test]
    fn bce_values() {
        let half = Array1::from_elem(4, 0.5);
        let loss = masked_bce(&half, &[0, 1, 1, 0], &[0, 1, 3]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);

        let exact = array![0.0, 1.0, 1.0];
        let loss = masked_bce(&exact, &[0, 1, 1], &[0, 1, 2]).unwrap();
        // each term is -ln(1 - 1e-7)
        assert!((loss - -(1.0f64 - CLAMP).ln()).abs() < 1e-15);
        assert!(loss < 1.01e-7);

        let quarter = array![0.25];
        assert!((masked_bce(&quarter, &[1], &[0]).unwrap() - 4f64.ln()).abs() < 1e-12);

        assert_eq!(masked_bce(&quarter, &[1], &[]).unwrap_err(), TnnError::EmptyMask);
        assert_eq!(masked_bce(&quarter, &[1], &[1]).unwrap_err(), TnnError::MaskOutOfRange { index: 1, len: 1 });
        let extreme = array![0.0, 1.0];
        assert!(masked_bce(&extreme, &[1, 0], &[0, 1]).unwrap().is_finite());
    }

    #[test]
    fn zero_input_has_no_first_layer_gradient() {
        let m = init_params(1, 3, 2);
        let g = gradients(&eye(4), &Array2::zeros((4, 1)), &m, &[1, 0, 1, 0], &[0, 1, 2, 3]).unwrap();
        assert!(g.w1.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        let mut m =
            ModelState::from_weights(array![[0.5, -0.5]], array![[1.0], [2.0]], AdamConfig::default(), 0).unwrap();
        let before = m.clone();
        let g = Gradients { w1: array![[3.0, -1e-3]], w2: array![[0.0], [-50.0]] };
        adam_step(&mut m, &g).unwrap();
        assert_eq!(m.step(), 1);
        // |Δw| = lr * |g| / (|g| + eps)
        let expect = |g: f64| -1e-3 * g / (g.abs() + 1e-8);
        assert!((m.w1[[0, 0]] - before.w1[[0, 0]] - expect(3.0)).abs() < 1e-15);
        assert!((m.w1[[0, 1]] - before.w1[[0, 1]] - expect(-1e-3)).abs() < 1e-15);
        assert_eq!(m.w2[[0, 0]], before.w2[[0, 0]]);

        // constant gradient: second step has the same magnitude
        let w = m.w1[[0, 0]];
        adam_step(&mut m, &g).unwrap();
        assert!(((w - m.w1[[0, 0]]) - 1e-3).abs() < 1e-11);
    }

    #[test]
    fn adam_rejects_non_finite() {
        let mut m = init_params(1, 2, 0);
        let before = m.clone();
        let g = Gradients { w1: array![[f64::NAN, 0.0]], w2: Array2::zeros((2, 1)) };
        assert_eq!(adam_step(&mut m, &g).unwrap_err(), TnnError::NonFiniteGradient);
        assert_eq!(m, before);
        let wrong = Gradients { w1: Array2::zeros((2, 2)), w2: Array2::zeros((2, 1)) };
        assert!(matches!(adam_step(&mut m, &wrong), Err(TnnError::DimensionMismatch { .. })));
    }

    #[test]
    fn accuracy_rules() {
        assert_eq!(accuracy(&array![0.5, 0.5], &[0, 1], &[0, 1]).unwrap(), 0.5);
        assert_eq!(accuracy(&Array1::from_elem(3, 0.1), &[0, 0, 0], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&array![0.9], &[1], &[]).unwrap_err(), TnnError::EmptyMask);
    }

    #[test]
    fn supervision_requires_partition() {
        let x = Array2::zeros((4, 1));
        assert!(Supervision::new(x.clone(), vec![0, 1, 0], vec![0], vec![1], vec![2]).is_ok());
        assert_eq!(
            Supervision::new(x.clone(), vec![0, 1, 0], vec![0, 1], vec![1], vec![2]).unwrap_err(),
            TnnError::NotAPartition(3)
        );
        assert_eq!(
            Supervision::new(x, vec![0, 1, 0], vec![0], vec![], vec![2]).unwrap_err(),
            TnnError::NotAPartition(3)
        );
    }

    #[test]
    fn model_file_round_trip() {
        let m = init_params(2, 3, 5);
        let file = m.to_file();
        assert_eq!(file.hidden, 3);
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.starts_with(r#"{"w1":[["#));
        let back: ModelFile = serde_json::from_str(&json).unwrap();
        let restored = back.into_state(AdamConfig::default()).unwrap();
        assert_eq!(restored.w1, m.w1);
        assert_eq!(restored.w2, m.w2);
    }

    #[test]
    fn metrics_csv() {
        let rows = [EpochMetrics { epoch: 1, train_loss: 0.5, val_accuracy: 0.75 }];
        let mut buf = Vec::new();
        write_metrics_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "epoch,train_loss,val_accuracy\n1,0.5,0.75\n");
    }

    #[test]
    fn signal_bundle_lengths() {
        let cc = CombinatorialComplex::from_simplicial(3, [vec![0, 1, 2]]).unwrap();
        let b = SignalBundle::new(&cc, vec![0.0; 3], vec![1.0, 2.0, 3.0], vec![4.0]).unwrap();
        assert_eq!(b.len(), 7);
        assert_eq!(b.concat(), vec![0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(b.as_input().dim(), (7, 1));
        assert!(SignalBundle::new(&cc, vec![0.0; 3], vec![1.0], vec![4.0]).is_err());
    }
}
