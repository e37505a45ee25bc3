//! Synthetic vertex-labelling task on random Delaunay complexes.
//!
//! Edge and triangle signals are drawn uniform on `[-1, 1]`. Each triangle
//! gets a compatibility score `t = s2 + B12ᵀ s1 / 3` and a vertex is labelled
//! 1 when the scores of the triangles around it sum to a positive value. The
//! network sees `s1` and `s2` only (`s0` is zero) and must recover the vertex
//! labels. Two networks that differ only in their shift operator are
//! compared: `I + D_X` (simplicial) and `I + D_CC` (combinatorial).

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{CombinatorialComplex, ComplexFile};
use crate::delaunay::{self, DelaunayError};
use crate::operators::{self, OperatorError};
use crate::sparse::{MatrixError, SparseMatrix};
use crate::tnn::{self, SignalBundle, Supervision, TnnError, TrainConfig};

const SIGNAL_STREAM: u64 = 1;
const SPLIT_STREAM: u64 = 2;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Delaunay(#[from] DelaunayError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Tnn(#[from] TnnError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("runs must be at least 1")]
    NoRuns,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Which shift operator a network uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// `I + D_X`, the simplicial Dirac operator.
    Sc,
    /// `I + D_CC`, the combinatorial-complex Dirac operator.
    Cc,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Sc => "sc",
            ModelKind::Cc => "cc",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sc" => Ok(ModelKind::Sc),
            "cc" => Ok(ModelKind::Cc),
            other => Err(format!("unknown model kind `{other}` (expected `sc` or `cc`)")),
        }
    }
}

/// `t = s2 + (1/3) B12ᵀ s1`.
pub fn compatibility_vector(b12: &SparseMatrix, s1: &[f64], s2: &[f64]) -> Result<Vec<f64>, MatrixError> {
    if b12.rows() != s1.len() || b12.cols() != s2.len() {
        return Err(MatrixError::DimensionMismatch {
            op: "compatibility_vector",
            left: b12.shape(),
            right: (s1.len(), s2.len()),
        });
    }
    let mut flow = vec![0.0; s2.len()];
    for &(e, t, v) in b12.entries() {
        flow[t] += v as f64 * s1[e];
    }
    Ok(s2.iter().zip(flow).map(|(s, f)| s + f / 3.0).collect())
}

/// `u(B02 t)` with `u(x) = 1` iff `x > 0`.
pub fn vertex_labels(b02: &SparseMatrix, t: &[f64]) -> Result<Vec<u8>, MatrixError> {
    if b02.cols() != t.len() {
        return Err(MatrixError::DimensionMismatch { op: "vertex_labels", left: b02.shape(), right: (t.len(), 1) });
    }
    let mut sums = vec![0.0; b02.rows()];
    for &(v, j, w) in b02.entries() {
        sums[v] += w as f64 * t[j];
    }
    Ok(sums.into_iter().map(|x| u8::from(x > 0.0)).collect())
}

/// Train / validation / test vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Masks {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Masks {
    /// Uniform permutation split `⌊0.6n⌋ / ⌊0.2n⌋ / rest`.
    pub fn split(n: usize, rng: &mut impl Rng) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let (n_train, n_val) = (n * 6 / 10, n * 2 / 10);
        let test = order.split_off(n_train + n_val);
        let val = order.split_off(n_train);
        Self { train: order, val, test }
    }
}

/// A complex with input signals, vertex labels and a vertex split.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub complex: CombinatorialComplex,
    /// `s0` is all zeros.
    pub signals: SignalBundle,
    pub labels: Vec<u8>,
    pub masks: Masks,
    pub seed: u64,
}

impl Dataset {
    pub fn num_vertices(&self) -> usize {
        self.complex.num_vertices()
    }

    /// Network input `[0; s1; s2]` with the vertex split.
    pub fn supervision(&self) -> Result<Supervision, TnnError> {
        Supervision::new(
            self.signals.as_input(),
            self.labels.clone(),
            self.masks.train.clone(),
            self.masks.val.clone(),
            self.masks.test.clone(),
        )
    }

    /// `I + D` for the given model, optionally degree-normalised.
    pub fn shift_operator(&self, kind: ModelKind, normalize: bool) -> Result<SparseMatrix<f64>, OperatorError> {
        let d = match kind {
            ModelKind::Sc => operators::dirac_simplicial(&self.complex)?,
            ModelKind::Cc => operators::dirac_cc(&self.complex)?,
        };
        let p = operators::shift_operator(&d)?;
        if normalize {
            operators::normalized_shift(&p)
        } else {
            Ok(p.to_f64())
        }
    }

    /// Labels recomputed from the complex and signals.
    pub fn recompute_labels(&self) -> Result<Vec<u8>, ExperimentError> {
        labels_for(&self.complex, &self.signals.s1, &self.signals.s2)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DatasetFile::from(self)).expect("dataset serialisation is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let file: DatasetFile =
            serde_json::from_str(text).map_err(|e| ExperimentError::InvalidDataset(e.to_string()))?;
        Self::try_from(file)
    }
}

fn labels_for(cc: &CombinatorialComplex, s1: &[f64], s2: &[f64]) -> Result<Vec<u8>, ExperimentError> {
    let b12 = operators::signed_boundary(cc, 2)?;
    let b02 = operators::unsigned_incidence(cc, 0, 2)?;
    let t = compatibility_vector(&b12, s1, s2)?;
    Ok(vertex_labels(&b02, &t)?)
}

/// Dataset JSON layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetFile {
    pub complex: ComplexFile,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub labels: Vec<u8>,
    pub masks: Masks,
    pub seed: u64,
}

impl From<&Dataset> for DatasetFile {
    fn from(d: &Dataset) -> Self {
        Self {
            complex: d.complex.clone().into(),
            s1: d.signals.s1.clone(),
            s2: d.signals.s2.clone(),
            labels: d.labels.clone(),
            masks: d.masks.clone(),
            seed: d.seed,
        }
    }
}

impl TryFrom<DatasetFile> for Dataset {
    type Error = ExperimentError;

    fn try_from(file: DatasetFile) -> Result<Self, Self::Error> {
        let complex =
            CombinatorialComplex::try_from(file.complex).map_err(|e| ExperimentError::InvalidDataset(e.to_string()))?;
        let n = complex.num_vertices();
        let signals = SignalBundle::new(&complex, vec![0.0; n], file.s1, file.s2)?;
        if file.labels.len() != n || file.labels.iter().any(|&l| l > 1) {
            return Err(ExperimentError::InvalidDataset(format!("labels must be {n} values in {{0, 1}}")));
        }
        let dataset = Self { complex, signals, labels: file.labels, masks: file.masks, seed: file.seed };
        // validates the split
        dataset.supervision()?;
        Ok(dataset)
    }
}

/// Points → Delaunay → complex → signals → labels → split, all from `seed`.
pub fn generate_dataset(n_points: usize, seed: u64) -> Result<Dataset, ExperimentError> {
    let points = delaunay::sample_points(n_points, seed)?;
    let tri = delaunay::triangulate(&points)?;
    let complex = delaunay::complex_from_triangulation(&tri)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SIGNAL_STREAM);
    let mut uniform = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect() };
    let s1 = uniform(complex.cells_of_rank(1).len());
    let s2 = uniform(complex.cells_of_rank(2).len());
    let labels = labels_for(&complex, &s1, &s2)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SPLIT_STREAM);
    let masks = Masks::split(n_points, &mut rng);

    let signals = SignalBundle::new(&complex, vec![0.0; n_points], s1, s2)?;
    Ok(Dataset { complex, signals, labels, masks, seed })
}

/// Cell counts, Euler check and operator shapes of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub rank_counts: Vec<usize>,
    /// Boundary edges (edges in exactly one triangle) = hull vertices.
    pub hull_size: usize,
    pub euler_ok: bool,
    pub positive_labels: usize,
    pub mask_sizes: [usize; 3],
    /// `(name, rows, cols, nnz)`.
    pub matrices: Vec<(&'static str, usize, usize, usize)>,
}

impl fmt::Display for DatasetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.rank_counts.iter().enumerate() {
            writeln!(f, "rank {k}: {c} cells")?;
        }
        let n = self.rank_counts[0];
        writeln!(
            f,
            "euler: hull {} -> expected {} edges / {} triangles: {}",
            self.hull_size,
            (3 * n).saturating_sub(3 + self.hull_size),
            (2 * n).saturating_sub(2 + self.hull_size),
            if self.euler_ok { "ok" } else { "MISMATCH" }
        )?;
        writeln!(
            f,
            "labels: {} of {} positive ({:.3})",
            self.positive_labels,
            n,
            self.positive_labels as f64 / n.max(1) as f64
        )?;
        let [a, b, c] = self.mask_sizes;
        writeln!(f, "split: train {a} / val {b} / test {c}")?;
        for (name, r, c, nnz) in &self.matrices {
            writeln!(f, "{name}: {r}x{c} ({nnz} nonzeros)")?;
        }
        Ok(())
    }
}

impl Dataset {
    pub fn summary(&self) -> Result<DatasetSummary, ExperimentError> {
        let cc = &self.complex;
        let b01 = operators::signed_boundary(cc, 1)?;
        let b12 = operators::signed_boundary(cc, 2)?;
        let b02 = operators::unsigned_incidence(cc, 0, 2)?;
        let d_x = operators::dirac_simplicial(cc)?;
        let d_cc = operators::dirac_cc(cc)?;

        let mut per_edge = vec![0usize; b12.rows()];
        for &(e, _, _) in b12.entries() {
            per_edge[e] += 1;
        }
        let hull_size = per_edge.iter().filter(|&&k| k == 1).count();
        let counts = cc.rank_counts();
        let (n, h) = (counts[0], hull_size);
        let euler_ok = counts.len() == 3 && counts[1] + h + 3 == 3 * n && counts[2] + h + 2 == 2 * n;

        let shape = |name, m: &SparseMatrix| (name, m.rows(), m.cols(), m.nnz());
        Ok(DatasetSummary {
            rank_counts: counts,
            hull_size,
            euler_ok,
            positive_labels: self.labels.iter().filter(|&&l| l == 1).count(),
            mask_sizes: [self.masks.train.len(), self.masks.val.len(), self.masks.test.len()],
            matrices: vec![
                shape("B01", &b01),
                shape("B12", &b12),
                shape("B02", &b02),
                shape("D_X", &d_x),
                shape("D_CC", &d_cc),
            ],
        })
    }
}

/// Trains one network on a dataset and scores it on the test split.
pub fn train_model(
    dataset: &Dataset,
    kind: ModelKind,
    config: &TrainConfig,
    normalize: bool,
) -> Result<(tnn::TrainOutcome, f64), ExperimentError> {
    let p = dataset.shift_operator(kind, normalize)?;
    let sup = dataset.supervision()?;
    let outcome = tnn::train(&p, &sup, config)?;
    let test_accuracy = tnn::evaluate(&outcome.model, &p, sup.inputs(), sup.labels(), sup.test())?;
    Ok((outcome, test_accuracy))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub model: ModelKind,
    pub test_accuracy: f64,
    pub best_epoch: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub records: Vec<RunRecord>,
    pub mean_sc: f64,
    pub mean_cc: f64,
}

impl ComparisonReport {
    pub fn from_records(records: Vec<RunRecord>) -> Self {
        let mean = |kind| {
            let accs: Vec<f64> = records.iter().filter(|r| r.model == kind).map(|r| r.test_accuracy).collect();
            accs.iter().sum::<f64>() / accs.len().max(1) as f64
        };
        let (mean_sc, mean_cc) = (mean(ModelKind::Sc), mean(ModelKind::Cc));
        Self { records, mean_sc, mean_cc }
    }

    /// `mean_cc - mean_sc`.
    pub fn gap(&self) -> f64 {
        self.mean_cc - self.mean_sc
    }

    /// Runs in which the CC network scored strictly higher than SC.
    pub fn cc_wins(&self) -> usize {
        let runs: std::collections::BTreeSet<usize> = self.records.iter().map(|r| r.run).collect();
        runs.into_iter()
            .filter(|&run| {
                let acc = |kind| self.records.iter().find(|r| r.run == run && r.model == kind).map(|r| r.test_accuracy);
                matches!((acc(ModelKind::Cc), acc(ModelKind::Sc)), (Some(c), Some(s)) if c > s)
            })
            .count()
    }

    /// `run,seed,model,test_accuracy,best_epoch`, then one `aggregate` row
    /// per model holding the mean test accuracy.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["run", "seed", "model", "test_accuracy", "best_epoch"])?;
        for r in &self.records {
            out.write_record([
                r.run.to_string(),
                r.seed.to_string(),
                r.model.to_string(),
                r.test_accuracy.to_string(),
                r.best_epoch.to_string(),
            ])?;
        }
        for (kind, mean) in [(ModelKind::Sc, self.mean_sc), (ModelKind::Cc, self.mean_cc)] {
            out.write_record(["aggregate", "", &kind.to_string(), &mean.to_string(), ""])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("report is UTF-8")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareConfig {
    pub n_points: usize,
    pub runs: usize,
    pub base_seed: u64,
    /// `seed` is replaced by the run seed.
    pub train: TrainConfig,
    pub normalize: bool,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { n_points: 200, runs: 3, base_seed: 0, train: TrainConfig::default(), normalize: false }
    }
}

/// Run `r` uses seed `base_seed + r` for the points, signals, split and the
/// (shared) weight initialisation of both networks.
pub fn run_comparison(config: &CompareConfig) -> Result<ComparisonReport, ExperimentError> {
    run_comparison_ordered(config, [ModelKind::Sc, ModelKind::Cc])
}

/// As [`run_comparison`], training the two models in the given order.
pub fn run_comparison_ordered(
    config: &CompareConfig,
    order: [ModelKind; 2],
) -> Result<ComparisonReport, ExperimentError> {
    if config.runs == 0 {
        return Err(ExperimentError::NoRuns);
    }
    let mut records = Vec::with_capacity(2 * config.runs);
    for run in 0..config.runs {
        let seed = config.base_seed.wrapping_add(run as u64);
        let dataset = generate_dataset(config.n_points, seed)?;
        let train = TrainConfig { seed, ..config.train };
        let mut pair = Vec::with_capacity(2);
        for kind in order {
            let (outcome, test_accuracy) = train_model(&dataset, kind, &train, config.normalize)?;
            pair.push(RunRecord { run, seed, model: kind, test_accuracy, best_epoch: outcome.best_epoch });
        }
        pair.sort_by_key(|r| r.model);
        records.extend(pair);
    }
    Ok(ComparisonReport::from_records(records))
}
