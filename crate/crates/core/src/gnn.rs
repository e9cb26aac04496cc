//! GCN-style message-passing network with per-layer graph representations
//! exposed for the consistency loss, plus a deterministic training loop.

use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphCollection, LabeledGraph};
use crate::loss::{
    consistency_loss, total_loss, ConsistencyMode, LossError, SignConvention,
};
use crate::metrics::{accuracy, layer_rank_correlation, LayerCorrelationReport};
use crate::tensor::{ShapeError, Tensor};

#[derive(Debug, Error)]
pub enum GnnError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error("checkpoint io: {0}")]
    CheckpointIo(#[from] std::io::Error),
    #[error("checkpoint format: {0}")]
    CheckpointFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnnConfig {
    pub layer_count: usize,
    pub hidden_dim: usize,
    pub readout: Readout,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub dropout_rate: f64,
}

impl Default for GnnConfig {
    fn default() -> Self {
        Self {
            layer_count: 3,
            hidden_dim: 32,
            readout: Readout::Mean,
            learning_rate: 0.01,
            epochs: 50,
            batch_size: 64,
            seed: 0,
            dropout_rate: 0.0,
        }
    }
}

impl GnnConfig {
    pub fn validate(&self) -> Result<(), GnnError> {
        if self.layer_count < 2 {
            return Err(GnnError::InvalidConfig(
                "layer_count must be >= 2 (the consistency loss compares layers)".into(),
            ));
        }
        if self.hidden_dim == 0 {
            return Err(GnnError::InvalidConfig("hidden_dim must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(GnnError::InvalidConfig("batch_size must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(GnnError::InvalidConfig("epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(GnnError::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.dropout_rate != 0.0 && self.dropout_rate != 0.3 {
            return Err(GnnError::InvalidConfig(
                "dropout_rate must be 0 or 0.3".into(),
            ));
        }
        Ok(())
    }
}

/// Consistency-loss settings attached to a training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSettings {
    pub mode: ConsistencyMode,
    pub lambda: f64,
    pub sign: SignConvention,
    pub all_references: bool,
}

impl LossSettings {
    pub fn off() -> Self {
        Self {
            mode: ConsistencyMode::Off,
            lambda: 0.0,
            sign: SignConvention::Corrected,
            all_references: false,
        }
    }

    pub fn with_mode(mode: ConsistencyMode, lambda: f64) -> Self {
        Self {
            mode,
            lambda,
            sign: SignConvention::Corrected,
            all_references: false,
        }
    }
}

/// Maps node labels to one-hot feature columns; degenerates to a single
/// all-ones column when the collection carries one distinct label.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    labels: Vec<i64>,
}

impl FeatureMap {
    pub fn from_collection(c: &GraphCollection) -> Self {
        let mut labels: Vec<i64> = c
            .graphs()
            .iter()
            .flat_map(|g| g.node_labels().iter().copied())
            .collect();
        labels.sort_unstable();
        labels.dedup();
        Self { labels }
    }

    /// Feature dimension: one column per distinct label, or a single
    /// all-ones column when the label set is trivial.
    pub fn feature_dim(&self) -> usize {
        if self.labels.len() <= 1 {
            1
        } else {
            self.labels.len()
        }
    }

    fn write_features(&self, label: i64, row: &mut [f64]) {
        if self.labels.len() <= 1 {
            row[0] = 1.0;
        } else {
            let idx = self
                .labels
                .binary_search(&label)
                .expect("label seen during construction");
            row[idx] = 1.0;
        }
    }
}

/// Block-diagonal batch: row-normalized adjacency `D^-1 (A + I)`, stacked
/// one-hot features, node-to-graph assignment, and graph labels.
pub struct BatchGraph {
    pub adjacency: Tensor,
    pub features: Tensor,
    pub assignment: Vec<usize>,
    pub labels: Vec<usize>,
    pub node_count: usize,
    pub graph_count: usize,
}

pub fn build_batch(graphs: &[&LabeledGraph], fm: &FeatureMap) -> BatchGraph {
    assert!(!graphs.is_empty(), "batch must be non-empty");
    let node_count: usize = graphs.iter().map(|g| g.node_count()).sum();
    let dim = fm.feature_dim();
    let mut adj = vec![0.0; node_count * node_count];
    let mut feats = vec![0.0; node_count * dim];
    let mut assignment = Vec::with_capacity(node_count);
    let mut labels = Vec::with_capacity(graphs.len());
    let mut offset = 0;
    for (gi, g) in graphs.iter().enumerate() {
        let n = g.node_count();
        for v in 0..n {
            let row = offset + v;
            let inv = 1.0 / (g.degree(v) + 1) as f64;
            adj[row * node_count + row] = inv;
            for &u in g.neighbors(v) {
                adj[row * node_count + offset + u] = inv;
            }
            fm.write_features(g.node_label(v), &mut feats[row * dim..(row + 1) * dim]);
            assignment.push(gi);
        }
        labels.push(g.graph_label());
        offset += n;
    }
    BatchGraph {
        adjacency: Tensor::constant(node_count, node_count, adj),
        features: Tensor::constant(node_count, dim, feats),
        assignment,
        labels,
        node_count,
        graph_count: graphs.len(),
    }
}

/// Trainable parameters: one weight per message-passing layer plus the
/// classification head.
pub struct Weights {
    pub hidden: Vec<Tensor>,
    pub output: Tensor,
}

impl Weights {
    /// Glorot-uniform initialization from the given stream.
    pub fn init(
        config: &GnnConfig,
        in_dim: usize,
        class_count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let mut dims = Vec::with_capacity(config.layer_count);
        let mut prev = in_dim;
        for _ in 0..config.layer_count {
            dims.push((prev, config.hidden_dim));
            prev = config.hidden_dim;
        }
        let sample = |rng: &mut ChaCha8Rng, rows: usize, cols: usize| {
            let bound = (6.0 / (rows + cols) as f64).sqrt();
            let vals: Vec<f64> = (0..rows * cols)
                .map(|_| rng.gen_range(-bound..bound))
                .collect();
            Tensor::parameter(rows, cols, vals)
        };
        let hidden = dims
            .iter()
            .map(|&(r, c)| sample(rng, r, c))
            .collect();
        let output = sample(rng, config.hidden_dim, class_count);
        Self { hidden, output }
    }

    pub fn parameters(&self) -> Vec<&Tensor> {
        let mut p: Vec<&Tensor> = self.hidden.iter().collect();
        p.push(&self.output);
        p
    }

    pub fn snapshot(&self) -> Vec<Vec<f64>> {
        self.parameters().iter().map(|t| t.to_vec()).collect()
    }

    pub fn restore(&self, snapshot: &[Vec<f64>]) {
        for (t, s) in self.parameters().iter().zip(snapshot) {
            t.set_values(s.clone());
        }
    }

    pub fn zero_grads(&self) {
        for t in self.parameters() {
            t.zero_grad();
        }
    }

    pub fn sgd_step(&self, lr: f64) {
        for t in self.parameters() {
            t.sgd_step(lr);
        }
    }

    /// Flat binary checkpoint: magic, tensor count, then per tensor a shape
    /// header (rows, cols as u32 LE) and row-major f64 LE values.
    pub fn save(&self, path: &Path) -> Result<(), GnnError> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.write_all(b"IGKW")?;
        let params = self.parameters();
        out.write_all(&(params.len() as u32).to_le_bytes())?;
        for t in params {
            out.write_all(&(t.rows() as u32).to_le_bytes())?;
            out.write_all(&(t.cols() as u32).to_le_bytes())?;
            for v in t.values().iter() {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Vec<(usize, usize, Vec<f64>)>, GnnError> {
        let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        file.read_exact(&mut magic)?;
        if &magic != b"IGKW" {
            return Err(GnnError::CheckpointFormat("bad magic".into()));
        }
        let mut u32buf = [0u8; 4];
        file.read_exact(&mut u32buf)?;
        let count = u32::from_le_bytes(u32buf) as usize;
        let mut tensors = Vec::with_capacity(count);
        for _ in 0..count {
            file.read_exact(&mut u32buf)?;
            let rows = u32::from_le_bytes(u32buf) as usize;
            file.read_exact(&mut u32buf)?;
            let cols = u32::from_le_bytes(u32buf) as usize;
            let mut vals = Vec::with_capacity(rows * cols);
            let mut f64buf = [0u8; 8];
            for _ in 0..rows * cols {
                file.read_exact(&mut f64buf)?;
                vals.push(f64::from_le_bytes(f64buf));
            }
            tensors.push((rows, cols, vals));
        }
        Ok(tensors)
    }

    pub fn restore_from_file(&self, path: &Path) -> Result<(), GnnError> {
        let tensors = Self::load(path)?;
        let params = self.parameters();
        if tensors.len() != params.len() {
            return Err(GnnError::CheckpointFormat(format!(
                "checkpoint has {} tensors, model has {}",
                tensors.len(),
                params.len()
            )));
        }
        for (t, (rows, cols, vals)) in params.iter().zip(tensors) {
            if t.rows() != rows || t.cols() != cols {
                return Err(GnnError::CheckpointFormat(format!(
                    "shape mismatch: checkpoint ({rows}, {cols}) vs model ({}, {})",
                    t.rows(),
                    t.cols()
                )));
            }
            t.set_values(vals);
        }
        Ok(())
    }
}

/// Per-layer graph representation matrices (batch_size x hidden_dim) plus
/// classification logits.
pub struct LayerRepresentations {
    pub graph_reps: Vec<Tensor>,
    pub logits: Tensor,
}

fn forward_with(
    batch: &BatchGraph,
    weights: &Weights,
    dropout_masks: Option<&[Tensor]>,
) -> Result<LayerRepresentations, ShapeError> {
    let mut node_reps = batch.features.clone();
    let mut graph_reps = Vec::with_capacity(weights.hidden.len());
    for (k, w) in weights.hidden.iter().enumerate() {
        node_reps = batch.adjacency.matmul(&node_reps)?.matmul(w)?.relu();
        if let Some(masks) = dropout_masks {
            node_reps = node_reps.elementwise_mul(&masks[k])?;
        }
        graph_reps.push(node_reps.segment_mean(&batch.assignment)?);
    }
    let logits = graph_reps
        .last()
        .expect("layer_count >= 1")
        .matmul(&weights.output)?;
    Ok(LayerRepresentations { graph_reps, logits })
}

/// Deterministic inference pass (no dropout).
pub fn forward(
    batch: &BatchGraph,
    weights: &Weights,
    _config: &GnnConfig,
) -> Result<LayerRepresentations, ShapeError> {
    forward_with(batch, weights, None)
}

/// Train/validation/test index split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn validate(&self, n: usize) -> Result<(), GnnError> {
        let mut seen = vec![false; n];
        for &i in self.train.iter().chain(&self.valid).chain(&self.test) {
            if i >= n {
                return Err(GnnError::InvalidConfig(format!(
                    "split index {i} out of range for {n} graphs"
                )));
            }
            if seen[i] {
                return Err(GnnError::InvalidConfig(format!(
                    "split parts are not disjoint: index {i} repeats"
                )));
            }
            seen[i] = true;
        }
        if self.train.is_empty() {
            return Err(GnnError::InvalidConfig("train split is empty".into()));
        }
        Ok(())
    }
}

/// Seeded stratified split by the given integer ratio (e.g. 8:1:1).
pub fn stratified_split(
    collection: &GraphCollection,
    ratio: (usize, usize, usize),
    seed: u64,
) -> Split {
    let (rt, rv, rs) = ratio;
    let total = rt + rv + rs;
    assert!(total > 0 && rt > 0, "train ratio must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5711_ca7);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); collection.class_count()];
    for (i, g) in collection.graphs().iter().enumerate() {
        by_class[g.graph_label()].push(i);
    }
    let mut split = Split {
        train: Vec::new(),
        valid: Vec::new(),
        test: Vec::new(),
    };
    for indices in &mut by_class {
        indices.shuffle(&mut rng);
        let n = indices.len();
        let b1 = n * rt / total;
        let b2 = n * (rt + rv) / total;
        split.train.extend_from_slice(&indices[..b1]);
        split.valid.extend_from_slice(&indices[b1..b2]);
        split.test.extend_from_slice(&indices[b2..]);
    }
    split.train.sort_unstable();
    split.valid.sort_unstable();
    split.test.sort_unstable();
    split
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub origin_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency_loss: Option<f64>,
    pub total_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: GnnConfig,
    pub loss: LossSettings,
    pub train_size: usize,
    pub valid_size: usize,
    pub test_size: usize,
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
    pub test_accuracy: f64,
    pub layer_correlation: Option<LayerCorrelationReport>,
}

// Stream offsets keep the RNG draws of unrelated concerns independent, so
// e.g. enabling the consistency loss cannot perturb dropout or shuffling.
const STREAM_INIT: u64 = 0x01;
const STREAM_SHUFFLE: u64 = 0x9e37_79b9;
const STREAM_DROPOUT: u64 = 0x7f4a_7c15;
const STREAM_REFERENCE: u64 = 0xdead_beef;

fn argmax_row(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

fn predict(
    collection: &GraphCollection,
    indices: &[usize],
    weights: &Weights,
    fm: &FeatureMap,
    batch_size: usize,
) -> Result<Vec<usize>, GnnError> {
    let mut preds = Vec::with_capacity(indices.len());
    for chunk in indices.chunks(batch_size) {
        let graphs: Vec<&LabeledGraph> = chunk.iter().map(|&i| collection.graph(i)).collect();
        let batch = build_batch(&graphs, fm);
        let reps = forward_with(&batch, weights, None)?;
        let logits = reps.logits;
        let c = logits.cols();
        let vals = logits.to_vec();
        for r in 0..chunk.len() {
            preds.push(argmax_row(&vals[r * c..(r + 1) * c]));
        }
    }
    Ok(preds)
}

fn eval_accuracy(
    collection: &GraphCollection,
    indices: &[usize],
    weights: &Weights,
    fm: &FeatureMap,
    batch_size: usize,
) -> Result<f64, GnnError> {
    if indices.is_empty() {
        return Ok(0.0);
    }
    let preds = predict(collection, indices, weights, fm, batch_size)?;
    let truth: Vec<usize> = indices
        .iter()
        .map(|&i| collection.graph(i).graph_label())
        .collect();
    Ok(accuracy(&preds, &truth))
}

/// Minibatch gradient descent on `origin + lambda * consistency`, with model
/// selection at the best validation accuracy. Deterministic per seed.
pub fn train(
    collection: &GraphCollection,
    split: &Split,
    config: &GnnConfig,
    loss: &LossSettings,
) -> Result<TrainReport, GnnError> {
    config.validate()?;
    split.validate(collection.len())?;
    if loss.lambda < 0.0 {
        return Err(GnnError::InvalidConfig("lambda must be >= 0".into()));
    }

    let fm = FeatureMap::from_collection(collection);
    let mut rng_init = ChaCha8Rng::seed_from_u64(config.seed ^ STREAM_INIT);
    let mut rng_shuffle = ChaCha8Rng::seed_from_u64(config.seed ^ STREAM_SHUFFLE);
    let mut rng_dropout = ChaCha8Rng::seed_from_u64(config.seed ^ STREAM_DROPOUT);
    let mut rng_reference = ChaCha8Rng::seed_from_u64(config.seed ^ STREAM_REFERENCE);

    let weights = Weights::init(config, fm.feature_dim(), collection.class_count(), &mut rng_init);

    let mut records = Vec::with_capacity(config.epochs);
    let mut best_val = f64::NEG_INFINITY;
    let mut best_epoch = 0;
    let mut best_snapshot = weights.snapshot();

    let mut train_order = split.train.clone();
    for epoch in 1..=config.epochs {
        train_order.shuffle(&mut rng_shuffle);
        let mut origin_sum = 0.0;
        let mut consistency_sum = 0.0;
        let mut total_sum = 0.0;
        let mut seen = 0usize;
        for chunk in train_order.chunks(config.batch_size) {
            let graphs: Vec<&LabeledGraph> =
                chunk.iter().map(|&i| collection.graph(i)).collect();
            let batch = build_batch(&graphs, &fm);
            let masks = if config.dropout_rate > 0.0 {
                let keep = 1.0 - config.dropout_rate;
                Some(
                    (0..config.layer_count)
                        .map(|_| {
                            let vals: Vec<f64> = (0..batch.node_count * config.hidden_dim)
                                .map(|_| {
                                    if rng_dropout.gen::<f64>() < keep {
                                        1.0 / keep
                                    } else {
                                        0.0
                                    }
                                })
                                .collect();
                            Tensor::constant(batch.node_count, config.hidden_dim, vals)
                        })
                        .collect::<Vec<_>>(),
                )
            } else {
                None
            };
            let reps = forward_with(&batch, &weights, masks.as_deref())?;
            let origin = reps.logits.softmax_cross_entropy(&batch.labels)?;
            let (cons_value, total) = if loss.mode == ConsistencyMode::Off {
                (None, origin.clone())
            } else {
                let cons = consistency_loss(
                    &reps,
                    loss.mode,
                    &mut rng_reference,
                    loss.sign,
                    loss.all_references,
                )?;
                let t = total_loss(&origin, &cons, loss.lambda);
                (Some(cons.item()), t)
            };
            weights.zero_grads();
            total.backward()?;
            weights.sgd_step(config.learning_rate);

            let w = chunk.len() as f64;
            origin_sum += origin.item() * w;
            consistency_sum += cons_value.unwrap_or(0.0) * w;
            total_sum += total.item() * w;
            seen += chunk.len();
        }
        let val_accuracy =
            eval_accuracy(collection, &split.valid, &weights, &fm, config.batch_size)?;
        if val_accuracy > best_val {
            best_val = val_accuracy;
            best_epoch = epoch;
            best_snapshot = weights.snapshot();
        }
        let scale = 1.0 / seen.max(1) as f64;
        records.push(EpochRecord {
            epoch,
            origin_loss: origin_sum * scale,
            consistency_loss: if loss.mode == ConsistencyMode::Off {
                None
            } else {
                Some(consistency_sum * scale)
            },
            total_loss: total_sum * scale,
            val_accuracy,
        });
    }

    weights.restore(&best_snapshot);
    let test_accuracy =
        eval_accuracy(collection, &split.test, &weights, &fm, config.batch_size)?;

    // Layer correlation over the full test set as one batch so distances
    // cover every test pair.
    let layer_correlation = if split.test.len() >= 3 && config.layer_count >= 2 {
        let graphs: Vec<&LabeledGraph> =
            split.test.iter().map(|&i| collection.graph(i)).collect();
        let batch = build_batch(&graphs, &fm);
        let reps = forward_with(&batch, &weights, None)?;
        let layers: Vec<(usize, usize, Vec<f64>)> = reps
            .graph_reps
            .iter()
            .map(|t| (t.rows(), t.cols(), t.to_vec()))
            .collect();
        Some(layer_rank_correlation(&layers))
    } else {
        None
    };

    Ok(TrainReport {
        config: config.clone(),
        loss: *loss,
        train_size: split.train.len(),
        valid_size: split.valid.len(),
        test_size: split.test.len(),
        epochs: records,
        best_epoch,
        best_val_accuracy: best_val,
        test_accuracy,
        layer_correlation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycles_vs_paths;

    fn toy_collection() -> GraphCollection {
        cycles_vs_paths(&[4, 5, 6, 7], 3).unwrap()
    }

    #[test]
    fn batch_row_sums_are_one() {
        let c = toy_collection();
        let fm = FeatureMap::from_collection(&c);
        let graphs: Vec<&LabeledGraph> = vec![c.graph(0), c.graph(5)];
        let batch = build_batch(&graphs, &fm);
        let n = batch.node_count;
        let adj = batch.adjacency.to_vec();
        for i in 0..n {
            let s: f64 = adj[i * n..(i + 1) * n].iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert_eq!(batch.assignment, {
            let mut a = vec![0; c.graph(0).node_count()];
            a.extend(vec![1; c.graph(5).node_count()]);
            a
        });
    }

    #[test]
    fn isolated_node_becomes_self_loop_row() {
        let g = LabeledGraph::from_edges(2, &[], vec![1, 1], 0).unwrap();
        let c = GraphCollection::new("iso", vec![g], 1, vec![0]);
        let fm = FeatureMap::from_collection(&c);
        let batch = build_batch(&[c.graph(0)], &fm);
        let adj = batch.adjacency.to_vec();
        assert_eq!(adj, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_weights_give_zero_reps() {
        let c = toy_collection();
        let fm = FeatureMap::from_collection(&c);
        let config = GnnConfig {
            hidden_dim: 4,
            ..GnnConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let weights = Weights::init(&config, fm.feature_dim(), c.class_count(), &mut rng);
        for t in weights.parameters() {
            t.set_values(vec![0.0; t.rows() * t.cols()]);
        }
        let batch = build_batch(&[c.graph(0), c.graph(1)], &fm);
        let reps = forward(&batch, &weights, &config).unwrap();
        for layer in &reps.graph_reps {
            assert!(layer.to_vec().iter().all(|&v| v == 0.0));
        }
        assert!(reps.logits.to_vec().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn batch_permutation_permutes_rows() {
        let c = toy_collection();
        let fm = FeatureMap::from_collection(&c);
        let config = GnnConfig {
            hidden_dim: 8,
            ..GnnConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let weights = Weights::init(&config, fm.feature_dim(), c.class_count(), &mut rng);
        let fwd = |order: &[usize]| {
            let graphs: Vec<&LabeledGraph> = order.iter().map(|&i| c.graph(i)).collect();
            let batch = build_batch(&graphs, &fm);
            forward(&batch, &weights, &config).unwrap()
        };
        let a = fwd(&[0, 1, 2]);
        let b = fwd(&[2, 0, 1]);
        for (la, lb) in a.graph_reps.iter().zip(&b.graph_reps) {
            let (va, vb) = (la.to_vec(), lb.to_vec());
            let cdim = la.cols();
            // graph order [0,1,2] vs [2,0,1]: row i of a equals row (i+1)%3 of b
            for i in 0..3 {
                let bi = (i + 1) % 3;
                assert_eq!(
                    &va[i * cdim..(i + 1) * cdim],
                    &vb[bi * cdim..(bi + 1) * cdim]
                );
            }
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = GnnConfig::default();
        cfg.layer_count = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = GnnConfig::default();
        cfg.dropout_rate = 0.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn split_disjointness_enforced() {
        let s = Split {
            train: vec![0, 1],
            valid: vec![1],
            test: vec![2],
        };
        assert!(s.validate(3).is_err());
    }

    #[test]
    fn stratified_split_is_deterministic_and_partitions() {
        let c = toy_collection();
        let a = stratified_split(&c, (8, 1, 1), 17);
        let b = stratified_split(&c, (8, 1, 1), 17);
        assert_eq!(a, b);
        a.validate(c.len()).unwrap();
        assert_eq!(a.train.len() + a.valid.len() + a.test.len(), c.len());
    }

    #[test]
    fn checkpoint_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.bin");
        let config = GnnConfig {
            hidden_dim: 4,
            ..GnnConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = Weights::init(&config, 3, 2, &mut rng);
        w.save(&path).unwrap();
        let mut rng2 = ChaCha8Rng::seed_from_u64(999);
        let w2 = Weights::init(&config, 3, 2, &mut rng2);
        w2.restore_from_file(&path).unwrap();
        for (a, b) in w.parameters().iter().zip(w2.parameters()) {
            assert_eq!(a.to_vec(), b.to_vec());
        }
    }
}
