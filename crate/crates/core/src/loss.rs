//! Cross-layer ranking-consistency loss: per-layer cosine-distance matrices,
//! reference/predicted pairwise probabilities, and their cross-entropy.
//!
//! For a layer pair (h-1, h) and a reference graph k, the previous layer
//! supplies a fixed target ordering (no gradient flows into it) and the
//! current layer supplies differentiable pairwise probabilities. The loss is
//! the mean cross-entropy over unordered pairs {n, m} avoiding k.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gnn::LayerRepresentations;
use crate::tensor::{ShapeError, Tensor};

#[derive(Debug, Error)]
pub enum LossError {
    #[error("pair indices must be distinct: k={k}, n={n}, m={m}")]
    InvalidPair { k: usize, n: usize, m: usize },
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Which layer pairs the consistency loss covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConsistencyMode {
    Off,
    All,
    FirstLast,
}

/// Orientation of the reference probability.
///
/// `Corrected` makes "x_n closer => probability 1" for both the predicted
/// and reference sides. `PaperLiteral` keeps the published reference formula
/// `(1 + sign(D_kn - D_km)) / 2`, whose targets oppose the predicted side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    Corrected,
    PaperLiteral,
}

/// Symmetric cosine-distance matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    layer: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layer(&self) -> usize {
        self.layer
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

/// Reference and predicted probability for one ordered pair; both sides
/// complement to one under index swap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairProbability {
    pub reference: f64,
    pub predicted: f64,
}

/// Cosine distances `1 - <x_i, x_j> / (||x_i|| ||x_j||)` over the rows of an
/// n x dim matrix, with rows of norm below 1e-12 guarded by the epsilon.
pub fn cosine_distance_matrix(
    rows: usize,
    cols: usize,
    values: &[f64],
    layer: usize,
) -> DistanceMatrix {
    assert_eq!(values.len(), rows * cols);
    let eps = crate::tensor::NORMALIZE_EPS;
    let mut unit = vec![0.0; rows * cols];
    for i in 0..rows {
        let row = &values[i * cols..(i + 1) * cols];
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt().max(eps);
        for j in 0..cols {
            unit[i * cols + j] = row[j] / norm;
        }
    }
    let mut d = vec![0.0; rows * rows];
    for i in 0..rows {
        for j in (i + 1)..rows {
            let dot: f64 = (0..cols)
                .map(|t| unit[i * cols + t] * unit[j * cols + t])
                .sum();
            let dist = 1.0 - dot;
            d[i * rows + j] = dist;
            d[j * rows + i] = dist;
        }
    }
    DistanceMatrix {
        n: rows,
        layer,
        d,
    }
}

/// Differentiable cosine-distance matrix of a representation tensor. The
/// diagonal is masked to exactly zero.
pub fn cosine_distance_matrix_tensor(reps: &Tensor) -> Result<Tensor, ShapeError> {
    let n = reps.rows();
    let unit = reps.row_l2_normalize();
    let sim = unit.matmul(&unit.transpose())?;
    let dist = Tensor::ones(n, n).add(&sim.scalar_mul(-1.0))?;
    let mut mask = vec![1.0; n * n];
    for i in 0..n {
        mask[i * n + i] = 0.0;
    }
    dist.elementwise_mul(&Tensor::constant(n, n, mask))
}

fn check_distinct(k: usize, n: usize, m: usize) -> Result<(), LossError> {
    if k == n || k == m || n == m {
        return Err(LossError::InvalidPair { k, n, m });
    }
    Ok(())
}

/// Predicted probability that `x_k` is closer to `x_n` than to `x_m`:
/// `sigmoid(D[k,m] - D[k,n])`.
pub fn predicted_prob(
    d: &DistanceMatrix,
    k: usize,
    n: usize,
    m: usize,
) -> Result<f64, LossError> {
    check_distinct(k, n, m)?;
    let z = d.get(k, m) - d.get(k, n);
    Ok(1.0 / (1.0 + (-z).exp()))
}

fn half_sign(diff: f64) -> f64 {
    if diff > 0.0 {
        1.0
    } else if diff < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Reference probability from the previous layer's distances, in {0, 1/2, 1}.
/// The previous layer is treated as known: no gradient flows through it.
pub fn reference_prob(
    d_prev: &DistanceMatrix,
    k: usize,
    n: usize,
    m: usize,
    sign: SignConvention,
) -> Result<f64, LossError> {
    check_distinct(k, n, m)?;
    let diff = match sign {
        SignConvention::Corrected => d_prev.get(k, m) - d_prev.get(k, n),
        SignConvention::PaperLiteral => d_prev.get(k, n) - d_prev.get(k, m),
    };
    Ok(half_sign(diff))
}

/// Binary cross-entropy `-p_ref ln p_pred - (1 - p_ref) ln(1 - p_pred)`.
pub fn pair_cross_entropy(p_ref: f64, p_pred: f64) -> f64 {
    let mut out = 0.0;
    if p_ref > 0.0 {
        out -= p_ref * p_pred.ln();
    }
    if p_ref < 1.0 {
        out -= (1.0 - p_ref) * (1.0 - p_pred).ln();
    }
    out
}

/// Unordered pairs {n, m} with n < m and both distinct from k.
fn pairs_avoiding(n: usize, k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity((n - 1) * (n - 2) / 2);
    for a in 0..n {
        if a == k {
            continue;
        }
        for b in (a + 1)..n {
            if b == k {
                continue;
            }
            out.push((a, b));
        }
    }
    out
}

/// Mean pairwise cross-entropy for one layer pair and one reference graph.
/// `d_prev` supplies the targets; `cur` supplies the differentiable side.
fn layer_pair_term(
    d_prev: &DistanceMatrix,
    cur: &Tensor,
    k: usize,
    sign: SignConvention,
) -> Result<Tensor, LossError> {
    let n = cur.rows();
    let d_cur = cosine_distance_matrix_tensor(cur)?;
    let pairs = pairs_avoiding(n, k);
    let p = pairs.len();

    // logits[p] = D_cur[k, m_p] - D_cur[k, n_p], expressed as
    // e_k . D_cur . Q with a constant +-1 selection matrix Q.
    let mut e_k = vec![0.0; n];
    e_k[k] = 1.0;
    let e_k = Tensor::constant(1, n, e_k);
    let mut q = vec![0.0; n * p];
    let mut targets = Vec::with_capacity(p);
    for (col, &(a, b)) in pairs.iter().enumerate() {
        q[b * p + col] = 1.0;
        q[a * p + col] = -1.0;
        targets.push(reference_prob(d_prev, k, a, b, sign)?);
    }
    let q = Tensor::constant(n, p, q);
    let logits = e_k.matmul(&d_cur)?.matmul(&q)?;
    let p_hat = logits.sigmoid();

    let one_minus_targets: Vec<f64> = targets.iter().map(|t| 1.0 - t).collect();
    let t_const = Tensor::constant(1, p, targets);
    let omt_const = Tensor::constant(1, p, one_minus_targets);
    let log_p = p_hat.log();
    let log_q = Tensor::ones(1, p).add(&p_hat.scalar_mul(-1.0))?.log();
    let ce = t_const
        .elementwise_mul(&log_p)?
        .add(&omt_const.elementwise_mul(&log_q)?)?
        .scalar_mul(-1.0);
    Ok(ce.reduce_mean())
}

/// The layer-consistency loss over a batch's per-layer graph representations.
///
/// For every consecutive layer pair (mode `All`) or the single (first, last)
/// pair (mode `FirstLast`), one reference graph is drawn from `rng` (or all
/// are averaged with `all_references`), and the mean pair cross-entropy is
/// accumulated. Batches with fewer than three graphs contribute an exact
/// zero. Gradient flows only through the current-layer distances.
pub fn consistency_loss(
    reps: &LayerRepresentations,
    mode: ConsistencyMode,
    rng: &mut ChaCha8Rng,
    sign: SignConvention,
    all_references: bool,
) -> Result<Tensor, LossError> {
    let layers = &reps.graph_reps;
    assert!(layers.len() >= 2, "consistency loss needs >= 2 layers");
    let n = layers[0].rows();
    if matches!(mode, ConsistencyMode::Off) || n < 3 {
        return Ok(Tensor::scalar(0.0));
    }
    let layer_pairs: Vec<(usize, usize)> = match mode {
        ConsistencyMode::All => (1..layers.len()).map(|h| (h - 1, h)).collect(),
        ConsistencyMode::FirstLast => vec![(0, layers.len() - 1)],
        ConsistencyMode::Off => unreachable!(),
    };
    let mut total = Tensor::scalar(0.0);
    for (prev_idx, cur_idx) in layer_pairs {
        let prev = &layers[prev_idx];
        let d_prev = cosine_distance_matrix(
            prev.rows(),
            prev.cols(),
            &prev.values(),
            prev_idx + 1,
        );
        let term = if all_references {
            let mut acc = Tensor::scalar(0.0);
            for k in 0..n {
                acc = acc.add(&layer_pair_term(&d_prev, &layers[cur_idx], k, sign)?)?;
            }
            acc.scalar_mul(1.0 / n as f64)
        } else {
            let k = rng.gen_range(0..n);
            layer_pair_term(&d_prev, &layers[cur_idx], k, sign)?
        };
        total = total.add(&term)?;
    }
    Ok(total)
}

/// `origin + lambda * consistency`.
pub fn total_loss(origin: &Tensor, consistency: &Tensor, lambda: f64) -> Tensor {
    assert!(lambda >= 0.0, "lambda must be nonnegative");
    origin
        .add(&consistency.scalar_mul(lambda))
        .expect("scalar losses share shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_distances() -> DistanceMatrix {
        // three rows in the plane: 0 deg, 60 deg, 90 deg
        let v = vec![1.0, 0.0, 0.5, 0.75f64.sqrt(), 0.0, 1.0];
        cosine_distance_matrix(3, 2, &v, 1)
    }

    #[test]
    fn distance_basics() {
        let d = toy_distances();
        for i in 0..3 {
            assert_eq!(d.get(i, i), 0.0);
        }
        assert!((d.get(0, 1) - 0.5).abs() < 1e-12);
        assert!((d.get(0, 2) - 1.0).abs() < 1e-12);
        assert!((d.get(1, 2) - (1.0 - 0.75f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn antipodal_rows_distance_two() {
        let d = cosine_distance_matrix(2, 2, &[1.0, 0.0, -1.0, 0.0], 1);
        assert!((d.get(0, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identical_rows_distance_zero() {
        let d = cosine_distance_matrix(2, 3, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0], 1);
        assert!(d.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn predicted_prob_values() {
        let d = toy_distances();
        // tie with itself mirrored: D[k,n] == D[k,m] gives 0.5
        let n = 3;
        let _ = n;
        let p_equal = 1.0 / (1.0 + (0.0f64).exp());
        assert_eq!(p_equal, 0.5);
        // unit separation gives 1/(1 + e^-1)
        let p = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((p - 0.731_058_578_630_004_9).abs() < 1e-15);
        // complementarity on real distances
        let a = predicted_prob(&d, 0, 1, 2).unwrap();
        let b = predicted_prob(&d, 0, 2, 1).unwrap();
        assert!((a + b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reference_prob_orientation() {
        // d(k,n) = 0.2 closer than d(k,m) = 0.9 => corrected reference is 1
        let d = DistanceMatrix {
            n: 3,
            layer: 1,
            d: vec![0.0, 0.2, 0.9, 0.2, 0.0, 0.4, 0.9, 0.4, 0.0],
        };
        let r = reference_prob(&d, 0, 1, 2, SignConvention::Corrected).unwrap();
        assert_eq!(r, 1.0);
        let swapped = reference_prob(&d, 0, 2, 1, SignConvention::Corrected).unwrap();
        assert_eq!(swapped, 0.0);
        let literal = reference_prob(&d, 0, 1, 2, SignConvention::PaperLiteral).unwrap();
        assert_eq!(literal, 0.0);
    }

    #[test]
    fn reference_prob_tie_is_half() {
        let d = DistanceMatrix {
            n: 3,
            layer: 1,
            d: vec![0.0, 0.4, 0.4, 0.4, 0.0, 0.1, 0.4, 0.1, 0.0],
        };
        assert_eq!(
            reference_prob(&d, 0, 1, 2, SignConvention::Corrected).unwrap(),
            0.5
        );
    }

    #[test]
    fn invalid_pair_rejected() {
        let d = toy_distances();
        assert!(predicted_prob(&d, 0, 0, 1).is_err());
        assert!(reference_prob(&d, 0, 1, 1, SignConvention::Corrected).is_err());
    }

    #[test]
    fn pair_cross_entropy_values() {
        let ln2 = std::f64::consts::LN_2;
        assert!((pair_cross_entropy(1.0, 0.5) - ln2).abs() < 1e-15);
        assert!((pair_cross_entropy(0.5, 0.5) - ln2).abs() < 1e-15);
        assert!(pair_cross_entropy(1.0, 0.999_999) < 1e-5);
    }

    #[test]
    fn total_loss_arithmetic() {
        let origin = Tensor::scalar(0.5);
        let cons = Tensor::scalar(0.7);
        assert_eq!(total_loss(&origin, &cons, 0.0).item(), 0.5);
        assert!((total_loss(&origin, &cons, 10.0).item() - 7.5).abs() < 1e-15);
    }
}
