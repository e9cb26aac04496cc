//! Spearman rank correlation across layers, kernel k-NN, and accuracy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::GramSeries;
use crate::loss::cosine_distance_matrix;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("inputs must have equal length >= 2 (got {a} and {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("rank correlation is undefined for constant input")]
    ConstantInput,
    #[error("k = {k} exceeds training set size {n}")]
    InvalidK { k: usize, n: usize },
}

/// Average ranks (1-based); tied values share the mean of their positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let (ma, mb) = (
        a.iter().sum::<f64>() / n,
        b.iter().sum::<f64>() / n,
    );
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    Some(cov / (va * vb).sqrt())
}

/// Spearman rank correlation with average-rank tie handling.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(MetricsError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    pearson(&average_ranks(a), &average_ranks(b)).ok_or(MetricsError::ConstantInput)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerPairCorrelation {
    pub layer_from: usize,
    pub layer_to: usize,
    pub mean_rho: Option<f64>,
    /// Graphs whose distance rows were constant and therefore excluded.
    pub excluded_graphs: usize,
}

/// Mean Spearman correlation of per-graph distance rows between consecutive
/// layers, averaged over graphs and then over layer pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerCorrelationReport {
    pub per_layer_pair: Vec<LayerPairCorrelation>,
    pub overall_mean_rho: Option<f64>,
    pub per_graph_min: Option<f64>,
    pub per_graph_median: Option<f64>,
    pub per_graph_max: Option<f64>,
}

/// `layers[h] = (rows, cols, row-major values)`: the graph-representation
/// matrix at layer h over one evaluation set.
pub fn layer_rank_correlation(layers: &[(usize, usize, Vec<f64>)]) -> LayerCorrelationReport {
    assert!(layers.len() >= 2, "need at least two layers");
    let n = layers[0].0;
    assert!(n >= 3, "need at least three graphs");
    let distances: Vec<_> = layers
        .iter()
        .enumerate()
        .map(|(h, (rows, cols, vals))| cosine_distance_matrix(*rows, *cols, vals, h + 1))
        .collect();

    let mut per_layer_pair = Vec::new();
    let mut all_rhos: Vec<f64> = Vec::new();
    for h in 0..layers.len() - 1 {
        let (d_a, d_b) = (&distances[h], &distances[h + 1]);
        let mut rhos = Vec::with_capacity(n);
        let mut excluded = 0;
        for i in 0..n {
            let mut row_a = Vec::with_capacity(n - 1);
            let mut row_b = Vec::with_capacity(n - 1);
            for j in 0..n {
                if j == i {
                    continue;
                }
                row_a.push(d_a.get(i, j));
                row_b.push(d_b.get(i, j));
            }
            match spearman(&row_a, &row_b) {
                Ok(rho) => rhos.push(rho),
                Err(_) => excluded += 1,
            }
        }
        let mean = if rhos.is_empty() {
            None
        } else {
            Some(rhos.iter().sum::<f64>() / rhos.len() as f64)
        };
        all_rhos.extend(rhos);
        per_layer_pair.push(LayerPairCorrelation {
            layer_from: h + 1,
            layer_to: h + 2,
            mean_rho: mean,
            excluded_graphs: excluded,
        });
    }

    let means: Vec<f64> = per_layer_pair.iter().filter_map(|p| p.mean_rho).collect();
    let overall = if means.is_empty() {
        None
    } else {
        Some(means.iter().sum::<f64>() / means.len() as f64)
    };
    let (min, median, max) = if all_rhos.is_empty() {
        (None, None, None)
    } else {
        let mut sorted = all_rhos.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 0 {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        } else {
            sorted[mid]
        };
        (
            Some(sorted[0]),
            Some(median),
            Some(*sorted.last().unwrap()),
        )
    };
    LayerCorrelationReport {
        per_layer_pair,
        overall_mean_rho: overall,
        per_graph_min: min,
        per_graph_median: median,
        per_graph_max: max,
    }
}

/// Majority vote among the k most similar training graphs under the chosen
/// iteration's (normalized, when present) Gram matrix. Similarity ties pick
/// the smaller training index; vote ties pick the smaller class.
pub fn knn_classify(
    gram: &GramSeries,
    h: usize,
    train_idx: &[usize],
    train_labels: &[usize],
    test_idx: &[usize],
    k: usize,
) -> Result<Vec<usize>, MetricsError> {
    assert_eq!(train_idx.len(), train_labels.len());
    if k == 0 || k > train_idx.len() {
        return Err(MetricsError::InvalidK {
            k,
            n: train_idx.len(),
        });
    }
    let m = gram.effective(h);
    let mut predictions = Vec::with_capacity(test_idx.len());
    for &t in test_idx {
        let mut sims: Vec<(f64, usize, usize)> = train_idx
            .iter()
            .zip(train_labels)
            .map(|(&i, &label)| (m.get(t, i), i, label))
            .collect();
        sims.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let mut votes: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
        for &(_, _, label) in sims.iter().take(k) {
            *votes.entry(label).or_insert(0) += 1;
        }
        let best_count = votes.values().copied().max().unwrap();
        let winner = votes
            .iter()
            .find(|(_, &c)| c == best_count)
            .map(|(&label, _)| label)
            .unwrap();
        predictions.push(winner);
    }
    Ok(predictions)
}

/// Fraction of equal entries.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    assert!(!pred.is_empty());
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    hits as f64 / pred.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_monotone_and_reversed() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn spearman_tied_example() {
        // ranks (1.5, 1.5, 3) vs (1, 2, 3): 1.5 / sqrt(3)
        let rho = spearman(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((rho - 1.5 / 3.0f64.sqrt()).abs() < 1e-12);
        assert!((rho - 0.866_025_403_784_438_6).abs() < 1e-12);
    }

    #[test]
    fn spearman_symmetric() {
        let a = [0.3, -1.0, 2.5, 0.9];
        let b = [1.1, 0.2, 0.2, -0.7];
        assert_eq!(spearman(&a, &b).unwrap(), spearman(&b, &a).unwrap());
    }

    #[test]
    fn spearman_invariant_under_monotone_transform() {
        let a = [0.3, -1.0, 2.5, 0.9];
        let b = [1.1, 0.2, 0.4, -0.7];
        let a2: Vec<f64> = a.iter().map(|x: &f64| x.exp()).collect();
        let r1 = spearman(&a, &b).unwrap();
        let r2 = spearman(&a2, &b).unwrap();
        assert!((r1 - r2).abs() < 1e-12);
    }

    #[test]
    fn spearman_constant_is_undefined() {
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(MetricsError::ConstantInput)
        ));
    }

    #[test]
    fn identical_layers_give_rho_one() {
        let reps = vec![
            (3, 2, vec![1.0, 0.0, 0.5, 0.9, 0.0, 1.0]),
            (3, 2, vec![1.0, 0.0, 0.5, 0.9, 0.0, 1.0]),
        ];
        let report = layer_rank_correlation(&reps);
        assert_eq!(report.overall_mean_rho, Some(1.0));
    }

    #[test]
    fn accuracy_basics() {
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]), 1.0);
        assert_eq!(accuracy(&[1, 2], &[2, 1]), 0.0);
        assert_eq!(accuracy(&[1, 2], &[1, 1]), 0.5);
    }
}
