//! WL-subtree and WLOA kernels, normalization, and per-iteration Gram series.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphCollection;
use crate::wl::{refine, ColorDictionary, ColoringSequence, Histogram};

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("requested iteration {requested} exceeds refinement depth {depth}")]
    Depth { requested: usize, depth: usize },
    #[error("degenerate kernel: graph {graph} has non-positive self-kernel at h={h}")]
    DegenerateKernel { graph: usize, h: usize },
    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    WlSubtree,
    Wloa,
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelKind::WlSubtree => write!(f, "wl-subtree"),
            KernelKind::Wloa => write!(f, "wloa"),
        }
    }
}

/// WLOA iteration weight ω(i); must be nonnegative and non-decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Omega {
    ConstantOne,
    Linear,
    Table(Vec<f64>),
}

impl Omega {
    /// Weight at iteration `i >= 1`.
    pub fn weight(&self, i: usize) -> f64 {
        match self {
            Omega::ConstantOne => 1.0,
            Omega::Linear => i as f64,
            Omega::Table(t) => t[i - 1],
        }
    }

    /// Σ_{i=1..=h} ω(i).
    pub fn prefix_sum(&self, h: usize) -> f64 {
        (1..=h).map(|i| self.weight(i)).sum()
    }

    pub fn validate(&self, h_max: usize) -> Result<(), KernelError> {
        match self {
            Omega::ConstantOne | Omega::Linear => Ok(()),
            Omega::Table(t) => {
                if t.len() < h_max {
                    return Err(KernelError::InvalidSpec(format!(
                        "omega table has {} entries, need {h_max}",
                        t.len()
                    )));
                }
                let mut prev = 0.0;
                for (i, &w) in t.iter().enumerate().take(h_max) {
                    if w < 0.0 {
                        return Err(KernelError::InvalidSpec(format!(
                            "omega({}) = {w} is negative",
                            i + 1
                        )));
                    }
                    if w < prev {
                        return Err(KernelError::InvalidSpec(format!(
                            "omega({}) = {w} decreases below omega({}) = {prev}",
                            i + 1,
                            i
                        )));
                    }
                    prev = w;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Maximum WL iteration H >= 1; the series holds one matrix per h in 1..=H.
    pub iterations: usize,
    pub omega: Omega,
    /// When set, kernel sums start at iteration 0 instead of 1.
    pub include_iteration_zero: bool,
    pub normalized: bool,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, iterations: usize) -> Self {
        Self {
            kind,
            iterations,
            omega: Omega::ConstantOne,
            include_iteration_zero: false,
            normalized: true,
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if self.iterations == 0 {
            return Err(KernelError::InvalidSpec("iterations must be >= 1".into()));
        }
        self.omega.validate(self.iterations)
    }
}

/// Σ over shared colors of `count_a * count_b`. Iterates the smaller support.
pub fn histogram_dot(a: &Histogram, b: &Histogram) -> u64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter_map(|(c, &x)| large.get(c).map(|&y| x * y))
        .sum()
}

/// Histogram intersection: Σ over shared colors of `min(count_a, count_b)`.
pub fn histmin(a: &Histogram, b: &Histogram) -> u64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter_map(|(c, &x)| large.get(c).map(|&y| x.min(y)))
        .sum()
}

fn check_depth(a: &ColoringSequence, b: &ColoringSequence, h: usize) -> Result<(), KernelError> {
    debug_assert_eq!(
        a.dictionary_stamp(),
        b.dictionary_stamp(),
        "sequences refined under different dictionaries"
    );
    let depth = a.depth().min(b.depth());
    if h > depth {
        return Err(KernelError::Depth {
            requested: h,
            depth,
        });
    }
    Ok(())
}

/// WL-subtree kernel: Σ_{i=1..=h} ⟨histogram_i(a), histogram_i(b)⟩.
///
/// Counts are 64-bit integers; the result is their exact value as a float.
pub fn subtree_kernel(
    a: &ColoringSequence,
    b: &ColoringSequence,
    h: usize,
) -> Result<f64, KernelError> {
    check_depth(a, b, h)?;
    let mut sum = 0u64;
    for i in 1..=h {
        sum += histogram_dot(a.histogram(i), b.histogram(i));
    }
    Ok(sum as f64)
}

/// WLOA kernel: Σ_{i=1..=h} histmin(histogram_i(a), histogram_i(b)) · ω(i).
pub fn wloa_kernel(
    a: &ColoringSequence,
    b: &ColoringSequence,
    h: usize,
    omega: &Omega,
) -> Result<f64, KernelError> {
    check_depth(a, b, h)?;
    let mut sum = 0.0;
    for i in 1..=h {
        sum += histmin(a.histogram(i), b.histogram(i)) as f64 * omega.weight(i);
    }
    Ok(sum)
}

/// Cosine normalization `k_xy / sqrt(k_xx * k_yy)`.
pub fn normalize(k_xy: f64, k_xx: f64, k_yy: f64) -> Result<f64, KernelError> {
    if k_xx <= 0.0 || k_yy <= 0.0 {
        return Err(KernelError::DegenerateKernel { graph: 0, h: 0 });
    }
    Ok(k_xy / (k_xx * k_yy).sqrt())
}

/// Dense symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Per-iteration kernel matrices K^(h) (and normalized form) for h in 1..=H.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramSeries {
    spec: KernelSpec,
    collection_fingerprint: String,
    collection_name: String,
    raw: Vec<Mat>,
    normalized: Option<Vec<Mat>>,
}

impl GramSeries {
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.raw[0].n()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iterations(&self) -> usize {
        self.spec.iterations
    }

    pub fn fingerprint(&self) -> &str {
        &self.collection_fingerprint
    }

    /// Unnormalized K^(h), h in 1..=H.
    pub fn raw(&self, h: usize) -> &Mat {
        &self.raw[h - 1]
    }

    /// Normalized K̃^(h); present iff the spec asked for normalization.
    pub fn normalized(&self, h: usize) -> Option<&Mat> {
        self.normalized.as_ref().map(|m| &m[h - 1])
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized.is_some()
    }

    /// The matrices a consumer should read: normalized when available.
    pub fn effective(&self, h: usize) -> &Mat {
        self.normalized(h).unwrap_or_else(|| self.raw(h))
    }

    /// Writes one CSV per iteration (`gram_h<h>.csv`): header row of graph
    /// ids, then one row per graph with 17-significant-digit values.
    pub fn write_csvs(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let n = self.len();
        let mut written = Vec::new();
        for h in 1..=self.spec.iterations {
            let path = dir.join(format!("gram_h{h}.csv"));
            let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write!(out, "graph")?;
            for j in 0..n {
                write!(out, ",{j}")?;
            }
            writeln!(out)?;
            let m = self.effective(h);
            for i in 0..n {
                write!(out, "{i}")?;
                for j in 0..n {
                    write!(out, ",{:.16e}", m.get(i, j))?;
                }
                writeln!(out)?;
            }
            written.push(path);
        }
        Ok(written)
    }

    /// Single JSON report with the spec metadata and all matrices.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kernel": self.spec,
            "collection": {
                "name": self.collection_name,
                "fingerprint": self.collection_fingerprint,
                "graphs": self.len(),
            },
            "matrices": (1..=self.spec.iterations).map(|h| {
                serde_json::json!({
                    "h": h,
                    "raw": self.raw(h).data(),
                    "normalized": self.normalized(h).map(Mat::data),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Refines every graph once under a shared dictionary and fills the kernel
/// matrix for every h in 1..=H. The pair fill runs in parallel; output is
/// deterministic because each pair writes disjoint cells.
pub fn gram_series(
    collection: &GraphCollection,
    spec: &KernelSpec,
) -> Result<GramSeries, KernelError> {
    spec.validate()?;
    let h_max = spec.iterations;

    let mut dict = ColorDictionary::new();
    // Initial colors for the whole collection first, so refinement colors
    // start after all of them.
    dict.register_collection(collection, true);
    let sequences: Vec<ColoringSequence> = collection
        .graphs()
        .iter()
        .map(|g| refine(g, h_max, &mut dict, true))
        .collect();

    let n = sequences.len();
    let start = if spec.include_iteration_zero { 0 } else { 1 };

    // Per ordered upper-triangle pair, the cumulative kernel value per h.
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let filled: Vec<((usize, usize), Vec<f64>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&sequences[i], &sequences[j]);
            let mut cumulative = 0.0;
            let mut per_h = Vec::with_capacity(h_max);
            if start == 0 {
                cumulative += match spec.kind {
                    KernelKind::WlSubtree => {
                        histogram_dot(a.histogram(0), b.histogram(0)) as f64
                    }
                    KernelKind::Wloa => {
                        // ω indexes refinement iterations; iteration 0 gets ω(1).
                        histmin(a.histogram(0), b.histogram(0)) as f64 * spec.omega.weight(1)
                    }
                };
            }
            for h in 1..=h_max {
                cumulative += match spec.kind {
                    KernelKind::WlSubtree => {
                        histogram_dot(a.histogram(h), b.histogram(h)) as f64
                    }
                    KernelKind::Wloa => {
                        histmin(a.histogram(h), b.histogram(h)) as f64 * spec.omega.weight(h)
                    }
                };
                per_h.push(cumulative);
            }
            ((i, j), per_h)
        })
        .collect();

    let mut raw = vec![Mat::zeros(n); h_max];
    for ((i, j), per_h) in filled {
        for (hm, v) in raw.iter_mut().zip(per_h) {
            hm.set(i, j, v);
            hm.set(j, i, v);
        }
    }

    let normalized = if spec.normalized {
        let mut out = Vec::with_capacity(h_max);
        for (hi, m) in raw.iter().enumerate() {
            for g in 0..n {
                if m.get(g, g) <= 0.0 {
                    return Err(KernelError::DegenerateKernel { graph: g, h: hi + 1 });
                }
            }
            let mut nm = Mat::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    nm.set(i, j, m.get(i, j) / (m.get(i, i) * m.get(j, j)).sqrt());
                }
            }
            out.push(nm);
        }
        Some(out)
    } else {
        None
    };

    Ok(GramSeries {
        spec: spec.clone(),
        collection_fingerprint: collection.fingerprint(),
        collection_name: collection.name().to_string(),
        raw,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LabeledGraph;
    use crate::wl::refine;

    fn seq_pair(
        ga: &LabeledGraph,
        gb: &LabeledGraph,
        h: usize,
    ) -> (ColoringSequence, ColoringSequence) {
        let mut dict = ColorDictionary::new();
        dict.register_graph(ga, false);
        dict.register_graph(gb, false);
        let a = refine(ga, h, &mut dict, false);
        let b = refine(gb, h, &mut dict, false);
        (a, b)
    }

    #[test]
    fn histmin_worked_example() {
        // {a:2, b:2, c:1} vs {a:1, b:2, c:2}
        let a = Histogram::from([(0, 2), (1, 2), (2, 1)]);
        let b = Histogram::from([(0, 1), (1, 2), (2, 2)]);
        assert_eq!(histmin(&a, &b), 4);
    }

    #[test]
    fn histmin_idempotent_and_disjoint() {
        let a = Histogram::from([(0, 3), (5, 2)]);
        assert_eq!(histmin(&a, &a), 5);
        let b = Histogram::from([(1, 3), (6, 2)]);
        assert_eq!(histmin(&a, &b), 0);
    }

    #[test]
    fn p3_c3_kernels_at_h1() {
        let p3 = LabeledGraph::from_edges(3, &[(0, 1), (1, 2)], vec![1; 3], 0).unwrap();
        let c3 = LabeledGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)], vec![1; 3], 1).unwrap();
        let (a, b) = seq_pair(&p3, &c3, 1);
        let k = subtree_kernel(&a, &b, 1).unwrap();
        assert_eq!(k, 3.0);
        let kaa = subtree_kernel(&a, &a, 1).unwrap();
        let kbb = subtree_kernel(&b, &b, 1).unwrap();
        let norm = normalize(k, kaa, kbb).unwrap();
        assert!((norm - 3.0 / (5.0f64.sqrt() * 3.0)).abs() < 1e-15);
        assert_eq!(wloa_kernel(&a, &b, 1, &Omega::ConstantOne).unwrap(), 1.0);
    }

    #[test]
    fn wloa_self_kernel_closed_form() {
        let p5 = LabeledGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], vec![1; 5], 0)
            .unwrap();
        let mut dict = ColorDictionary::new();
        dict.register_graph(&p5, false);
        let seq = refine(&p5, 4, &mut dict, false);
        for h in 1..=4 {
            let k = wloa_kernel(&seq, &seq, h, &Omega::ConstantOne).unwrap();
            assert_eq!(k, (h * 5) as f64);
            let lin = wloa_kernel(&seq, &seq, h, &Omega::Linear).unwrap();
            assert_eq!(lin, (5 * h * (h + 1) / 2) as f64);
        }
    }

    #[test]
    fn depth_error() {
        let p3 = LabeledGraph::from_edges(3, &[(0, 1), (1, 2)], vec![1; 3], 0).unwrap();
        let (a, b) = seq_pair(&p3, &p3, 2);
        assert!(matches!(
            subtree_kernel(&a, &b, 3),
            Err(KernelError::Depth { .. })
        ));
    }

    #[test]
    fn normalize_basics() {
        assert_eq!(normalize(7.0, 7.0, 7.0).unwrap(), 1.0);
        assert_eq!(normalize(0.0, 5.0, 7.0).unwrap(), 0.0);
        let v = normalize(1600.0, 40016.0, 40016.0).unwrap();
        assert!((v - 0.039984).abs() < 1e-6);
        assert!(normalize(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn gram_of_isomorphic_pair_is_all_ones() {
        let a = LabeledGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], vec![1; 4], 0)
            .unwrap();
        let b = a.permuted(&[2, 0, 3, 1]);
        let collection = crate::graph::GraphCollection::new("iso", vec![a, b], 1, vec![0]);
        for kind in [KernelKind::WlSubtree, KernelKind::Wloa] {
            let spec = KernelSpec::new(kind, 3);
            let s = gram_series(&collection, &spec).unwrap();
            for h in 1..=3 {
                let m = s.normalized(h).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((m.get(i, j) - 1.0).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn single_graph_normalized_gram_is_one() {
        let g = LabeledGraph::from_edges(3, &[(0, 1)], vec![1; 3], 0).unwrap();
        let collection = crate::graph::GraphCollection::new("one", vec![g], 1, vec![0]);
        let s = gram_series(&collection, &KernelSpec::new(KernelKind::Wloa, 2)).unwrap();
        assert_eq!(s.normalized(1).unwrap().get(0, 0), 1.0);
        assert_eq!(s.normalized(2).unwrap().get(0, 0), 1.0);
    }

    #[test]
    fn omega_table_validation() {
        assert!(Omega::Table(vec![1.0, 0.5]).validate(2).is_err());
        assert!(Omega::Table(vec![1.0, -1.0]).validate(2).is_err());
        assert!(Omega::Table(vec![1.0]).validate(2).is_err());
        assert!(Omega::Table(vec![1.0, 2.0]).validate(2).is_ok());
    }
}
