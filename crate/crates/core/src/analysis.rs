//! Executable checks for the kernel-consistency properties: monotonic
//! decrease, order consistency, the finite-h WLOA bound, and class margins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{GramSeries, KernelKind, Omega};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    MonotonicDecrease,
    OrderConsistency,
    WloaBound,
}

/// One recorded violation: the pair (or triple, with `k = Some`) and the two
/// sides of the failed inequality at iteration step h -> h+1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub h: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerIterationStats {
    pub h: usize,
    pub checked: u64,
    pub violations: u64,
    pub rate: f64,
}

/// Outcome of scanning a Gram series for one property.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationReport {
    pub property: PropertyKind,
    pub kernel: KernelKind,
    pub iterations: usize,
    pub checked_count: u64,
    pub violation_count: u64,
    pub violation_rate: f64,
    pub per_h: Vec<PerIterationStats>,
    /// Detailed records, capped at [`MAX_RECORDED_VIOLATIONS`].
    pub violations: Vec<Violation>,
    pub violations_truncated: bool,
}

/// Cap on stored violation details; counts and rates always cover the full scan.
pub const MAX_RECORDED_VIOLATIONS: usize = 1000;

/// Exhaustive triple scans are cubic; above this size a seeded sample is used.
const EXHAUSTIVE_TRIPLE_LIMIT: usize = 200;
const TRIPLE_SAMPLE_COUNT: u64 = 1_000_000;
const TRIPLE_SAMPLE_SEED: u64 = 0x49_47_4b_54;

struct ReportBuilder {
    property: PropertyKind,
    kernel: KernelKind,
    iterations: usize,
    checked: u64,
    violations: Vec<Violation>,
    violation_count: u64,
    per_h: Vec<PerIterationStats>,
}

impl ReportBuilder {
    fn new(property: PropertyKind, s: &GramSeries) -> Self {
        Self {
            property,
            kernel: s.spec().kind,
            iterations: s.iterations(),
            checked: 0,
            violations: Vec::new(),
            violation_count: 0,
            per_h: Vec::new(),
        }
    }

    fn record(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    fn push_per_h(&mut self, h: usize, checked: u64, violations: u64) {
        let rate = if checked == 0 {
            0.0
        } else {
            violations as f64 / checked as f64
        };
        self.per_h.push(PerIterationStats {
            h,
            checked,
            violations,
            rate,
        });
        self.checked += checked;
    }

    fn finish(self) -> ViolationReport {
        let rate = if self.checked == 0 {
            0.0
        } else {
            self.violation_count as f64 / self.checked as f64
        };
        ViolationReport {
            property: self.property,
            kernel: self.kernel,
            iterations: self.iterations,
            checked_count: self.checked,
            violation_count: self.violation_count,
            violation_rate: rate,
            per_h: self.per_h,
            violations: self.violations,
            violations_truncated: self.violation_count > MAX_RECORDED_VIOLATIONS as u64,
        }
    }
}

fn require_normalized(s: &GramSeries, what: &str) -> Result<(), AnalysisError> {
    if !s.is_normalized() {
        return Err(AnalysisError::InvalidInput(format!(
            "{what} requires a normalized Gram series"
        )));
    }
    Ok(())
}

/// Flags every pair whose normalized kernel value increases from h to h+1 by
/// more than `tolerance`.
pub fn check_monotonic_decrease(
    s: &GramSeries,
    tolerance: f64,
) -> Result<ViolationReport, AnalysisError> {
    require_normalized(s, "monotonic-decrease check")?;
    if s.iterations() < 2 {
        return Err(AnalysisError::InvalidInput(
            "monotonic-decrease check needs H >= 2".into(),
        ));
    }
    let n = s.len();
    let mut b = ReportBuilder::new(PropertyKind::MonotonicDecrease, s);
    for h in 1..s.iterations() {
        let (cur, next) = (s.normalized(h).unwrap(), s.normalized(h + 1).unwrap());
        let mut checked = 0u64;
        let mut viol = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                checked += 1;
                let (a, bv) = (cur.get(i, j), next.get(i, j));
                if bv > a + tolerance {
                    viol += 1;
                    b.record(Violation {
                        i,
                        j,
                        k: None,
                        h,
                        lhs: bv,
                        rhs: a,
                        magnitude: bv - a,
                    });
                }
            }
        }
        b.push_per_h(h, checked, viol);
    }
    Ok(b.finish())
}

/// Iterates triples (x, y, z) with all indices distinct, exhaustively for
/// small collections and via a seeded uniform sample otherwise. The callback
/// returns whether the premise held and, if so, whether it was violated.
fn scan_triples(
    n: usize,
    mut visit: impl FnMut(usize, usize, usize) -> Option<bool>,
) -> (u64, u64) {
    let mut checked = 0u64;
    let mut violations = 0u64;
    let mut apply = |x: usize, y: usize, z: usize| {
        if let Some(violated) = visit(x, y, z) {
            checked += 1;
            if violated {
                violations += 1;
            }
        }
    };
    if n <= EXHAUSTIVE_TRIPLE_LIMIT {
        for x in 0..n {
            for y in 0..n {
                if y == x {
                    continue;
                }
                for z in 0..n {
                    if z == x || z == y {
                        continue;
                    }
                    apply(x, y, z);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(TRIPLE_SAMPLE_SEED);
        let mut drawn = 0u64;
        while drawn < TRIPLE_SAMPLE_COUNT {
            let x = rng.gen_range(0..n);
            let y = rng.gen_range(0..n);
            let z = rng.gen_range(0..n);
            if x == y || x == z || y == z {
                continue;
            }
            drawn += 1;
            apply(x, y, z);
        }
    }
    (checked, violations)
}

/// Order-consistency check (strict premise at h, reversal at h+1). A triple
/// only counts as checked when the premise holds; collections where all
/// values tie within the tolerance therefore report zero checked triples.
pub fn check_order_consistency(
    s: &GramSeries,
    tolerance: f64,
) -> Result<ViolationReport, AnalysisError> {
    require_normalized(s, "order-consistency check")?;
    if s.iterations() < 2 {
        return Err(AnalysisError::InvalidInput(
            "order-consistency check needs H >= 2".into(),
        ));
    }
    if s.len() < 3 {
        return Err(AnalysisError::InvalidInput(
            "order-consistency check needs at least 3 graphs".into(),
        ));
    }
    let mut b = ReportBuilder::new(PropertyKind::OrderConsistency, s);
    for h in 1..s.iterations() {
        let (cur, next) = (s.normalized(h).unwrap(), s.normalized(h + 1).unwrap());
        let mut recorder = Vec::new();
        let (checked, violations) = scan_triples(s.len(), |x, y, z| {
            let premise = cur.get(x, y) > cur.get(x, z) + tolerance;
            if !premise {
                return None;
            }
            let violated = next.get(x, y) < next.get(x, z) - tolerance;
            if violated {
                recorder.push(Violation {
                    i: x,
                    j: y,
                    k: Some(z),
                    h,
                    lhs: next.get(x, y),
                    rhs: next.get(x, z),
                    magnitude: next.get(x, z) - next.get(x, y),
                });
            }
            Some(violated)
        });
        for v in recorder {
            b.record(v);
        }
        b.push_per_h(h, checked, violations);
    }
    Ok(b.finish())
}

/// Finite-h WLOA bound: whenever K̃^(h)(x,y) >= K̃^(h)(x,z), assert
/// K̃^(h+1)(x,y) >= (Σ_{i<=h}ω / Σ_{i<=h+1}ω) · K̃^(h+1)(x,z) - tolerance.
pub fn check_wloa_bound(
    s: &GramSeries,
    omega: &Omega,
    tolerance: f64,
) -> Result<ViolationReport, AnalysisError> {
    if s.spec().kind != KernelKind::Wloa {
        return Err(AnalysisError::InvalidInput(
            "WLOA bound check applies only to WLOA series".into(),
        ));
    }
    require_normalized(s, "WLOA bound check")?;
    if s.iterations() < 2 {
        return Err(AnalysisError::InvalidInput(
            "WLOA bound check needs H >= 2".into(),
        ));
    }
    if s.len() < 3 {
        return Err(AnalysisError::InvalidInput(
            "WLOA bound check needs at least 3 graphs".into(),
        ));
    }
    let mut b = ReportBuilder::new(PropertyKind::WloaBound, s);
    for h in 1..s.iterations() {
        let ratio = omega.prefix_sum(h) / omega.prefix_sum(h + 1);
        let (cur, next) = (s.normalized(h).unwrap(), s.normalized(h + 1).unwrap());
        let mut recorder = Vec::new();
        let (checked, violations) = scan_triples(s.len(), |x, y, z| {
            if cur.get(x, y) < cur.get(x, z) {
                return None;
            }
            let lhs = next.get(x, y);
            let rhs = ratio * next.get(x, z);
            let violated = lhs < rhs - tolerance;
            if violated {
                recorder.push(Violation {
                    i: x,
                    j: y,
                    k: Some(z),
                    h,
                    lhs,
                    rhs,
                    magnitude: rhs - lhs,
                });
            }
            Some(violated)
        });
        for v in recorder {
            b.record(v);
        }
        b.push_per_h(h, checked, violations);
    }
    Ok(b.finish())
}

/// Per-iteration class margin: the minimum representation distance
/// `sqrt(2 - 2*K̃)` over cross-class pairs, with the pair achieving it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginCurve {
    pub margins: Vec<f64>,
    pub arg_pairs: Vec<(usize, usize)>,
}

impl MarginCurve {
    pub fn margin(&self, h: usize) -> f64 {
        self.margins[h - 1]
    }
}

pub fn margin_curve(s: &GramSeries, labels: &[usize]) -> Result<MarginCurve, AnalysisError> {
    require_normalized(s, "margin curve")?;
    if labels.len() != s.len() {
        return Err(AnalysisError::InvalidInput(format!(
            "expected {} labels, got {}",
            s.len(),
            labels.len()
        )));
    }
    let distinct = {
        let mut l = labels.to_vec();
        l.sort_unstable();
        l.dedup();
        l.len()
    };
    if distinct < 2 {
        return Err(AnalysisError::InvalidInput(
            "margin curve needs at least two classes".into(),
        ));
    }
    let n = s.len();
    let mut margins = Vec::with_capacity(s.iterations());
    let mut arg_pairs = Vec::with_capacity(s.iterations());
    for h in 1..=s.iterations() {
        let m = s.normalized(h).unwrap();
        let mut best = f64::INFINITY;
        let mut best_pair = (0, 0);
        for i in 0..n {
            for j in (i + 1)..n {
                if labels[i] == labels[j] {
                    continue;
                }
                let d = (2.0 - 2.0 * m.get(i, j)).max(0.0).sqrt();
                if d < best {
                    best = d;
                    best_pair = (i, j);
                }
            }
        }
        margins.push(best);
        arg_pairs.push(best_pair);
    }
    Ok(MarginCurve { margins, arg_pairs })
}

/// Normalized WL-subtree similarities of the published two-histogram
/// counterexample: iteration-1 vectors [200, 4] / [4, 200], then cumulative
/// with the refined vectors [100, 100, 4] / [2, 2, 200]. The first value is
/// strictly below the second, exhibiting the monotonic-decrease failure.
pub fn reproduce_counterexample() -> (f64, f64) {
    let g1: [f64; 2] = [200.0, 4.0];
    let g2: [f64; 2] = [4.0, 200.0];
    let r1: [f64; 3] = [100.0, 100.0, 4.0];
    let r2: [f64; 3] = [2.0, 2.0, 200.0];

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let k1 = dot(&g1, &g2) / (dot(&g1, &g1) * dot(&g2, &g2)).sqrt();
    let num2 = dot(&g1, &g2) + dot(&r1, &r2);
    let den2 = ((dot(&g1, &g1) + dot(&r1, &r1)) * (dot(&g2, &g2) + dot(&r2, &r2))).sqrt();
    (k1, num2 / den2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_synthetic, ClassRule, SyntheticFamily, SyntheticSpec};
    use crate::kernels::{gram_series, KernelSpec};

    fn er_series(kind: KernelKind, h: usize) -> GramSeries {
        let spec = SyntheticSpec {
            family: SyntheticFamily::SplitByDensity {
                p_low: 0.2,
                p_high: 0.5,
            },
            sizes: vec![8, 9, 10, 11, 12],
            class_rule: ClassRule::ByFamily,
        };
        let c = generate_synthetic(&spec, 7).unwrap();
        gram_series(&c, &KernelSpec::new(kind, h)).unwrap()
    }

    #[test]
    fn counterexample_values() {
        let (a, b) = reproduce_counterexample();
        assert!((a - 0.039_984_006_397_441_03).abs() < 1e-15);
        assert!((b - 0.040_397_686_748_609_41).abs() < 1e-15);
        assert!(a < b);
    }

    #[test]
    fn wloa_monotonic_on_random_corpus() {
        let s = er_series(KernelKind::Wloa, 5);
        let r = check_monotonic_decrease(&s, 1e-12).unwrap();
        assert_eq!(r.violation_count, 0);
        assert!(r.checked_count > 0);
    }

    #[test]
    fn wloa_bound_on_random_corpus() {
        let s = er_series(KernelKind::Wloa, 5);
        let r = check_wloa_bound(&s, &Omega::ConstantOne, 1e-12).unwrap();
        assert_eq!(r.violation_count, 0);
        assert!(r.checked_count > 0);
    }

    #[test]
    fn wloa_bound_rejects_subtree_series() {
        let s = er_series(KernelKind::WlSubtree, 3);
        assert!(check_wloa_bound(&s, &Omega::ConstantOne, 1e-12).is_err());
    }

    #[test]
    fn order_consistency_no_premise_on_isomorphic_collection() {
        let g = crate::graph::LabeledGraph::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            vec![1; 4],
            0,
        )
        .unwrap();
        let graphs = vec![g.clone(), g.permuted(&[1, 2, 3, 0]), g.permuted(&[3, 2, 1, 0])];
        let c = crate::graph::GraphCollection::new("iso3", graphs, 1, vec![0]);
        let s = gram_series(&c, &KernelSpec::new(KernelKind::WlSubtree, 3)).unwrap();
        let r = check_order_consistency(&s, 1e-6).unwrap();
        assert_eq!(r.checked_count, 0);
        assert_eq!(r.violation_count, 0);
    }

    #[test]
    fn margin_zero_for_cross_class_isomorphic_pair() {
        let g = crate::graph::LabeledGraph::from_edges(3, &[(0, 1), (1, 2)], vec![1; 3], 0)
            .unwrap();
        let mut h = g.clone();
        // same structure, different class
        h = crate::graph::LabeledGraph::from_edges(3, &[(0, 1), (1, 2)], vec![1; 3], 1)
            .unwrap_or(h);
        let c = crate::graph::GraphCollection::new("pair", vec![g, h], 2, vec![0, 1]);
        let s = gram_series(&c, &KernelSpec::new(KernelKind::Wloa, 3)).unwrap();
        let m = margin_curve(&s, &[0, 1]).unwrap();
        for h in 1..=3 {
            assert!(m.margin(h).abs() < 1e-12);
        }
    }

    #[test]
    fn margin_rejects_single_class() {
        let s = er_series(KernelKind::Wloa, 2);
        let labels = vec![0; s.len()];
        assert!(margin_curve(&s, &labels).is_err());
    }

    #[test]
    fn margin_arithmetic() {
        // distance for K̃ = 0.5 is sqrt(2 - 1) = 1
        assert!(((2.0f64 - 2.0 * 0.5).sqrt() - 1.0).abs() < 1e-15);
    }
}
