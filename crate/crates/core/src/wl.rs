//! Weisfeiler-Lehman color refinement with a collection-wide dictionary.
//!
//! All graphs that will ever be compared by a kernel must be refined under
//! one shared [`ColorDictionary`]: the kernels compare histograms by color
//! id, so ids have to mean the same signature everywhere.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::graph::{GraphCollection, LabeledGraph};

pub type Color = u32;

/// Sparse color histogram; counts always sum to the node count.
pub type Histogram = BTreeMap<Color, u64>;

static DICT_STAMP: AtomicU64 = AtomicU64::new(1);

/// Key for the initial coloring: either a concrete node label or the single
/// shared color used when labels are disabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum InitialKey {
    Uniform,
    Label(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Signature {
    own: Color,
    neighbors: Vec<Color>, // sorted: canonical multiset encoding
}

/// Injective map from refinement signatures (and initial labels) to dense
/// color ids. Growth order is deterministic: whatever order lookups arrive
/// in, which callers fix as (graph scan order, node index order).
#[derive(Debug)]
pub struct ColorDictionary {
    initial: HashMap<InitialKey, Color>,
    table: HashMap<Signature, Color>,
    next: Color,
    stamp: u64,
}

impl Default for ColorDictionary {
    fn default() -> Self {
        Self::new()
    }
}

impl ColorDictionary {
    pub fn new() -> Self {
        Self {
            initial: HashMap::new(),
            table: HashMap::new(),
            next: 0,
            stamp: DICT_STAMP.fetch_add(1, Ordering::Relaxed),
        }
    }

    /// Registers the initial colors of every graph in the collection, in
    /// collection order. Doing this before any refinement keeps all initial
    /// colors below all refinement colors.
    pub fn register_collection(&mut self, collection: &GraphCollection, use_node_labels: bool) {
        for g in collection.graphs() {
            self.register_graph(g, use_node_labels);
        }
    }

    pub fn register_graph(&mut self, g: &LabeledGraph, use_node_labels: bool) {
        if use_node_labels {
            for v in 0..g.node_count() {
                self.initial_color(InitialKey::Label(g.node_label(v)));
            }
        } else {
            self.initial_color(InitialKey::Uniform);
        }
    }

    fn initial_color(&mut self, key: InitialKey) -> Color {
        if let Some(&c) = self.initial.get(&key) {
            return c;
        }
        let c = self.next;
        self.next += 1;
        self.initial.insert(key, c);
        c
    }

    fn signature_color(&mut self, own: Color, neighbors: Vec<Color>) -> Color {
        let sig = Signature { own, neighbors };
        if let Some(&c) = self.table.get(&sig) {
            return c;
        }
        let c = self.next;
        self.next += 1;
        self.table.insert(sig, c);
        c
    }

    /// Total number of colors allocated so far.
    pub fn color_count(&self) -> usize {
        self.next as usize
    }

    pub fn stamp(&self) -> u64 {
        self.stamp
    }
}

/// Per-iteration colorings and histograms for one graph, iterations `0..=H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringSequence {
    colorings: Vec<Vec<Color>>,
    histograms: Vec<Histogram>,
    dictionary_stamp: u64,
}

impl ColoringSequence {
    /// Refinement depth H (the sequence holds H+1 entries).
    pub fn depth(&self) -> usize {
        self.colorings.len() - 1
    }

    pub fn coloring(&self, iteration: usize) -> &[Color] {
        &self.colorings[iteration]
    }

    pub fn histogram(&self, iteration: usize) -> &Histogram {
        &self.histograms[iteration]
    }

    pub fn node_count(&self) -> usize {
        self.colorings[0].len()
    }

    pub fn dictionary_stamp(&self) -> u64 {
        self.dictionary_stamp
    }
}

fn histogram_of(coloring: &[Color]) -> Histogram {
    let mut h = Histogram::new();
    for &c in coloring {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

/// Iteration-0 coloring: node labels mapped through the shared dictionary,
/// or the single shared color when labels are disabled.
pub fn initial_coloring(
    g: &LabeledGraph,
    use_node_labels: bool,
    dict: &mut ColorDictionary,
) -> Vec<Color> {
    if use_node_labels {
        (0..g.node_count())
            .map(|v| dict.initial_color(InitialKey::Label(g.node_label(v))))
            .collect()
    } else {
        let c = dict.initial_color(InitialKey::Uniform);
        vec![c; g.node_count()]
    }
}

/// One refinement step: each node's new color encodes its own color and the
/// sorted multiset of its neighbors' colors. The dictionary is extended in
/// node-scan order.
pub fn refine_step(coloring: &[Color], g: &LabeledGraph, dict: &mut ColorDictionary) -> Vec<Color> {
    assert_eq!(coloring.len(), g.node_count(), "coloring length mismatch");
    (0..g.node_count())
        .map(|v| {
            let mut neighbor_colors: Vec<Color> =
                g.neighbors(v).iter().map(|&u| coloring[u]).collect();
            neighbor_colors.sort_unstable();
            dict.signature_color(coloring[v], neighbor_colors)
        })
        .collect()
}

/// Runs `iterations` refinement steps and returns the full coloring sequence
/// (iterations `0..=H`) with per-iteration histograms. No early exit on
/// stabilization: kernel sums index iterations uniformly.
pub fn refine(
    g: &LabeledGraph,
    iterations: usize,
    dict: &mut ColorDictionary,
    use_node_labels: bool,
) -> ColoringSequence {
    assert!(iterations >= 1, "refinement depth must be >= 1");
    let mut colorings = Vec::with_capacity(iterations + 1);
    colorings.push(initial_coloring(g, use_node_labels, dict));
    for _ in 0..iterations {
        let next = refine_step(colorings.last().unwrap(), g, dict);
        colorings.push(next);
    }
    let histograms = colorings.iter().map(|c| histogram_of(c)).collect();
    ColoringSequence {
        colorings,
        histograms,
        dictionary_stamp: dict.stamp(),
    }
}

/// Tests two colorings for inducing the same partition of the nodes.
pub fn same_partition(a: &[Color], b: &[Color]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd: HashMap<Color, Color> = HashMap::new();
    let mut bwd: HashMap<Color, Color> = HashMap::new();
    for (&ca, &cb) in a.iter().zip(b.iter()) {
        if *fwd.entry(ca).or_insert(cb) != cb {
            return false;
        }
        if *bwd.entry(cb).or_insert(ca) != ca {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LabeledGraph;

    fn p3() -> LabeledGraph {
        LabeledGraph::from_edges(3, &[(0, 1), (1, 2)], vec![1, 1, 1], 0).unwrap()
    }

    fn c3() -> LabeledGraph {
        LabeledGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)], vec![1, 1, 1], 0).unwrap()
    }

    #[test]
    fn uniform_initial_coloring_is_zero() {
        let mut dict = ColorDictionary::new();
        let c = initial_coloring(&c3(), false, &mut dict);
        assert_eq!(c, vec![0, 0, 0]);
        assert_eq!(histogram_of(&c), Histogram::from([(0, 3)]));
    }

    #[test]
    fn labeled_initial_coloring_injective() {
        let g = LabeledGraph::from_edges(3, &[(0, 1), (1, 2)], vec![7, 9, 7], 0).unwrap();
        let mut dict = ColorDictionary::new();
        let c = initial_coloring(&g, true, &mut dict);
        assert_eq!(c[0], c[2]);
        assert_ne!(c[0], c[1]);
    }

    #[test]
    fn p3_c3_shared_dictionary_refinement() {
        // Hand-executed WL from the uniform color: P3 endpoints get the
        // (0,{0}) color, the middle and all C3 nodes get (0,{0,0}).
        let mut dict = ColorDictionary::new();
        let p = p3();
        let c = c3();
        let cp0 = initial_coloring(&p, false, &mut dict);
        let cc0 = initial_coloring(&c, false, &mut dict);
        let cp1 = refine_step(&cp0, &p, &mut dict);
        let cc1 = refine_step(&cc0, &c, &mut dict);
        assert_eq!(cp1[0], cp1[2]);
        assert_ne!(cp1[0], cp1[1]);
        assert_eq!(cc1, vec![cp1[1]; 3]);
        let h = histogram_of(&cp1);
        assert_eq!(h.len(), 2);
        assert_eq!(h[&cp1[0]], 2);
        assert_eq!(h[&cp1[1]], 1);
    }

    #[test]
    fn edgeless_graph_single_new_color() {
        let g = LabeledGraph::from_edges(4, &[], vec![1; 4], 0).unwrap();
        let mut dict = ColorDictionary::new();
        let c0 = initial_coloring(&g, false, &mut dict);
        let c1 = refine_step(&c0, &g, &mut dict);
        assert!(c1.iter().all(|&c| c == c1[0]));
        assert_ne!(c1[0], c0[0]);
    }

    #[test]
    fn p3_stabilizes_at_iteration_one() {
        let mut dict = ColorDictionary::new();
        let seq = refine(&p3(), 2, &mut dict, false);
        assert_eq!(seq.depth(), 2);
        assert!(same_partition(seq.coloring(1), seq.coloring(2)));
    }

    #[test]
    fn c3_stays_single_class() {
        let mut dict = ColorDictionary::new();
        let seq = refine(&c3(), 3, &mut dict, false);
        for i in 0..=3 {
            assert_eq!(seq.histogram(i).len(), 1, "iteration {i}");
        }
    }

    #[test]
    fn depth_one_stores_two_colorings() {
        let mut dict = ColorDictionary::new();
        let seq = refine(&p3(), 1, &mut dict, false);
        assert_eq!(seq.depth(), 1);
        assert_eq!(seq.coloring(0).len(), 3);
        assert_eq!(seq.coloring(1).len(), 3);
    }
}
