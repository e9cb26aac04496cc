//! Graph data model, TU-format dataset ingestion, and synthetic corpora.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while reading a TU-format dataset directory.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("missing required file: {0}")]
    MissingFile(String),
    #[error("{file}:{line}: {msg}")]
    Malformed {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("{file}:{line}: edge ({u}, {v}) crosses graph boundaries")]
    CrossGraphEdge {
        file: String,
        line: usize,
        u: usize,
        v: usize,
    },
    #[error("{file}:{line}: self-loop on node {node}")]
    SelfLoop {
        file: String,
        line: usize,
        node: usize,
    },
    #[error("failed to read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

/// Errors raised by direct graph construction.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("node index {index} out of range for {node_count} nodes")]
    IndexOutOfRange { index: usize, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("expected {expected} node labels, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error)]
#[error("invalid synthetic spec: {0}")]
pub struct InvalidSpec(pub String);

/// Undirected, unweighted graph with integer node labels and a class label.
///
/// Invariants enforced at construction: symmetric adjacency, no self-loops,
/// no duplicate edges, sorted neighbor lists, `node_count >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledGraph {
    node_count: usize,
    adjacency: Vec<Vec<usize>>,
    node_labels: Vec<i64>,
    graph_label: usize,
}

impl LabeledGraph {
    /// Builds a graph from an undirected edge list. Edges may be listed in
    /// either or both directions; duplicates are removed.
    pub fn from_edges(
        node_count: usize,
        edges: &[(usize, usize)],
        node_labels: Vec<i64>,
        graph_label: usize,
    ) -> Result<Self, GraphError> {
        if node_count == 0 {
            return Err(GraphError::Empty);
        }
        if node_labels.len() != node_count {
            return Err(GraphError::LabelCountMismatch {
                expected: node_count,
                got: node_labels.len(),
            });
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(GraphError::IndexOutOfRange {
                    index: u.max(v),
                    node_count,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            node_count,
            adjacency,
            node_labels,
            graph_label,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn node_label(&self, v: usize) -> i64 {
        self.node_labels[v]
    }

    pub fn node_labels(&self) -> &[i64] {
        &self.node_labels
    }

    pub fn graph_label(&self) -> usize {
        self.graph_label
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Returns the graph with nodes relabeled by `perm` (new index of node v
    /// is `perm[v]`). Used to exercise permutation-equivariance properties.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.node_count);
        let mut edges = Vec::with_capacity(self.edge_count());
        for v in 0..self.node_count {
            for &u in &self.adjacency[v] {
                if v < u {
                    edges.push((perm[v], perm[u]));
                }
            }
        }
        let mut labels = vec![0; self.node_count];
        for v in 0..self.node_count {
            labels[perm[v]] = self.node_labels[v];
        }
        Self::from_edges(self.node_count, &edges, labels, self.graph_label)
            .expect("permutation preserves validity")
    }
}

/// A named set of graphs with contiguous class labels in `[0, class_count)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCollection {
    name: String,
    graphs: Vec<LabeledGraph>,
    class_count: usize,
    /// Original class labels as found in the source, indexed by class id.
    original_class_labels: Vec<i64>,
}

impl GraphCollection {
    pub fn new(
        name: impl Into<String>,
        graphs: Vec<LabeledGraph>,
        class_count: usize,
        original_class_labels: Vec<i64>,
    ) -> Self {
        assert!(!graphs.is_empty(), "collection must be non-empty");
        for g in &graphs {
            assert!(g.graph_label() < class_count, "graph label out of range");
        }
        Self {
            name: name.into(),
            graphs,
            class_count,
            original_class_labels,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graph(&self, i: usize) -> &LabeledGraph {
        &self.graphs[i]
    }

    pub fn graphs(&self) -> &[LabeledGraph] {
        &self.graphs
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn original_class_labels(&self) -> &[i64] {
        &self.original_class_labels
    }

    pub fn graph_labels(&self) -> Vec<usize> {
        self.graphs.iter().map(|g| g.graph_label()).collect()
    }

    /// Keeps only graphs accepted by the predicate. Class ids are preserved,
    /// not compacted, so labels stay comparable with the parent collection.
    pub fn filter(&self, name: impl Into<String>, keep: impl Fn(&LabeledGraph) -> bool) -> Self {
        let graphs: Vec<_> = self.graphs.iter().filter(|g| keep(g)).cloned().collect();
        Self::new(
            name,
            graphs,
            self.class_count,
            self.original_class_labels.clone(),
        )
    }

    /// Concatenates two collections; class ids must already be aligned.
    pub fn concat(name: impl Into<String>, a: &Self, b: &Self) -> Self {
        let mut graphs = a.graphs.clone();
        graphs.extend(b.graphs.iter().cloned());
        let class_count = a.class_count.max(b.class_count);
        let mut original = a.original_class_labels.clone();
        for (i, &l) in b.original_class_labels.iter().enumerate() {
            if i >= original.len() {
                original.push(l);
            }
        }
        Self::new(name, graphs, class_count, original)
    }

    /// Stable 64-bit FNV-1a fingerprint of the full collection structure.
    pub fn fingerprint(&self) -> String {
        let mut h = Fnv64::new();
        h.write_usize(self.graphs.len());
        h.write_usize(self.class_count);
        for g in &self.graphs {
            h.write_usize(g.node_count());
            h.write_usize(g.graph_label());
            for &l in g.node_labels() {
                h.write_i64(l);
            }
            for v in 0..g.node_count() {
                h.write_usize(usize::MAX); // row separator
                for &u in g.neighbors(v) {
                    h.write_usize(u);
                }
            }
        }
        format!("{:016x}", h.finish())
    }
}

struct Fnv64(u64);

impl Fnv64 {
    fn new() -> Self {
        Fnv64(0xcbf2_9ce4_8422_2325)
    }
    fn write_byte(&mut self, b: u8) {
        self.0 ^= u64::from(b);
        self.0 = self.0.wrapping_mul(0x1000_0000_01b3);
    }
    fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.write_byte(b);
        }
    }
    fn write_usize(&mut self, v: usize) {
        self.write_u64(v as u64);
    }
    fn write_i64(&mut self, v: i64) {
        self.write_u64(v as u64);
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

fn read_lines(dir: &Path, file_name: &str, required: bool) -> Result<Option<Vec<String>>, ParseError> {
    let path = dir.join(file_name);
    if !path.exists() {
        if required {
            return Err(ParseError::MissingFile(file_name.to_string()));
        }
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|source| ParseError::Io {
        file: file_name.to_string(),
        source,
    })?;
    Ok(Some(
        text.lines().map(|l| l.trim().to_string()).collect(),
    ))
}

fn parse_int(file: &str, line_no: usize, token: &str) -> Result<i64, ParseError> {
    token
        .trim()
        .parse::<i64>()
        .map_err(|_| ParseError::Malformed {
            file: file.to_string(),
            line: line_no,
            msg: format!("expected integer, got '{token}'"),
        })
}

/// Parses a TU-format dataset directory.
///
/// Required files: `<DS>_A.txt` (1-indexed `u, v` pairs),
/// `<DS>_graph_indicator.txt` (graph id per node), `<DS>_graph_labels.txt`.
/// Optional: `<DS>_node_labels.txt`; absent labels default to the constant 1.
/// Duplicate edges are deduplicated; graph labels are remapped to contiguous
/// ids with the originals kept in the collection metadata.
pub fn parse_tu_dataset(directory: &Path, dataset_name: &str) -> Result<GraphCollection, ParseError> {
    let a_file = format!("{dataset_name}_A.txt");
    let ind_file = format!("{dataset_name}_graph_indicator.txt");
    let glab_file = format!("{dataset_name}_graph_labels.txt");
    let nlab_file = format!("{dataset_name}_node_labels.txt");

    let indicator_lines = read_lines(directory, &ind_file, true)?.unwrap();
    let graph_label_lines = read_lines(directory, &glab_file, true)?.unwrap();
    let edge_lines = read_lines(directory, &a_file, true)?.unwrap();
    let node_label_lines = read_lines(directory, &nlab_file, false)?;

    // node -> graph id (0-indexed) and node -> local index within its graph
    let mut node_graph = Vec::new();
    let mut node_local = Vec::new();
    let mut graph_sizes: Vec<usize> = Vec::new();
    for (i, line) in indicator_lines.iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let gid = parse_int(&ind_file, i + 1, line)?;
        if gid < 1 {
            return Err(ParseError::Malformed {
                file: ind_file.clone(),
                line: i + 1,
                msg: format!("graph indicator must be >= 1, got {gid}"),
            });
        }
        let gid = (gid - 1) as usize;
        if gid >= graph_sizes.len() {
            graph_sizes.resize(gid + 1, 0);
        }
        node_graph.push(gid);
        node_local.push(graph_sizes[gid]);
        graph_sizes[gid] += 1;
    }
    let total_nodes = node_graph.len();
    if total_nodes == 0 {
        return Err(ParseError::Malformed {
            file: ind_file.clone(),
            line: 1,
            msg: "no nodes declared".into(),
        });
    }
    let graph_count = graph_sizes.len();
    if graph_sizes.iter().any(|&s| s == 0) {
        return Err(ParseError::Malformed {
            file: ind_file.clone(),
            line: 1,
            msg: "graph ids must be contiguous starting at 1".into(),
        });
    }

    // graph labels, remapped to contiguous [0, class_count)
    let mut raw_graph_labels = Vec::with_capacity(graph_count);
    for (i, line) in graph_label_lines.iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        raw_graph_labels.push(parse_int(&glab_file, i + 1, line)?);
    }
    if raw_graph_labels.len() != graph_count {
        return Err(ParseError::Malformed {
            file: glab_file.clone(),
            line: raw_graph_labels.len() + 1,
            msg: format!(
                "expected {graph_count} graph labels, got {}",
                raw_graph_labels.len()
            ),
        });
    }
    let mut label_map: BTreeMap<i64, usize> = BTreeMap::new();
    for &l in &raw_graph_labels {
        let next = label_map.len();
        label_map.entry(l).or_insert(next);
    }
    let class_count = label_map.len();
    let mut original_class_labels = vec![0i64; class_count];
    for (&orig, &id) in &label_map {
        original_class_labels[id] = orig;
    }

    // node labels
    let node_labels: Vec<i64> = match node_label_lines {
        Some(lines) => {
            let mut labels = Vec::with_capacity(total_nodes);
            for (i, line) in lines.iter().enumerate() {
                if line.is_empty() {
                    continue;
                }
                labels.push(parse_int(&nlab_file, i + 1, line)?);
            }
            if labels.len() != total_nodes {
                return Err(ParseError::Malformed {
                    file: nlab_file.clone(),
                    line: labels.len() + 1,
                    msg: format!("expected {total_nodes} node labels, got {}", labels.len()),
                });
            }
            labels
        }
        None => vec![1; total_nodes],
    };

    // edges, grouped per graph in local indices
    let mut per_graph_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (i, line) in edge_lines.iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (u_tok, v_tok) = match (parts.next(), parts.next()) {
            (Some(u), Some(v)) => (u, v),
            _ => {
                return Err(ParseError::Malformed {
                    file: a_file.clone(),
                    line: i + 1,
                    msg: format!("expected 'u, v', got '{line}'"),
                })
            }
        };
        let u = parse_int(&a_file, i + 1, u_tok)?;
        let v = parse_int(&a_file, i + 1, v_tok)?;
        if u < 1 || v < 1 || u as usize > total_nodes || v as usize > total_nodes {
            return Err(ParseError::Malformed {
                file: a_file.clone(),
                line: i + 1,
                msg: format!("node id out of range in edge ({u}, {v})"),
            });
        }
        let (u, v) = ((u - 1) as usize, (v - 1) as usize);
        if u == v {
            return Err(ParseError::SelfLoop {
                file: a_file.clone(),
                line: i + 1,
                node: u + 1,
            });
        }
        if node_graph[u] != node_graph[v] {
            return Err(ParseError::CrossGraphEdge {
                file: a_file.clone(),
                line: i + 1,
                u: u + 1,
                v: v + 1,
            });
        }
        per_graph_edges[node_graph[u]].push((node_local[u], node_local[v]));
    }

    // assemble graphs
    let mut per_graph_labels: Vec<Vec<i64>> = graph_sizes
        .iter()
        .map(|&s| Vec::with_capacity(s))
        .collect();
    for n in 0..total_nodes {
        per_graph_labels[node_graph[n]].push(node_labels[n]);
    }
    let mut graphs = Vec::with_capacity(graph_count);
    for g in 0..graph_count {
        let class = label_map[&raw_graph_labels[g]];
        let graph = LabeledGraph::from_edges(
            graph_sizes[g],
            &per_graph_edges[g],
            std::mem::take(&mut per_graph_labels[g]),
            class,
        )
        .expect("validated during parsing");
        graphs.push(graph);
    }

    Ok(GraphCollection::new(
        dataset_name,
        graphs,
        class_count,
        original_class_labels,
    ))
}

/// Synthetic corpus family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SyntheticFamily {
    /// One cycle per size entry.
    Cycle,
    /// One path per size entry.
    Path,
    /// Per size entry: one Erdős–Rényi graph (class 0) and one preferential
    /// attachment graph (class 1).
    ErVsBa { edge_prob: f64, attach_edges: usize },
    /// Per size entry: a sparse and a dense Erdős–Rényi graph.
    SplitByDensity { p_low: f64, p_high: f64 },
}

/// How class labels are assigned to generated graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassRule {
    /// Cycle/sparse/ER arm gets class 0; path/dense/BA arm gets class 1.
    ByFamily,
    /// Every graph gets the given class.
    Constant(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub family: SyntheticFamily,
    pub sizes: Vec<usize>,
    pub class_rule: ClassRule,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<(), InvalidSpec> {
        if self.sizes.is_empty() {
            return Err(InvalidSpec("sizes must be non-empty".into()));
        }
        if let Some(&s) = self.sizes.iter().find(|&&s| s < 3) {
            return Err(InvalidSpec(format!("size {s} < 3")));
        }
        match &self.family {
            SyntheticFamily::ErVsBa {
                edge_prob,
                attach_edges,
            } => {
                if !(0.0..=1.0).contains(edge_prob) {
                    return Err(InvalidSpec(format!("edge_prob {edge_prob} not in [0,1]")));
                }
                if *attach_edges == 0 {
                    return Err(InvalidSpec("attach_edges must be >= 1".into()));
                }
            }
            SyntheticFamily::SplitByDensity { p_low, p_high } => {
                for p in [p_low, p_high] {
                    if !(0.0..=1.0).contains(p) {
                        return Err(InvalidSpec(format!("density {p} not in [0,1]")));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn cycle_graph(n: usize, label: usize) -> LabeledGraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    LabeledGraph::from_edges(n, &edges, vec![1; n], label).unwrap()
}

fn path_graph(n: usize, label: usize) -> LabeledGraph {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    LabeledGraph::from_edges(n, &edges, vec![1; n], label).unwrap()
}

fn er_graph(n: usize, p: f64, label: usize, rng: &mut ChaCha8Rng) -> LabeledGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    LabeledGraph::from_edges(n, &edges, vec![1; n], label).unwrap()
}

fn ba_graph(n: usize, m: usize, label: usize, rng: &mut ChaCha8Rng) -> LabeledGraph {
    let m = m.min(n - 1);
    let mut edges = Vec::new();
    let mut degree = vec![0usize; n];
    // seed clique on m+1 nodes
    for u in 0..=m {
        for v in (u + 1)..=m {
            edges.push((u, v));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    for v in (m + 1)..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        while chosen.len() < m {
            let total: usize = degree[..v].iter().sum();
            let mut t = rng.gen_range(0..total);
            let mut pick = 0;
            for (u, &d) in degree[..v].iter().enumerate() {
                if t < d {
                    pick = u;
                    break;
                }
                t -= d;
            }
            if !chosen.contains(&pick) {
                chosen.push(pick);
            }
        }
        for &u in &chosen {
            edges.push((u, v));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    LabeledGraph::from_edges(n, &edges, vec![1; n], label).unwrap()
}

/// Generates a deterministic synthetic collection from `(spec, seed)`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<GraphCollection, InvalidSpec> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class = |arm: usize| match spec.class_rule {
        ClassRule::ByFamily => arm,
        ClassRule::Constant(c) => c,
    };
    let mut graphs = Vec::new();
    for &n in &spec.sizes {
        match &spec.family {
            SyntheticFamily::Cycle => graphs.push(cycle_graph(n, class(0))),
            SyntheticFamily::Path => graphs.push(path_graph(n, class(1))),
            SyntheticFamily::ErVsBa {
                edge_prob,
                attach_edges,
            } => {
                graphs.push(er_graph(n, *edge_prob, class(0), &mut rng));
                graphs.push(ba_graph(n, *attach_edges, class(1), &mut rng));
            }
            SyntheticFamily::SplitByDensity { p_low, p_high } => {
                graphs.push(er_graph(n, *p_low, class(0), &mut rng));
                graphs.push(er_graph(n, *p_high, class(1), &mut rng));
            }
        }
    }
    let class_count = graphs.iter().map(|g| g.graph_label()).max().unwrap() + 1;
    let original: Vec<i64> = (0..class_count).map(|c| c as i64).collect();
    let name = match &spec.family {
        SyntheticFamily::Cycle => format!("synthetic-cycle-{seed}"),
        SyntheticFamily::Path => format!("synthetic-path-{seed}"),
        SyntheticFamily::ErVsBa { .. } => format!("synthetic-er-vs-ba-{seed}"),
        SyntheticFamily::SplitByDensity { .. } => format!("synthetic-split-density-{seed}"),
    };
    Ok(GraphCollection::new(name, graphs, class_count, original))
}

/// Cycles (class 0) and paths (class 1) over the given sizes; the standard
/// two-class corpus used by the training and margin checks.
pub fn cycles_vs_paths(sizes: &[usize], seed: u64) -> Result<GraphCollection, InvalidSpec> {
    let cycles = generate_synthetic(
        &SyntheticSpec {
            family: SyntheticFamily::Cycle,
            sizes: sizes.to_vec(),
            class_rule: ClassRule::ByFamily,
        },
        seed,
    )?;
    let paths = generate_synthetic(
        &SyntheticSpec {
            family: SyntheticFamily::Path,
            sizes: sizes.to_vec(),
            class_rule: ClassRule::ByFamily,
        },
        seed,
    )?;
    Ok(GraphCollection::concat(
        format!("synthetic-cycles-vs-paths-{seed}"),
        &cycles,
        &paths,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_by_construction() {
        let spec = SyntheticSpec {
            family: SyntheticFamily::Cycle,
            sizes: vec![3],
            class_rule: ClassRule::ByFamily,
        };
        let c = generate_synthetic(&spec, 0).unwrap();
        assert_eq!(c.len(), 1);
        let g = c.graph(0);
        assert_eq!(g.node_count(), 3);
        for v in 0..3 {
            assert_eq!(g.degree(v), 2);
        }
        assert_eq!(g.graph_label(), 0);
    }

    #[test]
    fn path_degree_sequence() {
        let spec = SyntheticSpec {
            family: SyntheticFamily::Path,
            sizes: vec![3],
            class_rule: ClassRule::ByFamily,
        };
        let c = generate_synthetic(&spec, 0).unwrap();
        let g = c.graph(0);
        let mut degs: Vec<_> = (0..3).map(|v| g.degree(v)).collect();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 1, 2]);
        assert_eq!(g.graph_label(), 1);
    }

    #[test]
    fn synthetic_determinism() {
        let spec = SyntheticSpec {
            family: SyntheticFamily::ErVsBa {
                edge_prob: 0.3,
                attach_edges: 2,
            },
            sizes: vec![8, 10, 12],
            class_rule: ClassRule::ByFamily,
        };
        let a = generate_synthetic(&spec, 42).unwrap();
        let b = generate_synthetic(&spec, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&spec, 43).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn size_below_three_rejected() {
        let spec = SyntheticSpec {
            family: SyntheticFamily::Cycle,
            sizes: vec![2],
            class_rule: ClassRule::ByFamily,
        };
        assert!(generate_synthetic(&spec, 0).is_err());
    }

    #[test]
    fn self_loop_rejected() {
        let err = LabeledGraph::from_edges(3, &[(0, 0)], vec![1, 1, 1], 0).unwrap_err();
        assert!(matches!(err, GraphError::SelfLoop(0)));
    }

    #[test]
    fn duplicate_edges_deduplicated() {
        let g = LabeledGraph::from_edges(2, &[(0, 1), (1, 0), (0, 1)], vec![1, 1], 0).unwrap();
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
        assert_eq!(g.edge_count(), 1);
    }
}
