//! Shared test helpers: fixture paths and an independent brute-force kernel
//! oracle that materializes dense feature vectors over the full color union.

use std::collections::HashMap;
use std::path::PathBuf;

use igk_core::graph::LabeledGraph;

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Independent WL refinement: string signatures, its own color table, dense
/// per-iteration count vectors. Shares nothing with the library path.
pub struct OracleRefinement {
    table: HashMap<String, usize>,
}

impl OracleRefinement {
    pub fn new() -> Self {
        Self {
            table: HashMap::new(),
        }
    }

    fn color(&mut self, signature: String) -> usize {
        let next = self.table.len();
        *self.table.entry(signature).or_insert(next)
    }

    pub fn color_count(&self) -> usize {
        self.table.len()
    }

    /// Per-iteration colorings, iterations 0..=h.
    pub fn refine(&mut self, g: &LabeledGraph, h: usize) -> Vec<Vec<usize>> {
        let n = g.node_count();
        let mut all = Vec::with_capacity(h + 1);
        let init: Vec<usize> = (0..n)
            .map(|v| self.color(format!("L{}", g.node_label(v))))
            .collect();
        all.push(init);
        for _ in 0..h {
            let prev = all.last().unwrap().clone();
            let next: Vec<usize> = (0..n)
                .map(|v| {
                    let mut nc: Vec<usize> = g.neighbors(v).iter().map(|&u| prev[u]).collect();
                    nc.sort_unstable();
                    let sig = format!(
                        "{}|{}",
                        prev[v],
                        nc.iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    );
                    self.color(sig)
                })
                .collect();
            all.push(next);
        }
        all
    }

    /// Dense count vector over every color allocated so far.
    pub fn dense_counts(&self, coloring: &[usize]) -> Vec<u64> {
        let mut v = vec![0u64; self.color_count()];
        for &c in coloring {
            v[c] += 1;
        }
        v
    }
}

fn pad(mut v: Vec<u64>, len: usize) -> Vec<u64> {
    v.resize(len, 0);
    v
}

/// Brute-force WL-subtree kernel via explicit dense feature vectors.
pub fn subtree_oracle(a: &LabeledGraph, b: &LabeledGraph, h: usize) -> u64 {
    let mut wl = OracleRefinement::new();
    let ca = wl.refine(a, h);
    let cb = wl.refine(b, h);
    let total = wl.color_count();
    let mut sum = 0u64;
    for i in 1..=h {
        let va = pad(wl.dense_counts(&ca[i]), total);
        let vb = pad(wl.dense_counts(&cb[i]), total);
        sum += va.iter().zip(&vb).map(|(x, y)| x * y).sum::<u64>();
    }
    sum
}

/// Brute-force WLOA kernel with omega = 1 via dense vectors.
pub fn wloa_oracle(a: &LabeledGraph, b: &LabeledGraph, h: usize) -> u64 {
    let mut wl = OracleRefinement::new();
    let ca = wl.refine(a, h);
    let cb = wl.refine(b, h);
    let total = wl.color_count();
    let mut sum = 0u64;
    for i in 1..=h {
        let va = pad(wl.dense_counts(&ca[i]), total);
        let vb = pad(wl.dense_counts(&cb[i]), total);
        sum += va.iter().zip(&vb).map(|(x, y)| (*x).min(*y)).sum::<u64>();
    }
    sum
}
