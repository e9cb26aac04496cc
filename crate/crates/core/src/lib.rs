//! Graph-kernel workbench: Weisfeiler-Lehman refinement, WL-subtree and WLOA
//! kernels, executable consistency checks, and a small message-passing GNN
//! trained with a cross-layer ranking-consistency loss.
//!
//! The crate is organised around a pipeline:
//!
//! 1. [`graph`] — load TU-format datasets or generate synthetic corpora.
//! 2. [`wl`] — refine node colorings under a collection-wide dictionary.
//! 3. [`kernels`] — build per-iteration Gram-matrix series.
//! 4. [`analysis`] — check monotonic decrease, order consistency, the WLOA
//!    bound, and class margins on a Gram series.
//! 5. [`tensor`] / [`gnn`] / [`loss`] — train a GCN-style network with the
//!    layer-consistency loss on top of a dense reverse-mode tape.
//! 6. [`metrics`] — Spearman layer correlation, kernel k-NN, accuracy.

pub mod analysis;
pub mod gnn;
pub mod graph;
pub mod kernels;
pub mod loss;
pub mod metrics;
pub mod tensor;
pub mod wl;
