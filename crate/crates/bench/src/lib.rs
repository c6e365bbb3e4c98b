//! Shared fixtures for the criterion benchmarks.

use linkpred_core::graph::{gen_synthetic, SyntheticModel};
use linkpred_core::pipeline::{split_links, Split, SplitSpec};
use linkpred_core::Graph;

/// Barabási–Albert graph with `n` nodes and 3 edges per new node.
pub fn ba_graph(n: usize) -> Graph {
    gen_synthetic(SyntheticModel::BarabasiAlbert { n, m: 3 }, 1).expect("valid model")
}

/// First trial of the default 90/10 split of [`ba_graph`].
pub fn ba_split(n: usize) -> Split {
    split_links(&ba_graph(n), &SplitSpec::default(), 0).expect("graph has enough non-edges")
}
