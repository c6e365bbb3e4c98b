//! Link prediction from local enclosing subgraphs.
//!
//! The crate bundles classic link-prediction heuristics, machinery that
//! measures how well high-order heuristics are approximated inside `h`-hop
//! enclosing subgraphs, and a subgraph-classification pipeline built on a
//! sort-pooling graph neural network.

pub mod decay;
pub mod embed;
pub mod error;
pub mod gnn;
pub mod graph;
pub mod heuristics;
pub mod matrix;
pub mod pipeline;
pub mod rng;
pub mod subgraph;

pub use error::{Error, ErrorCategory, Result};
pub use graph::{Graph, NodeId, NodeIdMap};
pub use matrix::DenseMatrix;
