//! Node embeddings and negative injection.
//!
//! Embeddings for link prediction are computed on the training graph with
//! the sampled negative training links temporarily added as edges, so that
//! positive and negative training pairs look alike to the embedding.

mod spectral;

use std::collections::HashSet;
use std::io::Write;

pub use spectral::{spectral_decomposition, spectral_embedding, SpectralEmbedding};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeIdMap};

/// One `dim`-wide row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    values: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(node_count: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != node_count * dim {
            return Err(Error::Shape(format!(
                "embedding of {node_count} nodes x {dim} needs {} values, got {}",
                node_count * dim,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("embedding contains non-finite values".into()));
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.values.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn row(&self, node: NodeId) -> &[f64] {
        &self.values[node * self.dim..(node + 1) * self.dim]
    }

    /// Header `node,v0,v1,…`; the node column holds external labels when
    /// `ids` is given.
    pub fn write_csv<W: Write>(&self, mut out: W, ids: Option<&NodeIdMap>) -> std::io::Result<()> {
        write!(out, "node")?;
        for j in 0..self.dim {
            write!(out, ",v{j}")?;
        }
        writeln!(out)?;
        for i in 0..self.node_count() {
            match ids.and_then(|m| m.label(i)) {
                Some(label) => write!(out, "{label}")?,
                None => write!(out, "{i}")?,
            }
            for v in self.row(i) {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Reads a table keyed by external node labels. Every node of `ids`
    /// must have exactly one row.
    pub fn read_csv(text: &str, ids: &NodeIdMap) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::Empty("embedding table".into()))?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.first() != Some(&"node") {
            return Err(Error::Parse {
                line: hline + 1,
                message: "embedding header must start with `node`".into(),
            });
        }
        let dim = cols.len() - 1;
        let n = ids.len();
        let mut values = vec![0.0; n * dim];
        let mut seen = vec![false; n];
        for (idx, line) in lines {
            let err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != dim + 1 {
                return Err(err(format!("expected {} fields, found {}", dim + 1, fields.len())));
            }
            let node = ids
                .id(fields[0].trim())
                .ok_or_else(|| err(format!("unknown node {:?}", fields[0])))?;
            if std::mem::replace(&mut seen[node], true) {
                return Err(err(format!("duplicate row for node {:?}", fields[0])));
            }
            for (j, f) in fields[1..].iter().enumerate() {
                values[node * dim + j] = f
                    .trim()
                    .parse()
                    .map_err(|e| err(format!("{f:?}: {e}")))?;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Data(format!(
                "embedding table has no row for node {:?}",
                ids.label(missing).unwrap_or("?")
            )));
        }
        Self::new(n, dim, values)
    }
}

/// `G' = (V, E ∪ negatives)`. Fails if a negative pair is already an edge,
/// repeats, or is a self-loop.
pub fn negative_injection(g: &Graph, negatives: &[(NodeId, NodeId)]) -> Result<Graph> {
    let mut seen = HashSet::with_capacity(negatives.len());
    for &(u, v) in negatives {
        g.check_node(u)?;
        g.check_node(v)?;
        if u == v {
            return Err(Error::Data(format!("negative link ({u},{u}) is a self-loop")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::Data(format!("negative link ({u},{v}) listed twice")));
        }
    }
    g.with_added_edges(negatives)
}
