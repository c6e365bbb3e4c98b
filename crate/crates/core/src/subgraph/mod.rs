//! Enclosing-subgraph extraction and double-radius node labeling.
//!
//! The `h`-hop enclosing subgraph of `(x, y)` is induced by every node
//! within `h` hops of `x` or of `y`. Each node is labeled from its pair of
//! distances `(d_x, d_y)`: the targets get 1, nodes that cannot reach one
//! of the targets get 0, and the rest are hashed so that labels grow with
//! `d_x + d_y` and then with `d_x · d_y`.

mod record;

pub use record::{read_records, write_records, SubgraphRecord};

use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingTable;
use crate::error::{Error, Result};
use crate::graph::{bfs_bounded, induce_subgraph, Graph, NodeId};
use crate::matrix::DenseMatrix;

pub const DEFAULT_LABEL_CAP: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractOptions {
    /// Drop the `(x, y)` edge from the subgraph if present.
    pub remove_target_edge: bool,
    /// Fail instead of returning a subgraph with more nodes than this.
    pub max_nodes: Option<usize>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            remove_target_edge: true,
            max_nodes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnclosingSubgraph {
    pub graph: Graph,
    /// `node_map[local] = global`, ascending.
    pub node_map: Vec<NodeId>,
    /// Local ids of `x` and `y`.
    pub target: (usize, usize),
    pub hop: u32,
    pub labels: Vec<u32>,
    /// The source graph contained `(x, y)` and it was removed here.
    pub had_target_edge: bool,
    /// Degree of each local node in the source graph.
    pub source_degrees: Vec<usize>,
}

impl EnclosingSubgraph {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn local_id(&self, global: NodeId) -> Option<usize> {
        self.node_map.binary_search(&global).ok()
    }

    /// Global ids of the target pair.
    pub fn global_target(&self) -> (NodeId, NodeId) {
        (self.node_map[self.target.0], self.node_map[self.target.1])
    }
}

/// `1 + min(d_x, d_y) + (d/2)·((d/2) + (d%2) − 1)` with `d = d_x + d_y`.
/// Both distances must be at least 1.
pub fn drnl_hash(dx: u32, dy: u32) -> u64 {
    debug_assert!(dx >= 1 && dy >= 1);
    let (dx, dy) = (dx as u64, dy as u64);
    let d = dx + dy;
    let half = d / 2;
    1 + dx.min(dy) + half * (half + d % 2 - 1)
}

/// Labels of every node of `sub.graph`; distances to one target are taken
/// with the other target removed.
pub fn drnl_label(sub: &EnclosingSubgraph) -> Vec<u32> {
    label_nodes(&sub.graph, sub.target.0, sub.target.1)
}

fn label_nodes(g: &Graph, tx: usize, ty: usize) -> Vec<u32> {
    let dx = bfs_bounded(g, tx, Some(ty), u32::MAX);
    let dy = bfs_bounded(g, ty, Some(tx), u32::MAX);
    (0..g.node_count())
        .map(|i| {
            if i == tx || i == ty {
                return 1;
            }
            match (dx[i], dy[i]) {
                (Some(a), Some(b)) => u32::try_from(drnl_hash(a, b)).unwrap_or(u32::MAX),
                _ => 0,
            }
        })
        .collect()
}

pub fn extract_enclosing(g: &Graph, x: NodeId, y: NodeId, h: u32) -> Result<EnclosingSubgraph> {
    extract_enclosing_with(g, x, y, h, &ExtractOptions::default())
}

pub fn extract_enclosing_with(
    g: &Graph,
    x: NodeId,
    y: NodeId,
    h: u32,
    opts: &ExtractOptions,
) -> Result<EnclosingSubgraph> {
    g.check_node(x)?;
    g.check_node(y)?;
    if x == y {
        return Err(Error::InvalidParameter(format!("target pair ({x},{y}) repeats a node")));
    }
    if h == 0 {
        return Err(Error::InvalidParameter("hop count must be at least 1".into()));
    }
    let ball_x = bfs_bounded(g, x, None, h);
    let ball_y = bfs_bounded(g, y, None, h);
    let nodes: Vec<NodeId> = (0..g.node_count())
        .filter(|&i| ball_x[i].is_some() || ball_y[i].is_some())
        .collect();
    if let Some(cap) = opts.max_nodes {
        if nodes.len() > cap {
            return Err(Error::Capacity(format!(
                "enclosing subgraph of ({x},{y}) has {} nodes, cap is {cap}",
                nodes.len()
            )));
        }
    }
    let induced = induce_subgraph(g, &nodes)?;
    let tx = induced.new_id(x).expect("x lies in its own ball");
    let ty = induced.new_id(y).expect("y lies in its own ball");
    let had_edge = g.has_edge(x, y) && opts.remove_target_edge;
    let graph = if had_edge {
        induced.graph.without_edges(&[(tx, ty)])
    } else {
        induced.graph
    };
    let labels = label_nodes(&graph, tx, ty);
    let source_degrees = induced.old_ids.iter().map(|&u| g.degree(u)).collect();
    Ok(EnclosingSubgraph {
        graph,
        node_map: induced.old_ids,
        target: (tx, ty),
        hop: h,
        labels,
        had_target_edge: had_edge,
        source_degrees,
    })
}

/// Rows follow local node order; columns are the one-hot label block, then
/// the embedding block, then the attribute block.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeInfoMatrix {
    pub matrix: DenseMatrix,
    pub label_width: usize,
    pub embedding_width: usize,
    pub attribute_width: usize,
}

/// One-hot of `min(label, label_cap)` over `label_cap + 1` columns, followed
/// by the optional per-node embedding and attribute vectors.
pub fn build_node_info(
    sub: &EnclosingSubgraph,
    label_cap: u32,
    embeddings: Option<&EmbeddingTable>,
    attributes: Option<&[Vec<f64>]>,
) -> Result<NodeInfoMatrix> {
    let label_width = label_cap as usize + 1;
    let embedding_width = embeddings.map_or(0, EmbeddingTable::dim);
    let attribute_width = match attributes {
        Some(rows) => {
            let w = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != w) {
                return Err(Error::Shape("node attribute vectors differ in length".into()));
            }
            w
        }
        None => 0,
    };
    let width = label_width + embedding_width + attribute_width;
    let mut m = DenseMatrix::zeros(sub.node_count(), width);
    for (local, &global) in sub.node_map.iter().enumerate() {
        let row = m.row_mut(local);
        row[sub.labels[local].min(label_cap) as usize] = 1.0;
        if let Some(t) = embeddings {
            if global >= t.node_count() {
                return Err(Error::Shape(format!("no embedding row for node {global}")));
            }
            row[label_width..label_width + embedding_width].copy_from_slice(t.row(global));
        }
        if let Some(rows) = attributes {
            let attr = rows
                .get(global)
                .ok_or_else(|| Error::Shape(format!("no attribute row for node {global}")))?;
            row[label_width + embedding_width..].copy_from_slice(attr);
        }
    }
    Ok(NodeInfoMatrix {
        matrix: m,
        label_width,
        embedding_width,
        attribute_width,
    })
}
