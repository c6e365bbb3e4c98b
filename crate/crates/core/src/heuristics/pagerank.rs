//! Rooted PageRank by power iteration.
//!
//! The walker moves to a uniform neighbor with probability `alpha` and
//! jumps back to the root otherwise. A walker stuck on a node without
//! neighbors returns to the root with probability one.

use super::{check_pair, HeuristicConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Stationary distribution `π_x` of the walk restarted at `x`, solved to an
/// L1 residual below `cfg.convergence_tol`.
pub fn rooted_pagerank(g: &Graph, cfg: &HeuristicConfig, x: NodeId) -> Result<Vec<f64>> {
    g.check_node(x)?;
    if g.edge_count() == 0 {
        return Err(Error::InvalidParameter(
            "rooted PageRank needs a graph with at least one edge".into(),
        ));
    }
    let n = g.node_count();
    let alpha = cfg.pr_alpha;
    let mut pi = vec![0.0; n];
    pi[x] = 1.0;
    if alpha == 0.0 {
        return Ok(pi);
    }
    let inv_deg: Vec<f64> = (0..n)
        .map(|i| match g.degree(i) {
            0 => 0.0,
            d => 1.0 / d as f64,
        })
        .collect();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        let mut dangling = 0.0;
        for (i, slot) in next.iter_mut().enumerate() {
            if g.degree(i) == 0 {
                dangling += pi[i];
            }
            *slot = alpha * g.neighbors(i).iter().map(|&j| pi[j] * inv_deg[j]).sum::<f64>();
        }
        next[x] += alpha * dangling + (1.0 - alpha);
        residual = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if residual < cfg.convergence_tol {
            return Ok(pi);
        }
    }
    Err(Error::Convergence {
        method: "rooted pagerank",
        iterations: cfg.max_iter,
        residual,
    })
}

/// Symmetric link score `[π_x]_y + [π_y]_x`.
pub fn pagerank_score(g: &Graph, cfg: &HeuristicConfig, x: NodeId, y: NodeId) -> Result<f64> {
    check_pair(g, x, y)?;
    Ok(rooted_pagerank(g, cfg, x)?[y] + rooted_pagerank(g, cfg, y)?[x])
}
