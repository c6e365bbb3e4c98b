//! Katz index: damped count of all walks between two nodes.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::HeuristicConfig;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Graphs up to this size are solved with a dense LU factorization.
pub const DENSE_KATZ_MAX_NODES: usize = 2000;

fn check_damping(g: &Graph, beta: f64) -> Result<()> {
    let d = g.max_degree();
    if beta * d as f64 >= 1.0 {
        return Err(Error::Divergent(format!(
            "katz series needs beta * max_degree < 1 (beta={beta}, max_degree={d})"
        )));
    }
    Ok(())
}

fn dense_system(g: &Graph, beta: f64) -> DMatrix<f64> {
    let n = g.node_count();
    let mut m = DMatrix::<f64>::identity(n, n);
    for (u, v) in g.edges() {
        m[(u, v)] = -beta;
        m[(v, u)] = -beta;
    }
    m
}

fn series_column(g: &Graph, cfg: &HeuristicConfig, x: NodeId) -> Result<Vec<f64>> {
    let n = g.node_count();
    let mut term = vec![0.0; n];
    term[x] = 1.0;
    let mut sum = vec![0.0; n];
    let mut next = vec![0.0; n];
    for it in 1..=cfg.max_iter {
        for (i, slot) in next.iter_mut().enumerate() {
            *slot = cfg.katz_beta * g.neighbors(i).iter().map(|&j| term[j]).sum::<f64>();
        }
        let mass: f64 = next.iter().sum();
        for (s, t) in sum.iter_mut().zip(&next) {
            *s += t;
        }
        std::mem::swap(&mut term, &mut next);
        if mass < cfg.convergence_tol {
            log::debug!("katz series for node {x} converged after {it} terms");
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        method: "katz series",
        iterations: cfg.max_iter,
        residual: term.iter().sum(),
    })
}

/// `[(I - βA)^{-1} - I]_{x,y}`, the converged sum `Σ_l β^l [A^l]_{x,y}`.
pub fn katz_exact(g: &Graph, cfg: &HeuristicConfig, x: NodeId, y: NodeId) -> Result<f64> {
    g.check_node(x)?;
    g.check_node(y)?;
    check_damping(g, cfg.katz_beta)?;
    let delta = if x == y { 1.0 } else { 0.0 };
    if g.node_count() <= DENSE_KATZ_MAX_NODES {
        let mut rhs = nalgebra::DVector::<f64>::zeros(g.node_count());
        rhs[x] = 1.0;
        let system = dense_system(g, cfg.katz_beta);
        let lu = system.clone().lu();
        let singular = || Error::Data("singular Katz system".into());
        let mut z = lu.solve(&rhs).ok_or_else(singular)?;
        // two rounds of iterative refinement
        for _ in 0..2 {
            let residual = &rhs - &system * &z;
            z += lu.solve(&residual).ok_or_else(singular)?;
        }
        Ok(z[y] - delta)
    } else {
        Ok(series_column(g, cfg, x)?[y])
    }
}

/// Katz scores for many pairs: one dense inverse for small graphs,
/// otherwise one series column per distinct source node.
#[derive(Debug, Clone)]
pub struct KatzIndex {
    dense: Option<DMatrix<f64>>,
    columns: HashMap<NodeId, Vec<f64>>,
}

impl KatzIndex {
    pub fn new(g: &Graph, cfg: &HeuristicConfig, sources: &[NodeId]) -> Result<Self> {
        check_damping(g, cfg.katz_beta)?;
        for &s in sources {
            g.check_node(s)?;
        }
        if g.node_count() <= DENSE_KATZ_MAX_NODES {
            let inv = dense_system(g, cfg.katz_beta)
                .lu()
                .try_inverse()
                .ok_or_else(|| Error::Data("singular Katz system".into()))?;
            return Ok(Self {
                dense: Some(inv),
                columns: HashMap::new(),
            });
        }
        let mut distinct = sources.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let columns = distinct
            .par_iter()
            .map(|&s| series_column(g, cfg, s).map(|c| (s, c)))
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(Self {
            dense: None,
            columns,
        })
    }

    /// Panics if `x` was not among the sources of a sparse index.
    pub fn score(&self, x: NodeId, y: NodeId) -> f64 {
        let delta = if x == y { 1.0 } else { 0.0 };
        match &self.dense {
            Some(inv) => inv[(x, y)] - delta,
            None => self.columns[&x][y],
        }
    }
}
