//! SimRank by fixed-point iteration on the dense pairwise matrix.

use super::HeuristicConfig;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Largest graph accepted; the state is a dense `n × n` matrix.
pub const SIMRANK_MAX_NODES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimRankScore {
    pub value: f64,
    /// One of the two nodes has no neighbors, so the recursion is empty.
    pub isolated: bool,
}

#[derive(Debug, Clone)]
pub struct SimRankMatrix {
    n: usize,
    values: Vec<f64>,
    isolated: Vec<bool>,
    /// Max-entry change of each iteration, in order.
    pub deltas: Vec<f64>,
}

impl SimRankMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: NodeId, y: NodeId) -> f64 {
        self.values[x * self.n + y]
    }

    pub fn score(&self, x: NodeId, y: NodeId) -> SimRankScore {
        SimRankScore {
            value: self.get(x, y),
            isolated: x != y && (self.isolated[x] || self.isolated[y]),
        }
    }
}

/// Iterates `s(x,y) = γ · mean_{a∈Γ(x), b∈Γ(y)} s(a,b)` with `s(x,x) = 1`
/// from the identity until the largest entry change drops below
/// `cfg.convergence_tol`.
pub fn simrank(g: &Graph, cfg: &HeuristicConfig) -> Result<SimRankMatrix> {
    let n = g.node_count();
    if n > SIMRANK_MAX_NODES {
        return Err(Error::Capacity(format!(
            "simrank limited to {SIMRANK_MAX_NODES} nodes, graph has {n}"
        )));
    }
    let gamma = cfg.sr_gamma;
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        s[i * n + i] = 1.0;
    }
    let inv_deg: Vec<f64> = (0..n)
        .map(|i| match g.degree(i) {
            0 => 0.0,
            d => 1.0 / d as f64,
        })
        .collect();
    // t[a][y] = mean_{b∈Γ(y)} s[a][b]
    let mut t = vec![0.0; n * n];
    let mut next = vec![0.0; n * n];
    let mut deltas = Vec::new();
    for _ in 0..cfg.max_iter {
        for a in 0..n {
            let row = &s[a * n..(a + 1) * n];
            let out = &mut t[a * n..(a + 1) * n];
            for (y, slot) in out.iter_mut().enumerate() {
                *slot = g.neighbors(y).iter().map(|&b| row[b]).sum::<f64>() * inv_deg[y];
            }
        }
        let mut delta: f64 = 0.0;
        for x in 0..n {
            let out = &mut next[x * n..(x + 1) * n];
            out.fill(0.0);
            for &a in g.neighbors(x) {
                for (o, tv) in out.iter_mut().zip(&t[a * n..(a + 1) * n]) {
                    *o += tv;
                }
            }
            let scale = gamma * inv_deg[x];
            for (y, o) in out.iter_mut().enumerate() {
                *o = if y == x { 1.0 } else { *o * scale };
                delta = delta.max((*o - s[x * n + y]).abs());
            }
        }
        std::mem::swap(&mut s, &mut next);
        deltas.push(delta);
        if delta < cfg.convergence_tol {
            return Ok(SimRankMatrix {
                n,
                values: s,
                isolated: (0..n).map(|i| g.degree(i) == 0).collect(),
                deltas,
            });
        }
    }
    Err(Error::Convergence {
        method: "simrank",
        iterations: cfg.max_iter,
        residual: deltas.last().copied().unwrap_or(f64::INFINITY),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_synthetic, SyntheticModel};

    fn cfg() -> HeuristicConfig {
        HeuristicConfig {
            convergence_tol: 1e-12,
            ..Default::default()
        }
    }

    #[test]
    fn diagonal_is_one() {
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 15, p: 0.3 }, 4).unwrap();
        let s = simrank(&g, &cfg()).unwrap();
        for i in 0..15 {
            assert_eq!(s.get(i, i), 1.0);
        }
    }

    #[test]
    fn star_leaves_meet_at_hub() {
        // leaves 1 and 2 of hub 0: s = γ · s(0,0)
        let star = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let s = simrank(&star, &cfg()).unwrap();
        assert!((s.get(1, 2) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn different_components_score_zero() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let s = simrank(&g, &cfg()).unwrap();
        assert_eq!(s.get(0, 3), 0.0);
        assert_eq!(s.get(4, 2), 0.0);
    }

    #[test]
    fn isolated_nodes_are_flagged() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let s = simrank(&g, &cfg()).unwrap();
        let sc = s.score(0, 2);
        assert_eq!(sc.value, 0.0);
        assert!(sc.isolated);
        assert!(!s.score(0, 1).isolated);
    }

    #[test]
    fn symmetric_and_monotone_convergence() {
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 25, p: 0.2 }, 9).unwrap();
        let s = simrank(&g, &cfg()).unwrap();
        for x in 0..25 {
            for y in 0..25 {
                assert!((s.get(x, y) - s.get(y, x)).abs() < 1e-14);
            }
        }
        assert!(s.deltas.windows(2).all(|w| w[1] <= w[0]), "{:?}", s.deltas);
    }

    #[test]
    fn enforces_node_cap() {
        let g = Graph::empty(SIMRANK_MAX_NODES + 1);
        assert!(matches!(simrank(&g, &cfg()), Err(Error::Capacity(_))));
    }
}
