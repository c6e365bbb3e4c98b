//! The eight classic link-prediction heuristics and a logistic-regression
//! ensemble over them.
//!
//! First-order (CN, Jaccard, PA) and second-order (AA, RA) scores are exact
//! set computations on sorted neighbor lists. The high-order scores (Katz,
//! rooted PageRank, SimRank) are solved to convergence; see the submodules.

mod ensemble;
mod katz;
mod pagerank;
mod simrank;
mod table;

use serde::{Deserialize, Serialize};

pub use ensemble::{ensemble_fit_predict, LogisticEnsemble, LogisticOptions};
pub use katz::{katz_exact, KatzIndex, DENSE_KATZ_MAX_NODES};
pub use pagerank::{pagerank_score, rooted_pagerank};
pub use simrank::{simrank, SimRankMatrix, SimRankScore, SIMRANK_MAX_NODES};
pub use table::{score_pairs, ScoreRow, ScoreTable};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeuristicKind {
    #[serde(rename = "cn")]
    CommonNeighbors,
    Jaccard,
    #[serde(rename = "pa")]
    PreferentialAttachment,
    #[serde(rename = "aa")]
    AdamicAdar,
    #[serde(rename = "ra")]
    ResourceAllocation,
    Katz,
    #[serde(rename = "pr")]
    RootedPageRank,
    #[serde(rename = "sr")]
    SimRank,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 8] = [
        HeuristicKind::CommonNeighbors,
        HeuristicKind::Jaccard,
        HeuristicKind::PreferentialAttachment,
        HeuristicKind::AdamicAdar,
        HeuristicKind::ResourceAllocation,
        HeuristicKind::Katz,
        HeuristicKind::RootedPageRank,
        HeuristicKind::SimRank,
    ];

    /// Short column name used in CSV headers and method lists.
    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::CommonNeighbors => "cn",
            HeuristicKind::Jaccard => "jaccard",
            HeuristicKind::PreferentialAttachment => "pa",
            HeuristicKind::AdamicAdar => "aa",
            HeuristicKind::ResourceAllocation => "ra",
            HeuristicKind::Katz => "katz",
            HeuristicKind::RootedPageRank => "pr",
            HeuristicKind::SimRank => "sr",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Computable from the 2-hop neighborhood of the pair.
    pub fn is_local(self) -> bool {
        !matches!(
            self,
            HeuristicKind::Katz | HeuristicKind::RootedPageRank | HeuristicKind::SimRank
        )
    }
}

impl std::fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Constants of the high-order heuristics and their solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeuristicConfig {
    pub katz_beta: f64,
    pub pr_alpha: f64,
    pub sr_gamma: f64,
    pub convergence_tol: f64,
    pub max_iter: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            katz_beta: 0.001,
            pr_alpha: 0.85,
            sr_gamma: 0.8,
            convergence_tol: 1e-9,
            max_iter: 10_000,
        }
    }
}

impl HeuristicConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name}={v} must lie in (0, 1)")))
            }
        };
        open_unit("katz_beta", self.katz_beta)?;
        // alpha = 0 is allowed: the walker never leaves the root
        if !(0.0..1.0).contains(&self.pr_alpha) {
            return Err(Error::InvalidParameter(format!(
                "pr_alpha={} must lie in [0, 1)",
                self.pr_alpha
            )));
        }
        open_unit("sr_gamma", self.sr_gamma)?;
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 || self.max_iter == 0 {
            return Err(Error::InvalidParameter(
                "convergence_tol and max_iter must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn check_pair(g: &Graph, x: NodeId, y: NodeId) -> Result<()> {
    g.check_node(x)?;
    g.check_node(y)?;
    if x == y {
        return Err(Error::InvalidParameter(format!(
            "heuristic pair needs two distinct nodes, got ({x}, {x})"
        )));
    }
    Ok(())
}

/// Visits the common neighbors of two nodes by merging sorted lists.
fn for_each_common(a: &[NodeId], b: &[NodeId], mut f: impl FnMut(NodeId)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                f(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// First- and second-order heuristic score of `(x, y)`.
///
/// Adamic-Adar skips common neighbors of degree ≤ 1, whose `1 / ln(deg)` is
/// undefined; such nodes only occur in induced subgraphs.
pub fn local_score(kind: HeuristicKind, g: &Graph, x: NodeId, y: NodeId) -> Result<f64> {
    check_pair(g, x, y)?;
    let (nx, ny) = (g.neighbors(x), g.neighbors(y));
    let score = match kind {
        HeuristicKind::CommonNeighbors => {
            let mut c = 0usize;
            for_each_common(nx, ny, |_| c += 1);
            c as f64
        }
        HeuristicKind::Jaccard => {
            let mut c = 0usize;
            for_each_common(nx, ny, |_| c += 1);
            let union = nx.len() + ny.len() - c;
            if union == 0 {
                0.0
            } else {
                c as f64 / union as f64
            }
        }
        HeuristicKind::PreferentialAttachment => (nx.len() * ny.len()) as f64,
        HeuristicKind::AdamicAdar => {
            let mut s = 0.0;
            for_each_common(nx, ny, |z| {
                let d = g.degree(z);
                if d > 1 {
                    s += 1.0 / (d as f64).ln();
                }
            });
            s
        }
        HeuristicKind::ResourceAllocation => {
            let mut s = 0.0;
            for_each_common(nx, ny, |z| s += 1.0 / g.degree(z) as f64);
            s
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "{other} is not a local heuristic"
            )))
        }
    };
    Ok(score)
}

#[cfg(test)]
mod tests {
    use super::*;

    // x=0, y=1, a=2, b=3, c=4, d=5
    fn jaccard_fixture() -> Graph {
        Graph::from_edges(6, [(0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (1, 5)]).unwrap()
    }

    #[test]
    fn common_neighbors_counts_shared_nodes() {
        let g = jaccard_fixture();
        assert_eq!(local_score(HeuristicKind::CommonNeighbors, &g, 0, 1).unwrap(), 2.0);
    }

    #[test]
    fn jaccard_matches_hand_set_arithmetic() {
        let g = jaccard_fixture();
        // {b,c} / {a,b,c,d}
        assert_eq!(local_score(HeuristicKind::Jaccard, &g, 0, 1).unwrap(), 0.5);
        let lonely = Graph::from_edges(3, [(1, 2)]).unwrap();
        let isolated = Graph::empty(2);
        assert_eq!(local_score(HeuristicKind::Jaccard, &isolated, 0, 1).unwrap(), 0.0);
        assert_eq!(local_score(HeuristicKind::Jaccard, &lonely, 0, 1).unwrap(), 0.0);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn adamic_adar_single_degree_two_neighbor() {
        let g = Graph::from_edges(3, [(0, 2), (1, 2)]).unwrap();
        let aa = local_score(HeuristicKind::AdamicAdar, &g, 0, 1).unwrap();
        assert!((aa - 1.0 / 2f64.ln()).abs() < 1e-12);
        assert!((aa - 1.4427).abs() < 1e-4);
        let ra = local_score(HeuristicKind::ResourceAllocation, &g, 0, 1).unwrap();
        assert_eq!(ra, 0.5);
    }

    #[test]
    fn preferential_attachment_is_degree_product() {
        // deg(0) = 3, deg(1) = 4
        let g = Graph::from_edges(
            9,
            [(0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7), (1, 8)],
        )
        .unwrap();
        assert_eq!(local_score(HeuristicKind::PreferentialAttachment, &g, 0, 1).unwrap(), 12.0);
    }

    #[test]
    fn local_score_errors() {
        let g = jaccard_fixture();
        assert!(local_score(HeuristicKind::CommonNeighbors, &g, 1, 1).is_err());
        assert!(local_score(HeuristicKind::CommonNeighbors, &g, 0, 60).is_err());
        assert!(local_score(HeuristicKind::Katz, &g, 0, 1).is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in HeuristicKind::ALL {
            assert_eq!(HeuristicKind::from_name(k.name()), Some(k));
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.name()));
        }
    }

    #[test]
    fn default_constants() {
        let c = HeuristicConfig::default();
        assert_eq!((c.katz_beta, c.pr_alpha, c.sr_gamma), (0.001, 0.85, 0.8));
        c.validate().unwrap();
    }
}
