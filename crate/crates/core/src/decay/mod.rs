//! Truncated high-order heuristics and their approximation error.
//!
//! Katz, rooted PageRank and SimRank all have the form
//! `H(x, y) = η Σ_{l≥1} γ^l f(x, y, l)`. Summing the first `g(h) = a·h + b`
//! terms needs only walks that stay inside the `h`-hop enclosing subgraph,
//! and the dropped tail is at most `η (γλ)^{g(h)+1} / (1 − γλ)` whenever
//! `f(x, y, l) ≤ λ^l`.

mod kernels;

use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use kernels::{
    count_walks, damped_walk_series, first_meeting_prob, first_meeting_series, walk_count_series,
    walk_distribution, walk_prob, walk_prob_series, MAX_WALK_LENGTH,
};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::heuristics::{katz_exact, rooted_pagerank, simrank, HeuristicConfig, HeuristicKind};
use crate::subgraph::{extract_enclosing_with, ExtractOptions};

/// Largest graph accepted by [`verify_lemma1`].
pub const LEMMA1_MAX_NODES: usize = 12;
/// Walk length treated as exhaustive for SimRank reference values.
pub const SIMRANK_REFERENCE_LENGTH: usize = 200;
const SIMRANK_AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub gamma: f64,
    pub eta: f64,
    /// Growth bound of the kernel: `f(x, y, l) ≤ lambda^l`.
    pub lambda: f64,
    pub a: u32,
    pub b: u32,
}

impl DecayParams {
    /// Constants of `kind` on graph `g`. Katz grows with the maximum degree;
    /// the probability kernels are bounded by 1.
    pub fn for_kind(kind: HeuristicKind, g: &Graph, cfg: &HeuristicConfig) -> Result<Self> {
        Ok(match kind {
            HeuristicKind::Katz => Self {
                gamma: cfg.katz_beta,
                eta: 1.0,
                lambda: g.max_degree() as f64,
                a: 2,
                b: 1,
            },
            HeuristicKind::RootedPageRank => Self {
                gamma: cfg.pr_alpha,
                eta: 1.0 - cfg.pr_alpha,
                lambda: 1.0,
                a: 2,
                b: 1,
            },
            HeuristicKind::SimRank => Self {
                gamma: cfg.sr_gamma,
                eta: 1.0,
                lambda: 1.0,
                a: 1,
                b: 0,
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "{other} is not a gamma-decaying heuristic"
                )))
            }
        })
    }

    pub fn horizon(&self, h: u32) -> usize {
        (self.a * h + self.b) as usize
    }

    /// Tail bound after `horizon(h)` terms, `+∞` when `γλ ≥ 1`.
    pub fn bound(&self, h: u32) -> f64 {
        let r = self.gamma * self.lambda;
        if r >= 1.0 {
            return f64::INFINITY;
        }
        self.eta * r.powi(self.horizon(h) as i32 + 1) / (1.0 - r)
    }
}

/// `η Σ_{l=1}^{horizon} γ^l f(x, y, l)` evaluated on `g`, with walk
/// probabilities taken from `degrees`. Rooted PageRank gives the
/// one-directional `[π_x]_y`.
pub fn truncated_sum(
    kind: HeuristicKind,
    g: &Graph,
    degrees: &[usize],
    x: NodeId,
    y: NodeId,
    horizon: usize,
    cfg: &HeuristicConfig,
) -> Result<f64> {
    let p = DecayParams::for_kind(kind, g, cfg)?;
    g.check_node(x)?;
    g.check_node(y)?;
    if horizon == 0 {
        return Ok(0.0);
    }
    let terms = match kind {
        HeuristicKind::Katz => damped_walk_series(g, x, y, p.gamma, horizon),
        HeuristicKind::RootedPageRank => walk_prob_series(g, degrees, x, y, horizon)?,
        _ => first_meeting_series(g, degrees, x, y, horizon)?,
    };
    let mut sum = 0.0;
    let mut damp = 1.0;
    for t in terms {
        if kind == HeuristicKind::Katz {
            // γ^l is already folded into the series
            sum += t;
        } else {
            damp *= p.gamma;
            sum += damp * t;
        }
    }
    Ok(p.eta * sum)
}

/// Truncated heuristic of the target pair computed inside `sub` with the
/// horizon `g(h)` of `kind`.
pub fn truncated_heuristic(
    kind: HeuristicKind,
    sub: &crate::subgraph::EnclosingSubgraph,
    h: u32,
    cfg: &HeuristicConfig,
) -> Result<f64> {
    let p = DecayParams::for_kind(kind, &sub.graph, cfg)?;
    truncated_with_horizon(kind, sub, p.horizon(h), cfg)
}

pub fn truncated_with_horizon(
    kind: HeuristicKind,
    sub: &crate::subgraph::EnclosingSubgraph,
    horizon: usize,
    cfg: &HeuristicConfig,
) -> Result<f64> {
    let (tx, ty) = sub.target;
    truncated_sum(kind, &sub.graph, &sub.source_degrees, tx, ty, horizon, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub h: u32,
    pub approx: f64,
    pub exact: f64,
    pub abs_error: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub kind: HeuristicKind,
    pub pair: (NodeId, NodeId),
    pub params: DecayParams,
    pub rows: Vec<ErrorRow>,
}

impl ErrorCurve {
    pub fn within_bounds(&self) -> bool {
        self.rows.iter().all(|r| r.abs_error <= r.bound)
    }

    pub fn nonincreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].abs_error <= w[0].abs_error)
    }

    /// Least-squares slope of `ln(abs_error)` against `h` over rows whose
    /// error exceeds the rounding level of the exact value. `None` with
    /// fewer than two such rows.
    pub fn log_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.abs_error > f64::EPSILON * r.exact.abs().max(f64::MIN_POSITIVE))
            .map(|r| (r.h as f64, r.abs_error.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    /// Header `h,approx,exact,abs_error,bound`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "h,approx,exact,abs_error,bound")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:e},{:e},{:e},{:e}",
                r.h, r.approx, r.exact, r.abs_error, r.bound
            )?;
        }
        Ok(())
    }
}

fn exact_value(
    kind: HeuristicKind,
    g: &Graph,
    x: NodeId,
    y: NodeId,
    cfg: &HeuristicConfig,
) -> Result<f64> {
    match kind {
        HeuristicKind::Katz => katz_exact(g, cfg, x, y),
        HeuristicKind::RootedPageRank => Ok(rooted_pagerank(g, cfg, x)?[y]),
        HeuristicKind::SimRank => {
            let fixed = simrank(g, cfg)?.get(x, y);
            let walk = truncated_sum(kind, g, &g.degrees(), x, y, SIMRANK_REFERENCE_LENGTH, cfg)?;
            if (fixed - walk).abs() > SIMRANK_AGREEMENT_TOL {
                log::warn!(
                    "simrank fixed point {fixed} and {SIMRANK_REFERENCE_LENGTH}-step walk sum \
                     {walk} disagree for ({x},{y}); using the walk sum"
                );
                Ok(walk)
            } else {
                Ok(fixed)
            }
        }
        other => Err(Error::InvalidParameter(format!(
            "{other} is not a gamma-decaying heuristic"
        ))),
    }
}

/// Approximation error of the subgraph-truncated heuristic for each `h`.
/// Subgraphs keep the target edge, since the exact value is computed on
/// `g` as given.
pub fn error_curve(
    kind: HeuristicKind,
    g: &Graph,
    pair: (NodeId, NodeId),
    hops: RangeInclusive<u32>,
    cfg: &HeuristicConfig,
) -> Result<ErrorCurve> {
    cfg.validate()?;
    let (x, y) = pair;
    if x == y {
        return Err(Error::InvalidParameter(format!("pair ({x},{y}) repeats a node")));
    }
    let params = DecayParams::for_kind(kind, g, cfg)?;
    let exact = exact_value(kind, g, x, y, cfg)?;
    let opts = ExtractOptions {
        remove_target_edge: false,
        max_nodes: None,
    };
    let hops: Vec<u32> = hops.collect();
    if hops.contains(&0) {
        return Err(Error::InvalidParameter("hop counts start at 1".into()));
    }
    let rows = hops
        .par_iter()
        .map(|&h| {
            let sub = extract_enclosing_with(g, x, y, h, &opts)?;
            let approx = truncated_with_horizon(kind, &sub, params.horizon(h), cfg)?;
            Ok(ErrorRow {
                h,
                approx,
                exact,
                abs_error: (exact - approx).abs(),
                bound: params.bound(h),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorCurve {
        kind,
        pair,
        params,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma1Check {
    /// Walks from `x` to `y` of length `≤ 2h + 1` that were examined.
    pub walks_checked: usize,
    /// A walk that leaves the enclosing subgraph, if any.
    pub counterexample: Option<Vec<NodeId>>,
}

impl Lemma1Check {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Enumerates every walk from `x` to `y` of length at most `2h + 1` and
/// checks that it stays inside the `h`-hop enclosing subgraph.
pub fn verify_lemma1(g: &Graph, x: NodeId, y: NodeId, h: u32) -> Result<Lemma1Check> {
    let n = g.node_count();
    if n > LEMMA1_MAX_NODES {
        return Err(Error::Capacity(format!(
            "walk enumeration limited to {LEMMA1_MAX_NODES} nodes, graph has {n}"
        )));
    }
    let sub = extract_enclosing_with(g, x, y, h, &ExtractOptions::default())?;
    let mut inside = vec![false; n];
    for &u in &sub.node_map {
        inside[u] = true;
    }
    let max_len = 2 * h as usize + 1;
    let mut check = Lemma1Check {
        walks_checked: 0,
        counterexample: None,
    };
    let mut walk = vec![x];
    dfs(g, y, max_len, &inside, &mut walk, &mut check);
    Ok(check)
}

fn dfs(
    g: &Graph,
    y: NodeId,
    max_len: usize,
    inside: &[bool],
    walk: &mut Vec<NodeId>,
    check: &mut Lemma1Check,
) {
    if check.counterexample.is_some() {
        return;
    }
    let last = *walk.last().expect("walk starts at x");
    if walk.len() > 1 && last == y {
        check.walks_checked += 1;
        if walk.iter().any(|&u| !inside[u]) {
            check.counterexample = Some(walk.clone());
            return;
        }
    }
    if walk.len() > max_len {
        return;
    }
    for &v in g.neighbors(last) {
        walk.push(v);
        dfs(g, y, max_len, inside, walk, check);
        walk.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_synthetic, SyntheticModel};
    use crate::subgraph::extract_enclosing;

    fn cfg() -> HeuristicConfig {
        HeuristicConfig {
            katz_beta: 0.005,
            convergence_tol: 1e-12,
            ..Default::default()
        }
    }

    #[test]
    fn bound_formula() {
        let p = DecayParams {
            gamma: 0.1,
            eta: 2.0,
            lambda: 3.0,
            a: 2,
            b: 1,
        };
        assert_eq!(p.horizon(2), 5);
        let want = 2.0 * 0.3f64.powi(6) / 0.7;
        assert!((p.bound(2) - want).abs() < 1e-12 * want);
        let wide = DecayParams { lambda: 10.0, ..p };
        assert_eq!(wide.bound(1), f64::INFINITY);
    }

    #[test]
    fn whole_graph_katz_matches_dense_solve() {
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 20, p: 0.3 }, 6).unwrap();
        let opts = ExtractOptions {
            remove_target_edge: false,
            max_nodes: None,
        };
        let sub = extract_enclosing_with(&g, 2, 11, 25, &opts).unwrap();
        assert_eq!(sub.node_count(), 20);
        let approx = truncated_heuristic(HeuristicKind::Katz, &sub, 25, &cfg()).unwrap();
        let exact = katz_exact(&g, &cfg(), 2, 11).unwrap();
        assert!((approx - exact).abs() < 1e-8);
    }

    #[test]
    fn empty_window_is_zero() {
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 10, p: 0.4 }, 6).unwrap();
        let sub = extract_enclosing(&g, 0, 1, 1).unwrap();
        for kind in [HeuristicKind::Katz, HeuristicKind::RootedPageRank, HeuristicKind::SimRank] {
            assert_eq!(truncated_with_horizon(kind, &sub, 0, &cfg()).unwrap(), 0.0);
        }
        assert!(truncated_heuristic(HeuristicKind::AdamicAdar, &sub, 1, &cfg()).is_err());
    }

    #[test]
    fn pagerank_walk_sum_converges_to_power_iteration() {
        // the dropped tail is at most alpha^(L+1)
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 25, p: 0.2 }, 3).unwrap();
        let c = cfg();
        let pi = rooted_pagerank(&g, &c, 4).unwrap();
        for y in (0..25).filter(|&y| y != 4) {
            let deg = g.degrees();
            let short = truncated_sum(HeuristicKind::RootedPageRank, &g, &deg, 4, y, 50, &c).unwrap();
            let long = truncated_sum(HeuristicKind::RootedPageRank, &g, &deg, 4, y, 150, &c).unwrap();
            assert!(short <= pi[y] + 1e-12 && pi[y] - short <= 0.85f64.powi(51), "y={y}");
            assert!((long - pi[y]).abs() < 1e-9, "y={y}");
        }
    }

    #[test]
    fn simrank_walk_sum_converges_to_fixed_point() {
        // first-meeting probabilities sum to at most 1, so the tail is <= gamma^(L+1)
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 15, p: 0.4 }, 2).unwrap();
        let c = cfg();
        let s = simrank(&g, &c).unwrap();
        for (x, y) in [(0, 1), (3, 9), (5, 14)] {
            let deg = g.degrees();
            let short = truncated_sum(HeuristicKind::SimRank, &g, &deg, x, y, 25, &c).unwrap();
            let long = truncated_sum(HeuristicKind::SimRank, &g, &deg, x, y, 120, &c).unwrap();
            assert!(short <= s.get(x, y) + 1e-12 && s.get(x, y) - short <= 0.8f64.powi(26));
            assert!((long - s.get(x, y)).abs() < 1e-9);
        }
    }

    #[test]
    fn subgraph_truncation_equals_full_graph_truncation() {
        let g = gen_synthetic(SyntheticModel::BarabasiAlbert { n: 60, m: 2 }, 9).unwrap();
        let opts = ExtractOptions {
            remove_target_edge: false,
            max_nodes: None,
        };
        let c = cfg();
        for (x, y) in [(0, 1), (7, 40), (22, 59)] {
            for h in 1..=2 {
                let sub = extract_enclosing_with(&g, x, y, h, &opts).unwrap();
                for kind in [HeuristicKind::Katz, HeuristicKind::RootedPageRank, HeuristicKind::SimRank] {
                    let horizon = DecayParams::for_kind(kind, &g, &c).unwrap().horizon(h);
                    let local = truncated_with_horizon(kind, &sub, horizon, &c).unwrap();
                    let full = truncated_sum(kind, &g, &g.degrees(), x, y, horizon, &c).unwrap();
                    assert!((local - full).abs() <= 1e-15 * full.abs().max(1e-300), "{kind} h={h}");
                }
            }
        }
    }

    #[test]
    fn katz_error_curve_decays_within_bound() {
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 60, p: 0.1 }, 1).unwrap();
        let curve = error_curve(HeuristicKind::Katz, &g, (3, 41), 1..=5, &cfg()).unwrap();
        assert_eq!(curve.rows.len(), 5);
        assert!(curve.within_bounds(), "{:?}", curve.rows);
        assert!(curve.nonincreasing(), "{:?}", curve.rows);
        assert!(curve.log_slope().unwrap() < 0.0);
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("h,approx,exact,abs_error,bound\n1,"));
    }

    #[test]
    fn probability_curves_within_bound() {
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 30, p: 0.15 }, 5).unwrap();
        for kind in [HeuristicKind::RootedPageRank, HeuristicKind::SimRank] {
            let curve = error_curve(kind, &g, (0, 7), 1..=4, &cfg()).unwrap();
            assert!(curve.within_bounds(), "{kind}: {:?}", curve.rows);
        }
    }

    #[test]
    fn lemma1_examples() {
        let p4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(verify_lemma1(&p4, 1, 2, 1).unwrap().holds());
        for seed in 0..20 {
            let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 12, p: 0.3 }, seed).unwrap();
            for h in 1..=2 {
                assert!(verify_lemma1(&g, 0, 5, h).unwrap().holds());
            }
        }
        assert!(verify_lemma1(&Graph::empty(13), 0, 1, 1).is_err());
    }

    #[test]
    fn lemma1_counts_walks() {
        // K3 walks 0 -> 1 of length <= 3: 1, 0-2-1, and three of length 3
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(verify_lemma1(&k3, 0, 1, 1).unwrap().walks_checked, 5);
    }
}
