use std::collections::HashSet;

use linkpred_core::decay::{count_walks, verify_lemma1};
use linkpred_core::graph::bfs_distances;
use linkpred_core::heuristics::{katz_exact, local_score, HeuristicConfig, HeuristicKind};
use linkpred_core::pipeline::{split_links, SplitSpec};
use linkpred_core::subgraph::{drnl_hash, extract_enclosing, extract_enclosing_with, ExtractOptions};
use linkpred_core::Graph;
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=n * 3).prop_map(move |pairs| {
            let edges: Vec<_> = pairs.into_iter().filter(|(u, v)| u != v).collect();
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

fn graph_and_pair(max_n: usize) -> impl Strategy<Value = (Graph, usize, usize)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), 0..n, 0..n).prop_filter("distinct pair", |(_, x, y)| x != y)
    })
}

const KEEP: ExtractOptions = ExtractOptions {
    remove_target_edge: false,
    max_nodes: None,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_order_heuristics_live_in_one_hop((g, x, y) in graph_and_pair(25)) {
        let sub = extract_enclosing_with(&g, x, y, 1, &KEEP).unwrap();
        let (a, b) = sub.target;
        for k in [HeuristicKind::CommonNeighbors, HeuristicKind::Jaccard, HeuristicKind::PreferentialAttachment] {
            prop_assert_eq!(local_score(k, &g, x, y).unwrap(), local_score(k, &sub.graph, a, b).unwrap());
        }
    }

    #[test]
    fn second_order_heuristics_live_in_two_hops((g, x, y) in graph_and_pair(25)) {
        let sub = extract_enclosing_with(&g, x, y, 2, &KEEP).unwrap();
        let (a, b) = sub.target;
        for k in [HeuristicKind::AdamicAdar, HeuristicKind::ResourceAllocation] {
            prop_assert_eq!(local_score(k, &g, x, y).unwrap(), local_score(k, &sub.graph, a, b).unwrap());
        }
    }

    #[test]
    fn short_walks_stay_in_the_subgraph((g, x, y) in graph_and_pair(9), h in 1u32..=2) {
        prop_assert!(verify_lemma1(&g, x, y, h).unwrap().holds());
    }

    #[test]
    fn walk_counts_grow_at_most_like_max_degree(g in graph(10)) {
        let d = g.max_degree() as u128;
        for l in 1..=6u32 {
            for i in 0..g.node_count() {
                for j in 0..g.node_count() {
                    prop_assert!(count_walks(&g, i, j, l as usize).unwrap() <= d.pow(l));
                }
            }
        }
    }

    #[test]
    fn katz_is_the_damped_walk_sum((g, x, y) in graph_and_pair(15)) {
        let d = g.max_degree().max(1) as f64;
        let cfg = HeuristicConfig { katz_beta: 0.5 / d, ..HeuristicConfig::default() };
        let mut sum = 0.0;
        let mut b = 1.0;
        for l in 1..=30 {
            b *= cfg.katz_beta;
            sum += b * count_walks(&g, x, y, l).unwrap() as f64;
        }
        let exact = katz_exact(&g, &cfg, x, y).unwrap();
        prop_assert!((exact - sum).abs() <= 1e-8 * exact.max(1.0), "{} vs {}", exact, sum);
    }

    #[test]
    fn labels_follow_the_distance_hash((g, x, y) in graph_and_pair(20), h in 1u32..=3) {
        let sub = extract_enclosing(&g, x, y, h).unwrap();
        let (a, b) = sub.target;
        let dx = bfs_distances(&sub.graph, a, Some(b)).unwrap();
        let dy = bfs_distances(&sub.graph, b, Some(a)).unwrap();
        for i in 0..sub.node_count() {
            let want = if i == a || i == b {
                1
            } else {
                match (dx.get(i), dy.get(i)) {
                    (Some(p), Some(q)) => drnl_hash(p, q) as u32,
                    _ => 0,
                }
            };
            prop_assert_eq!(sub.labels[i], want);
        }
    }

    #[test]
    fn labels_ignore_node_numbering((g, x, y) in graph_and_pair(20), shift in 1usize..19) {
        let n = g.node_count();
        let p = |u: usize| (u + shift) % n;
        let moved = Graph::from_edges(n, g.edges().map(|(u, v)| (p(u), p(v)))).unwrap();
        let a = extract_enclosing(&g, x, y, 2).unwrap();
        let b = extract_enclosing(&moved, p(x), p(y), 2).unwrap();
        for (local, &global) in a.node_map.iter().enumerate() {
            let other = b.local_id(p(global)).unwrap();
            prop_assert_eq!(a.labels[local], b.labels[other]);
        }
    }
}

#[test]
fn split_never_leaks_held_out_links() {
    let g = linkpred_core::graph::gen_synthetic(
        linkpred_core::graph::SyntheticModel::BarabasiAlbert { n: 200, m: 3 },
        4,
    )
    .unwrap();
    let spec = SplitSpec::default();
    for trial in 0..3 {
        let s = split_links(&g, &spec, trial).unwrap();
        s.check(&g).unwrap();
        for (u, v) in s.test.positives() {
            assert!(g.has_edge(u, v) && !s.train_graph.has_edge(u, v));
        }
        for (u, v) in s.train.positives().into_iter().chain(s.validation.positives()) {
            assert!(s.train_graph.has_edge(u, v));
        }
        let mut seen = HashSet::new();
        for set in [&s.train, &s.validation, &s.test] {
            for &pair in &set.pairs {
                assert!(seen.insert(pair), "{pair:?} appears twice");
            }
            for (u, v) in set.negatives() {
                assert!(!g.has_edge(u, v));
            }
        }
        assert_eq!(s.train_graph.edge_count() + s.test.positives().len(), g.edge_count());
    }
}
