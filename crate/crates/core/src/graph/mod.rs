//! Immutable undirected graphs in compressed adjacency form.
//!
//! Every other module reads graphs through [`Graph`]; mutation always
//! produces a new value. Node ids are dense `0..n`; external labels are
//! translated by [`NodeIdMap`].

mod generate;
mod io;

use std::collections::{HashMap, VecDeque};

pub use generate::{gen_synthetic, SyntheticModel};
pub use io::{load_edge_list, parse_edge_list, save_edge_list, write_edge_list, EdgeListLoad};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Undirected simple graph with sorted neighbor lists.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("node_count", &self.node_count())
            .field("edge_count", &self.edge_count())
            .finish()
    }
}

impl Graph {
    /// Builds a graph on `node_count` nodes. Duplicate and reversed
    /// duplicate edges collapse; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
        for (u, v) in edges {
            for id in [u, v] {
                if id >= node_count {
                    return Err(Error::InvalidNode { id, node_count });
                }
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop on node {u}")));
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; node_count + 1];
        for &(u, _) in &pairs {
            offsets[u + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = pairs.into_iter().map(|(_, v)| v).collect();
        Ok(Self { offsets, neighbors })
    }

    /// Graph with `node_count` nodes and no edges.
    pub fn empty(node_count: usize) -> Self {
        Self {
            offsets: vec![0; node_count + 1],
            neighbors: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|i| self.degree(i)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|i| self.degree(i))
            .max()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && v < self.node_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn check_node(&self, id: NodeId) -> Result<()> {
        if id < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                id,
                node_count: self.node_count(),
            })
        }
    }

    /// A copy with the listed edges added. Edges already present are an error.
    pub fn with_added_edges(&self, extra: &[(NodeId, NodeId)]) -> Result<Self> {
        for &(u, v) in extra {
            self.check_node(u)?;
            self.check_node(v)?;
            if self.has_edge(u, v) {
                return Err(Error::Data(format!("edge ({u}, {v}) already present")));
            }
        }
        Graph::from_edges(self.node_count(), self.edges().chain(extra.iter().copied()))
    }

    /// A copy with the listed edges removed. Missing edges are ignored.
    pub fn without_edges(&self, removed: &[(NodeId, NodeId)]) -> Self {
        let drop: std::collections::HashSet<(NodeId, NodeId)> = removed
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        Graph::from_edges(
            self.node_count(),
            self.edges().filter(|e| !drop.contains(e)),
        )
        .expect("edges of a valid graph")
    }

    /// Verifies symmetry, sortedness and the absence of self-loops.
    pub fn check_invariants(&self) -> Result<()> {
        for u in 0..self.node_count() {
            let nbrs = self.neighbors(u);
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Data(format!("neighbors of {u} not strictly sorted")));
            }
            for &v in nbrs {
                if v == u {
                    return Err(Error::Data(format!("self-loop on {u}")));
                }
                if !self.has_edge(v, u) {
                    return Err(Error::Data(format!("edge ({u}, {v}) is not symmetric")));
                }
            }
        }
        Ok(())
    }
}

/// Bijection between external string labels and dense internal ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeIdMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeIdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Labels `"0"`, `"1"`, … mapped to themselves.
    pub fn identity(node_count: usize) -> Self {
        let mut map = Self::new();
        for i in 0..node_count {
            map.get_or_insert(&i.to_string());
        }
        map
    }

    pub fn get_or_insert(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// True when every label is the decimal rendering of its id.
    pub fn is_identity(&self) -> bool {
        self.labels
            .iter()
            .enumerate()
            .all(|(i, l)| l.parse::<usize>() == Ok(i))
    }
}

/// Single-source hop distances; `None` marks unreachable nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    pub source: NodeId,
    pub distances: Vec<Option<u32>>,
}

impl DistanceMap {
    pub fn get(&self, node: NodeId) -> Option<u32> {
        self.distances[node]
    }
}

/// Breadth-first distances from `source`, treating `excluded` (if any) as
/// deleted along with its incident edges.
pub fn bfs_distances(g: &Graph, source: NodeId, excluded: Option<NodeId>) -> Result<DistanceMap> {
    g.check_node(source)?;
    if let Some(ex) = excluded {
        g.check_node(ex)?;
        if ex == source {
            return Err(Error::InvalidParameter(
                "excluded node must differ from the BFS source".into(),
            ));
        }
    }
    Ok(DistanceMap {
        source,
        distances: bfs_bounded(g, source, excluded, u32::MAX),
    })
}

/// BFS that stops expanding past `max_depth`.
pub(crate) fn bfs_bounded(
    g: &Graph,
    source: NodeId,
    excluded: Option<NodeId>,
    max_depth: u32,
) -> Vec<Option<u32>> {
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued nodes have a distance");
        if du >= max_depth {
            continue;
        }
        for &v in g.neighbors(u) {
            if Some(v) == excluded || dist[v].is_some() {
                continue;
            }
            dist[v] = Some(du + 1);
            queue.push_back(v);
        }
    }
    dist
}

/// Result of [`induce_subgraph`]: the new graph plus the id translation.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `old_ids[new] = old`, ascending.
    pub old_ids: Vec<NodeId>,
}

impl InducedSubgraph {
    pub fn new_id(&self, old: NodeId) -> Option<NodeId> {
        self.old_ids.binary_search(&old).ok()
    }
}

/// Subgraph induced by `nodes`; new ids follow ascending old id order.
pub fn induce_subgraph(g: &Graph, nodes: &[NodeId]) -> Result<InducedSubgraph> {
    if nodes.is_empty() {
        return Err(Error::Empty("induce_subgraph node set".into()));
    }
    let mut old_ids = nodes.to_vec();
    old_ids.sort_unstable();
    old_ids.dedup();
    for &id in &old_ids {
        g.check_node(id)?;
    }
    let mut local = vec![usize::MAX; g.node_count()];
    for (new, &old) in old_ids.iter().enumerate() {
        local[old] = new;
    }
    let mut offsets = Vec::with_capacity(old_ids.len() + 1);
    let mut neighbors = Vec::new();
    offsets.push(0);
    for &old in &old_ids {
        // old ids ascend with new ids, so the filtered list stays sorted
        neighbors.extend(
            g.neighbors(old)
                .iter()
                .filter_map(|&v| (local[v] != usize::MAX).then_some(local[v])),
        );
        offsets.push(neighbors.len());
    }
    Ok(InducedSubgraph {
        graph: Graph { offsets, neighbors },
        old_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn from_edges_collapses_duplicates() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(Error::InvalidNode { id: 2, .. })
        ));
        assert!(Graph::from_edges(2, [(1, 1)]).is_err());
    }

    #[test]
    fn bfs_examples() {
        let g = path(3);
        let d = bfs_distances(&g, 0, None).unwrap();
        assert_eq!(d.distances, vec![Some(0), Some(1), Some(2)]);
        let d = bfs_distances(&g, 0, Some(1)).unwrap();
        assert_eq!(d.distances, vec![Some(0), None, None]);

        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = bfs_distances(&tri, 0, Some(2)).unwrap();
        assert_eq!(d.distances, vec![Some(0), Some(1), None]);

        assert!(bfs_distances(&g, 5, None).is_err());
        assert!(bfs_distances(&g, 0, Some(0)).is_err());
    }

    #[test]
    fn induce_examples() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let sub = induce_subgraph(&tri, &[0, 1]).unwrap();
        assert_eq!((sub.graph.node_count(), sub.graph.edge_count()), (2, 1));

        let all = induce_subgraph(&tri, &[2, 0, 1]).unwrap();
        assert_eq!(all.graph, tri);
        assert_eq!(all.old_ids, vec![0, 1, 2]);

        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let leaves = induce_subgraph(&star, &[1, 2, 3]).unwrap();
        assert_eq!((leaves.graph.node_count(), leaves.graph.edge_count()), (3, 0));
        assert_eq!(leaves.new_id(3), Some(2));
        assert_eq!(leaves.new_id(0), None);

        assert!(induce_subgraph(&tri, &[]).is_err());
        assert!(induce_subgraph(&tri, &[7]).is_err());
    }

    #[test]
    fn node_id_map_is_bijective() {
        let mut m = NodeIdMap::new();
        assert_eq!(m.get_or_insert("a"), 0);
        assert_eq!(m.get_or_insert("b"), 1);
        assert_eq!(m.get_or_insert("a"), 0);
        assert_eq!(m.label(1), Some("b"));
        assert_eq!(m.id("b"), Some(1));
        assert!(!m.is_identity());
        assert!(NodeIdMap::identity(4).is_identity());
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..(n * n))
                .prop_map(move |es| {
                    Graph::from_edges(n, es.into_iter().filter(|(u, v)| u != v)).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn constructed_graphs_hold_invariants(g in arb_graph(12)) {
            g.check_invariants().unwrap();
            let deg_sum: usize = (0..g.node_count()).map(|i| g.degree(i)).sum();
            prop_assert_eq!(deg_sum, 2 * g.edge_count());
        }

        #[test]
        fn bfs_distances_differ_by_at_most_one_across_edges(g in arb_graph(12), s in 0usize..12) {
            let s = s % g.node_count();
            let d = bfs_distances(&g, s, None).unwrap();
            for (u, v) in g.edges() {
                if let (Some(a), Some(b)) = (d.get(u), d.get(v)) {
                    prop_assert!(a.abs_diff(b) <= 1);
                } else {
                    prop_assert_eq!(d.get(u), d.get(v));
                }
            }
        }

        #[test]
        fn induce_matches_brute_force_filter(g in arb_graph(12), mask in any::<u16>()) {
            let nodes: Vec<usize> = (0..g.node_count()).filter(|i| mask >> i & 1 == 1).collect();
            prop_assume!(!nodes.is_empty());
            let sub = induce_subgraph(&g, &nodes).unwrap();
            let mut got: Vec<(usize, usize)> = sub.graph.edges()
                .map(|(a, b)| (sub.old_ids[a], sub.old_ids[b]))
                .collect();
            got.sort_unstable();
            let want: Vec<(usize, usize)> = g.edges()
                .filter(|(u, v)| nodes.contains(u) && nodes.contains(v))
                .collect();
            prop_assert_eq!(got, want);
            sub.graph.check_invariants().unwrap();
        }
    }
}
