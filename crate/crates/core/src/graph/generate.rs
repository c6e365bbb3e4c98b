//! Seeded random graph models.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum SyntheticModel {
    ErdosRenyi { n: usize, p: f64 },
    BarabasiAlbert { n: usize, m: usize },
    WattsStrogatz { n: usize, k: usize, beta: f64 },
}

impl SyntheticModel {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            SyntheticModel::ErdosRenyi { p, .. } if !(0.0..=1.0).contains(&p) => {
                bad(format!("erdos_renyi p={p} outside [0, 1]"))
            }
            SyntheticModel::BarabasiAlbert { n, m } if m == 0 || m >= n => {
                bad(format!("barabasi_albert requires 1 <= m < n (m={m}, n={n})"))
            }
            SyntheticModel::WattsStrogatz { n, k, beta } => {
                if k % 2 != 0 || k >= n {
                    bad(format!("watts_strogatz requires even k < n (k={k}, n={n})"))
                } else if !(0.0..=1.0).contains(&beta) {
                    bad(format!("watts_strogatz beta={beta} outside [0, 1]"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Draws a graph from `model`; identical seeds give identical graphs.
pub fn gen_synthetic(model: SyntheticModel, seed: u64) -> Result<Graph> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = match model {
        SyntheticModel::ErdosRenyi { n, p } => erdos_renyi(n, p, &mut rng),
        SyntheticModel::BarabasiAlbert { n, m } => barabasi_albert(n, m, &mut rng),
        SyntheticModel::WattsStrogatz { n, k, beta } => watts_strogatz(n, k, beta, &mut rng),
    };
    Ok(g)
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("generated edges are valid")
}

/// Preferential attachment seeded with a clique on `m + 1` nodes; each new
/// node links to `m` distinct existing nodes drawn proportionally to degree.
fn barabasi_albert(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::with_capacity(n * m);
    // every endpoint occurrence, so uniform draws are degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * n * m);
    let seed_size = (m + 1).min(n);
    for u in 0..seed_size {
        for v in (u + 1)..seed_size {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for new in seed_size..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, new));
            endpoints.push(t);
            endpoints.push(new);
        }
    }
    Graph::from_edges(n, edges).expect("generated edges are valid")
}

fn watts_strogatz(n: usize, k: usize, beta: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut adj: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.gen::<f64>() >= beta || !adj[u].contains(&v) {
                continue;
            }
            let candidates: Vec<usize> = (0..n).filter(|&w| w != u && !adj[u].contains(&w)).collect();
            if let Some(&w) = candidates.choose(rng) {
                adj[u].remove(&v);
                adj[v].remove(&u);
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, s)| s.iter().filter(move |&&v| v > u).map(move |&v| (u, v)));
    Graph::from_edges(n, edges).expect("generated edges are valid")
}
