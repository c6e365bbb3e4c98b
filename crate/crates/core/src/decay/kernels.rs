//! Walk kernels `f(x, y, l)` of the three high-order heuristics.
//!
//! Each kernel also has a series form returning `f(x, y, l)` for every
//! `l = 1..=len` from a single dynamic program. Probability kernels take
//! the degree vector explicitly so that a walk inside an enclosing
//! subgraph is weighted exactly as in the source graph.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Longest walk accepted by [`count_walks`].
pub const MAX_WALK_LENGTH: usize = 30;

fn check_length(l: usize) -> Result<()> {
    if l == 0 || l > MAX_WALK_LENGTH {
        return Err(Error::InvalidParameter(format!(
            "walk length {l} must lie in 1..={MAX_WALK_LENGTH}"
        )));
    }
    Ok(())
}

/// Exact `[A^l]_{x,y}`.
pub fn count_walks(g: &Graph, x: NodeId, y: NodeId, l: usize) -> Result<u128> {
    g.check_node(x)?;
    g.check_node(y)?;
    check_length(l)?;
    Ok(walk_count_series(g, x, y, l)?[l - 1])
}

/// `[A^l]_{x,y}` for `l = 1..=len`.
pub fn walk_count_series(g: &Graph, x: NodeId, y: NodeId, len: usize) -> Result<Vec<u128>> {
    let n = g.node_count();
    let mut cur = vec![0u128; n];
    cur[x] = 1;
    let mut next = vec![0u128; n];
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = 0u128;
            for &j in g.neighbors(i) {
                acc = acc.checked_add(cur[j]).ok_or_else(|| {
                    Error::Overflow("walk count exceeds 128 bits".into())
                })?;
            }
            *slot = acc;
        }
        std::mem::swap(&mut cur, &mut next);
        out.push(cur[y]);
    }
    Ok(out)
}

/// `γ^l [A^l]_{x,y}` for `l = 1..=len` in floating point, which stays in
/// range for any length.
pub fn damped_walk_series(g: &Graph, x: NodeId, y: NodeId, gamma: f64, len: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut cur = vec![0.0; n];
    cur[x] = 1.0;
    let mut next = vec![0.0; n];
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        for (i, slot) in next.iter_mut().enumerate() {
            *slot = gamma * g.neighbors(i).iter().map(|&j| cur[j]).sum::<f64>();
        }
        std::mem::swap(&mut cur, &mut next);
        out.push(cur[y]);
    }
    out
}

fn inverse_degrees(g: &Graph, degrees: &[usize]) -> Result<Vec<f64>> {
    if degrees.len() != g.node_count() {
        return Err(Error::Shape(format!(
            "{} degrees for {} nodes",
            degrees.len(),
            g.node_count()
        )));
    }
    Ok(degrees
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { 1.0 / d as f64 })
        .collect())
}

/// Probability that a uniform random walk from `x` is at `y` after exactly
/// `l` steps, `[(D^{-1} A)^l]_{x,y}`.
pub fn walk_prob(g: &Graph, x: NodeId, y: NodeId, l: usize) -> Result<f64> {
    g.check_node(x)?;
    g.check_node(y)?;
    if l == 0 {
        return Ok(if x == y { 1.0 } else { 0.0 });
    }
    Ok(walk_prob_series(g, &g.degrees(), x, y, l)?[l - 1])
}

/// Full distribution of the walk from `x` after `l` steps.
pub fn walk_distribution(g: &Graph, x: NodeId, l: usize) -> Result<Vec<f64>> {
    g.check_node(x)?;
    let inv = inverse_degrees(g, &g.degrees())?;
    let mut cur = vec![0.0; g.node_count()];
    cur[x] = 1.0;
    for _ in 0..l {
        cur = step_walk(g, &inv, &cur);
    }
    Ok(cur)
}

fn step_walk(g: &Graph, inv: &[f64], cur: &[f64]) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| g.neighbors(i).iter().map(|&j| cur[j] * inv[j]).sum())
        .collect()
}

/// `f(x, y, l)` of [`walk_prob`] for `l = 1..=len`, moving from node `j`
/// with probability `1 / degrees[j]` per neighbor.
pub fn walk_prob_series(
    g: &Graph,
    degrees: &[usize],
    x: NodeId,
    y: NodeId,
    len: usize,
) -> Result<Vec<f64>> {
    g.check_node(x)?;
    g.check_node(y)?;
    let inv = inverse_degrees(g, degrees)?;
    let mut cur = vec![0.0; g.node_count()];
    cur[x] = 1.0;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        cur = step_walk(g, &inv, &cur);
        out.push(cur[y]);
    }
    Ok(out)
}

/// Probability that independent simultaneous walks from `x` and `y` first
/// occupy the same node at step `l`.
pub fn first_meeting_prob(g: &Graph, x: NodeId, y: NodeId, l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidParameter("meeting step must be at least 1".into()));
    }
    Ok(first_meeting_series(g, &g.degrees(), x, y, l)?[l - 1])
}

/// First-meeting probabilities for `l = 1..=len` from a dynamic program
/// over pair states `M ← P M Pᵀ`; co-located mass is recorded and removed
/// after every step.
pub fn first_meeting_series(
    g: &Graph,
    degrees: &[usize],
    x: NodeId,
    y: NodeId,
    len: usize,
) -> Result<Vec<f64>> {
    g.check_node(x)?;
    g.check_node(y)?;
    if x == y {
        return Err(Error::InvalidParameter(format!(
            "first meeting needs distinct start nodes, got ({x},{y})"
        )));
    }
    let n = g.node_count();
    let inv = inverse_degrees(g, degrees)?;
    let mut m = vec![0.0; n * n];
    m[x * n + y] = 1.0;
    let mut half = vec![0.0; n * n];
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        // half[u][b] = Σ_{v ∈ Γ(b)} m[u][v] / deg(v)
        for u in 0..n {
            let row = &m[u * n..(u + 1) * n];
            if row.iter().all(|&v| v == 0.0) {
                half[u * n..(u + 1) * n].fill(0.0);
                continue;
            }
            for b in 0..n {
                half[u * n + b] = g.neighbors(b).iter().map(|&v| row[v] * inv[v]).sum();
            }
        }
        // m[a][b] = Σ_{u ∈ Γ(a)} half[u][b] / deg(u)
        for a in 0..n {
            let dst = &mut m[a * n..(a + 1) * n];
            dst.fill(0.0);
            for &u in g.neighbors(a) {
                let w = inv[u];
                for (d, h) in dst.iter_mut().zip(&half[u * n..(u + 1) * n]) {
                    *d += w * h;
                }
            }
        }
        let mut met = 0.0;
        for z in 0..n {
            met += m[z * n + z];
            m[z * n + z] = 0.0;
        }
        out.push(met);
    }
    Ok(out)
}
