//! Propagation and sort pooling.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Identity,
}

/// `D̃^{-1} Ã H`: each row becomes the mean of itself and its neighbors.
pub fn propagate(adj: &Graph, h: &DenseMatrix) -> Result<DenseMatrix> {
    if h.rows() != adj.node_count() {
        return Err(Error::Shape(format!(
            "{} rows for {} nodes",
            h.rows(),
            adj.node_count()
        )));
    }
    let mut out = DenseMatrix::zeros(h.rows(), h.cols());
    for i in 0..h.rows() {
        let nb = adj.neighbors(i);
        let scale = 1.0 / (nb.len() + 1) as f64;
        let dst = out.row_mut(i);
        dst.copy_from_slice(h.row(i));
        for &j in nb {
            for (d, s) in dst.iter_mut().zip(h.row(j)) {
                *d += s;
            }
        }
        for d in dst.iter_mut() {
            *d *= scale;
        }
    }
    Ok(out)
}

/// Transpose of [`propagate`]: row `j` collects `g_i / (deg_i + 1)` from
/// itself and its neighbors.
pub(crate) fn propagate_transpose(adj: &Graph, g: &DenseMatrix) -> DenseMatrix {
    let mut scaled = g.clone();
    for i in 0..g.rows() {
        let s = 1.0 / (adj.degree(i) + 1) as f64;
        for v in scaled.row_mut(i) {
            *v *= s;
        }
    }
    let mut out = scaled.clone();
    for j in 0..g.rows() {
        for &i in adj.neighbors(j) {
            for (d, s) in out.row_mut(j).iter_mut().zip(scaled.row(i)) {
                *d += s;
            }
        }
    }
    out
}

/// `f(D̃^{-1} Ã X W)`.
pub fn graph_conv(adj: &Graph, x: &DenseMatrix, w: &DenseMatrix, f: Activation) -> Result<DenseMatrix> {
    let mut z = propagate(adj, &x.matmul(w)?)?;
    if f == Activation::Tanh {
        for v in z.data_mut() {
            *v = v.tanh();
        }
    }
    Ok(z)
}

/// Node order used by sort pooling: descending last column, then
/// descending next-to-last column, then ascending node id.
pub fn sort_order(z: &DenseMatrix) -> Vec<usize> {
    let c = z.cols();
    let mut order: Vec<usize> = (0..z.rows()).collect();
    if c == 0 {
        return order;
    }
    order.sort_by(|&a, &b| {
        let mut ord = z.get(b, c - 1).total_cmp(&z.get(a, c - 1));
        if c >= 2 {
            ord = ord.then(z.get(b, c - 2).total_cmp(&z.get(a, c - 2)));
        }
        ord.then(a.cmp(&b))
    });
    order
}

/// Rows of `z` in [`sort_order`], truncated or zero-padded to `k`.
pub fn sortpool(z: &DenseMatrix, k: usize) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(k, z.cols());
    for (r, &i) in sort_order(z).iter().take(k).enumerate() {
        out.row_mut(r).copy_from_slice(z.row(i));
    }
    out
}
