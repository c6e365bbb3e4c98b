//! Leading eigenvectors of the normalized adjacency `D^{-1/2} A D^{-1/2}`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EmbeddingTable;
use crate::error::{Error, Result};
use crate::graph::Graph;

const RESIDUAL_TOL: f64 = 1e-8;
const MAX_ITER: usize = 10_000;
const EXTRA_BLOCK: usize = 8;
const INIT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    pub table: EmbeddingTable,
    /// Eigenvalue of each embedding column, descending.
    pub eigenvalues: Vec<f64>,
    pub iterations: usize,
}

/// Normalized adjacency restricted to non-isolated nodes, plus the identity
/// shift that makes its spectrum nonnegative.
struct Operator<'a> {
    g: &'a Graph,
    active: Vec<usize>,
    local: Vec<usize>,
    inv_sqrt_deg: Vec<f64>,
}

impl Operator<'_> {
    /// `(S + I) q` for each column of `q` (`active.len() × b`).
    fn apply(&self, q: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = q.clone();
        for (li, &u) in self.active.iter().enumerate() {
            for &v in self.g.neighbors(u) {
                let lv = self.local[v];
                let w = self.inv_sqrt_deg[li] * self.inv_sqrt_deg[lv];
                for c in 0..q.ncols() {
                    out[(li, c)] += w * q[(lv, c)];
                }
            }
        }
        out
    }
}

/// Orthonormal basis of the column span, by modified Gram-Schmidt applied
/// twice.
fn orthonormalize(m: &mut DMatrix<f64>) {
    for _ in 0..2 {
        for c in 0..m.ncols() {
            for p in 0..c {
                let dot = m.column(c).dot(&m.column(p));
                let prev = m.column(p).clone_owned();
                m.column_mut(c).axpy(-dot, &prev, 1.0);
            }
            let norm = m.column(c).norm();
            if norm > 0.0 {
                m.column_mut(c).scale_mut(1.0 / norm);
            }
        }
    }
}

/// Top `dim` eigenpairs by orthogonal iteration with Rayleigh-Ritz
/// extraction. Isolated nodes get zero rows; columns past the number of
/// non-isolated nodes are zero.
pub fn spectral_decomposition(g: &Graph, dim: usize) -> Result<SpectralEmbedding> {
    let n = g.node_count();
    if dim == 0 || dim > n {
        return Err(Error::InvalidParameter(format!(
            "embedding dimension {dim} must lie in 1..={n}"
        )));
    }
    let active: Vec<usize> = (0..n).filter(|&i| g.degree(i) > 0).collect();
    let mut local = vec![usize::MAX; n];
    for (li, &u) in active.iter().enumerate() {
        local[u] = li;
    }
    let na = active.len();
    let k = dim.min(na);
    let mut values = vec![0.0; n * dim];
    if k == 0 {
        return Ok(SpectralEmbedding {
            table: EmbeddingTable::new(n, dim, values)?,
            eigenvalues: vec![0.0; dim],
            iterations: 0,
        });
    }
    let op = Operator {
        g,
        inv_sqrt_deg: active.iter().map(|&u| 1.0 / (g.degree(u) as f64).sqrt()).collect(),
        active,
        local,
    };
    let block = (dim + EXTRA_BLOCK).min(na);
    let mut rng = ChaCha8Rng::seed_from_u64(INIT_SEED);
    let mut q = DMatrix::from_fn(na, block, |_, _| rng.gen::<f64>() - 0.5);
    orthonormalize(&mut q);

    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITER {
        let z = op.apply(&q);
        let h = q.transpose() * &z;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let v = DMatrix::from_fn(block, block, |r, c| eig.eigenvectors[(r, order[c])]);
        let theta: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let ritz = &q * &v;
        let mapped = &z * &v;
        residual = (0..k)
            .map(|c| (mapped.column(c) - ritz.column(c) * theta[c]).norm())
            .fold(0.0, f64::max);
        if residual < RESIDUAL_TOL || block == na {
            for c in 0..k {
                let col = ritz.column(c);
                let sign = match col.iter().find(|x| x.abs() > 1e-10) {
                    Some(&x) if x < 0.0 => -1.0,
                    _ => 1.0,
                };
                for (li, &u) in op.active.iter().enumerate() {
                    values[u * dim + c] = sign * col[li];
                }
            }
            let mut eigenvalues: Vec<f64> = theta[..k].iter().map(|t| t - 1.0).collect();
            eigenvalues.resize(dim, 0.0);
            return Ok(SpectralEmbedding {
                table: EmbeddingTable::new(n, dim, values)?,
                eigenvalues,
                iterations: it,
            });
        }
        q = mapped;
        orthonormalize(&mut q);
    }
    Err(Error::Convergence {
        method: "spectral embedding",
        iterations: MAX_ITER,
        residual,
    })
}

pub fn spectral_embedding(g: &Graph, dim: usize) -> Result<EmbeddingTable> {
    spectral_decomposition(g, dim).map(|s| s.table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_synthetic, SyntheticModel};

    fn gram(t: &EmbeddingTable) -> DMatrix<f64> {
        let n = t.node_count();
        let u = DMatrix::from_fn(n, t.dim(), |r, c| t.row(r)[c]);
        u.transpose() * u
    }

    #[test]
    fn single_edge_has_eigenvalues_one_and_minus_one() {
        let k2 = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = spectral_decomposition(&k2, 2).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-12);
        let r = 0.5f64.sqrt();
        assert!((s.table.row(0)[0] - r).abs() < 1e-12 && (s.table.row(1)[0] - r).abs() < 1e-12);
        assert!((s.table.row(0)[1] - r).abs() < 1e-12 && (s.table.row(1)[1] + r).abs() < 1e-12);
        assert!((gram(&s.table) - DMatrix::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn columns_are_orthonormal_eigenvectors() {
        let g = gen_synthetic(SyntheticModel::BarabasiAlbert { n: 120, m: 3 }, 4).unwrap();
        let s = spectral_decomposition(&g, 8).unwrap();
        assert!((gram(&s.table) - DMatrix::identity(8, 8)).abs().max() < 1e-6);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-9);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        // check S u = θ u directly
        for c in 0..8 {
            for i in 0..120 {
                let su: f64 = g
                    .neighbors(i)
                    .iter()
                    .map(|&j| s.table.row(j)[c] / ((g.degree(i) * g.degree(j)) as f64).sqrt())
                    .sum();
                assert!((su - s.eigenvalues[c] * s.table.row(i)[c]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn isolated_nodes_get_zero_rows() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = spectral_embedding(&g, 2).unwrap();
        assert_eq!(t.row(3), &[0.0, 0.0]);
        assert_eq!(t.row(4), &[0.0, 0.0]);
    }

    #[test]
    fn deterministic_and_permutation_equivariant() {
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 40, p: 0.2 }, 2).unwrap();
        let a = spectral_decomposition(&g, 4).unwrap();
        assert_eq!(a.table, spectral_embedding(&g, 4).unwrap());
        let perm: Vec<usize> = (0..40).map(|i| (i * 7 + 3) % 40).collect();
        let pg = Graph::from_edges(40, g.edges().map(|(u, v)| (perm[u], perm[v]))).unwrap();
        let b = spectral_decomposition(&pg, 4).unwrap();
        for c in 0..4 {
            assert!((a.eigenvalues[c] - b.eigenvalues[c]).abs() < 1e-9);
        }
        // the leading eigenvalue is simple; compare it up to sign
        let sign = (a.table.row(0)[0] * b.table.row(perm[0])[0]).signum();
        for i in 0..40 {
            assert!((a.table.row(i)[0] - sign * b.table.row(perm[i])[0]).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_bad_dimension() {
        let k2 = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert!(spectral_embedding(&k2, 0).is_err());
        assert!(spectral_embedding(&k2, 3).is_err());
    }
}
