//! Forward pass, loss, and backpropagation for one graph at a time.

use rayon::prelude::*;

use super::layers::{propagate, propagate_transpose, sort_order};
use super::{Example, GnnParams, GraphInput, Layout};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Intermediate values kept for the backward pass.
struct Trace {
    /// Inputs to each propagation layer (`X`, then `Z_1`, …).
    layer_inputs: Vec<DenseMatrix>,
    /// Outputs `Z_t` of each propagation layer.
    layer_outputs: Vec<DenseMatrix>,
    /// Node kept at each sort-pooling row.
    kept: Vec<usize>,
    /// Sort-pooled rows, `k × concat_width`.
    pooled_in: Vec<f64>,
    /// First convolution after ReLU, `k × f1`.
    a1: Vec<f64>,
    /// Winning row (`2p` or `2p + 1`) of each max-pool cell, `pooled_len × f1`.
    pool_arg: Vec<usize>,
    pool: Vec<f64>,
    /// Second convolution after ReLU, flattened position-major.
    a2: Vec<f64>,
    a3: Vec<f64>,
    logits: [f64; 2],
}

fn relu(v: f64) -> f64 {
    v.max(0.0)
}

pub fn softmax(logits: [f64; 2]) -> [f64; 2] {
    let m = logits[0].max(logits[1]);
    let e = [(logits[0] - m).exp(), (logits[1] - m).exp()];
    let s = e[0] + e[1];
    [e[0] / s, e[1] / s]
}

/// `−ln softmax(logits)[class]` without overflow.
fn cross_entropy(logits: [f64; 2], label: bool) -> f64 {
    let (own, other) = if label {
        (logits[1], logits[0])
    } else {
        (logits[0], logits[1])
    };
    let d = other - own;
    if d > 0.0 {
        d + (-d).exp().ln_1p()
    } else {
        d.exp().ln_1p()
    }
}

fn block<'a>(p: &'a GnnParams, b: &super::Block) -> &'a [f64] {
    &p.values[b.range()]
}

fn run(p: &GnnParams, layout: &Layout, g: &GraphInput) -> Result<Trace> {
    if g.features.cols() != p.input_width {
        return Err(Error::Shape(format!(
            "features have {} columns, model expects {}",
            g.features.cols(),
            p.input_width
        )));
    }
    if g.features.rows() != g.graph.node_count() || g.node_count() == 0 {
        return Err(Error::Shape("feature rows must match a nonempty graph".into()));
    }
    let cfg = &p.config;
    let mut layer_inputs = Vec::with_capacity(layout.conv.len());
    let mut layer_outputs = Vec::with_capacity(layout.conv.len());
    let mut z = g.features.clone();
    for b in &layout.conv {
        let w = DenseMatrix::from_vec(b.rows, b.cols, block(p, b).to_vec())?;
        let mut out = propagate(&g.graph, &z.matmul(&w)?)?;
        for v in out.data_mut() {
            *v = v.tanh();
        }
        layer_inputs.push(std::mem::replace(&mut z, out.clone()));
        layer_outputs.push(out);
    }
    let refs: Vec<&DenseMatrix> = layer_outputs.iter().collect();
    let concat = DenseMatrix::hconcat(&refs)?;
    let width = concat.cols();
    let k = p.k;
    let kept: Vec<usize> = sort_order(&concat).into_iter().take(k).collect();
    let mut pooled_in = vec![0.0; k * width];
    for (r, &i) in kept.iter().enumerate() {
        pooled_in[r * width..(r + 1) * width].copy_from_slice(concat.row(i));
    }

    let [f1, f2] = cfg.conv1d_channels;
    let (w1, b1) = (block(p, &layout.c1_w), block(p, &layout.c1_b));
    let mut a1 = vec![0.0; k * f1];
    for r in 0..k {
        let row = &pooled_in[r * width..(r + 1) * width];
        for f in 0..f1 {
            let w = &w1[f * width..(f + 1) * width];
            a1[r * f1 + f] = relu(b1[f] + row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>());
        }
    }

    let pl = layout.pooled_len;
    let mut pool = vec![0.0; pl * f1];
    let mut pool_arg = vec![0; pl * f1];
    for q in 0..pl {
        for f in 0..f1 {
            let (lo, hi) = (a1[2 * q * f1 + f], a1[(2 * q + 1) * f1 + f]);
            let (v, arg) = if hi > lo { (hi, 2 * q + 1) } else { (lo, 2 * q) };
            pool[q * f1 + f] = v;
            pool_arg[q * f1 + f] = arg;
        }
    }

    let kern = cfg.conv1d_kernel;
    let (w2, b2) = (block(p, &layout.c2_w), block(p, &layout.c2_b));
    let l2 = layout.conv2_len;
    let mut a2 = vec![0.0; l2 * f2];
    for q in 0..l2 {
        for o in 0..f2 {
            let w = &w2[o * f1 * kern..(o + 1) * f1 * kern];
            let mut s = b2[o];
            for i in 0..f1 {
                for t in 0..kern {
                    s += w[i * kern + t] * pool[(q + t) * f1 + i];
                }
            }
            a2[q * f2 + o] = relu(s);
        }
    }

    let dw = cfg.dense_width;
    let (wd, bd) = (block(p, &layout.d_w), block(p, &layout.d_b));
    let mut a3 = bd.to_vec();
    for (j, &v) in a2.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        for (a, w) in a3.iter_mut().zip(&wd[j * dw..(j + 1) * dw]) {
            *a += v * w;
        }
    }
    for a in &mut a3 {
        *a = relu(*a);
    }

    let (wo, bo) = (block(p, &layout.o_w), block(p, &layout.o_b));
    let mut logits = [bo[0], bo[1]];
    for (j, &v) in a3.iter().enumerate() {
        logits[0] += v * wo[2 * j];
        logits[1] += v * wo[2 * j + 1];
    }
    Ok(Trace {
        layer_inputs,
        layer_outputs,
        kept,
        pooled_in,
        a1,
        pool_arg,
        pool,
        a2,
        a3,
        logits,
    })
}

/// Adds `d loss / d params` for one graph to `grad`, given `dlogits`.
fn backward(p: &GnnParams, layout: &Layout, g: &GraphInput, t: &Trace, dlogits: [f64; 2], grad: &mut [f64]) {
    let cfg = &p.config;
    let [f1, f2] = cfg.conv1d_channels;
    let dw = cfg.dense_width;
    let kern = cfg.conv1d_kernel;
    let width = cfg.concat_width();
    let k = p.k;

    let wo = block(p, &layout.o_w);
    let mut da3 = vec![0.0; dw];
    {
        let (gw, gb) = (layout.o_w.offset, layout.o_b.offset);
        gb_add(grad, gb, &dlogits);
        for j in 0..dw {
            grad[gw + 2 * j] += t.a3[j] * dlogits[0];
            grad[gw + 2 * j + 1] += t.a3[j] * dlogits[1];
            if t.a3[j] > 0.0 {
                da3[j] = wo[2 * j] * dlogits[0] + wo[2 * j + 1] * dlogits[1];
            }
        }
    }

    // da3 is already masked by the dense ReLU
    let wd = block(p, &layout.d_w);
    let mut da2 = vec![0.0; t.a2.len()];
    gb_add(grad, layout.d_b.offset, &da3);
    for (j, &v) in t.a2.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let row = layout.d_w.offset + j * dw;
        let mut acc = 0.0;
        for (c, &d) in da3.iter().enumerate() {
            grad[row + c] += v * d;
            acc += wd[j * dw + c] * d;
        }
        da2[j] = acc;
    }

    let w2 = block(p, &layout.c2_w);
    let mut dpool = vec![0.0; t.pool.len()];
    for q in 0..layout.conv2_len {
        for o in 0..f2 {
            let d = da2[q * f2 + o];
            if d == 0.0 {
                continue;
            }
            grad[layout.c2_b.offset + o] += d;
            let base = layout.c2_w.offset + o * f1 * kern;
            for i in 0..f1 {
                for s in 0..kern {
                    grad[base + i * kern + s] += d * t.pool[(q + s) * f1 + i];
                    dpool[(q + s) * f1 + i] += d * w2[o * f1 * kern + i * kern + s];
                }
            }
        }
    }

    let mut da1 = vec![0.0; k * f1];
    for (cell, &d) in dpool.iter().enumerate() {
        let f = cell % f1;
        let r = t.pool_arg[cell];
        if t.a1[r * f1 + f] > 0.0 {
            da1[r * f1 + f] += d;
        }
    }

    let w1 = block(p, &layout.c1_w);
    let mut dconcat = DenseMatrix::zeros(g.node_count(), width);
    for r in 0..k {
        let row = &t.pooled_in[r * width..(r + 1) * width];
        for f in 0..f1 {
            let d = da1[r * f1 + f];
            if d == 0.0 {
                continue;
            }
            grad[layout.c1_b.offset + f] += d;
            // padded rows are zero and have no node to pass gradient to
            if let Some(&node) = t.kept.get(r) {
                let base = layout.c1_w.offset + f * width;
                let dst = dconcat.row_mut(node);
                for c in 0..width {
                    grad[base + c] += d * row[c];
                    dst[c] += d * w1[f * width + c];
                }
            }
        }
    }

    // split the concatenated gradient back into per-layer blocks
    let mut col = 0;
    let mut dz: Vec<DenseMatrix> = layout
        .conv
        .iter()
        .map(|b| {
            let mut m = DenseMatrix::zeros(g.node_count(), b.cols);
            for i in 0..g.node_count() {
                m.row_mut(i).copy_from_slice(&dconcat.row(i)[col..col + b.cols]);
            }
            col += b.cols;
            m
        })
        .collect();

    for l in (0..layout.conv.len()).rev() {
        let b = layout.conv[l];
        let z = &t.layer_outputs[l];
        let mut dm = dz[l].clone();
        for (d, &v) in dm.data_mut().iter_mut().zip(z.data()) {
            *d *= 1.0 - v * v;
        }
        let dh = propagate_transpose(&g.graph, &dm);
        let input = &t.layer_inputs[l];
        // dW = inputᵀ · dh, skipping zero inputs
        for i in 0..input.rows() {
            let dh_row = dh.row(i);
            for (r, &a) in input.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let base = b.offset + r * b.cols;
                for (c, &d) in dh_row.iter().enumerate() {
                    grad[base + c] += a * d;
                }
            }
        }
        if l > 0 {
            let w = block(p, &b);
            let prev = &mut dz[l - 1];
            for i in 0..input.rows() {
                let dh_row = dh.row(i);
                let dst = prev.row_mut(i);
                for (r, d) in dst.iter_mut().enumerate() {
                    *d += w[r * b.cols..(r + 1) * b.cols]
                        .iter()
                        .zip(dh_row)
                        .map(|(a, b)| a * b)
                        .sum::<f64>();
                }
            }
        }
    }
}

fn gb_add(grad: &mut [f64], offset: usize, values: &[f64]) {
    for (g, v) in grad[offset..offset + values.len()].iter_mut().zip(values) {
        *g += v;
    }
}

/// Two logits per graph, in input order; index 1 is the link class.
pub fn forward(inputs: &[GraphInput], params: &GnnParams) -> Result<Vec<[f64; 2]>> {
    let layout = params.layout();
    inputs
        .par_iter()
        .map(|g| run(params, &layout, g).map(|t| t.logits))
        .collect()
}

/// Probability of the link class for each graph.
pub fn predict_proba(inputs: &[GraphInput], params: &GnnParams) -> Result<Vec<f64>> {
    Ok(forward(inputs, params)?.into_iter().map(|l| softmax(l)[1]).collect())
}

/// Number of graphs each parallel task accumulates before the ordered
/// reduction. Fixed so results do not depend on the thread count.
const CHUNK: usize = 8;

/// Mean cross-entropy over `batch` and its gradient.
pub fn batch_loss_and_grad(batch: &[&Example], params: &GnnParams) -> Result<(f64, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::Empty("training batch".into()));
    }
    let layout = params.layout();
    let partial = batch
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut grad = vec![0.0; params.len()];
            let mut loss = 0.0;
            for ex in chunk {
                let t = run(params, &layout, &ex.input)?;
                loss += cross_entropy(t.logits, ex.label);
                let p = softmax(t.logits);
                let target = [f64::from(!ex.label), f64::from(ex.label)];
                let dlogits = [p[0] - target[0], p[1] - target[1]];
                backward(params, &layout, &ex.input, &t, dlogits, &mut grad);
            }
            Ok((loss, grad))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = batch.len() as f64;
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    for (l, g) in partial {
        loss += l;
        for (a, b) in grad.iter_mut().zip(&g) {
            *a += b;
        }
    }
    for g in &mut grad {
        *g /= n;
    }
    Ok((loss / n, grad))
}

/// Mean cross-entropy without gradients.
pub(crate) fn mean_loss(examples: &[&Example], params: &GnnParams) -> Result<(f64, Vec<f64>)> {
    let layout = params.layout();
    let per = examples
        .par_iter()
        .map(|ex| {
            let t = run(params, &layout, &ex.input)?;
            Ok((cross_entropy(t.logits, ex.label), softmax(t.logits)[1]))
        })
        .collect::<Result<Vec<_>>>()?;
    let loss = per.iter().map(|p| p.0).sum::<f64>() / per.len().max(1) as f64;
    Ok((loss, per.into_iter().map(|p| p.1).collect()))
}
