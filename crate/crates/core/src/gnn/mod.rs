//! Sort-pooling graph neural network for classifying enclosing subgraphs.
//!
//! Four propagation layers `Z = tanh(D̃^{-1} Ã Z W)` with `Ã = A + I` feed a
//! column-wise concatenation of their outputs. Sort pooling orders the
//! nodes by the last channel and keeps `k` rows, which a 1-D convolution
//! stack, a dense layer and a two-way linear output turn into logits.

mod checkpoint;
mod gradcheck;
mod layers;
mod model;
mod train;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_VERSION};
pub use gradcheck::{gradient_check, GradCheck};
pub use layers::{graph_conv, propagate, sort_order, sortpool, Activation};
pub use model::{batch_loss_and_grad, forward, predict_proba, softmax};
pub use train::{choose_k, train, EpochLog, TrainOutcome};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::DenseMatrix;
use crate::subgraph::{EnclosingSubgraph, NodeInfoMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GnnConfig {
    /// Output channels of the propagation layers; the last must be 1.
    pub conv_channels: Vec<usize>,
    /// Fixed sort-pooling size; `None` applies the quantile rule.
    pub sortpool_k: Option<usize>,
    pub sortpool_quantile: f64,
    /// Lower limit on the quantile rule so the convolution stack fits.
    pub min_k: usize,
    pub conv1d_channels: [usize; 2],
    /// Kernel of the second 1-D convolution.
    pub conv1d_kernel: usize,
    pub dense_width: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for GnnConfig {
    fn default() -> Self {
        Self {
            conv_channels: vec![32, 32, 32, 1],
            sortpool_k: None,
            sortpool_quantile: 0.6,
            min_k: 10,
            conv1d_channels: [16, 32],
            conv1d_kernel: 5,
            dense_width: 128,
            epochs: 50,
            learning_rate: 1e-4,
            batch_size: 50,
            seed: 1,
        }
    }
}

impl GnnConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.conv_channels.is_empty() || self.conv_channels.contains(&0) {
            return bad("conv_channels must be nonempty and positive".into());
        }
        if self.conv_channels.last() != Some(&1) {
            return bad("the last conv channel count must be 1".into());
        }
        if self.conv1d_channels.contains(&0) || self.conv1d_kernel == 0 || self.dense_width == 0 {
            return bad("layer sizes must be positive".into());
        }
        if !(self.sortpool_quantile > 0.0 && self.sortpool_quantile <= 1.0) {
            return bad(format!("sortpool_quantile {} outside (0, 1]", self.sortpool_quantile));
        }
        if let Some(k) = self.sortpool_k {
            if k < self.smallest_k() {
                return bad(format!("sortpool_k {k} is below the minimum {}", self.smallest_k()));
            }
        }
        if self.batch_size == 0 || self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return bad("batch_size and learning_rate must be positive".into());
        }
        Ok(())
    }

    /// Smallest `k` for which the second 1-D convolution has an output.
    pub fn smallest_k(&self) -> usize {
        2 * self.conv1d_kernel
    }

    /// Width of the concatenated per-node state.
    pub fn concat_width(&self) -> usize {
        self.conv_channels.iter().sum()
    }
}

/// One input to the network: a local graph, its node features and the
/// local ids of the target pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInput {
    pub graph: Graph,
    pub features: DenseMatrix,
    pub target: (usize, usize),
}

impl GraphInput {
    pub fn new(graph: Graph, features: DenseMatrix, target: (usize, usize)) -> Result<Self> {
        if features.rows() != graph.node_count() {
            return Err(Error::Shape(format!(
                "{} feature rows for {} nodes",
                features.rows(),
                graph.node_count()
            )));
        }
        Ok(Self {
            graph,
            features,
            target,
        })
    }

    pub fn from_subgraph(sub: &EnclosingSubgraph, info: NodeInfoMatrix) -> Result<Self> {
        Self::new(sub.graph.clone(), info.matrix, sub.target)
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub input: GraphInput,
    /// `true` for an existing link.
    pub label: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Block {
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// Positions of every tensor inside the flat parameter vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Layout {
    /// Propagation weights, `c_{t-1} × c_t`.
    pub conv: Vec<Block>,
    /// First 1-D convolution, `filters × concat_width`.
    pub c1_w: Block,
    pub c1_b: Block,
    /// Second 1-D convolution, `filters × (in_channels · kernel)`.
    pub c2_w: Block,
    pub c2_b: Block,
    /// Dense layer, `flattened × dense_width`.
    pub d_w: Block,
    pub d_b: Block,
    /// Output layer, `dense_width × 2`.
    pub o_w: Block,
    pub o_b: Block,
    pub total: usize,
    pub pooled_len: usize,
    pub conv2_len: usize,
}

impl Layout {
    fn new(cfg: &GnnConfig, input_width: usize, k: usize) -> Self {
        let mut offset = 0;
        let mut block = |rows: usize, cols: usize| {
            let b = Block { offset, rows, cols };
            offset += rows * cols;
            b
        };
        let mut conv = Vec::new();
        let mut prev = input_width;
        for &c in &cfg.conv_channels {
            conv.push(block(prev, c));
            prev = c;
        }
        let [f1, f2] = cfg.conv1d_channels;
        let pooled_len = k / 2;
        let conv2_len = pooled_len + 1 - cfg.conv1d_kernel;
        let c1_w = block(f1, cfg.concat_width());
        let c1_b = block(1, f1);
        let c2_w = block(f2, f1 * cfg.conv1d_kernel);
        let c2_b = block(1, f2);
        let d_w = block(conv2_len * f2, cfg.dense_width);
        let d_b = block(1, cfg.dense_width);
        let o_w = block(cfg.dense_width, 2);
        let o_b = block(1, 2);
        Self {
            conv,
            c1_w,
            c1_b,
            c2_w,
            c2_b,
            d_w,
            d_b,
            o_w,
            o_b,
            total: offset,
            pooled_len,
            conv2_len,
        }
    }

    /// Weight blocks with their Glorot fans; biases are not listed.
    fn weights(&self, cfg: &GnnConfig) -> Vec<(Block, usize, usize)> {
        let mut out: Vec<_> = self.conv.iter().map(|b| (*b, b.rows, b.cols)).collect();
        let [f1, f2] = cfg.conv1d_channels;
        let width = cfg.concat_width();
        out.push((self.c1_w, width, f1 * width));
        out.push((self.c2_w, f1 * cfg.conv1d_kernel, f2 * cfg.conv1d_kernel));
        out.push((self.d_w, self.d_w.rows, self.d_w.cols));
        out.push((self.o_w, self.o_w.rows, self.o_w.cols));
        out
    }
}

/// All trainable values in one flat vector plus the shape information
/// needed to interpret it.
#[derive(Debug, Clone, PartialEq)]
pub struct GnnParams {
    pub config: GnnConfig,
    pub input_width: usize,
    pub k: usize,
    pub values: Vec<f64>,
}

impl GnnParams {
    /// Glorot-uniform weights `U[−s, s]`, `s = sqrt(6 / (fan_in + fan_out))`,
    /// and zero biases.
    pub fn init(config: &GnnConfig, input_width: usize, k: usize, seed: u64) -> Result<Self> {
        config.validate()?;
        if input_width == 0 {
            return Err(Error::InvalidParameter("input width must be positive".into()));
        }
        if k < config.smallest_k() {
            return Err(Error::InvalidParameter(format!(
                "sort-pooling k = {k} is below the minimum {}",
                config.smallest_k()
            )));
        }
        let layout = Layout::new(config, input_width, k);
        let mut values = vec![0.0; layout.total];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (block, fan_in, fan_out) in layout.weights(config) {
            let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for v in &mut values[block.range()] {
                *v = rng.gen_range(-s..=s);
            }
        }
        Ok(Self {
            config: config.clone(),
            input_width,
            k,
            values,
        })
    }

    /// Redraws every bias with magnitude in `[0.02, 0.1]` and random sign.
    /// Zero biases put padded sort-pooling rows on the ReLU kink, so
    /// gradient probes start from here.
    pub fn randomize_biases(&mut self, seed: u64) {
        let l = self.layout();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for b in [l.c1_b, l.c2_b, l.d_b, l.o_b] {
            for v in &mut self.values[b.range()] {
                let mag = rng.gen_range(0.02..=0.1);
                *v = if rng.gen::<bool>() { mag } else { -mag };
            }
        }
    }

    pub(crate) fn layout(&self) -> Layout {
        Layout::new(&self.config, self.input_width, self.k)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes() {
        let cfg = GnnConfig::default();
        let p = GnnParams::init(&cfg, 51, 10, 3).unwrap();
        let l = p.layout();
        assert_eq!(cfg.concat_width(), 97);
        assert_eq!(l.conv[0].len(), 51 * 32);
        assert_eq!(l.pooled_len, 5);
        assert_eq!(l.conv2_len, 1);
        assert_eq!(l.d_w.rows, 32);
        let want = 51 * 32 + 32 * 32 * 2 + 32 + 16 * 97 + 16 + 32 * 80 + 32 + 32 * 128 + 128 + 256 + 2;
        assert_eq!(p.len(), want);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let cfg = GnnConfig::default();
        let a = GnnParams::init(&cfg, 20, 12, 9).unwrap();
        assert_eq!(a, GnnParams::init(&cfg, 20, 12, 9).unwrap());
        assert_ne!(a, GnnParams::init(&cfg, 20, 12, 10).unwrap());
        let l = a.layout();
        let s = (6.0f64 / (20.0 + 32.0)).sqrt();
        assert!(a.values[l.conv[0].range()].iter().all(|v| v.abs() <= s));
        assert!(a.values[l.o_b.range()].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn config_validation() {
        let mut cfg = GnnConfig::default();
        cfg.conv_channels = vec![32, 2];
        assert!(cfg.validate().is_err());
        let cfg = GnnConfig::default();
        assert!(GnnParams::init(&cfg, 10, 9, 0).is_err());
    }
}
