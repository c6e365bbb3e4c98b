//! Mini-batch training with Adam and validation-loss model selection.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::{batch_loss_and_grad, mean_loss};
use super::{Example, GnnConfig, GnnParams};
use crate::error::{Error, Result};
use crate::pipeline::auc;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    /// NaN when the validation set has a single class.
    pub val_auc: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Snapshot with the smallest validation loss.
    pub params: GnnParams,
    pub log: Vec<EpochLog>,
    pub best_epoch: usize,
}

impl TrainOutcome {
    /// Header `epoch,train_loss,val_loss,val_auc`.
    pub fn write_log<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "epoch,train_loss,val_loss,val_auc")?;
        for e in &self.log {
            writeln!(out, "{},{:e},{:e},{:e}", e.epoch, e.train_loss, e.val_loss, e.val_auc)?;
        }
        Ok(())
    }
}

/// Sort-pooling size: the fixed `sortpool_k` if set, otherwise the
/// smallest `k` such that the configured fraction of graphs have at most
/// `k` nodes, raised to `min_k` and to the smallest size the convolution
/// stack accepts.
pub fn choose_k(node_counts: &[usize], cfg: &GnnConfig) -> Result<usize> {
    if let Some(k) = cfg.sortpool_k {
        return Ok(k);
    }
    if node_counts.is_empty() {
        return Err(Error::Empty("no graphs to choose k from".into()));
    }
    let mut sizes = node_counts.to_vec();
    sizes.sort_unstable();
    let need = (cfg.sortpool_quantile * sizes.len() as f64).ceil().max(1.0) as usize;
    let k = sizes[need.min(sizes.len()) - 1];
    Ok(k.max(cfg.min_k).max(cfg.smallest_k()))
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(len: usize, lr: f64) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            lr,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = Self::BETA1 * self.m[i] + (1.0 - Self::BETA1) * grad[i];
            self.v[i] = Self::BETA2 * self.v[i] + (1.0 - Self::BETA2) * grad[i] * grad[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= self.lr * mh / (vh.sqrt() + Self::EPS);
        }
    }
}

fn check_leakage(set: &[Example], name: &str) -> Result<()> {
    for (i, e) in set.iter().enumerate() {
        let (x, y) = e.input.target;
        if e.label && e.input.graph.has_edge(x, y) {
            return Err(Error::Leakage(format!(
                "positive {name} graph {i} still contains its target edge"
            )));
        }
    }
    Ok(())
}

/// Trains for `config.epochs` epochs and returns the snapshot with the
/// smallest validation loss (earliest on ties). Deterministic for a fixed
/// seed and trial.
pub fn train(
    train_set: &[Example],
    val_set: &[Example],
    config: &GnnConfig,
    seed: u64,
    trial: u64,
) -> Result<TrainOutcome> {
    config.validate()?;
    let first = train_set
        .first()
        .ok_or_else(|| Error::Empty("training set".into()))?;
    if !train_set.iter().any(|e| e.label) || train_set.iter().all(|e| e.label) {
        return Err(Error::Data("training set needs both classes".into()));
    }
    if val_set.is_empty() {
        return Err(Error::Empty("validation set".into()));
    }
    check_leakage(train_set, "training")?;
    check_leakage(val_set, "validation")?;
    let width = first.input.features.cols();
    let counts: Vec<usize> = train_set.iter().map(|e| e.input.node_count()).collect();
    let k = choose_k(&counts, config)?;
    let init_seed: u64 = stream_rng(seed, Stream::Init, trial).gen();
    let mut params = GnnParams::init(config, width, k, init_seed)?;
    let mut shuffle = stream_rng(seed, Stream::Shuffle, trial);
    let mut adam = Adam::new(params.len(), config.learning_rate);
    let val_refs: Vec<&Example> = val_set.iter().collect();
    let val_labels: Vec<bool> = val_set.iter().map(|e| e.label).collect();

    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut log = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle);
        let mut loss_sum = 0.0;
        for batch in order.chunks(config.batch_size) {
            let refs: Vec<&Example> = batch.iter().map(|&i| &train_set[i]).collect();
            let (loss, grad) = batch_loss_and_grad(&refs, &params)?;
            loss_sum += loss * refs.len() as f64;
            adam.step(&mut params.values, &grad);
        }
        if params.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergent(format!("non-finite parameters after epoch {epoch}")));
        }
        let (val_loss, probs) = mean_loss(&val_refs, &params)?;
        let val_auc = auc(&probs, &val_labels).unwrap_or(f64::NAN);
        let entry = EpochLog {
            epoch,
            train_loss: loss_sum / train_set.len() as f64,
            val_loss,
            val_auc,
        };
        log::debug!("epoch {epoch}: {entry:?}");
        log.push(entry);
        if best.as_ref().is_none_or(|b| val_loss < b.0) {
            best = Some((val_loss, epoch, params.values.clone()));
        }
    }
    let (best_epoch, values) = match best {
        Some((_, e, v)) => (e, v),
        None => (0, params.values.clone()),
    };
    params.values = values;
    Ok(TrainOutcome {
        params,
        log,
        best_epoch,
    })
}
