//! Repeated-trial experiments over heuristics, the logistic ensemble, and
//! the subgraph classifier.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{auc, average_precision, mean_std};
use super::split::{split_links, LinkSet, Split, SplitSpec};
use crate::embed::{negative_injection, spectral_embedding, EmbeddingTable};
use crate::error::{Error, Result};
use crate::gnn::{self, Example, GnnConfig, GraphInput};
use crate::graph::{gen_synthetic, load_edge_list, Graph, SyntheticModel};
use crate::heuristics::{ensemble_fit_predict, score_pairs, HeuristicConfig, HeuristicKind};
use crate::subgraph::{build_node_info, extract_enclosing_with, ExtractOptions, DEFAULT_LABEL_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    Heuristic(HeuristicKind),
    Ensemble,
    Seal,
    /// Subgraph classifier with spectral embeddings appended to the labels.
    SealEmbed,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Heuristic(k) => k.name(),
            Method::Ensemble => "ensemble",
            Method::Seal => "seal",
            Method::SealEmbed => "seal_embed",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "ensemble" => Some(Method::Ensemble),
            "seal" => Some(Method::Seal),
            "seal_embed" => Some(Method::SealEmbed),
            other => HeuristicKind::from_name(other).map(Method::Heuristic),
        }
    }

    /// The eight heuristics, the ensemble, and plain SEAL.
    pub fn defaults() -> Vec<Method> {
        let mut m: Vec<Method> = HeuristicKind::ALL.iter().map(|&k| Method::Heuristic(k)).collect();
        m.push(Method::Ensemble);
        m.push(Method::Seal);
        m
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl TryFrom<String> for Method {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        Method::from_name(&s).ok_or_else(|| format!("unknown method {s:?}"))
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    Synthetic { model: SyntheticModel, seed: u64 },
    EdgeList { path: PathBuf },
}

impl Default for GraphSource {
    fn default() -> Self {
        GraphSource::Synthetic {
            model: SyntheticModel::BarabasiAlbert { n: 500, m: 3 },
            seed: 1,
        }
    }
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSource::Synthetic { model, seed } => gen_synthetic(*model, *seed),
            GraphSource::EdgeList { path } => Ok(load_edge_list(path)?.graph),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SealOptions {
    /// Skip h selection and use `h = 1`.
    pub force_h1: bool,
    pub label_cap: u32,
    pub embedding_dim: usize,
    /// Reject enclosing subgraphs larger than this.
    pub max_subgraph_nodes: Option<usize>,
}

impl Default for SealOptions {
    fn default() -> Self {
        Self {
            force_h1: false,
            label_cap: DEFAULT_LABEL_CAP,
            embedding_dim: 32,
            max_subgraph_nodes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub split: SplitSpec,
    pub methods: Vec<Method>,
    pub heuristics: HeuristicConfig,
    pub gnn: GnnConfig,
    pub seal: SealOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graph: GraphSource::default(),
            split: SplitSpec::default(),
            methods: Method::defaults(),
            heuristics: HeuristicConfig::default(),
            gnn: GnnConfig::default(),
            seal: SealOptions::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.split.validate()?;
        self.heuristics.validate()?;
        self.gnn.validate()?;
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods selected".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for m in &self.methods {
            if !seen.insert(m) {
                return Err(Error::InvalidParameter(format!("method {m} listed twice")));
            }
        }
        Ok(())
    }
}

/// Returns 2 if Adamic-Adar beats common neighbors on the validation links
/// (strictly), else 1.
pub fn select_h(train_graph: &Graph, validation: &LinkSet, force_h1: bool) -> Result<u32> {
    if force_h1 {
        return Ok(1);
    }
    if !validation.has_both_classes() {
        return Err(Error::Data("h selection needs both classes in the validation set".into()));
    }
    let table = score_pairs(
        train_graph,
        &HeuristicConfig::default(),
        &validation.pairs,
        &[HeuristicKind::CommonNeighbors, HeuristicKind::AdamicAdar],
    )?;
    let cn = auc(&table.column(HeuristicKind::CommonNeighbors).expect("scored"), &validation.labels)?;
    let aa = auc(&table.column(HeuristicKind::AdamicAdar).expect("scored"), &validation.labels)?;
    log::debug!("h selection: AUC(CN) = {cn:.4}, AUC(AA) = {aa:.4}");
    Ok(hop_from_aucs(cn, aa))
}

fn hop_from_aucs(cn: f64, aa: f64) -> u32 {
    if aa > cn {
        2
    } else {
        1
    }
}

/// Spectral embedding of the train graph with the negative training and
/// validation links injected as edges.
pub fn seal_embedding(split: &Split, dim: usize) -> Result<EmbeddingTable> {
    let mut negatives = split.train.negatives();
    negatives.extend(split.validation.negatives());
    spectral_embedding(&negative_injection(&split.train_graph, &negatives)?, dim)
}

/// One classifier input per link, extracted from `g` with the target edge
/// removed.
pub fn seal_inputs(
    g: &Graph,
    links: &LinkSet,
    h: u32,
    opts: &SealOptions,
    embedding: Option<&EmbeddingTable>,
) -> Result<Vec<Example>> {
    let extract = ExtractOptions {
        remove_target_edge: true,
        max_nodes: opts.max_subgraph_nodes,
    };
    links
        .pairs
        .par_iter()
        .zip(&links.labels)
        .map(|(&(u, v), &label)| {
            let sub = extract_enclosing_with(g, u, v, h, &extract)?;
            let info = build_node_info(&sub, opts.label_cap, embedding, None)?;
            Ok(Example {
                input: GraphInput::from_subgraph(&sub, info)?,
                label,
            })
        })
        .collect()
}

/// Probabilities for the test links after training on train/validation.
pub fn seal_scores(
    split: &Split,
    h: u32,
    cfg: &ExperimentConfig,
    embedding: Option<&EmbeddingTable>,
    trial: u64,
) -> Result<Vec<f64>> {
    let g = &split.train_graph;
    let train = seal_inputs(g, &split.train, h, &cfg.seal, embedding)?;
    let val = seal_inputs(g, &split.validation, h, &cfg.seal, embedding)?;
    let test = seal_inputs(g, &split.test, h, &cfg.seal, embedding)?;
    let outcome = gnn::train(&train, &val, &cfg.gnn, cfg.split.seed, trial)?;
    log::info!(
        "trial {trial}: classifier best epoch {} of {}",
        outcome.best_epoch,
        outcome.log.len()
    );
    let inputs: Vec<GraphInput> = test.into_iter().map(|e| e.input).collect();
    gnn::predict_proba(&inputs, &outcome.params)
}

/// Logistic ensemble of all eight heuristics, fit on the validation links
/// scored with their own positive edges removed.
pub fn ensemble_scores(split: &Split, cfg: &HeuristicConfig) -> Result<Vec<f64>> {
    let fit_graph = split.train_graph.without_edges(&split.validation.positives());
    let fit = score_pairs(&fit_graph, cfg, &split.validation.pairs, &HeuristicKind::ALL)?;
    let test = score_pairs(&split.train_graph, cfg, &split.test.pairs, &HeuristicKind::ALL)?;
    ensemble_fit_predict(&fit, &split.validation.labels, &test)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub method: Method,
    pub trial: usize,
    pub auc: Option<f64>,
    pub ap: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub completed: usize,
    pub failed: usize,
    pub auc_mean: Option<f64>,
    pub auc_std: Option<f64>,
    pub ap_mean: Option<f64>,
    pub ap_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    /// Hop count used by each trial, if the subgraph classifier ran.
    pub hops: Vec<Option<u32>>,
    /// Ordered by method (config order), then trial.
    pub rows: Vec<TrialResult>,
    pub summary: Vec<MethodSummary>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "failed".to_string(), |x| format!("{x:.10}"))
}

impl Report {
    pub fn summary_for(&self, method: Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == method)
    }

    /// Per-trial block `method,trial,auc,ap`, a blank line, then the
    /// summary block `method,auc_mean,auc_std,ap_mean,ap_std`. Failed
    /// entries read `failed`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "method,trial,auc,ap")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.method, r.trial, fmt_opt(r.auc), fmt_opt(r.ap))?;
        }
        writeln!(out)?;
        writeln!(out, "method,auc_mean,auc_std,ap_mean,ap_std")?;
        for s in &self.summary {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.method,
                fmt_opt(s.auc_mean),
                fmt_opt(s.auc_std),
                fmt_opt(s.ap_mean),
                fmt_opt(s.ap_std)
            )?;
        }
        Ok(())
    }
}

/// Scores of one method on the test links of `split`.
pub fn method_scores(
    method: Method,
    split: &Split,
    cfg: &ExperimentConfig,
    h: Option<u32>,
    embedding: Option<&EmbeddingTable>,
    trial: u64,
) -> Result<Vec<f64>> {
    match method {
        Method::Heuristic(kind) => {
            let table = score_pairs(&split.train_graph, &cfg.heuristics, &split.test.pairs, &[kind])?;
            Ok(table.column(kind).expect("scored"))
        }
        Method::Ensemble => ensemble_scores(split, &cfg.heuristics),
        Method::Seal | Method::SealEmbed => {
            let h = h.ok_or_else(|| Error::Data("no hop count selected".into()))?;
            let emb = if method == Method::SealEmbed { embedding } else { None };
            if method == Method::SealEmbed && emb.is_none() {
                return Err(Error::Data("embedding unavailable".into()));
            }
            seal_scores(split, h, cfg, emb, trial)
        }
    }
}

struct TrialOutcome {
    h: Option<u32>,
    results: Vec<std::result::Result<(f64, f64), String>>,
}

fn run_trial(g: &Graph, cfg: &ExperimentConfig, trial: usize) -> TrialOutcome {
    let t = trial as u64;
    let split = match split_links(g, &cfg.split, t) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("trial {trial}: split failed: {e}");
            return TrialOutcome {
                h: None,
                results: cfg.methods.iter().map(|_| Err(e.to_string())).collect(),
            };
        }
    };
    let wants_seal = cfg.methods.iter().any(|m| matches!(m, Method::Seal | Method::SealEmbed));
    let h = wants_seal.then(|| {
        select_h(&split.train_graph, &split.validation, cfg.seal.force_h1).map_err(|e| e.to_string())
    });
    let embedding = cfg.methods.contains(&Method::SealEmbed).then(|| {
        seal_embedding(&split, cfg.seal.embedding_dim).map_err(|e| e.to_string())
    });
    let results: Vec<_> = cfg
        .methods
        .iter()
        .map(|&m| {
            let needs_h = matches!(m, Method::Seal | Method::SealEmbed);
            if let (true, Some(Err(e))) = (needs_h, &h) {
                return Err(e.clone());
            }
            if let (Method::SealEmbed, Some(Err(e))) = (m, &embedding) {
                return Err(e.clone());
            }
            let hop = h.as_ref().and_then(|r| r.as_ref().ok().copied());
            let emb = embedding.as_ref().and_then(|r| r.as_ref().ok());
            let evaluate = || -> Result<(f64, f64)> {
                let scores = method_scores(m, &split, cfg, hop, emb, t)?;
                Ok((auc(&scores, &split.test.labels)?, average_precision(&scores, &split.test.labels)?))
            };
            match evaluate() {
                Ok((a, p)) => {
                    log::info!("trial {trial}: {m} auc={a:.4} ap={p:.4}");
                    Ok((a, p))
                }
                Err(e) => {
                    log::warn!("trial {trial}: {m} failed: {e}");
                    Err(e.to_string())
                }
            }
        })
        .collect();
    TrialOutcome {
        h: h.and_then(|r| r.ok()),
        results,
    }
}

/// Runs `cfg.split.trials` independent trials on `g`, `jobs` at a time.
/// Output does not depend on `jobs`.
pub fn run_experiment(g: &Graph, cfg: &ExperimentConfig, jobs: usize) -> Result<Report> {
    cfg.validate()?;
    let trials = cfg.split.trials;
    let outcomes: Vec<TrialOutcome> = if jobs <= 1 {
        (0..trials).map(|t| run_trial(g, cfg, t)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| (0..trials).into_par_iter().map(|t| run_trial(g, cfg, t)).collect())
    };

    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (mi, &method) in cfg.methods.iter().enumerate() {
        let mut aucs = Vec::new();
        let mut aps = Vec::new();
        for (trial, o) in outcomes.iter().enumerate() {
            let row = match &o.results[mi] {
                Ok((a, p)) => {
                    aucs.push(*a);
                    aps.push(*p);
                    TrialResult {
                        method,
                        trial,
                        auc: Some(*a),
                        ap: Some(*p),
                        error: None,
                    }
                }
                Err(e) => TrialResult {
                    method,
                    trial,
                    auc: None,
                    ap: None,
                    error: Some(e.clone()),
                },
            };
            rows.push(row);
        }
        let done = !aucs.is_empty();
        let (am, asd) = mean_std(&aucs);
        let (pm, psd) = mean_std(&aps);
        summary.push(MethodSummary {
            method,
            completed: aucs.len(),
            failed: trials - aucs.len(),
            auc_mean: done.then_some(am),
            auc_std: done.then_some(asd),
            ap_mean: done.then_some(pm),
            ap_std: done.then_some(psd),
        });
    }
    Ok(Report {
        config: cfg.clone(),
        hops: outcomes.iter().map(|o| o.h).collect(),
        rows,
        summary,
    })
}
