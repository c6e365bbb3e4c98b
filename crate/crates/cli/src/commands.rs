//! One function per subcommand. Each resolves its configuration (flags over
//! file over defaults), validates inputs, does the work, and only then
//! writes its outputs.

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use linkpred_core::decay::{error_curve, verify_lemma1, LEMMA1_MAX_NODES};
use linkpred_core::embed::{negative_injection, spectral_embedding, EmbeddingTable};
use linkpred_core::gnn::{self, Example, GnnConfig, GraphInput};
use linkpred_core::graph::{gen_synthetic, load_edge_list, write_edge_list, EdgeListLoad, SyntheticModel};
use linkpred_core::heuristics::{score_pairs, HeuristicConfig, HeuristicKind, ScoreTable};
use linkpred_core::pipeline::{
    auc, average_precision, run_experiment, select_h, split_links, ExperimentConfig, GraphSource, LinkSet,
    Method, SealOptions, SplitSpec,
};
use linkpred_core::rng::{stream_rng, Stream};
use linkpred_core::subgraph::{
    build_node_info, extract_enclosing_with, read_records, write_records, ExtractOptions, SubgraphRecord,
};

use crate::output::{load_config, read_text, require_files, with_header, Outputs, Provenance};
use crate::{
    DecayArgs, EvalArgs, ExperimentArgs, ExtractArgs, GenerateArgs, HeuristicsArgs, ModelName, SplitArgs,
    TrainArgs, UsageError,
};

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load_graph(path: &Path) -> Result<EdgeListLoad> {
    load_edge_list(path).with_context(|| format!("loading {}", path.display()))
}

fn load_links(path: &Path) -> Result<LinkSet> {
    LinkSet::read_csv(&read_text(path)?, None).with_context(|| format!("reading {}", path.display()))
}

fn parse_kind(name: &str) -> Result<HeuristicKind> {
    HeuristicKind::from_name(name.trim()).ok_or_else(|| usage(format!("unknown heuristic {name:?}")))
}

// ---------------------------------------------------------------- generate

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub model: SyntheticModel,
    pub seed: u64,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            model: SyntheticModel::BarabasiAlbert { n: 500, m: 3 },
            seed: 1,
        }
    }
}

fn model_size(m: &SyntheticModel) -> usize {
    match *m {
        SyntheticModel::ErdosRenyi { n, .. }
        | SyntheticModel::BarabasiAlbert { n, .. }
        | SyntheticModel::WattsStrogatz { n, .. } => n,
    }
}

fn apply_model_flags(mut model: SyntheticModel, a: &GenerateArgs) -> Result<SyntheticModel> {
    if let Some(name) = a.model {
        let n = model_size(&model);
        model = match (name, model) {
            (ModelName::ErdosRenyi, m @ SyntheticModel::ErdosRenyi { .. })
            | (ModelName::BarabasiAlbert, m @ SyntheticModel::BarabasiAlbert { .. })
            | (ModelName::WattsStrogatz, m @ SyntheticModel::WattsStrogatz { .. }) => m,
            (ModelName::ErdosRenyi, _) => SyntheticModel::ErdosRenyi { n, p: 0.05 },
            (ModelName::BarabasiAlbert, _) => SyntheticModel::BarabasiAlbert { n, m: 3 },
            (ModelName::WattsStrogatz, _) => SyntheticModel::WattsStrogatz { n, k: 4, beta: 0.1 },
        };
    }
    let misfit = |flag: &str| usage(format!("--{flag} does not apply to the selected model"));
    match &mut model {
        SyntheticModel::ErdosRenyi { n, p } => {
            *n = a.n.unwrap_or(*n);
            *p = a.p.unwrap_or(*p);
            if a.m.is_some() {
                return Err(misfit("m"));
            }
            if a.k.is_some() {
                return Err(misfit("k"));
            }
            if a.beta.is_some() {
                return Err(misfit("beta"));
            }
        }
        SyntheticModel::BarabasiAlbert { n, m } => {
            *n = a.n.unwrap_or(*n);
            *m = a.m.unwrap_or(*m);
            if a.p.is_some() {
                return Err(misfit("p"));
            }
            if a.k.is_some() {
                return Err(misfit("k"));
            }
            if a.beta.is_some() {
                return Err(misfit("beta"));
            }
        }
        SyntheticModel::WattsStrogatz { n, k, beta } => {
            *n = a.n.unwrap_or(*n);
            *k = a.k.unwrap_or(*k);
            *beta = a.beta.unwrap_or(*beta);
            if a.p.is_some() {
                return Err(misfit("p"));
            }
            if a.m.is_some() {
                return Err(misfit("m"));
            }
        }
    }
    Ok(model)
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let mut cfg: GenerateConfig = load_config(a.common.config.as_deref())?;
    cfg.model = apply_model_flags(cfg.model, &a)?;
    cfg.seed = a.common.seed.unwrap_or(cfg.seed);
    let prov = Provenance::new("generate", &cfg, cfg.seed)?;
    let g = gen_synthetic(cfg.model, cfg.seed)?;
    let mut out = Outputs::new();
    out.add(&a.out, &{
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g, &[prov.line()])?;
        buf
    })?;
    out.commit()?;
    eprintln!("generated {} nodes, {} edges", g.node_count(), g.edge_count());
    Ok(())
}

// ------------------------------------------------------------------- split

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub split: SplitSpec,
    pub trial: u64,
}

pub fn split(a: SplitArgs) -> Result<()> {
    let mut cfg: SplitConfig = load_config(a.common.config.as_deref())?;
    cfg.split.seed = a.common.seed.unwrap_or(cfg.split.seed);
    cfg.split.test_fraction = a.test_fraction.unwrap_or(cfg.split.test_fraction);
    cfg.split.validation_fraction_of_train = a.val_fraction.unwrap_or(cfg.split.validation_fraction_of_train);
    cfg.trial = a.trial.unwrap_or(cfg.trial);
    cfg.split.validate()?;
    require_files([a.graph.as_path()])?;
    if !a.out_dir.is_dir() {
        return Err(usage(format!("output directory {} does not exist", a.out_dir.display())));
    }
    let prov = Provenance::new("split", &cfg, cfg.split.seed)?;
    let loaded = load_graph(&a.graph)?;
    if !loaded.ids.is_identity() {
        log::warn!("node labels were renumbered; outputs use internal ids 0..n");
    }
    let s = split_links(&loaded.graph, &cfg.split, cfg.trial)?;
    let mut out = Outputs::new();
    let mut graph_buf = Vec::new();
    write_edge_list(&mut graph_buf, &s.train_graph, &[prov.line()])?;
    out.add(&a.out_dir.join("train_graph.txt"), &graph_buf)?;
    for (set, name) in [(&s.train, "train.csv"), (&s.validation, "validation.csv"), (&s.test, "test.csv")] {
        out.add(&a.out_dir.join(name), &with_header(&prov, |b| set.write_csv(b))?)?;
    }
    out.commit()?;
    eprintln!(
        "train graph {} edges; links: train {}, validation {}, test {}",
        s.train_graph.edge_count(),
        s.train.len(),
        s.validation.len(),
        s.test.len()
    );
    Ok(())
}

// -------------------------------------------------------------- heuristics

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeuristicsConfig {
    pub heuristics: HeuristicConfig,
    pub kinds: Vec<HeuristicKind>,
    pub seed: u64,
}

impl Default for HeuristicsConfig {
    fn default() -> Self {
        Self {
            heuristics: HeuristicConfig::default(),
            kinds: HeuristicKind::ALL.to_vec(),
            seed: 1,
        }
    }
}

pub fn heuristics(a: HeuristicsArgs) -> Result<()> {
    let mut cfg: HeuristicsConfig = load_config(a.common.config.as_deref())?;
    cfg.seed = a.common.seed.unwrap_or(cfg.seed);
    if !a.heuristic.is_empty() {
        cfg.kinds = a.heuristic.iter().map(|s| parse_kind(s)).collect::<Result<_>>()?;
    }
    let h = &mut cfg.heuristics;
    h.katz_beta = a.katz_beta.unwrap_or(h.katz_beta);
    h.pr_alpha = a.pr_alpha.unwrap_or(h.pr_alpha);
    h.sr_gamma = a.sr_gamma.unwrap_or(h.sr_gamma);
    cfg.heuristics.validate()?;
    if cfg.kinds.is_empty() {
        return Err(usage("no heuristics selected"));
    }
    require_files([a.graph.as_path(), a.links.as_path()])?;
    let prov = Provenance::new("heuristics", &cfg, cfg.seed)?;
    let g = load_graph(&a.graph)?.graph;
    let links = load_links(&a.links)?;
    let table = score_pairs(&g, &cfg.heuristics, &links.pairs, &cfg.kinds)?;
    let mut out = Outputs::new();
    out.add(&a.out, &with_header(&prov, |b| table.write_csv(b))?)?;
    out.commit()?;
    eprintln!("scored {} pairs with {} heuristic(s)", table.len(), cfg.kinds.len());
    Ok(())
}

// ------------------------------------------------------------- decay-study

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub heuristic: HeuristicKind,
    pub heuristics: HeuristicConfig,
    /// Inclusive hop range.
    pub hops: [u32; 2],
    pub pair: Option<(usize, usize)>,
    pub seed: u64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            heuristic: HeuristicKind::Katz,
            heuristics: HeuristicConfig::default(),
            hops: [1, 5],
            pair: None,
            seed: 1,
        }
    }
}

fn parse_hops(s: &str) -> Result<[u32; 2]> {
    let bad = || usage(format!("hop range {s:?} must look like 1..5 or 3"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok([lo, hi])
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let bad = || usage(format!("pair {s:?} must look like x,y"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

pub fn decay_study(a: DecayArgs) -> Result<()> {
    let mut cfg: DecayConfig = load_config(a.common.config.as_deref())?;
    cfg.seed = a.common.seed.unwrap_or(cfg.seed);
    if let Some(k) = &a.heuristic {
        cfg.heuristic = parse_kind(k)?;
    }
    let h = &mut cfg.heuristics;
    h.katz_beta = a.beta.unwrap_or(h.katz_beta);
    h.pr_alpha = a.alpha.unwrap_or(h.pr_alpha);
    h.sr_gamma = a.gamma.unwrap_or(h.sr_gamma);
    if let Some(r) = &a.h {
        cfg.hops = parse_hops(r)?;
    }
    if let Some(p) = &a.pair {
        cfg.pair = Some(parse_pair(p)?);
    }
    cfg.heuristics.validate()?;
    if !matches!(
        cfg.heuristic,
        HeuristicKind::Katz | HeuristicKind::RootedPageRank | HeuristicKind::SimRank
    ) {
        return Err(usage(format!("{} is not a decaying heuristic; use katz, pr, or sr", cfg.heuristic)));
    }
    require_files([a.graph.as_path()])?;
    let g = load_graph(&a.graph)?.graph;
    let n = g.node_count();
    if n < 2 {
        bail!(linkpred_core::Error::Data("graph needs two nodes".into()));
    }
    let pair = match cfg.pair {
        Some(p) => p,
        None => {
            let mut rng = stream_rng(cfg.seed, Stream::Generate, 0);
            let x = rng.gen_range(0..n);
            let y = (x + rng.gen_range(1..n)) % n;
            (x, y)
        }
    };
    cfg.pair = Some(pair);
    let prov = Provenance::new("decay-study", &cfg, cfg.seed)?;
    let hops: RangeInclusive<u32> = cfg.hops[0]..=cfg.hops[1];
    let curve = error_curve(cfg.heuristic, &g, pair, hops.clone(), &cfg.heuristics)?;
    eprintln!(
        "{} on ({},{}): within bounds {}, nonincreasing {}",
        cfg.heuristic,
        pair.0,
        pair.1,
        curve.within_bounds(),
        curve.nonincreasing()
    );
    if n <= LEMMA1_MAX_NODES {
        for h in hops {
            let check = verify_lemma1(&g, pair.0, pair.1, h)?;
            eprintln!(
                "h={h}: {} walks checked, all inside the enclosing subgraph: {}",
                check.walks_checked,
                check.holds()
            );
            if let Some(walk) = check.counterexample {
                bail!(linkpred_core::Error::CheckFailed(format!(
                    "walk {walk:?} leaves the {h}-hop enclosing subgraph"
                )));
            }
        }
    }
    if !curve.within_bounds() {
        bail!(linkpred_core::Error::CheckFailed(format!(
            "truncation error exceeds the decay bound for {} on ({},{})",
            cfg.heuristic, pair.0, pair.1
        )));
    }
    let mut out = Outputs::new();
    out.add(
        &a.out,
        &with_header(&prov, |b| {
            use std::io::Write;
            writeln!(b, "# heuristic={} pair={},{}", cfg.heuristic, pair.0, pair.1)?;
            curve.write_csv(b)
        })?,
    )?;
    out.commit()
}

// ----------------------------------------------------------------- extract

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractConfig {
    /// Fixed hop count; chosen from validation links when absent.
    pub hop: Option<u32>,
    pub seal: SealOptions,
    pub spectral: bool,
    pub seed: u64,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            hop: None,
            seal: SealOptions::default(),
            spectral: false,
            seed: 1,
        }
    }
}

pub fn extract(a: ExtractArgs) -> Result<()> {
    let mut cfg: ExtractConfig = load_config(a.common.config.as_deref())?;
    cfg.seed = a.common.seed.unwrap_or(cfg.seed);
    cfg.hop = a.h.or(cfg.hop);
    cfg.seal.force_h1 |= a.force_h1;
    cfg.seal.label_cap = a.label_cap.unwrap_or(cfg.seal.label_cap);
    cfg.seal.embedding_dim = a.embedding_dim.unwrap_or(cfg.seal.embedding_dim);
    cfg.spectral |= a.spectral;
    if cfg.hop == Some(0) {
        return Err(usage("--h must be at least 1"));
    }
    if cfg.hop.is_none() && !cfg.seal.force_h1 && a.validation.is_none() {
        return Err(usage("give --h, --force-h1, or --validation to choose the hop count"));
    }
    if cfg.spectral && a.inject.is_empty() {
        log::warn!("spectral embedding without --inject negatives");
    }
    let mut inputs = vec![a.graph.as_path(), a.links.as_path()];
    inputs.extend(a.validation.as_deref());
    inputs.extend(a.embedding.as_deref());
    inputs.extend(a.inject.iter().map(PathBuf::as_path));
    require_files(inputs)?;

    let loaded = load_graph(&a.graph)?;
    let g = &loaded.graph;
    let links = load_links(&a.links)?;
    let h = match (cfg.hop, cfg.seal.force_h1) {
        (Some(h), _) => h,
        (None, true) => 1,
        (None, false) => {
            let val = load_links(a.validation.as_deref().expect("checked above"))?;
            select_h(g, &val, false)?
        }
    };
    cfg.hop = Some(h);
    let embedding = if let Some(path) = &a.embedding {
        Some(EmbeddingTable::read_csv(&read_text(path)?, &loaded.ids)?)
    } else if cfg.spectral {
        let mut negatives = Vec::new();
        for p in &a.inject {
            negatives.extend(load_links(p)?.negatives());
        }
        Some(spectral_embedding(&negative_injection(g, &negatives)?, cfg.seal.embedding_dim)?)
    } else {
        None
    };
    let prov = Provenance::new("extract", &cfg, cfg.seed)?;
    let opts = ExtractOptions {
        remove_target_edge: true,
        max_nodes: cfg.seal.max_subgraph_nodes,
    };
    let records = links
        .pairs
        .par_iter()
        .zip(&links.labels)
        .map(|(&(u, v), &label)| {
            let sub = extract_enclosing_with(g, u, v, h, &opts)?;
            let info = build_node_info(&sub, cfg.seal.label_cap, embedding.as_ref(), None)?;
            Ok(SubgraphRecord {
                sub,
                class: Some(label),
                features: Some(info.matrix),
            })
        })
        .collect::<linkpred_core::Result<Vec<_>>>()?;
    let mut out = Outputs::new();
    out.add(&a.out, &with_header(&prov, |b| write_records(b, &records))?)?;
    out.commit()?;
    eprintln!("extracted {} subgraphs with h={h}", records.len());
    Ok(())
}

// ------------------------------------------------------------------- train

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub gnn: GnnConfig,
    pub seed: u64,
    pub trial: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            gnn: GnnConfig::default(),
            seed: 1,
            trial: 0,
        }
    }
}

fn load_examples(path: &Path) -> Result<Vec<Example>> {
    let records = read_records(&read_text(path)?).with_context(|| format!("reading {}", path.display()))?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let label = r
                .class
                .ok_or_else(|| linkpred_core::Error::Data(format!("{}: record {i} has no class", path.display())))?;
            let features = r.features.ok_or_else(|| {
                linkpred_core::Error::Data(format!("{}: record {i} has no features", path.display()))
            })?;
            Ok(Example {
                input: GraphInput::new(r.sub.graph, features, r.sub.target)?,
                label,
            })
        })
        .collect()
}

pub fn train(a: TrainArgs) -> Result<()> {
    let mut cfg: TrainConfig = load_config(a.common.config.as_deref())?;
    cfg.seed = a.common.seed.unwrap_or(cfg.seed);
    cfg.trial = a.trial.unwrap_or(cfg.trial);
    cfg.gnn.epochs = a.epochs.unwrap_or(cfg.gnn.epochs);
    cfg.gnn.learning_rate = a.lr.unwrap_or(cfg.gnn.learning_rate);
    cfg.gnn.batch_size = a.batch_size.unwrap_or(cfg.gnn.batch_size);
    cfg.gnn.validate()?;
    require_files([a.train.as_path(), a.val.as_path()])?;
    let prov = Provenance::new("train", &cfg, cfg.seed)?;
    let train_set = load_examples(&a.train)?;
    let val_set = load_examples(&a.val)?;
    let outcome = gnn::train(&train_set, &val_set, &cfg.gnn, cfg.seed, cfg.trial)?;
    let mut out = Outputs::new();
    out.add(
        &a.out,
        &with_header(&prov, |b| {
            gnn::write_checkpoint(b, &outcome.params).map_err(std::io::Error::other)
        })?,
    )?;
    if let Some(log_path) = &a.log {
        out.add(log_path, &with_header(&prov, |b| outcome.write_log(b))?)?;
    }
    out.commit()?;
    eprintln!(
        "trained {} epochs, kept epoch {} (k = {})",
        outcome.log.len(),
        outcome.best_epoch,
        outcome.params.k
    );
    Ok(())
}

// -------------------------------------------------------------------- eval

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub columns: Vec<HeuristicKind>,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            columns: Vec::new(),
            seed: 1,
        }
    }
}

fn score_table_metrics(table: &ScoreTable, links: &LinkSet, kinds: &[HeuristicKind]) -> Result<Vec<(String, f64, f64)>> {
    let label: HashMap<(usize, usize), bool> = links.pairs.iter().copied().zip(links.labels.iter().copied()).collect();
    let labels = table
        .rows
        .iter()
        .map(|r| {
            label
                .get(&(r.u.min(r.v), r.u.max(r.v)))
                .copied()
                .ok_or_else(|| linkpred_core::Error::Data(format!("pair ({},{}) has no label", r.u, r.v)))
        })
        .collect::<linkpred_core::Result<Vec<bool>>>()?;
    if labels.len() != links.len() {
        bail!(linkpred_core::Error::Data(format!(
            "score table has {} rows, link set {}",
            labels.len(),
            links.len()
        )));
    }
    let kinds: Vec<HeuristicKind> = if kinds.is_empty() { table.kinds.clone() } else { kinds.to_vec() };
    kinds
        .iter()
        .map(|&k| {
            let scores = table
                .column(k)
                .ok_or_else(|| usage(format!("score table has no {k} column")))?;
            Ok((k.name().to_string(), auc(&scores, &labels)?, average_precision(&scores, &labels)?))
        })
        .collect()
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let mut cfg: EvalConfig = load_config(a.common.config.as_deref())?;
    cfg.seed = a.common.seed.unwrap_or(cfg.seed);
    if !a.column.is_empty() {
        cfg.columns = a.column.iter().map(|s| parse_kind(s)).collect::<Result<_>>()?;
    }
    let prov = Provenance::new("eval", &cfg, cfg.seed)?;
    let mut out = Outputs::new();
    let rows = match (&a.scores, &a.model) {
        (Some(scores), None) => {
            let links_path = a.links.as_deref().expect("clap requires --links");
            require_files([scores.as_path(), links_path])?;
            let table = ScoreTable::read_csv(&read_text(scores)?)?;
            score_table_metrics(&table, &load_links(links_path)?, &cfg.columns)?
        }
        (None, Some(model)) => {
            let records = a.records.as_deref().expect("clap requires --records");
            require_files([model.as_path(), records])?;
            let params = gnn::read_checkpoint(&read_text(model)?)?;
            let examples = load_examples(records)?;
            let labels: Vec<bool> = examples.iter().map(|e| e.label).collect();
            let inputs: Vec<GraphInput> = examples.into_iter().map(|e| e.input).collect();
            let probs = gnn::predict_proba(&inputs, &params)?;
            if let Some(path) = &a.predictions {
                out.add(
                    path,
                    &with_header(&prov, |b| {
                        use std::io::Write;
                        writeln!(b, "index,label,probability")?;
                        for (i, (p, l)) in probs.iter().zip(&labels).enumerate() {
                            writeln!(b, "{i},{},{p:e}", u8::from(*l))?;
                        }
                        Ok(())
                    })?,
                )?;
            }
            vec![("seal".to_string(), auc(&probs, &labels)?, average_precision(&probs, &labels)?)]
        }
        _ => return Err(usage("give either --scores with --links, or --model with --records")),
    };
    let report = with_header(&prov, |b| {
        use std::io::Write;
        writeln!(b, "method,auc,ap")?;
        for (name, auc, ap) in &rows {
            writeln!(b, "{name},{auc:.10},{ap:.10}")?;
        }
        Ok(())
    })?;
    match &a.out {
        Some(path) => {
            out.add(path, &report)?;
            out.commit()?;
        }
        None => {
            out.commit()?;
            print!("{}", String::from_utf8_lossy(&report));
        }
    }
    Ok(())
}

// -------------------------------------------------------------- experiment

pub fn experiment(a: ExperimentArgs) -> Result<()> {
    let mut cfg: ExperimentConfig = load_config(a.common.config.as_deref())?;
    cfg.split.seed = a.common.seed.unwrap_or(cfg.split.seed);
    cfg.split.trials = a.trials.unwrap_or(cfg.split.trials);
    cfg.gnn.epochs = a.epochs.unwrap_or(cfg.gnn.epochs);
    cfg.seal.force_h1 |= a.force_h1;
    if let Some(path) = &a.graph {
        cfg.graph = GraphSource::EdgeList { path: path.clone() };
    }
    if !a.methods.is_empty() {
        cfg.methods = a
            .methods
            .iter()
            .map(|s| Method::from_name(s.trim()).ok_or_else(|| usage(format!("unknown method {s:?}"))))
            .collect::<Result<_>>()?;
    }
    if a.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    cfg.validate()?;
    if let GraphSource::EdgeList { path } = &cfg.graph {
        require_files([path.as_path()])?;
    }
    let prov = Provenance::new("experiment", &cfg, cfg.split.seed)?;
    let g = cfg.graph.load()?;
    let report = run_experiment(&g, &cfg, a.jobs)?;
    let mut out = Outputs::new();
    out.add(&a.out, &with_header(&prov, |b| report.write_csv(b))?)?;
    if let Some(path) = &a.json {
        let doc = serde_json::json!({ "provenance": prov, "report": report });
        let mut text = serde_json::to_vec_pretty(&doc)?;
        text.push(b'\n');
        out.add(path, &text)?;
    }
    out.commit()?;
    for s in &report.summary {
        match (s.auc_mean, s.auc_std) {
            (Some(m), Some(sd)) => eprintln!("{:<10} AUC {m:.4} ± {sd:.4} ({} trials)", s.method.name(), s.completed),
            _ => eprintln!("{:<10} failed in every trial", s.method.name()),
        }
    }
    Ok(())
}
