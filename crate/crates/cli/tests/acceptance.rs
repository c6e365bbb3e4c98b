//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Set `LINKPRED_ACCEPTANCE_STRICT=1` to exit non-zero when any criterion
//! fails; by default failures are reported and the run continues.

use std::collections::HashMap;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use linkpred_core::decay::{
    count_walks, error_curve, first_meeting_series, verify_lemma1, walk_prob_series,
};
use linkpred_core::gnn::{
    batch_loss_and_grad, forward, gradient_check, Example, GnnConfig, GnnParams, GradCheck, GraphInput,
};
use linkpred_core::graph::{bfs_distances, gen_synthetic, SyntheticModel};
use linkpred_core::heuristics::{
    local_score, rooted_pagerank, simrank, HeuristicConfig, HeuristicKind,
};
use linkpred_core::pipeline::{
    auc, average_precision, run_experiment, ExperimentConfig, GraphSource, Method,
};
use linkpred_core::rng::{stream_rng, Stream};
use linkpred_core::subgraph::{
    build_node_info, drnl_hash, extract_enclosing_with, ExtractOptions,
};
use linkpred_core::{Graph, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<(bool, String), String>;

struct Report {
    failed: Vec<String>,
    only: Vec<String>,
}

impl Report {
    fn run(&mut self, id: &str, name: &str, f: impl FnOnce() -> Outcome) {
        let base = id.trim_end_matches('+');
        if !self.only.is_empty() && !self.only.iter().any(|o| o == base) {
            return;
        }
        let t0 = Instant::now();
        let outcome = f();
        let secs = t0.elapsed().as_secs_f64();
        let (pass, detail) = match outcome {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id} {name}: {verdict} ({detail}; {secs:.1}s)");
        if !pass {
            self.failed.push(id.to_string());
        }
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn is_connected(g: &Graph) -> bool {
    g.node_count() > 0
        && bfs_distances(g, 0, None)
            .map(|d| d.distances.iter().all(Option::is_some))
            .unwrap_or(false)
}

/// Connected Erdős–Rényi graph with `n` nodes, redrawn until connected.
fn connected_er(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    loop {
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n, p }, rng.gen()).unwrap();
        if is_connected(&g) {
            return g;
        }
    }
}

fn distinct_pair(rng: &mut impl Rng, n: usize) -> (NodeId, NodeId) {
    let x = rng.gen_range(0..n);
    let mut y = rng.gen_range(0..n - 1);
    if y >= x {
        y += 1;
    }
    (x, y)
}

/// Labels from enumerating double-radius classes: classes with a smaller
/// radius sum come first, then those with a smaller minimum radius.
fn drnl_oracle(max: u32) -> HashMap<(u32, u32), u64> {
    let mut labels = HashMap::new();
    let mut next = 2;
    for d in 2..=2 * max {
        for lo in 1..=d / 2 {
            let hi = d - lo;
            labels.insert((lo, hi), next);
            labels.insert((hi, lo), next);
            next += 1;
        }
    }
    labels
}

fn criterion_1() -> Outcome {
    let oracle = drnl_oracle(50);
    let mut mismatches = 0;
    for dx in 1..=50 {
        for dy in 1..=50 {
            if drnl_hash(dx, dy) != oracle[&(dx, dy)] {
                mismatches += 1;
            }
        }
    }
    let stated = [((1, 1), 2), ((1, 2), 3), ((1, 3), 4), ((2, 2), 5), ((1, 4), 6), ((2, 3), 7)];
    let stated_ok = stated
        .iter()
        .all(|&((a, b), l)| drnl_hash(a, b) == l && drnl_hash(b, a) == l);
    Ok((
        mismatches == 0 && stated_ok,
        format!("{mismatches} mismatches over 2500 pairs, stated values {}", if stated_ok { "ok" } else { "wrong" }),
    ))
}

fn criterion_2() -> Outcome {
    let mut rng = stream_rng(2, Stream::Generate, 0);
    let (mut walks, mut bad) = (0usize, 0usize);
    for _ in 0..200 {
        let n = rng.gen_range(3..=12);
        let p = rng.gen_range(0.15..0.6);
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n, p }, rng.gen()).map_err(err)?;
        let (x, y) = distinct_pair(&mut rng, n);
        for h in [1, 2] {
            let c = verify_lemma1(&g, x, y, h).map_err(err)?;
            walks += c.walks_checked;
            bad += usize::from(!c.holds());
        }
    }
    Ok((bad == 0, format!("{walks} walks checked, {bad} escaping")))
}

fn criterion_3() -> Outcome {
    let mut rng = stream_rng(3, Stream::Generate, 0);
    let (mut checked, mut bad) = (0usize, 0usize);
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let p = rng.gen_range(0.1..0.9);
        let g = gen_synthetic(SyntheticModel::ErdosRenyi { n, p }, rng.gen()).map_err(err)?;
        let d = g.max_degree() as u128;
        for l in 1..=6u32 {
            for i in 0..n {
                for j in 0..n {
                    checked += 1;
                    if count_walks(&g, i, j, l as usize).map_err(err)? > d.pow(l) {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok((bad == 0, format!("{checked} entries, {bad} violations")))
}

fn criterion_4() -> Outcome {
    let g = gen_synthetic(SyntheticModel::ErdosRenyi { n: 60, p: 0.1 }, 4).map_err(err)?;
    let cfg = HeuristicConfig {
        katz_beta: 0.005,
        ..HeuristicConfig::default()
    };
    let mut rng = stream_rng(4, Stream::Generate, 0);
    let (mut over, mut rising, mut worst) = (0, 0, 0.0f64);
    for _ in 0..20 {
        let pair = distinct_pair(&mut rng, 60);
        let c = error_curve(HeuristicKind::Katz, &g, pair, 1..=5, &cfg).map_err(err)?;
        over += usize::from(!c.within_bounds());
        rising += usize::from(!c.nonincreasing());
        for r in &c.rows {
            if r.bound > 0.0 {
                worst = worst.max(r.abs_error / r.bound);
            }
        }
    }
    Ok((
        over == 0 && rising == 0,
        format!("20 pairs: {over} over the bound, {rising} not nonincreasing, max error/bound {worst:.2e}"),
    ))
}

/// Worst `|(1−α) Σ_{l≤len} α^l walk_prob − [π_x]_y|` over every pair of 50
/// random graphs.
fn pagerank_gap(len: usize) -> Result<(f64, usize), String> {
    let cfg = HeuristicConfig::default();
    let alpha = cfg.pr_alpha;
    let mut rng = stream_rng(5, Stream::Generate, 0);
    let (mut worst, mut pairs) = (0.0f64, 0);
    for _ in 0..50 {
        let n = rng.gen_range(5..=30);
        let p = rng.gen_range(0.15..0.5);
        let g = connected_er(&mut rng, n, p);
        let degrees = g.degrees();
        for x in 0..n {
            let pi = rooted_pagerank(&g, &cfg, x).map_err(err)?;
            for (y, &exact) in pi.iter().enumerate() {
                let series = walk_prob_series(&g, &degrees, x, y, len).map_err(err)?;
                let mut sum = if x == y { 1.0 } else { 0.0 };
                let mut a = 1.0;
                for f in series {
                    a *= alpha;
                    sum += a * f;
                }
                worst = worst.max(((1.0 - alpha) * sum - exact).abs());
                pairs += 1;
            }
        }
    }
    Ok((worst, pairs))
}

fn criterion_5(len: usize) -> Outcome {
    let (worst, pairs) = pagerank_gap(len)?;
    Ok((worst < 1e-6, format!("L={len}, {pairs} pairs, max gap {worst:.3e}, tolerance 1e-6")))
}

fn simrank_gap(len: usize) -> Result<(f64, usize), String> {
    let cfg = HeuristicConfig::default();
    let gamma = cfg.sr_gamma;
    let mut rng = stream_rng(6, Stream::Generate, 0);
    let (mut worst, mut pairs) = (0.0f64, 0);
    for _ in 0..30 {
        let n = rng.gen_range(5..=20);
        let p = rng.gen_range(0.15..0.5);
        let g = connected_er(&mut rng, n, p);
        let degrees = g.degrees();
        let fixed = simrank(&g, &cfg).map_err(err)?;
        for x in 0..n {
            for y in x + 1..n {
                let series = first_meeting_series(&g, &degrees, x, y, len).map_err(err)?;
                let mut sum = 0.0;
                let mut c = 1.0;
                for f in series {
                    c *= gamma;
                    sum += c * f;
                }
                worst = worst.max((sum - fixed.get(x, y)).abs());
                pairs += 1;
            }
        }
    }
    Ok((worst, pairs))
}

fn criterion_6(len: usize) -> Outcome {
    let (worst, pairs) = simrank_gap(len)?;
    Ok((worst < 1e-4, format!("L={len}, {pairs} pairs, max gap {worst:.3e}, tolerance 1e-4")))
}

fn criterion_7() -> Outcome {
    let keep = ExtractOptions {
        remove_target_edge: false,
        max_nodes: None,
    };
    let mut rng = stream_rng(7, Stream::Generate, 0);
    let (mut checked, mut bad) = (0usize, 0usize);
    for i in 0..50 {
        let n = rng.gen_range(10..=60);
        let g = match i % 3 {
            0 => gen_synthetic(SyntheticModel::ErdosRenyi { n, p: rng.gen_range(0.05..0.3) }, rng.gen()),
            1 => gen_synthetic(SyntheticModel::BarabasiAlbert { n, m: rng.gen_range(1..=3) }, rng.gen()),
            _ => gen_synthetic(SyntheticModel::WattsStrogatz { n, k: 4, beta: 0.2 }, rng.gen()),
        }
        .map_err(err)?;
        for _ in 0..10 {
            let (x, y) = distinct_pair(&mut rng, n);
            for (kinds, h) in [
                (&[HeuristicKind::CommonNeighbors, HeuristicKind::PreferentialAttachment][..], 1),
                (&[HeuristicKind::AdamicAdar, HeuristicKind::ResourceAllocation][..], 2),
            ] {
                let sub = extract_enclosing_with(&g, x, y, h, &keep).map_err(err)?;
                for &k in kinds {
                    let full = local_score(k, &g, x, y).map_err(err)?;
                    let local = local_score(k, &sub.graph, sub.target.0, sub.target.1).map_err(err)?;
                    checked += 1;
                    if full != local {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok((bad == 0, format!("{checked} scores, {bad} differ")))
}

const FD_STEP: f64 = 1e-5;

/// Parameters with randomized biases and four labelled subgraphs of a
/// random graph with at most 10 nodes.
fn gradient_probe(seed: u64) -> Result<(GnnParams, Vec<Example>), String> {
    let cfg = GnnConfig::default();
    let label_cap = 6;
    let mut rng = stream_rng(seed, Stream::Generate, 8);
    let n = rng.gen_range(6..=10);
    let g = connected_er(&mut rng, n, 0.35);
    let probe: Vec<Example> = (0..4)
        .map(|i| {
            let (x, y) = distinct_pair(&mut rng, n);
            let h = rng.gen_range(1..=2);
            let sub = extract_enclosing_with(&g, x, y, h, &ExtractOptions::default())?;
            let info = build_node_info(&sub, label_cap, None, None)?;
            Ok(Example {
                input: GraphInput::from_subgraph(&sub, info)?,
                label: i % 2 == 0,
            })
        })
        .collect::<linkpred_core::Result<_>>()
        .map_err(err)?;
    let mut p = GnnParams::init(&cfg, label_cap as usize + 1, cfg.smallest_k().max(10), seed).map_err(err)?;
    p.randomize_biases(seed);
    Ok((p, probe))
}

fn criterion_8() -> Outcome {
    let mut worst: Option<(u64, GradCheck)> = None;
    let mut params_checked = 0;
    for seed in 0..5u64 {
        let (p, probe) = gradient_probe(seed)?;
        let c = gradient_check(&p, &probe).map_err(err)?;
        params_checked += c.checked;
        if worst.is_none_or(|(_, w)| c.max_rel_error > w.max_rel_error) {
            worst = Some((seed, c));
        }
    }
    let (seed, w) = worst.expect("five seeds ran");
    Ok((
        w.max_rel_error < 1e-4,
        format!(
            "5 seeds, {params_checked} parameters, max relative error {:.2e} (seed {seed}, index {}, analytic {:.6e}, numeric {:.6e})",
            w.max_rel_error, w.worst_index, w.analytic, w.numeric
        ),
    ))
}

/// Mean cross-entropy of the probe, from the logits alone.
fn probe_loss(probe: &[Example], inputs: &[GraphInput], p: &GnnParams) -> f64 {
    let logits = forward(inputs, p).unwrap();
    let total: f64 = logits
        .iter()
        .zip(probe)
        .map(|(z, e)| {
            let m = z[0].max(z[1]);
            let lse = m + ((z[0] - m).exp() + (z[1] - m).exp()).ln();
            lse - z[usize::from(e.label)]
        })
        .sum();
    total / probe.len() as f64
}

/// Same probes and step; a parameter only counts as wrong when it misses
/// the relative tolerance and its discrepancy is also larger than the
/// rounding floor `|L| · 2^-52 / step` of the difference quotient.
fn criterion_8_roundoff() -> Outcome {
    let (mut over_tol, mut wrong, mut checked) = (0, 0, 0);
    for seed in 0..5u64 {
        let (p, probe) = gradient_probe(seed)?;
        let refs: Vec<&Example> = probe.iter().collect();
        let inputs: Vec<GraphInput> = probe.iter().map(|e| e.input.clone()).collect();
        let (loss, analytic) = batch_loss_and_grad(&refs, &p).map_err(err)?;
        let floor = loss.abs() * f64::EPSILON / FD_STEP;
        let mut q = p.clone();
        for (i, &a) in analytic.iter().enumerate() {
            let orig = q.values[i];
            q.values[i] = orig + FD_STEP;
            let up = probe_loss(&probe, &inputs, &q);
            q.values[i] = orig - FD_STEP;
            let down = probe_loss(&probe, &inputs, &q);
            q.values[i] = orig;
            let n = (up - down) / (2.0 * FD_STEP);
            let diff = (a - n).abs();
            checked += 1;
            if diff > 1e-4 * a.abs().max(n.abs()).max(1e-8) {
                over_tol += 1;
                if diff > floor {
                    wrong += 1;
                }
            }
        }
    }
    Ok((
        wrong == 0,
        format!("{checked} parameters, {over_tol} over the relative tolerance, {wrong} of them beyond the rounding floor"),
    ))
}

fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                den += 1.0;
                num += match scores[i].partial_cmp(&scores[j]).unwrap() {
                    std::cmp::Ordering::Greater => 1.0,
                    std::cmp::Ordering::Equal => 0.5,
                    std::cmp::Ordering::Less => 0.0,
                };
            }
        }
    }
    num / den
}

/// Precision at each positive's rank, where ties rank in input order.
fn direct_ap(scores: &[f64], labels: &[bool]) -> f64 {
    let rank = |i: usize| {
        1 + (0..scores.len())
            .filter(|&j| scores[j] > scores[i] || (scores[j] == scores[i] && j < i))
            .count()
    };
    let positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut sum = 0.0;
    for &i in &positives {
        let r = rank(i);
        let hits = positives.iter().filter(|&&j| rank(j) <= r).count();
        sum += hits as f64 / r as f64;
    }
    sum / positives.len() as f64
}

fn criterion_9() -> Outcome {
    let mut rng = stream_rng(9, Stream::Generate, 0);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let len = rng.gen_range(2..=100);
        let mut labels: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
        labels[0] = true;
        labels[1] = false;
        labels.shuffle(&mut rng);
        let scores: Vec<f64> = if i % 2 == 0 {
            (0..len).map(|_| rng.gen_range(0..6) as f64).collect()
        } else {
            (0..len).map(|_| rng.gen::<f64>()).collect()
        };
        let a = auc(&scores, &labels).map_err(err)?;
        let p = average_precision(&scores, &labels).map_err(err)?;
        worst = worst
            .max((a - brute_auc(&scores, &labels)).abs())
            .max((p - direct_ap(&scores, &labels)).abs());
    }
    Ok((worst <= 1e-12, format!("1000 instances, max difference {worst:.2e}")))
}

fn criterion_10() -> Outcome {
    let mut cfg = ExperimentConfig {
        graph: GraphSource::Synthetic {
            model: SyntheticModel::BarabasiAlbert { n: 500, m: 3 },
            seed: 1,
        },
        methods: vec![
            Method::Heuristic(HeuristicKind::CommonNeighbors),
            Method::Heuristic(HeuristicKind::AdamicAdar),
            Method::Seal,
        ],
        ..ExperimentConfig::default()
    };
    cfg.split.trials = 5;
    let g = cfg.graph.load().map_err(err)?;
    let t0 = Instant::now();
    let report = run_experiment(&g, &cfg, 1).map_err(err)?;
    let per_trial = t0.elapsed() / 5;
    let mean = |m: Method| {
        report
            .summary_for(m)
            .and_then(|s| s.auc_mean)
            .ok_or_else(|| format!("{m} has no completed trials"))
    };
    let cn = mean(Method::Heuristic(HeuristicKind::CommonNeighbors))?;
    let aa = mean(Method::Heuristic(HeuristicKind::AdamicAdar))?;
    let seal = mean(Method::Seal)?;
    let pass = seal >= cn.max(aa) - 0.02 && seal >= 0.80 && per_trial < Duration::from_secs(600);
    Ok((
        pass,
        format!(
            "hops {:?}, mean AUC seal {seal:.4} cn {cn:.4} aa {aa:.4}, {:.0}s per trial",
            report.hops,
            per_trial.as_secs_f64()
        ),
    ))
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let run = |args: &[&str]| -> Result<(), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_linkpred"))
            .current_dir(dir.path())
            .args(args)
            .output()
            .map_err(err)?;
        if out.status.success() {
            Ok(())
        } else {
            Err(String::from_utf8_lossy(&out.stderr).trim().to_string())
        }
    };
    run(&["generate", "--model", "barabasi-albert", "--n", "150", "--m", "3", "--seed", "11", "--out", "g.txt"])?;
    let experiment = |out: &'static str| {
        [
            "experiment", "--graph", "g.txt", "--seed", "7", "--trials", "2", "--epochs", "3",
            "--methods", "cn,jaccard,pa,aa,ra,katz,pr,sr,ensemble,seal", "--out", out,
        ]
    };
    run(&experiment("first.csv"))?;
    run(&experiment("second.csv"))?;
    let a = fs::read(dir.path().join("first.csv")).map_err(err)?;
    let b = fs::read(dir.path().join("second.csv")).map_err(err)?;
    Ok((a == b, format!("two runs, {} and {} bytes, identical: {}", a.len(), b.len(), a == b)))
}

fn main() {
    // libtest flags such as --list are passed to every target
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let only = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut r = Report {
        failed: Vec::new(),
        only,
    };
    r.run("1", "DRNL hash", criterion_1);
    r.run("2", "walks stay inside enclosing subgraphs", criterion_2);
    r.run("3", "walk counts bounded by d^l", criterion_3);
    r.run("4", "Katz truncation error", criterion_4);
    r.run("5", "rooted PageRank walk sum", || criterion_5(50));
    r.run("5+", "rooted PageRank walk sum, long horizon", || criterion_5(150));
    r.run("6", "SimRank first-meeting sum", || criterion_6(25));
    r.run("6+", "SimRank first-meeting sum, long horizon", || criterion_6(120));
    r.run("7", "local heuristics inside subgraphs", criterion_7);
    r.run("8", "GNN gradient check", criterion_8);
    r.run("8+", "GNN gradient check, discrepancies beyond rounding", criterion_8_roundoff);
    r.run("9", "AUC and AP oracles", criterion_9);
    r.run("10", "subgraph classifier end to end", criterion_10);
    r.run("11", "experiment determinism", criterion_11);
    if r.failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed {}", r.failed.join(", "));
        if std::env::var_os("LINKPRED_ACCEPTANCE_STRICT").is_some() {
            std::process::exit(1);
        }
    }
}
