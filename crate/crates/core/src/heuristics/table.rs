//! Batch scoring of node pairs and the score-table CSV format.

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;

use super::{
    check_pair, local_score, rooted_pagerank, simrank, HeuristicConfig, HeuristicKind, KatzIndex,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub u: NodeId,
    pub v: NodeId,
    /// One score per entry of [`ScoreTable::kinds`].
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub kinds: Vec<HeuristicKind>,
    pub rows: Vec<ScoreRow>,
}

impl ScoreTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, kind: HeuristicKind) -> Option<Vec<f64>> {
        let idx = self.kinds.iter().position(|&k| k == kind)?;
        Some(self.rows.iter().map(|r| r.scores[idx]).collect())
    }

    pub fn features(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.scores.clone()).collect()
    }

    /// Header `u,v,<kind names>`; scores carry ten significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "u,v")?;
        for k in &self.kinds {
            write!(out, ",{}", k.name())?;
        }
        writeln!(out)?;
        for r in &self.rows {
            write!(out, "{},{}", r.u, r.v)?;
            for s in &r.scores {
                write!(out, ",{s:.9e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Parses the output of [`ScoreTable::write_csv`]; `#` lines are skipped.
    pub fn read_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::Empty("score table".into()))?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.len() < 2 || cols[0] != "u" || cols[1] != "v" {
            return Err(Error::Parse {
                line: hline + 1,
                message: "score table header must start with u,v".into(),
            });
        }
        let kinds = cols[2..]
            .iter()
            .map(|c| {
                HeuristicKind::from_name(c).ok_or_else(|| Error::Parse {
                    line: hline + 1,
                    message: format!("unknown heuristic column {c:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != kinds.len() + 2 {
                return Err(parse_err(format!(
                    "expected {} fields, found {}",
                    kinds.len() + 2,
                    fields.len()
                )));
            }
            let id = |s: &str| s.parse::<NodeId>().map_err(|e| parse_err(format!("{s:?}: {e}")));
            let scores = fields[2..]
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| parse_err(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(ScoreRow {
                u: id(fields[0])?,
                v: id(fields[1])?,
                scores,
            });
        }
        Ok(Self { kinds, rows })
    }
}

/// Scores every pair with each heuristic in `kinds` (columns keep the order
/// given). Global solvers run once per table.
pub fn score_pairs(
    g: &Graph,
    cfg: &HeuristicConfig,
    pairs: &[(NodeId, NodeId)],
    kinds: &[HeuristicKind],
) -> Result<ScoreTable> {
    cfg.validate()?;
    for &(u, v) in pairs {
        check_pair(g, u, v)?;
    }
    let wants = |k: HeuristicKind| kinds.contains(&k);
    let sources: Vec<NodeId> = pairs.iter().map(|&(u, _)| u).collect();

    let katz = if wants(HeuristicKind::Katz) {
        Some(KatzIndex::new(g, cfg, &sources)?)
    } else {
        None
    };
    let pagerank = if wants(HeuristicKind::RootedPageRank) {
        let nodes: BTreeSet<NodeId> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        let nodes: Vec<NodeId> = nodes.into_iter().collect();
        let vectors = nodes
            .par_iter()
            .map(|&x| rooted_pagerank(g, cfg, x))
            .collect::<Result<Vec<_>>>()?;
        Some((nodes, vectors))
    } else {
        None
    };
    let sim = if wants(HeuristicKind::SimRank) {
        Some(simrank(g, cfg)?)
    } else {
        None
    };

    let mut isolated_pairs = 0usize;
    let rows = pairs
        .iter()
        .map(|&(u, v)| {
            let scores = kinds
                .iter()
                .map(|&k| -> Result<f64> {
                    Ok(match k {
                        HeuristicKind::Katz => katz.as_ref().expect("built above").score(u, v),
                        HeuristicKind::RootedPageRank => {
                            let (nodes, vecs) = pagerank.as_ref().expect("built above");
                            let iu = nodes.binary_search(&u).expect("collected above");
                            let iv = nodes.binary_search(&v).expect("collected above");
                            vecs[iu][v] + vecs[iv][u]
                        }
                        HeuristicKind::SimRank => {
                            let s = sim.as_ref().expect("built above").score(u, v);
                            if s.isolated {
                                isolated_pairs += 1;
                            }
                            s.value
                        }
                        local => local_score(local, g, u, v)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ScoreRow { u, v, scores })
        })
        .collect::<Result<Vec<_>>>()?;
    if isolated_pairs > 0 {
        log::warn!("{isolated_pairs} pair(s) touch an isolated node; SimRank set to 0");
    }
    Ok(ScoreTable {
        kinds: kinds.to_vec(),
        rows,
    })
}
