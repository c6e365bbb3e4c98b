//! Line-oriented text format for batches of extracted subgraphs.
//!
//! ```text
//! record nodes=3 edges=2 target=0,1 hop=1 removed=1 class=1 features=0
//! global 4 9 12
//! degrees 2 3 2
//! labels 1 1 2
//! edges 0 2 1 2
//! end
//! ```
//!
//! With `features=c > 0`, `n` lines `f v0 … v{c-1}` follow `edges`. Floats
//! are written in shortest round-trip form, so a batch reads back
//! bit-exactly.

use std::io::Write;

use super::EnclosingSubgraph;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SubgraphRecord {
    pub sub: EnclosingSubgraph,
    /// Link label of the target pair, when known.
    pub class: Option<bool>,
    pub features: Option<DenseMatrix>,
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| format!(" {v}")).collect()
}

pub fn write_records<W: Write>(mut out: W, records: &[SubgraphRecord]) -> std::io::Result<()> {
    for r in records {
        let s = &r.sub;
        let class = match r.class {
            Some(true) => "1",
            Some(false) => "0",
            None => "-",
        };
        writeln!(
            out,
            "record nodes={} edges={} target={},{} hop={} removed={} class={class} features={}",
            s.node_count(),
            s.graph.edge_count(),
            s.target.0,
            s.target.1,
            s.hop,
            u8::from(s.had_target_edge),
            r.features.as_ref().map_or(0, DenseMatrix::cols)
        )?;
        writeln!(out, "global{}", join(&s.node_map))?;
        writeln!(out, "degrees{}", join(&s.source_degrees))?;
        writeln!(out, "labels{}", join(&s.labels))?;
        writeln!(out, "edges{}", join(s.graph.edges().flat_map(|(u, v)| [u, v])))?;
        if let Some(f) = &r.features {
            for i in 0..f.rows() {
                writeln!(out, "f{}", f.row(i).iter().map(|v| format!(" {v:e}")).collect::<String>())?;
            }
        }
        writeln!(out, "end")?;
    }
    Ok(())
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Some((i + 1, t));
            }
        }
        None
    }

    /// Next line, which must start with `tag`; returns its remaining tokens.
    fn expect(&mut self, tag: &str) -> Result<(usize, Vec<&'a str>)> {
        let (line, text) = self.next_content().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unexpected end of input, wanted `{tag}`"),
        })?;
        let mut tokens = text.split_whitespace();
        if tokens.next() != Some(tag) {
            return Err(Error::Parse {
                line,
                message: format!("expected `{tag}` line"),
            });
        }
        Ok((line, tokens.collect()))
    }
}

fn parse_all<T: std::str::FromStr>(line: usize, tokens: &[&str]) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    tokens
        .iter()
        .map(|t| {
            t.parse().map_err(|e| Error::Parse {
                line,
                message: format!("{t:?}: {e}"),
            })
        })
        .collect()
}

pub fn read_records(text: &str) -> Result<Vec<SubgraphRecord>> {
    let mut lines = Lines {
        inner: text.lines().enumerate().peekable(),
    };
    let mut out = Vec::new();
    while let Some((line, header)) = lines.next_content() {
        let perr = |message: String| Error::Parse { line, message };
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("record") {
            return Err(perr("expected `record` line".into()));
        }
        let mut field = |key: &str| -> Result<&str> {
            let t = tokens.next().ok_or_else(|| perr(format!("missing `{key}=`")))?;
            t.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| perr(format!("expected `{key}=`, found {t:?}")))
        };
        let num = |s: &str| s.parse::<usize>().map_err(|e| perr(format!("{s:?}: {e}")));
        let n = num(field("nodes")?)?;
        let m = num(field("edges")?)?;
        let (tx, ty) = field("target")?
            .split_once(',')
            .ok_or_else(|| perr("target must be `x,y`".into()))?;
        let target = (num(tx)?, num(ty)?);
        let hop = num(field("hop")?)? as u32;
        let removed = match field("removed")? {
            "0" => false,
            "1" => true,
            s => return Err(perr(format!("bad removed flag {s:?}"))),
        };
        let class = match field("class")? {
            "1" => Some(true),
            "0" => Some(false),
            "-" => None,
            s => return Err(perr(format!("bad class {s:?}"))),
        };
        let cols = num(field("features")?)?;

        let (l, t) = lines.expect("global")?;
        let node_map: Vec<usize> = parse_all(l, &t)?;
        let (l, t) = lines.expect("degrees")?;
        let source_degrees: Vec<usize> = parse_all(l, &t)?;
        let (l, t) = lines.expect("labels")?;
        let labels: Vec<u32> = parse_all(l, &t)?;
        let (l, t) = lines.expect("edges")?;
        let flat: Vec<usize> = parse_all(l, &t)?;
        if node_map.len() != n || source_degrees.len() != n || labels.len() != n {
            return Err(perr(format!("per-node lists must have {n} entries")));
        }
        if flat.len() != 2 * m {
            return Err(perr(format!("expected {m} edges")));
        }
        if target.0 >= n || target.1 >= n || target.0 == target.1 {
            return Err(perr("target pair out of range".into()));
        }
        let graph = Graph::from_edges(n, flat.chunks(2).map(|c| (c[0], c[1])))?;
        let features = if cols > 0 {
            let mut data = Vec::with_capacity(n * cols);
            for _ in 0..n {
                let (l, t) = lines.expect("f")?;
                if t.len() != cols {
                    return Err(Error::Parse {
                        line: l,
                        message: format!("expected {cols} feature values"),
                    });
                }
                data.extend(parse_all::<f64>(l, &t)?);
            }
            Some(DenseMatrix::from_vec(n, cols, data)?)
        } else {
            None
        };
        lines.expect("end")?;
        out.push(SubgraphRecord {
            sub: EnclosingSubgraph {
                graph,
                node_map,
                target,
                hop,
                labels,
                had_target_edge: removed,
                source_degrees,
            },
            class,
            features,
        });
    }
    Ok(out)
}
