//! Edge-list text format.
//!
//! One edge per line as two whitespace-separated labels; `#` starts a
//! comment line. An optional `n=<N>` header (first non-comment line) fixes
//! the node count, in which case labels must be integers in `0..N` and are
//! used as ids directly. Without the header, ids are assigned in order of
//! first appearance.

use std::io::Write;
use std::path::Path;

use super::{Graph, NodeIdMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct EdgeListLoad {
    pub graph: Graph,
    pub ids: NodeIdMap,
    pub dropped_self_loops: usize,
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<EdgeListLoad> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let loaded = parse_edge_list(&text)?;
    if loaded.dropped_self_loops > 0 {
        log::warn!(
            "{}: dropped {} self-loop line(s)",
            path.display(),
            loaded.dropped_self_loops
        );
    }
    Ok(loaded)
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListLoad> {
    let mut header: Option<usize> = None;
    let mut ids = NodeIdMap::new();
    let mut edges = Vec::new();
    let mut dropped_self_loops = 0;
    let mut seen_content = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_content {
            seen_content = true;
            if let Some(rest) = line.strip_prefix("n=") {
                let n = rest.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad node-count header {line:?}"),
                })?;
                header = Some(n);
                ids = NodeIdMap::identity(n);
                continue;
            }
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let (u, v) = match header {
            Some(n) => {
                let parse = |t: &str| -> Result<usize> {
                    match t.parse::<usize>() {
                        Ok(id) if id < n => Ok(id),
                        _ => Err(Error::Parse {
                            line: line_no,
                            message: format!("label {t:?} is not an integer id below n={n}"),
                        }),
                    }
                };
                (parse(tokens[0])?, parse(tokens[1])?)
            }
            None => (ids.get_or_insert(tokens[0]), ids.get_or_insert(tokens[1])),
        };
        if u == v {
            dropped_self_loops += 1;
            continue;
        }
        edges.push((u, v));
    }

    if !seen_content {
        return Err(Error::Empty("edge list contains no edges".into()));
    }
    let graph = Graph::from_edges(ids.len(), edges)?;
    Ok(EdgeListLoad {
        graph,
        ids,
        dropped_self_loops,
    })
}

/// Writes `g` with an `n=` header and internal ids, preceded by `comments`
/// rendered as `#` lines.
pub fn write_edge_list<W: Write>(mut out: W, g: &Graph, comments: &[String]) -> std::io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "n={}", g.node_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn save_edge_list(path: impl AsRef<Path>, g: &Graph, comments: &[String]) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_edge_list(&mut buf, g, comments).map_err(|e| Error::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}
