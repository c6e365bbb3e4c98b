//! Text checkpoint: a versioned header, the JSON config, then one line per
//! tensor of the flat parameter vector.

use std::io::Write;

use super::{GnnConfig, GnnParams};
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(mut out: W, params: &GnnParams) -> Result<()> {
    let io = |e| Error::io("checkpoint", e);
    writeln!(out, "linkpred-gnn {CHECKPOINT_VERSION}").map_err(io)?;
    writeln!(out, "config {}", serde_json::to_string(&params.config)?).map_err(io)?;
    writeln!(out, "input_width {}", params.input_width).map_err(io)?;
    writeln!(out, "k {}", params.k).map_err(io)?;
    writeln!(out, "values {}", params.values.len()).map_err(io)?;
    for chunk in params.values.chunks(16) {
        let line: Vec<String> = chunk.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", line.join(" ")).map_err(io)?;
    }
    Ok(())
}

pub fn read_checkpoint(text: &str) -> Result<GnnParams> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let mut field = |key: &str| -> Result<(usize, &str)> {
        let (i, l) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("checkpoint ends before `{key}`"),
        })?;
        let rest = l.strip_prefix(key).and_then(|r| r.strip_prefix(' '));
        rest.map(|r| (i + 1, r)).ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `{key}`"),
        })
    };
    let (line, version) = field("linkpred-gnn")?;
    if version.trim() != CHECKPOINT_VERSION.to_string() {
        return Err(Error::Parse {
            line,
            message: format!("unsupported checkpoint version {version}"),
        });
    }
    let config: GnnConfig = serde_json::from_str(field("config")?.1)?;
    let num = |(line, s): (usize, &str)| {
        s.trim().parse::<usize>().map_err(|e| Error::Parse {
            line,
            message: format!("{s:?}: {e}"),
        })
    };
    let input_width = num(field("input_width")?)?;
    let k = num(field("k")?)?;
    let count = num(field("values")?)?;
    let mut values = Vec::with_capacity(count);
    for (i, l) in lines {
        for tok in l.split_whitespace() {
            values.push(tok.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("{tok:?}: {e}"),
            })?);
        }
    }
    let mut params = GnnParams::init(&config, input_width, k, 0)?;
    if values.len() != count || count != params.len() {
        return Err(Error::Shape(format!(
            "checkpoint holds {} values, architecture needs {}",
            values.len(),
            params.len()
        )));
    }
    params.values = values;
    Ok(params)
}
