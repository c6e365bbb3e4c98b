//! Provenance headers, config files, and all-or-nothing output writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::UsageError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tool version, command, hash of the effective configuration, and seed.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &'static str, config: &C, seed: u64) -> Result<Self> {
        let canonical = serde_json::to_vec(config)?;
        let digest = Sha256::digest(&canonical);
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            tool: "linkpred",
            version: VERSION,
            command,
            config_hash,
            seed,
        })
    }

    pub fn line(&self) -> String {
        format!(
            "linkpred {} command={} config_hash={} seed={}",
            self.version, self.command, self.config_hash, self.seed
        )
    }

    pub fn header(&self) -> String {
        format!("# {}\n", self.line())
    }
}

/// Reads a JSON config, or the defaults when no path is given. Unknown
/// keys are rejected by the config types themselves.
pub fn load_config<C: DeserializeOwned + Default>(path: Option<&Path>) -> Result<C> {
    let Some(path) = path else {
        return Ok(C::default());
    };
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Files staged next to their destinations and renamed into place only
/// once every one of them has been written.
#[derive(Default)]
pub struct Outputs {
    staged: Vec<(NamedTempFile, PathBuf)>,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: &Path, contents: &[u8]) -> Result<()> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        if !dir.is_dir() {
            return Err(UsageError(format!("output directory {} does not exist", dir.display())).into());
        }
        let mut tmp = NamedTempFile::new_in(dir)
            .with_context(|| format!("cannot create a file in {}", dir.display()))?;
        tmp.write_all(contents)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.staged.push((tmp, path.to_path_buf()));
        Ok(())
    }

    pub fn commit(self) -> Result<()> {
        for (tmp, path) in self.staged {
            tmp.persist(&path)
                .with_context(|| format!("cannot move output into {}", path.display()))?;
        }
        Ok(())
    }
}

/// Renders `write` into a buffer that starts with the provenance header.
pub fn with_header(
    prov: &Provenance,
    write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<Vec<u8>> {
    let mut buf = prov.header().into_bytes();
    write(&mut buf)?;
    Ok(buf)
}

/// Checks that input files exist before any work starts.
pub fn require_files<'a>(paths: impl IntoIterator<Item = &'a Path>) -> Result<()> {
    for p in paths {
        if !p.is_file() {
            return Err(UsageError(format!("input file {} does not exist", p.display())).into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_config() {
        let a = Provenance::new("x", &serde_json::json!({"a": 1}), 3).unwrap();
        let b = Provenance::new("x", &serde_json::json!({"a": 2}), 3).unwrap();
        assert_ne!(a.config_hash, b.config_hash);
        assert_eq!(a.config_hash.len(), 64);
        assert!(a.line().starts_with("linkpred "));
        assert!(a.line().ends_with("seed=3"));
    }

    #[test]
    fn nothing_lands_without_commit() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out.txt");
        let mut out = Outputs::new();
        out.add(&target, b"hello").unwrap();
        drop(out);
        assert!(!target.exists());
        let mut out = Outputs::new();
        out.add(&target, b"hello").unwrap();
        out.commit().unwrap();
        assert_eq!(fs::read_to_string(&target).unwrap(), "hello");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
