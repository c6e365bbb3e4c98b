//! Train/validation/test link splits with sampled negatives.

use std::collections::HashSet;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Train,
    Validation,
    Test,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Train => "train",
            Role::Validation => "validation",
            Role::Test => "test",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Role::Train, Role::Validation, Role::Test]
            .into_iter()
            .find(|r| r.name() == s)
    }
}

/// Labelled node pairs of one role, stored as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSet {
    pub role: Role,
    pub pairs: Vec<(NodeId, NodeId)>,
    pub labels: Vec<bool>,
}

impl LinkSet {
    pub fn new(role: Role, pairs: Vec<(NodeId, NodeId)>, labels: Vec<bool>) -> Result<Self> {
        if pairs.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} pairs but {} labels",
                pairs.len(),
                labels.len()
            )));
        }
        let mut seen = HashSet::with_capacity(pairs.len());
        for &(u, v) in &pairs {
            if u >= v {
                return Err(Error::Data(format!("pair ({u},{v}) is not in u < v order")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::Data(format!("pair ({u},{v}) appears twice in the {} set", role.name())));
            }
        }
        Ok(Self { role, pairs, labels })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn positives(&self) -> Vec<(NodeId, NodeId)> {
        self.by_label(true)
    }

    pub fn negatives(&self) -> Vec<(NodeId, NodeId)> {
        self.by_label(false)
    }

    fn by_label(&self, want: bool) -> Vec<(NodeId, NodeId)> {
        self.pairs
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == want)
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn has_both_classes(&self) -> bool {
        self.labels.iter().any(|&l| l) && self.labels.iter().any(|&l| !l)
    }

    /// Header `role,u,v,label`, label `1` or `0`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "role,u,v,label")?;
        for (&(u, v), &l) in self.pairs.iter().zip(&self.labels) {
            writeln!(out, "{},{u},{v},{}", self.role.name(), u8::from(l))?;
        }
        Ok(())
    }

    /// Reads one or more roles from a file written by
    /// [`LinkSet::write_csv`] and keeps rows of `role` (all rows if `None`,
    /// which then must share a single role).
    pub fn read_csv(text: &str, role: Option<Role>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::Empty("link set".into()))?;
        if header.trim() != "role,u,v,label" {
            return Err(Error::Parse {
                line: hline + 1,
                message: "link set header must be role,u,v,label".into(),
            });
        }
        let mut found: Option<Role> = role;
        let mut pairs = Vec::new();
        let mut labels = Vec::new();
        for (idx, line) in lines {
            let err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", f.len())));
            }
            let r = Role::from_name(f[0]).ok_or_else(|| err(format!("unknown role {:?}", f[0])))?;
            match found {
                Some(want) if want != r => {
                    if role.is_some() {
                        continue;
                    }
                    return Err(err("file mixes roles; select one".into()));
                }
                _ => found = Some(r),
            }
            let id = |s: &str| s.parse::<NodeId>().map_err(|e| err(format!("{s:?}: {e}")));
            let (u, v) = (id(f[1])?, id(f[2])?);
            let label = match f[3] {
                "1" => true,
                "0" => false,
                other => return Err(err(format!("label must be 0 or 1, found {other:?}"))),
            };
            pairs.push((u.min(v), u.max(v)));
            labels.push(label);
        }
        let role = found.ok_or_else(|| Error::Empty("link set has no rows".into()))?;
        Self::new(role, pairs, labels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub validation_fraction_of_train: f64,
    pub seed: u64,
    pub trials: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.1,
            validation_fraction_of_train: 0.1,
            seed: 1,
            trials: 10,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("test_fraction", self.test_fraction),
            ("validation_fraction_of_train", self.validation_fraction_of_train),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name}={v} must lie in (0, 1)")));
            }
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Split {
    /// Observed graph: the input without the positive test edges.
    pub train_graph: Graph,
    pub train: LinkSet,
    pub validation: LinkSet,
    pub test: LinkSet,
}

impl Split {
    /// Scans for leakage: test positives absent from the train graph,
    /// negatives absent from `original`, no pair shared across roles.
    pub fn check(&self, original: &Graph) -> Result<()> {
        for &(u, v) in &self.test.positives() {
            if self.train_graph.has_edge(u, v) {
                return Err(Error::Leakage(format!("test edge ({u},{v}) is in the train graph")));
            }
        }
        let mut seen = HashSet::new();
        for set in [&self.train, &self.validation, &self.test] {
            for (&(u, v), &l) in set.pairs.iter().zip(&set.labels) {
                if !l && original.has_edge(u, v) {
                    return Err(Error::Leakage(format!("negative ({u},{v}) is an edge")));
                }
                if !seen.insert((u, v)) {
                    return Err(Error::Leakage(format!("pair ({u},{v}) is in two link sets")));
                }
            }
        }
        Ok(())
    }
}

fn ceil_count(fraction: f64, total: usize) -> usize {
    // 0.07 * 100 is 7.000000000000001 in floating point
    (fraction * total as f64 - 1e-9).ceil().max(0.0) as usize
}

/// `count` distinct non-edges of `g`, uniformly without replacement.
fn sample_non_edges<R: Rng>(g: &Graph, count: usize, rng: &mut R) -> Result<Vec<(NodeId, NodeId)>> {
    let n = g.node_count();
    let all = n * n.saturating_sub(1) / 2;
    let available = all - g.edge_count();
    if count > available {
        return Err(Error::Data(format!(
            "need {count} negative pairs but the graph has only {available} non-edges"
        )));
    }
    if count * 2 > available {
        // dense regime: enumerate and partially shuffle
        let mut pool: Vec<(NodeId, NodeId)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        let (chosen, _) = pool.partial_shuffle(rng, count);
        return Ok(chosen.to_vec());
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if g.has_edge(pair.0, pair.1) || !seen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    Ok(out)
}

/// Random split for one trial. Test positives are `⌈test_fraction·|E|⌉`
/// removed edges; the remaining edges are train positives, of which
/// `⌈validation_fraction·count⌉` move to validation. Negatives match each
/// positive count and are drawn from non-edges of `g`.
pub fn split_links(g: &Graph, spec: &SplitSpec, trial: u64) -> Result<Split> {
    spec.validate()?;
    let m = g.edge_count();
    let n_test = ceil_count(spec.test_fraction, m);
    if m == 0 || n_test >= m {
        return Err(Error::Data(format!(
            "cannot split {m} edge(s) with test_fraction {}",
            spec.test_fraction
        )));
    }
    let mut edges: Vec<(NodeId, NodeId)> = g.edges().collect();
    edges.shuffle(&mut stream_rng(spec.seed, Stream::Split, trial));
    let (test_pos, train_pos) = edges.split_at(n_test);
    let n_val = ceil_count(spec.validation_fraction_of_train, train_pos.len());
    if n_val >= train_pos.len() {
        return Err(Error::Data("validation would consume every training link".into()));
    }
    let (val_pos, fit_pos) = train_pos.split_at(n_val);

    let negatives = sample_non_edges(g, m, &mut stream_rng(spec.seed, Stream::Negatives, trial))?;
    let (test_neg, rest) = negatives.split_at(n_test);
    let (val_neg, fit_neg) = rest.split_at(n_val);

    let build = |role: Role, pos: &[(NodeId, NodeId)], neg: &[(NodeId, NodeId)]| {
        let mut pairs = pos.to_vec();
        pairs.extend_from_slice(neg);
        let labels = (0..pairs.len()).map(|i| i < pos.len()).collect();
        LinkSet::new(role, pairs, labels)
    };
    let split = Split {
        train_graph: g.without_edges(test_pos),
        train: build(Role::Train, fit_pos, fit_neg)?,
        validation: build(Role::Validation, val_pos, val_neg)?,
        test: build(Role::Test, test_pos, test_neg)?,
    };
    split.check(g)?;
    Ok(split)
}
