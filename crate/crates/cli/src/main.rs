//! `linkpred`: link prediction experiments from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use linkpred_core::ErrorCategory;

mod commands;
mod output;

/// Bad flags, configuration, or paths. Exit status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "linkpred", version, about = "Link prediction heuristics, decay studies, and subgraph classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a synthetic graph and write it as an edge list
    Generate(GenerateArgs),
    /// Split an edge list into a train graph and train/validation/test links
    Split(SplitArgs),
    /// Score a link set with heuristics
    Heuristics(HeuristicsArgs),
    /// Measure truncation error of a decaying heuristic against its bound
    DecayStudy(DecayArgs),
    /// Extract labelled enclosing subgraphs for a link set
    Extract(ExtractArgs),
    /// Train the subgraph classifier
    Train(TrainArgs),
    /// Compute AUC and AP for scores or a trained model
    Eval(EvalArgs),
    /// Run the full repeated-trial protocol
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON configuration file; flags take precedence over it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master random seed
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelName {
    ErdosRenyi,
    BarabasiAlbert,
    WattsStrogatz,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    /// Node count
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability (Erdős–Rényi)
    #[arg(long)]
    pub p: Option<f64>,
    /// Edges per new node (Barabási–Albert)
    #[arg(long)]
    pub m: Option<usize>,
    /// Ring degree (Watts–Strogatz)
    #[arg(long)]
    pub k: Option<usize>,
    /// Rewiring probability (Watts–Strogatz)
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub graph: PathBuf,
    /// Receives train_graph.txt, train.csv, validation.csv, test.csv
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Trial index; each trial draws an independent split
    #[arg(long)]
    pub trial: Option<u64>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long)]
    pub val_fraction: Option<f64>,
}

#[derive(Args, Debug)]
pub struct HeuristicsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Graph to score on (normally the train graph)
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub links: PathBuf,
    /// Comma-separated subset of cn,jaccard,pa,aa,ra,katz,pr,sr
    #[arg(long, value_delimiter = ',')]
    pub heuristic: Vec<String>,
    #[arg(long)]
    pub katz_beta: Option<f64>,
    #[arg(long)]
    pub pr_alpha: Option<f64>,
    #[arg(long)]
    pub sr_gamma: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DecayArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub graph: PathBuf,
    /// katz, pr, or sr
    #[arg(long)]
    pub heuristic: Option<String>,
    /// Katz damping
    #[arg(long)]
    pub beta: Option<f64>,
    /// Rooted PageRank continuation probability
    #[arg(long)]
    pub alpha: Option<f64>,
    /// SimRank decay
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Hop range such as `1..5`
    #[arg(long)]
    pub h: Option<String>,
    /// Target pair `x,y`; drawn from the seed when omitted
    #[arg(long)]
    pub pair: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub links: PathBuf,
    /// Validation links used to choose h when `--h` is absent
    #[arg(long)]
    pub validation: Option<PathBuf>,
    #[arg(long)]
    pub h: Option<u32>,
    #[arg(long)]
    pub force_h1: bool,
    #[arg(long)]
    pub label_cap: Option<u32>,
    /// Node embedding CSV appended to the label features
    #[arg(long, conflicts_with = "spectral")]
    pub embedding: Option<PathBuf>,
    /// Compute a spectral embedding of the graph with `--inject` negatives added
    #[arg(long)]
    pub spectral: bool,
    #[arg(long)]
    pub embedding_dim: Option<usize>,
    /// Link files whose negative pairs are injected before embedding
    #[arg(long)]
    pub inject: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub val: PathBuf,
    #[arg(long)]
    pub trial: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Model checkpoint
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch loss and validation AUC
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Score table from `heuristics`
    #[arg(long, requires = "links", conflicts_with_all = ["model", "records"])]
    pub scores: Option<PathBuf>,
    /// Labelled links matching the score table
    #[arg(long)]
    pub links: Option<PathBuf>,
    /// Score-table columns to evaluate (default: all)
    #[arg(long, value_delimiter = ',')]
    pub column: Vec<String>,
    /// Checkpoint from `train`
    #[arg(long, requires = "records")]
    pub model: Option<PathBuf>,
    /// Labelled subgraph records from `extract`
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Per-link probabilities from the model
    #[arg(long, requires = "model")]
    pub predictions: Option<PathBuf>,
    /// Metrics CSV; printed to stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: Common,
    /// Edge list to use instead of the configured graph source
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Independent splits to run
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated methods: heuristic names, ensemble, seal, seal_embed
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Classifier training epochs
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Use 1-hop subgraphs instead of choosing h on validation links
    #[arg(long)]
    pub force_h1: bool,
    /// Trials run concurrently
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Report CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Report JSON with the full configuration
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Exit status and class name for an error.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    if err.downcast_ref::<UsageError>().is_some() {
        return (1, "usage");
    }
    let core = err
        .chain()
        .find_map(|c| c.downcast_ref::<linkpred_core::Error>());
    match core.map(linkpred_core::Error::category) {
        Some(ErrorCategory::Usage) => (1, "usage"),
        Some(ErrorCategory::Numerical) => (3, "numerical"),
        _ => (2, "data"),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[usage]: {}", one_line(first.trim_start_matches("error: ")));
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Split(a) => commands::split(a),
        Command::Heuristics(a) => commands::heuristics(a),
        Command::DecayStudy(a) => commands::decay_study(a),
        Command::Extract(a) => commands::extract(a),
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Experiment(a) => commands::experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, class) = classify(&e);
            eprintln!("error[{class}]: {}", one_line(&format!("{e:#}")));
            ExitCode::from(code)
        }
    }
}
