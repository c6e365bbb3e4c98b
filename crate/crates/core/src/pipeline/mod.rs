//! Link splits, metrics, and repeated-trial experiments.

mod experiment;
mod metrics;
mod split;

pub use experiment::{
    ensemble_scores, method_scores, run_experiment, seal_embedding, seal_inputs, seal_scores, select_h,
    ExperimentConfig, GraphSource, Method, MethodSummary, Report, SealOptions, TrialResult,
};
pub use metrics::{auc, average_precision, mean_std, Metrics};
pub use split::{split_links, LinkSet, Role, Split, SplitSpec};
