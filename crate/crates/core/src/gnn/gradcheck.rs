//! Finite-difference check of the analytic gradient.

use rayon::prelude::*;

use super::model::{batch_loss_and_grad, mean_loss};
use super::{Example, GnnParams};
use crate::error::{Error, Result};

pub const PROBE_MAX_GRAPHS: usize = 4;
pub const PROBE_MAX_NODES: usize = 10;
const EPS: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    /// `max |a − n| / max(|a|, |n|, 1e-8)` over all parameters.
    pub max_rel_error: f64,
    /// Parameter index attaining the maximum.
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub checked: usize,
}

/// Compares backpropagation against central differences with step `1e-5`
/// on every parameter of the mean probe loss.
pub fn gradient_check(params: &GnnParams, probe: &[Example]) -> Result<GradCheck> {
    if probe.is_empty() || probe.len() > PROBE_MAX_GRAPHS {
        return Err(Error::InvalidParameter(format!(
            "probe batch must hold 1..={PROBE_MAX_GRAPHS} graphs"
        )));
    }
    if probe.iter().any(|e| e.input.node_count() > PROBE_MAX_NODES) {
        return Err(Error::InvalidParameter(format!(
            "probe graphs are limited to {PROBE_MAX_NODES} nodes"
        )));
    }
    let refs: Vec<&Example> = probe.iter().collect();
    let (_, analytic) = batch_loss_and_grad(&refs, params)?;
    let numeric = (0..params.len())
        .into_par_iter()
        .map_init(
            || params.clone(),
            |p, i| {
                let orig = p.values[i];
                p.values[i] = orig + EPS;
                let up = mean_loss(&refs, p)?.0;
                p.values[i] = orig - EPS;
                let down = mean_loss(&refs, p)?.0;
                p.values[i] = orig;
                Ok((up - down) / (2.0 * EPS))
            },
        )
        .collect::<Result<Vec<f64>>>()?;
    let mut out = GradCheck {
        max_rel_error: 0.0,
        worst_index: 0,
        analytic: analytic[0],
        numeric: numeric[0],
        checked: numeric.len(),
    };
    for (i, (&a, &n)) in analytic.iter().zip(&numeric).enumerate() {
        let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-8);
        if rel > out.max_rel_error {
            out = GradCheck {
                max_rel_error: rel,
                worst_index: i,
                analytic: a,
                numeric: n,
                checked: out.checked,
            };
        }
    }
    Ok(out)
}
