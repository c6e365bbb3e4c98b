//! Logistic regression over heuristic scores.

use serde::{Deserialize, Serialize};

use super::ScoreTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticOptions {
    /// Weight decay on the coefficients (not the intercept).
    pub l2: f64,
    /// Stop once every gradient component is below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            tol: 1e-8,
            max_iter: 200_000,
        }
    }
}

/// Standardize-then-logistic model.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticEnsemble {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

struct Problem<'a> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    l2: f64,
}

impl Problem<'_> {
    /// Objective and gradient at `theta = [w.., b]`.
    fn eval(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let d = theta.len() - 1;
        let n = self.x.len() as f64;
        grad.fill(0.0);
        let mut loss = 0.0;
        for (row, &label) in self.x.iter().zip(self.y) {
            let z = theta[d] + row.iter().zip(theta).map(|(a, w)| a * w).sum::<f64>();
            let t = if label { 1.0 } else { 0.0 };
            loss += if label { softplus(-z) } else { softplus(z) };
            let r = sigmoid(z) - t;
            for (g, a) in grad.iter_mut().zip(row) {
                *g += r * a;
            }
            grad[d] += r;
        }
        for g in grad.iter_mut() {
            *g /= n;
        }
        let mut penalty = 0.0;
        for j in 0..d {
            grad[j] += self.l2 * theta[j];
            penalty += theta[j] * theta[j];
        }
        loss / n + 0.5 * self.l2 * penalty
    }
}

impl LogisticEnsemble {
    /// Fits by accelerated full-batch gradient descent with a fixed
    /// `1/L` step and function-value restarts.
    pub fn fit(features: &[Vec<f64>], labels: &[bool], opts: &LogisticOptions) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let positives = labels.iter().filter(|&&l| l).count();
        if positives == 0 || positives == labels.len() {
            return Err(Error::Data(
                "logistic regression needs both classes in the training set".into(),
            ));
        }
        let d = features[0].len();
        if features.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("ragged feature rows".into()));
        }
        let n = features.len() as f64;
        let mean: Vec<f64> = (0..d)
            .map(|j| features.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        let scale: Vec<f64> = (0..d)
            .map(|j| {
                let var = features.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let x: Vec<Vec<f64>> = features
            .iter()
            .map(|r| (0..d).map(|j| (r[j] - mean[j]) / scale[j]).collect())
            .collect();
        let col_power: f64 = (0..d)
            .map(|j| x.iter().map(|r| r[j] * r[j]).sum::<f64>() / n)
            .sum();
        let lipschitz = 0.25 * (col_power + 1.0) + opts.l2;
        let step = 1.0 / lipschitz;

        let problem = Problem {
            x: &x,
            y: labels,
            l2: opts.l2,
        };
        let mut current = vec![0.0; d + 1];
        let mut previous = current.clone();
        let mut probe = current.clone();
        let mut grad = vec![0.0; d + 1];
        let mut scratch = vec![0.0; d + 1];
        let mut momentum = 1.0f64;
        let mut last_obj = f64::INFINITY;
        for it in 0..opts.max_iter {
            problem.eval(&probe, &mut grad);
            if grad.iter().all(|g| g.abs() < opts.tol) {
                return Ok(Self::from_theta(mean, scale, &probe, it));
            }
            previous.copy_from_slice(&current);
            for ((c, p), g) in current.iter_mut().zip(&probe).zip(&grad) {
                *c = p - step * g;
            }
            let obj = problem.eval(&current, &mut scratch);
            if obj > last_obj {
                momentum = 1.0;
                probe.copy_from_slice(&current);
            } else {
                let next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
                let beta = (momentum - 1.0) / next;
                for ((p, c), q) in probe.iter_mut().zip(&current).zip(&previous) {
                    *p = c + beta * (c - q);
                }
                momentum = next;
            }
            last_obj = obj;
        }
        Err(Error::Convergence {
            method: "logistic regression",
            iterations: opts.max_iter,
            residual: grad.iter().fold(0.0, |m, g| m.max(g.abs())),
        })
    }

    fn from_theta(mean: Vec<f64>, scale: Vec<f64>, theta: &[f64], iterations: usize) -> Self {
        let d = theta.len() - 1;
        Self {
            mean,
            scale,
            weights: theta[..d].to_vec(),
            bias: theta[d],
            iterations,
        }
    }

    pub fn predict(&self, features: &[Vec<f64>]) -> Result<Vec<f64>> {
        features
            .iter()
            .map(|r| {
                if r.len() != self.weights.len() {
                    return Err(Error::Shape(format!(
                        "expected {} features, got {}",
                        self.weights.len(),
                        r.len()
                    )));
                }
                let z = self.bias
                    + r.iter()
                        .enumerate()
                        .map(|(j, a)| (a - self.mean[j]) / self.scale[j] * self.weights[j])
                        .sum::<f64>();
                Ok(sigmoid(z))
            })
            .collect()
    }
}

/// Fits on `train` (labelled) and returns positive-class probabilities for
/// every row of `test`.
pub fn ensemble_fit_predict(
    train: &ScoreTable,
    labels: &[bool],
    test: &ScoreTable,
) -> Result<Vec<f64>> {
    if train.kinds != test.kinds {
        return Err(Error::Shape("train and test tables have different columns".into()));
    }
    let model = LogisticEnsemble::fit(&train.features(), labels, &LogisticOptions::default())?;
    model.predict(&test.features())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::auc;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noisy_data(seed: u64, n: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let label = i % 2 == 0;
            let shift = if label { 0.7 } else { 0.0 };
            x.push((0..8).map(|j| rng.gen::<f64>() + shift * (j % 3) as f64).collect());
            y.push(label);
        }
        (x, y)
    }

    #[test]
    fn separable_feature_gives_perfect_auc() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let make = |rng: &mut ChaCha8Rng, n: usize| {
            let mut x = Vec::new();
            let mut y = Vec::new();
            for i in 0..n {
                let label = i % 2 == 1;
                let mut row: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
                row[4] = if label { 2.0 + rng.gen::<f64>() } else { rng.gen::<f64>() };
                x.push(row);
                y.push(label);
            }
            (x, y)
        };
        let (xt, yt) = make(&mut rng, 200);
        let (xs, ys) = make(&mut rng, 200);
        let model = LogisticEnsemble::fit(&xt, &yt, &LogisticOptions::default()).unwrap();
        let p = model.predict(&xs).unwrap();
        assert!(p.iter().all(|&v| v > 0.0 && v < 1.0));
        assert_eq!(auc(&p, &ys).unwrap(), 1.0);
    }

    #[test]
    fn uninformative_features_predict_the_prior() {
        let x = vec![vec![0.0; 8]; 40];
        let y: Vec<bool> = (0..40).map(|i| i < 10).collect();
        let model = LogisticEnsemble::fit(&x, &y, &LogisticOptions::default()).unwrap();
        for p in model.predict(&x).unwrap() {
            assert!((p - 0.25).abs() < 1e-6, "{p}");
        }
    }

    #[test]
    fn feature_scaling_does_not_change_ranking() {
        let (x, y) = noisy_data(5, 120);
        let (xs, _) = noisy_data(6, 60);
        let scaled = |m: &[Vec<f64>]| -> Vec<Vec<f64>> {
            m.iter()
                .map(|r| {
                    let mut r = r.clone();
                    r[2] *= 10.0;
                    r
                })
                .collect()
        };
        let rank = |p: Vec<f64>| {
            let mut idx: Vec<usize> = (0..p.len()).collect();
            idx.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
            idx
        };
        let opts = LogisticOptions::default();
        let a = LogisticEnsemble::fit(&x, &y, &opts).unwrap().predict(&xs).unwrap();
        let b = LogisticEnsemble::fit(&scaled(&x), &y, &opts)
            .unwrap()
            .predict(&scaled(&xs))
            .unwrap();
        assert_eq!(rank(a), rank(b));
    }

    #[test]
    fn single_class_is_rejected() {
        let x = vec![vec![1.0; 8]; 5];
        assert!(LogisticEnsemble::fit(&x, &[true; 5], &LogisticOptions::default()).is_err());
    }

    #[test]
    fn converges_to_stationary_point() {
        let (x, y) = noisy_data(9, 200);
        let opts = LogisticOptions::default();
        let model = LogisticEnsemble::fit(&x, &y, &opts).unwrap();
        assert!(model.iterations < opts.max_iter);
    }
}
