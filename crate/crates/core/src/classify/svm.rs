//! L2-regularized L1-hinge linear SVM trained by dual coordinate descent.
//!
//! Solves
//!
//! ```text
//! min_w  1/2 |w|^2 + C * sum_i max(0, 1 - y_i w.x_i)
//! ```
//!
//! through its box-constrained dual
//!
//! ```text
//! max_a  sum_i a_i - 1/2 |sum_i a_i y_i x_i|^2,   0 <= a_i <= C
//! ```
//!
//! The bias is an extra constant feature of value 1, so it is regularized
//! like any other weight. Each coordinate step is an exact line
//! maximization clipped to the box, which makes the dual objective
//! nondecreasing. Shrinking is not used.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ClassifyError, TrainConfig};
use crate::features::SparseVector;
use crate::scalar::Real;

/// Separating hyperplane `w.x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<T> {
    pub weights: Vec<T>,
    pub bias: T,
}

impl<T: Real> LinearModel<T> {
    pub fn new(weights: Vec<T>, bias: T) -> Self {
        LinearModel { weights, bias }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Signed decision value `w.x + b`.
    pub fn decision(&self, x: &SparseVector<T>) -> Result<T, ClassifyError> {
        if x.dim() != self.dim() {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(x.dot(&self.weights) + self.bias)
    }

    pub fn negated(&self) -> Self {
        LinearModel {
            weights: self.weights.iter().map(|&w| -w).collect(),
            bias: -self.bias,
        }
    }

    /// Folds a per-feature scaling into the weights, so a model trained on
    /// `x * scale` can be applied to raw `x`.
    pub fn fold_scaling(&self, scale: &[T]) -> Self {
        LinearModel {
            weights: self.weights.iter().zip(scale).map(|(&w, &s)| w * s).collect(),
            bias: self.bias,
        }
    }
}

/// Per-epoch record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace<T> {
    /// Dual objective after each epoch.
    pub dual_objectives: Vec<T>,
    /// Final dual variables, one per example.
    pub dual: Vec<T>,
    pub converged: bool,
}

impl<T: Real> TrainTrace<T> {
    pub fn epochs(&self) -> usize {
        self.dual_objectives.len()
    }
}

pub fn train_binary<T: Real>(data: &[(SparseVector<T>, i8)], config: &TrainConfig<T>) -> Result<LinearModel<T>, ClassifyError> {
    train_binary_traced(data, config).map(|(m, _)| m)
}

/// Trains and also returns the per-epoch dual objective and final duals.
pub fn train_binary_traced<T: Real>(
    data: &[(SparseVector<T>, i8)],
    config: &TrainConfig<T>,
) -> Result<(LinearModel<T>, TrainTrace<T>), ClassifyError> {
    config.validate()?;
    let n_pos = data.iter().filter(|(_, y)| *y > 0).count();
    let n_neg = data.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(ClassifyError::SingleClass);
    }
    let dim = data[0].0.dim();
    if let Some((x, _)) = data.iter().find(|(x, _)| x.dim() != dim) {
        return Err(ClassifyError::DimensionMismatch {
            expected: dim,
            found: x.dim(),
        });
    }

    let n = data.len();
    let upper: Vec<T> = data
        .iter()
        .map(|(_, y)| {
            if config.balanced {
                let class_n = if *y > 0 { n_pos } else { n_neg };
                config.cost * T::lit(n as f64 / (2.0 * class_n as f64))
            } else {
                config.cost
            }
        })
        .collect();
    let diag: Vec<T> = data.iter().map(|(x, _)| x.squared_norm() + T::one()).collect();
    let sign = |y: i8| if y > 0 { T::one() } else { -T::one() };

    let mut w = vec![T::zero(); dim];
    let mut b = T::zero();
    let mut alpha = vec![T::zero(); n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut objectives = Vec::with_capacity(config.max_epochs);
    let mut converged = false;

    for _ in 0..config.max_epochs {
        order.shuffle(&mut rng);
        let mut max_violation = T::zero();
        for &i in &order {
            let (x, y) = (&data[i].0, sign(data[i].1));
            let grad = y * (x.dot(&w) + b) - T::one();
            let projected = if alpha[i] <= T::zero() {
                grad.min(T::zero())
            } else if alpha[i] >= upper[i] {
                grad.max(T::zero())
            } else {
                grad
            };
            max_violation = max_violation.max(projected.abs());
            if projected != T::zero() {
                let old = alpha[i];
                alpha[i] = (old - grad / diag[i]).max(T::zero()).min(upper[i]);
                let step = (alpha[i] - old) * y;
                for (j, v) in x.iter() {
                    w[j] = w[j] + step * v;
                }
                b = b + step;
            }
        }
        let norm: T = w.iter().map(|&v| v * v).sum::<T>() + b * b;
        let sum_alpha: T = alpha.iter().copied().sum();
        objectives.push(sum_alpha - T::lit(0.5) * norm);
        if max_violation < config.tolerance {
            converged = true;
            break;
        }
    }

    Ok((
        LinearModel::new(w, b),
        TrainTrace {
            dual_objectives: objectives,
            dual: alpha,
            converged,
        },
    ))
}

/// Dual objective of arbitrary dual variables, computed from scratch.
pub fn dual_objective<T: Real>(data: &[(SparseVector<T>, i8)], dual: &[T]) -> T {
    let dim = data.first().map_or(0, |(x, _)| x.dim());
    let mut w = vec![T::zero(); dim];
    let mut b = T::zero();
    for ((x, y), &a) in data.iter().zip(dual) {
        let ay = if *y > 0 { a } else { -a };
        for (j, v) in x.iter() {
            w[j] = w[j] + ay * v;
        }
        b = b + ay;
    }
    let norm: T = w.iter().map(|&v| v * v).sum::<T>() + b * b;
    dual.iter().copied().sum::<T>() - T::lit(0.5) * norm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(points: &[(&[f64], i8)]) -> Vec<(SparseVector<f64>, i8)> {
        points.iter().map(|(x, y)| (SparseVector::from_dense(x), *y)).collect()
    }

    fn strict() -> TrainConfig<f64> {
        TrainConfig {
            cost: 1000.0,
            max_epochs: 5000,
            tolerance: 1e-9,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn symmetric_pair_bisects() {
        let data = dense(&[(&[-1.0], -1), (&[1.0], 1)]);
        let m = train_binary(&data, &strict()).unwrap();
        for (x, y) in &data {
            assert_eq!(m.decision(x).unwrap().signum() as i8, *y);
        }
        // boundary at 0: the bias must vanish by symmetry
        assert!(m.bias.abs() < 1e-6, "{}", m.bias);
    }

    #[test]
    fn separable_blobs_fit_exactly() {
        let data = dense(&[
            (&[2.0, 2.5], 1),
            (&[3.0, 2.0], 1),
            (&[2.5, 3.5], 1),
            (&[-2.0, -1.0], -1),
            (&[-1.5, -3.0], -1),
            (&[-3.0, -2.0], -1),
        ]);
        let m = train_binary(&data, &TrainConfig::default()).unwrap();
        assert!(data.iter().all(|(x, y)| (m.decision(x).unwrap() > 0.0) == (*y > 0)));
    }

    #[test]
    fn margin_examples_sit_at_one() {
        let data = dense(&[(&[-2.0, 0.0], -1), (&[2.0, 0.0], 1), (&[4.0, 1.0], 1), (&[-4.0, -1.0], -1)]);
        let m = train_binary(&data, &strict()).unwrap();
        assert!((m.decision(&data[0].0).unwrap() + 1.0).abs() < 1e-4);
        assert!((m.decision(&data[1].0).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn single_class_rejected() {
        let data = dense(&[(&[1.0], 1), (&[2.0], 1)]);
        assert!(matches!(train_binary(&data, &TrainConfig::default()), Err(ClassifyError::SingleClass)));
    }

    #[test]
    fn decision_linearity_and_dimensions() {
        let m = LinearModel::new(vec![1.0, -2.0], 0.5);
        assert_eq!(m.decision(&SparseVector::zeros(2)).unwrap(), 0.5);
        let x = SparseVector::from_dense(&[3.0, 1.0]);
        assert_eq!(m.negated().decision(&x).unwrap(), -m.decision(&x).unwrap());
        assert!(matches!(
            m.decision(&SparseVector::zeros(3)),
            Err(ClassifyError::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn objective_is_monotone_and_matches_recomputation() {
        let data = dense(&[(&[1.0, 0.2], 1), (&[0.8, -0.1], -1), (&[-0.5, 1.0], 1), (&[0.1, 0.1], -1), (&[-1.0, -0.3], -1)]);
        let (_, trace) = train_binary_traced(&data, &TrainConfig { max_epochs: 200, tolerance: 1e-8, ..Default::default() }).unwrap();
        for w in trace.dual_objectives.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        let recomputed = dual_objective(&data, &trace.dual);
        assert!((recomputed - trace.dual_objectives.last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn seeded_training_is_reproducible() {
        let data = dense(&[(&[1.0, 0.2], 1), (&[0.8, -0.1], -1), (&[-0.5, 1.0], 1), (&[0.1, 0.1], -1)]);
        let cfg = TrainConfig { seed: 9, ..Default::default() };
        assert_eq!(train_binary(&data, &cfg).unwrap(), train_binary(&data, &cfg).unwrap());
    }
}
