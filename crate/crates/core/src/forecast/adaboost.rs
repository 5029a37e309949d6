//! AdaBoost.R2 with linear loss over weighted regression trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{FeatureMatrix, RegressionTree, TreeFitter, DEFAULT_MAX_DEPTH};
use crate::error::{Error, Result};
use crate::scalar::{total_cmp, Scalar};

pub const DEFAULT_N_ESTIMATORS: usize = 10;
pub const DEFAULT_LEARNING_RATE: f64 = 1.0;
pub const DEFAULT_MIN_ROWS: usize = 10;
/// β used for a stage that fits the training rows exactly.
pub const PERFECT_FIT_BETA: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaBoostParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    /// Minimum number of training rows (E_min).
    pub min_rows: usize,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        Self {
            n_estimators: DEFAULT_N_ESTIMATORS,
            learning_rate: DEFAULT_LEARNING_RATE,
            max_depth: DEFAULT_MAX_DEPTH,
            min_rows: DEFAULT_MIN_ROWS,
        }
    }
}

impl AdaBoostParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_estimators == 0 {
            return Err(Error::InvalidArgument("n_estimators must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.min_rows == 0 {
            return Err(Error::InvalidArgument("min_rows must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostStage<T> {
    pub tree: RegressionTree<T>,
    /// Stage weight α = learning_rate · ln(1/β).
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaBoostModel<T> {
    stages: Vec<BoostStage<T>>,
    params: AdaBoostParams,
    seed: u64,
    /// Set when the first stage already had average loss ≥ 0.5 and was kept
    /// with unit weight so the model is usable.
    fallback: bool,
}

/// State recorded after each boosting stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace<T> {
    pub max_error: T,
    pub average_loss: T,
    pub beta: T,
    pub retained: bool,
    /// Sample weights after this stage's update.
    pub sample_weights: Vec<T>,
}

impl<T: Scalar> AdaBoostModel<T> {
    pub fn stages(&self) -> &[BoostStage<T>] {
        &self.stages
    }

    pub fn params(&self) -> &AdaBoostParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_fallback(&self) -> bool {
        self.fallback
    }

    pub fn stage_predictions(&self, x: &[T]) -> Vec<T> {
        self.stages.iter().map(|s| s.tree.predict(x)).collect()
    }

    /// Weighted median of stage predictions.
    pub fn predict(&self, x: &[T]) -> T {
        let preds = self.stage_predictions(x);
        let alphas: Vec<T> = self.stages.iter().map(|s| s.weight).collect();
        weighted_median(&preds, &alphas)
    }
}

pub fn adaboost_predict<T: Scalar>(model: &AdaBoostModel<T>, x: &[T]) -> T {
    model.predict(x)
}

/// First value in ascending order whose cumulative weight reaches half the total.
pub fn weighted_median<T: Scalar>(values: &[T], weights: &[T]) -> T {
    assert!(!values.is_empty() && values.len() == weights.len());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| total_cmp(&values[a], &values[b]).then(a.cmp(&b)));
    let total: T = weights.iter().copied().sum();
    let half = total / T::lit(2.0);
    let mut cum = T::zero();
    for &i in &order {
        cum += weights[i];
        if cum >= half {
            return values[i];
        }
    }
    values[order[order.len() - 1]]
}

pub fn adaboost_fit<T: Scalar>(
    features: &FeatureMatrix<T>,
    targets: &[T],
    params: &AdaBoostParams,
    seed: u64,
) -> Result<AdaBoostModel<T>> {
    adaboost_fit_traced(features, targets, params, seed).map(|(m, _)| m)
}

pub fn adaboost_fit_traced<T: Scalar>(
    features: &FeatureMatrix<T>,
    targets: &[T],
    params: &AdaBoostParams,
    seed: u64,
) -> Result<(AdaBoostModel<T>, Vec<StageTrace<T>>)> {
    params.validate()?;
    let n = features.n_rows();
    if n == 0 {
        return Err(Error::InsufficientData { needed: params.min_rows, got: 0 });
    }
    if n < params.min_rows {
        return Err(Error::InsufficientData { needed: params.min_rows, got: n });
    }
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("training targets must be finite".into()));
    }
    let fitter = TreeFitter::new(features, targets)?;
    let lr = T::lit(params.learning_rate);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = vec![T::one() / T::from_count(n); n];
    let mut stages = Vec::with_capacity(params.n_estimators);
    let mut traces = Vec::with_capacity(params.n_estimators);
    let mut fallback = false;
    let mut counts = vec![T::zero(); n];
    let mut cumulative = vec![0.0f64; n];

    for _ in 0..params.n_estimators {
        bootstrap_counts(&weights, &mut cumulative, &mut counts, &mut rng);
        let tree = fitter.fit(&counts, params.max_depth)?;
        let errors: Vec<T> = (0..n).map(|i| (tree.predict(features.row(i)) - targets[i]).abs()).collect();
        let max_error = errors.iter().copied().fold(T::zero(), T::max);

        if !(max_error > T::zero()) {
            let beta = T::lit(PERFECT_FIT_BETA);
            stages.push(BoostStage { tree, weight: lr * (T::one() / beta).ln() });
            traces.push(StageTrace {
                max_error,
                average_loss: T::zero(),
                beta,
                retained: true,
                sample_weights: weights.clone(),
            });
            break;
        }

        let losses: Vec<T> = errors.iter().map(|&e| e / max_error).collect();
        let average_loss: T = weights.iter().zip(&losses).map(|(&w, &l)| w * l).sum();

        if average_loss >= T::lit(0.5) {
            let retained = stages.is_empty();
            if retained {
                stages.push(BoostStage { tree, weight: T::one() });
                fallback = true;
            }
            traces.push(StageTrace {
                max_error,
                average_loss,
                beta: T::one(),
                retained,
                sample_weights: weights.clone(),
            });
            break;
        }
        if !(average_loss > T::zero()) {
            // Only zero-weight rows carry error.
            let beta = T::lit(PERFECT_FIT_BETA);
            stages.push(BoostStage { tree, weight: lr * (T::one() / beta).ln() });
            traces.push(StageTrace { max_error, average_loss, beta, retained: true, sample_weights: weights.clone() });
            break;
        }

        let beta = average_loss / (T::one() - average_loss);
        stages.push(BoostStage { tree, weight: lr * (T::one() / beta).ln() });
        for (w, &l) in weights.iter_mut().zip(&losses) {
            *w *= beta.powf(lr * (T::one() - l));
        }
        let total: T = weights.iter().copied().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        traces.push(StageTrace { max_error, average_loss, beta, retained: true, sample_weights: weights.clone() });
    }

    Ok((AdaBoostModel { stages, params: *params, seed, fallback }, traces))
}

/// Weighted bootstrap of `n` draws, recorded as per-row multiplicities.
fn bootstrap_counts<T: Scalar>(weights: &[T], cumulative: &mut [f64], counts: &mut [T], rng: &mut ChaCha8Rng) {
    let mut acc = 0.0;
    for (c, w) in cumulative.iter_mut().zip(weights) {
        acc += w.to_f64_lossy();
        *c = acc;
    }
    let mut tally = vec![0usize; weights.len()];
    for _ in 0..weights.len() {
        let u = rng.random::<f64>() * acc;
        let i = cumulative.partition_point(|&c| c <= u).min(weights.len() - 1);
        tally[i] += 1;
    }
    for (c, t) in counts.iter_mut().zip(tally) {
        *c = T::from_count(t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> FeatureMatrix<f64> {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        FeatureMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn weighted_median_walk_through() {
        assert_eq!(weighted_median(&[1.0, 2.0, 3.0], &[0.2, 0.3, 0.5]), 2.0);
        assert_eq!(weighted_median(&[3.0, 1.0, 2.0], &[0.5, 0.2, 0.3]), 2.0);
        assert_eq!(weighted_median(&[7.0], &[0.1]), 7.0);
    }

    #[test]
    fn constant_targets_stop_after_one_stage() {
        let x = column(&(0..12).map(f64::from).collect::<Vec<_>>());
        let m = adaboost_fit(&x, &[3.5; 12], &AdaBoostParams::default(), 1).unwrap();
        assert_eq!(m.stages().len(), 1);
        assert_eq!(m.predict(&[4.0]), 3.5);
        assert!(m.stages()[0].weight > 0.0);
    }

    #[test]
    fn too_few_rows_rejected() {
        let x = column(&[0.0, 1.0]);
        assert!(matches!(
            adaboost_fit(&x, &[0.0, 1.0], &AdaBoostParams::default(), 0),
            Err(Error::InsufficientData { needed: 10, got: 2 })
        ));
    }

    #[test]
    fn deterministic_for_seed() {
        let xs: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * 2.0 + (x * 9.0).cos()).collect();
        let x = column(&xs);
        let a = adaboost_fit(&x, &ys, &AdaBoostParams::default(), 99).unwrap();
        let b = adaboost_fit(&x, &ys, &AdaBoostParams::default(), 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bootstrap_total_is_n() {
        let w = vec![0.1, 0.2, 0.3, 0.4];
        let mut cum = vec![0.0; 4];
        let mut counts = vec![0.0; 4];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        bootstrap_counts(&w, &mut cum, &mut counts, &mut rng);
        assert_eq!(counts.iter().sum::<f64>(), 4.0);
    }
}
