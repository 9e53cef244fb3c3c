use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_training_set;
use super::optim::{lbfgs, proximal_gradient, StopRule};
use crate::features::{FeatureMatrix, FeatureVector};
use crate::{argmax, log_sum_exp, softmax, Error, Real, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    None,
    L1,
    #[default]
    L2,
}

impl std::fmt::Display for Penalty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Penalty::None => "none",
            Penalty::L1 => "l1",
            Penalty::L2 => "l2",
        })
    }
}

/// Per-class multipliers on the data loss.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassWeights {
    /// Every class weighs 1.
    #[default]
    None,
    /// `N / (K · N_k)`.
    Balanced,
    /// Label to positive weight; unlisted labels weigh 1.
    Explicit(Vec<(String, f64)>),
}

impl std::fmt::Display for ClassWeights {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassWeights::None => f.write_str("none"),
            ClassWeights::Balanced => f.write_str("balanced"),
            ClassWeights::Explicit(w) => {
                let parts: Vec<String> = w.iter().map(|(l, v)| format!("{l}={v}")).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

impl ClassWeights {
    /// Weight of each class, given class member counts.
    pub fn resolve(&self, classes: &[String], counts: &[usize]) -> Result<Vec<f64>> {
        match self {
            ClassWeights::None => Ok(vec![1.0; classes.len()]),
            ClassWeights::Balanced => {
                let n: usize = counts.iter().sum();
                let k = classes.len() as f64;
                counts
                    .iter()
                    .zip(classes)
                    .map(|(&nk, label)| {
                        if nk == 0 {
                            Err(Error::ClassTooSmall {
                                label: label.clone(),
                                count: 0,
                                required: 1,
                            })
                        } else {
                            Ok(n as f64 / (k * nk as f64))
                        }
                    })
                    .collect()
            }
            ClassWeights::Explicit(pairs) => {
                let mut w = vec![1.0; classes.len()];
                for (label, v) in pairs {
                    let i = classes
                        .iter()
                        .position(|c| c == label)
                        .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
                    if !(v.is_finite() && *v > 0.0) {
                        return Err(Error::InvalidConfig(format!(
                            "class weight for `{label}` must be positive, got {v}"
                        )));
                    }
                    w[i] = *v;
                }
                Ok(w)
            }
        }
    }
}

/// Starting point of the optimizer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    Zeros,
    /// Uniform in `[-scale, scale]`, drawn from the config seed.
    Random { scale: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TrainConfig<T> {
    pub penalty: Penalty,
    /// Inverse regularization strength.
    #[serde(rename = "C")]
    pub c: T,
    #[serde(default)]
    pub class_weights: ClassWeights,
    /// Convergence threshold on the gradient infinity norm.
    pub tolerance: T,
    pub max_iterations: usize,
    pub seed: u64,
    #[serde(default)]
    pub init: Init,
}

impl<T: Real> TrainConfig<T> {
    pub fn new(penalty: Penalty, c: T) -> Self {
        TrainConfig {
            penalty,
            c,
            class_weights: ClassWeights::None,
            tolerance: T::of(1e-6),
            max_iterations: 1000,
            seed: crate::corpus::DEFAULT_SEED,
            init: Init::Zeros,
        }
    }

    pub fn with_class_weights(mut self, w: ClassWeights) -> Self {
        self.class_weights = w;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > T::zero()) {
            return Err(Error::InvalidConfig(format!("C must be positive, got {}", self.c)));
        }
        if self.tolerance.is_nan() || self.tolerance <= T::zero() {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if let Init::Random { scale } = self.init {
            if !(scale.is_finite() && scale >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "init scale must be non-negative, got {scale}"
                )));
            }
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> TrainConfig<U> {
        TrainConfig {
            penalty: self.penalty,
            c: U::of(self.c.as_f64()),
            class_weights: self.class_weights.clone(),
            tolerance: U::of(self.tolerance.as_f64()),
            max_iterations: self.max_iterations,
            seed: self.seed,
            init: self.init,
        }
    }
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        TrainConfig::new(Penalty::L2, T::one())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TrainDiagnostics<T> {
    pub iterations: usize,
    pub converged: bool,
    pub loss: T,
    pub grad_inf_norm: T,
}

/// Multinomial softmax regression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LogRegModel<T> {
    classes: Vec<String>,
    n_features: usize,
    /// Row-major `K × V`.
    weights: Vec<T>,
    bias: Vec<T>,
    penalty: Penalty,
    #[serde(rename = "C")]
    c: T,
    class_weights: Vec<f64>,
    diagnostics: TrainDiagnostics<T>,
}

impl<T: Real> LogRegModel<T> {
    /// Builds a model from explicit parameters.
    pub fn from_parts(classes: Vec<String>, n_features: usize, weights: Vec<T>, bias: Vec<T>) -> Result<Self> {
        let k = classes.len();
        if k < 2 || weights.len() != k * n_features || bias.len() != k {
            return Err(Error::Shape(format!(
                "{k} classes, {n_features} features: got {} weights and {} biases",
                weights.len(),
                bias.len()
            )));
        }
        if weights.iter().chain(&bias).any(|w| !w.is_finite()) {
            return Err(Error::Shape("non-finite parameter".into()));
        }
        Ok(LogRegModel {
            classes,
            n_features,
            weights,
            bias,
            penalty: Penalty::None,
            c: T::one(),
            class_weights: vec![1.0; k],
            diagnostics: TrainDiagnostics {
                iterations: 0,
                converged: true,
                loss: T::zero(),
                grad_inf_norm: T::zero(),
            },
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight_row(&self, k: usize) -> &[T] {
        &self.weights[k * self.n_features..(k + 1) * self.n_features]
    }

    pub fn bias(&self) -> &[T] {
        &self.bias
    }

    pub fn penalty(&self) -> Penalty {
        self.penalty
    }

    pub fn c(&self) -> T {
        self.c
    }

    /// Resolved per-class loss multipliers used in training.
    pub fn class_weights(&self) -> &[f64] {
        &self.class_weights
    }

    pub fn diagnostics(&self) -> &TrainDiagnostics<T> {
        &self.diagnostics
    }

    /// Euclidean norm of the weight matrix, bias excluded.
    pub fn weight_norm(&self) -> T {
        self.weights.iter().map(|&w| w * w).sum::<T>().sqrt()
    }

    pub fn scores(&self, x: &FeatureVector<T>) -> Vec<T> {
        (0..self.classes.len())
            .map(|k| x.dot(self.weight_row(k)) + self.bias[k])
            .collect()
    }
}

/// Training objective over a fixed design matrix. Parameters are laid out
/// as the row-major `K × V` weights followed by the `K` biases.
pub struct Objective<'a, T> {
    x: &'a FeatureMatrix<T>,
    y: &'a [usize],
    n_classes: usize,
    class_weights: Vec<T>,
    penalty: Penalty,
    inv_c: T,
}

/// Rows are split into at most this many contiguous chunks; partial sums are
/// added in chunk order so results do not depend on the thread count.
const CHUNKS: usize = 8;
const MIN_CHUNK_ROWS: usize = 256;

impl<'a, T: Real> Objective<'a, T> {
    pub fn new(
        x: &'a FeatureMatrix<T>,
        y: &'a [usize],
        n_classes: usize,
        class_weights: &[f64],
        penalty: Penalty,
        c: T,
    ) -> Self {
        assert_eq!(class_weights.len(), n_classes);
        Objective {
            x,
            y,
            n_classes,
            class_weights: class_weights.iter().map(|&w| T::of(w)).collect(),
            penalty,
            inv_c: T::one() / c,
        }
    }

    pub fn n_params(&self) -> usize {
        self.n_classes * (self.x.n_cols() + 1)
    }

    fn n_weights(&self) -> usize {
        self.n_classes * self.x.n_cols()
    }

    /// Weighted negative log-likelihood and its gradient, no penalty.
    pub fn data_loss(&self, params: &[T]) -> (T, Vec<T>) {
        let n = self.y.len();
        let chunk = n.div_ceil(CHUNKS).max(MIN_CHUNK_ROWS);
        let ranges: Vec<(usize, usize)> = (0..n).step_by(chunk.max(1)).map(|s| (s, (s + chunk).min(n))).collect();
        let partials: Vec<(T, Vec<T>)> = ranges.par_iter().map(|&(a, b)| self.chunk_loss(params, a, b)).collect();
        let mut iter = partials.into_iter();
        let (mut loss, mut grad) = iter
            .next()
            .unwrap_or_else(|| (T::zero(), vec![T::zero(); self.n_params()]));
        for (l, g) in iter {
            loss += l;
            for (a, b) in grad.iter_mut().zip(g) {
                *a += b;
            }
        }
        (loss, grad)
    }

    fn chunk_loss(&self, params: &[T], start: usize, end: usize) -> (T, Vec<T>) {
        let v = self.x.n_cols();
        let k = self.n_classes;
        let (w, b) = params.split_at(k * v);
        let mut grad = vec![T::zero(); params.len()];
        let mut loss = T::zero();
        let mut scores = vec![T::zero(); k];
        for i in start..end {
            let row = self.x.row(i);
            let yi = self.y[i];
            for (c, s) in scores.iter_mut().enumerate() {
                *s = row.dot(&w[c * v..(c + 1) * v]) + b[c];
            }
            let lse = log_sum_exp(&scores);
            let cw = self.class_weights[yi];
            loss += cw * (lse - scores[yi]);
            for c in 0..k {
                let p = (scores[c] - lse).exp();
                let r = cw * (p - if c == yi { T::one() } else { T::zero() });
                if r == T::zero() {
                    continue;
                }
                let gw = &mut grad[c * v..(c + 1) * v];
                for (j, xj) in row.iter() {
                    gw[j] += r * xj;
                }
                grad[k * v + c] += r;
            }
        }
        (loss, grad)
    }

    /// `(1/C) R(W)`: zero, `Σ|w|`, or `½Σw²`. Biases are never penalized.
    pub fn penalty_value(&self, params: &[T]) -> T {
        let w = &params[..self.n_weights()];
        match self.penalty {
            Penalty::None => T::zero(),
            Penalty::L1 => self.inv_c * w.iter().map(|v| v.abs()).sum::<T>(),
            Penalty::L2 => self.inv_c * T::of(0.5) * w.iter().map(|&v| v * v).sum::<T>(),
        }
    }

    /// Full objective and its gradient; for l1 the gradient uses `sign(0) = 0`.
    pub fn loss_and_gradient(&self, params: &[T]) -> (T, Vec<T>) {
        let (mut loss, mut grad) = self.data_loss(params);
        loss += self.penalty_value(params);
        let nw = self.n_weights();
        match self.penalty {
            Penalty::None => {}
            Penalty::L1 => {
                for (g, &w) in grad[..nw].iter_mut().zip(&params[..nw]) {
                    if w > T::zero() {
                        *g += self.inv_c;
                    } else if w < T::zero() {
                        *g -= self.inv_c;
                    }
                }
            }
            Penalty::L2 => {
                for (g, &w) in grad[..nw].iter_mut().zip(&params[..nw]) {
                    *g += self.inv_c * w;
                }
            }
        }
        (loss, grad)
    }
}

/// Objective value and exact gradient at `params` for the given configuration.
pub fn loss_and_gradient<T: Real>(
    params: &[T],
    x: &FeatureMatrix<T>,
    y: &[usize],
    n_classes: usize,
    config: &TrainConfig<T>,
) -> Result<(T, Vec<T>)> {
    config.validate()?;
    let labels: Vec<String> = (0..n_classes).map(|k| k.to_string()).collect();
    let mut counts = vec![0usize; n_classes];
    for &c in y {
        if c >= n_classes {
            return Err(Error::UnknownLabel(c.to_string()));
        }
        counts[c] += 1;
    }
    let cw = config.class_weights.resolve(&labels, &counts)?;
    let obj = Objective::new(x, y, n_classes, &cw, config.penalty, config.c);
    if params.len() != obj.n_params() {
        return Err(Error::Shape(format!(
            "expected {} parameters, got {}",
            obj.n_params(),
            params.len()
        )));
    }
    Ok(obj.loss_and_gradient(params))
}

/// Minimizes `Σ_i c_{y_i} NLL_i + (1/C) R(W)`. Hitting the iteration cap is
/// reported in the diagnostics, not as an error.
pub fn train_logreg<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    classes: &[String],
    config: &TrainConfig<T>,
) -> Result<LogRegModel<T>> {
    config.validate()?;
    let counts = check_training_set(x, y, classes)?;
    let cw = config.class_weights.resolve(classes, &counts)?;
    let obj = Objective::new(x, y, classes.len(), &cw, config.penalty, config.c);
    let n_params = obj.n_params();
    let x0 = match config.init {
        Init::Zeros => vec![T::zero(); n_params],
        Init::Random { scale } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..n_params).map(|_| T::of(rng.gen_range(-scale..=scale))).collect()
        }
    };
    let stop = StopRule {
        tolerance: config.tolerance,
        max_iterations: config.max_iterations,
    };
    let out = match config.penalty {
        Penalty::None | Penalty::L2 => lbfgs(|p: &[T]| obj.loss_and_gradient(p), x0, stop),
        Penalty::L1 => {
            let nw = classes.len() * x.n_cols();
            let shrink: Vec<bool> = (0..n_params).map(|i| i < nw).collect();
            proximal_gradient(|p: &[T]| obj.data_loss(p), x0, obj.inv_c, &shrink, stop)
        }
    };
    if out.x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(
            "optimizer diverged to non-finite parameters".into(),
        ));
    }
    let nw = classes.len() * x.n_cols();
    let mut weights = out.x;
    let bias = weights.split_off(nw);
    Ok(LogRegModel {
        classes: classes.to_vec(),
        n_features: x.n_cols(),
        weights,
        bias,
        penalty: config.penalty,
        c: config.c,
        class_weights: cw,
        diagnostics: TrainDiagnostics {
            iterations: out.iterations,
            converged: out.converged,
            loss: out.loss,
            grad_inf_norm: out.grad_inf_norm,
        },
    })
}

/// Most probable class (lowest index on ties) and the softmax probabilities.
pub fn predict_logreg<T: Real>(model: &LogRegModel<T>, x: &FeatureVector<T>) -> (usize, Vec<T>) {
    let p = softmax(&model.scores(x));
    (argmax(&p), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(n: usize) -> Vec<String> {
        (0..n).map(|k| format!("c{k}")).collect()
    }

    fn toy() -> (FeatureMatrix<f64>, Vec<usize>) {
        let rows = vec![
            FeatureVector::from_pairs(vec![(0, 1.0), (1, 2.0)]),
            FeatureVector::from_pairs(vec![(1, 1.0)]),
            FeatureVector::from_pairs(vec![(2, 3.0)]),
            FeatureVector::from_pairs(vec![(0, 1.0), (2, 1.0)]),
        ];
        (FeatureMatrix::new(rows, 3).unwrap(), vec![0, 1, 2, 0])
    }

    #[test]
    fn zero_params_give_n_ln_k() {
        let (x, y) = toy();
        let cfg = TrainConfig::new(Penalty::None, 1.0);
        let (loss, _) = loss_and_gradient(&[0.0; 12], &x, &y, 3, &cfg).unwrap();
        assert!((loss - 4.0 * 3.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn l2_adds_half_squared_norm_over_c() {
        let (x, y) = toy();
        let params: Vec<f64> = (0..12).map(|i| (i as f64 - 5.0) / 7.0).collect();
        let none = loss_and_gradient(&params, &x, &y, 3, &TrainConfig::new(Penalty::None, 0.4))
            .unwrap()
            .0;
        let l2 = loss_and_gradient(&params, &x, &y, 3, &TrainConfig::new(Penalty::L2, 0.4))
            .unwrap()
            .0;
        let sq: f64 = params[..9].iter().map(|w| w * w).sum();
        assert!((l2 - none - sq / 2.0 / 0.4).abs() < 1e-12);
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = LogRegModel::<f64>::from_parts(classes(4), 2, vec![0.0; 8], vec![0.0; 4]).unwrap();
        let (label, p) = predict_logreg(&m, &FeatureVector::from_pairs(vec![(1, 3.0)]));
        assert_eq!(label, 0);
        for v in p {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn separable_points_are_fit() {
        let rows = vec![
            FeatureVector::from_pairs(vec![(0, 1.0)]),
            FeatureVector::from_pairs(vec![(1, 1.0)]),
        ];
        let x = FeatureMatrix::new(rows, 2).unwrap();
        let m = train_logreg(&x, &[0, 1], &classes(2), &TrainConfig::new(Penalty::L2, 1.0)).unwrap();
        assert!(m.diagnostics().converged);
        assert_eq!(predict_logreg(&m, x.row(0)).0, 0);
        assert_eq!(predict_logreg(&m, x.row(1)).0, 1);
    }

    #[test]
    fn strong_l2_recovers_priors() {
        let (x, y) = toy();
        let m = train_logreg(&x, &y, &classes(3), &TrainConfig::new(Penalty::L2, 1e-7)).unwrap();
        assert!(m.weight_norm() < 1e-5);
        let p = softmax(m.bias());
        for (pk, expected) in p.iter().zip([0.5, 0.25, 0.25]) {
            assert!((pk - expected).abs() < 1e-5, "{p:?}");
        }
    }

    #[test]
    fn l1_converges_and_sparsifies() {
        let (x, y) = toy();
        let m = train_logreg(&x, &y, &classes(3), &TrainConfig::new(Penalty::L1, 0.5)).unwrap();
        assert!(m.diagnostics().converged, "{:?}", m.diagnostics());
        assert!(m.weights().contains(&0.0));
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let (x, _) = toy();
        let cfg = TrainConfig::new(Penalty::L2, 1.0);
        assert!(matches!(
            train_logreg(&x, &[0, 0, 0, 0], &classes(1), &cfg),
            Err(Error::SingleClass(_))
        ));
        assert!(train_logreg(&x, &[0, 0, 0, 0], &classes(2), &cfg).is_err());
        assert!(train_logreg(&x, &[0, 1, 2, 0], &classes(3), &TrainConfig::new(Penalty::L2, 0.0)).is_err());
    }

    #[test]
    fn balanced_weights() {
        let w = ClassWeights::Balanced.resolve(&classes(2), &[3, 1]).unwrap();
        assert_eq!(w, [4.0 / 6.0, 2.0]);
        let e = ClassWeights::Explicit(vec![("c1".into(), 2.0)])
            .resolve(&classes(2), &[3, 1])
            .unwrap();
        assert_eq!(e, [1.0, 2.0]);
        assert!(ClassWeights::Explicit(vec![("zz".into(), 2.0)])
            .resolve(&classes(2), &[3, 1])
            .is_err());
    }

    #[test]
    fn config_serde_uses_capital_c() {
        let cfg: TrainConfig<f64> = TrainConfig::new(Penalty::L2, 0.31);
        let json = serde_json::to_value(&cfg).unwrap();
        assert_eq!(json["C"], 0.31);
        assert_eq!(json["penalty"], "l2");
        let back: TrainConfig<f64> = serde_json::from_value(json).unwrap();
        assert_eq!(back, cfg);
    }
}
