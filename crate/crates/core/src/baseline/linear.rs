use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exchange::{Prediction, PredictionSet};
use super::features::{featurize, HashDim, SparseVector};
use super::labels::{Example, LabelSpace};
use crate::error::{Error, Result};
use crate::num::{from_f64, from_usize, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub hash_bits: u32,
    pub batch_size: usize,
    /// Keep the epoch with the best dev accuracy instead of the last one.
    pub dev_checkpoint: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 5,
            learning_rate: 0.1,
            seed: 42,
            hash_bits: 18,
            batch_size: 1,
            dev_checkpoint: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean cross-entropy over the full training set after the epoch.
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub dev_accuracy: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochStats>,
    /// 1-based epoch whose weights were kept; 0 when no epoch ran.
    pub selected_epoch: usize,
}

/// Multinomial logistic regression over hashed features.
///
/// `weights` is row-major with one row of `hash_dim` entries per label.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<T> {
    pub(crate) hash_dim: HashDim,
    pub(crate) weights: Vec<T>,
    pub(crate) bias: Vec<T>,
    pub(crate) labels: Vec<String>,
    pub(crate) space: LabelSpace,
    pub(crate) config: TrainConfig,
}

impl<T: Scalar> LinearModel<T> {
    pub(crate) fn zeros(labels: Vec<String>, space: LabelSpace, config: TrainConfig) -> Result<Self> {
        let hash_dim = HashDim::from_bits(config.hash_bits)?;
        Ok(LinearModel {
            hash_dim,
            weights: vec![T::zero(); labels.len() * hash_dim.size()],
            bias: vec![T::zero(); labels.len()],
            labels,
            space,
            config,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn space(&self) -> LabelSpace {
        self.space
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn hash_dim(&self) -> HashDim {
        self.hash_dim
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn bias(&self) -> &[T] {
        &self.bias
    }

    fn row(&self, k: usize) -> &[T] {
        let d = self.hash_dim.size();
        &self.weights[k * d..(k + 1) * d]
    }

    /// Softmax class probabilities, in `labels()` order.
    pub fn probabilities(&self, x: &SparseVector<T>) -> Vec<T> {
        let logits: Vec<T> = (0..self.labels.len())
            .map(|k| self.bias[k] + x.dot(self.row(k)))
            .collect();
        softmax(&logits)
    }

    pub fn probabilities_for(&self, text: &str) -> Vec<T> {
        self.probabilities(&featurize(text, self.hash_dim))
    }

    /// Index of the most probable label; ties go to the earlier label.
    pub fn argmax(probs: &[T]) -> usize {
        let mut best = 0;
        for (k, &p) in probs.iter().enumerate().skip(1) {
            if p > probs[best] {
                best = k;
            }
        }
        best
    }

    pub fn predict_label(&self, text: &str) -> &str {
        &self.labels[Self::argmax(&self.probabilities_for(text))]
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|w| w.is_finite())
    }
}

fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

struct Encoded<T> {
    x: SparseVector<T>,
    y: Option<usize>,
}

fn encode<T: Scalar>(data: &[Example<'_>], labels: &[String], dim: HashDim) -> Vec<Encoded<T>> {
    data.par_iter()
        .map(|e| Encoded {
            x: featurize(e.text, dim),
            y: labels.binary_search(&e.label).ok(),
        })
        .collect()
}

/// Mean cross-entropy and accuracy of `model` on encoded data.
fn evaluate<T: Scalar>(model: &LinearModel<T>, data: &[Encoded<T>]) -> (f64, f64) {
    let (loss, correct) = data
        .par_iter()
        .map(|e| {
            let p = model.probabilities(&e.x);
            let pred = LinearModel::argmax(&p);
            let loss = e.y.map_or(0.0, |y| -p[y].to_f64().unwrap_or(f64::NAN).max(f64::MIN_POSITIVE).ln());
            (loss, usize::from(Some(pred) == e.y))
        })
        .reduce(|| (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = data.len().max(1) as f64;
    (loss / n, correct as f64 / n)
}

/// Trains a softmax regression by mini-batch SGD on cross-entropy.
///
/// The label list is the sorted set of training labels. Example order is
/// shuffled every epoch from a stream seeded by `config.seed`, so two runs
/// with the same inputs produce bit-identical weights. When `dev` is
/// non-empty and `dev_checkpoint` is set, the weights of the epoch with the
/// highest dev accuracy are returned (earliest on ties); otherwise the last
/// epoch wins.
pub fn train_linear<T: Scalar>(
    train: &[Example<'_>],
    dev: &[Example<'_>],
    space: LabelSpace,
    config: &TrainConfig,
) -> Result<(LinearModel<T>, TrainLog)> {
    if train.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if config.batch_size == 0 {
        return Err(Error::invalid("batch size must be positive"));
    }
    if !(config.learning_rate >= 0.0 && config.learning_rate.is_finite()) {
        return Err(Error::invalid(format!(
            "learning rate must be finite and non-negative, got {}",
            config.learning_rate
        )));
    }
    for e in train.iter().chain(dev) {
        space.check(&e.label)?;
    }
    let mut labels: Vec<String> = train.iter().map(|e| e.label.clone()).collect();
    labels.sort();
    labels.dedup();

    let mut model = LinearModel::<T>::zeros(labels, space, config.clone())?;
    let train_x = encode::<T>(train, &model.labels, model.hash_dim);
    let dev_x = encode::<T>(dev, &model.labels, model.hash_dim);
    let use_dev = config.dev_checkpoint && !dev_x.is_empty();

    let lr: T = from_f64(config.learning_rate);
    let dim = model.hash_dim.size();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..train_x.len()).collect();
    let mut log = TrainLog::default();
    let mut best: Option<(f64, LinearModel<T>)> = None;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for (b, batch) in order.chunks(config.batch_size).enumerate() {
            let scale = lr / from_usize::<T>(batch.len());
            let probs: Vec<Vec<T>> = batch.iter().map(|&i| model.probabilities(&train_x[i].x)).collect();
            let mut batch_loss = 0.0;
            for (&i, p) in batch.iter().zip(&probs) {
                let y = train_x[i].y.expect("training labels are in the label list");
                batch_loss -= p[y].to_f64().unwrap_or(f64::NAN).ln();
            }
            let batch_loss = batch_loss / batch.len() as f64;
            if !batch_loss.is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    batch: b,
                    loss: batch_loss,
                });
            }
            for (&i, p) in batch.iter().zip(&probs) {
                let e = &train_x[i];
                let y = e.y.expect("training labels are in the label list");
                for (k, &pk) in p.iter().enumerate() {
                    let target = if k == y { T::one() } else { T::zero() };
                    let g = (pk - target) * scale;
                    model.bias[k] = model.bias[k] - g;
                    let row = &mut model.weights[k * dim..(k + 1) * dim];
                    for (j, v) in e.x.iter() {
                        row[j] = row[j] - g * v;
                    }
                }
            }
        }
        let (train_loss, train_accuracy) = evaluate(&model, &train_x);
        if !train_loss.is_finite() || !model.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                batch: usize::MAX,
                loss: train_loss,
            });
        }
        let dev_accuracy = (!dev_x.is_empty()).then(|| evaluate(&model, &dev_x).1);
        log.epochs.push(EpochStats {
            epoch,
            train_loss,
            train_accuracy,
            dev_accuracy,
        });
        if use_dev {
            let acc = dev_accuracy.expect("dev set is non-empty");
            if best.as_ref().is_none_or(|(b, _)| acc > *b) {
                best = Some((acc, model.clone()));
                log.selected_epoch = epoch;
            }
        } else {
            log.selected_epoch = epoch;
        }
    }
    if let Some((_, m)) = best {
        model = m;
    }
    Ok((model, log))
}

/// Argmax label and class probabilities for each `(statement_id, text)`.
pub fn predict<T: Scalar>(
    model: &LinearModel<T>,
    statements: &[(&str, &str)],
    model_name: &str,
    split_name: &str,
) -> PredictionSet {
    let preds: Vec<Prediction> = statements
        .par_iter()
        .map(|&(id, text)| {
            let p = model.probabilities_for(text);
            let k = LinearModel::argmax(&p);
            Prediction {
                statement_id: id.to_owned(),
                label: model.labels[k].clone(),
                probs: Some(
                    model
                        .labels
                        .iter()
                        .cloned()
                        .zip(p.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)))
                        .collect(),
                ),
            }
        })
        .collect();
    PredictionSet::from_predictions(model_name, split_name, preds)
        .expect("statement ids passed to predict are unique")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Vec<(String, String, String)> {
        let left = ["workers", "unions", "welfare", "nationalise", "peace"];
        let right = ["army", "police", "markets", "tradition", "enterprise"];
        let mut out = Vec::new();
        for i in 0..10 {
            let l = format!("we support {} and {}", left[i % 5], left[(i + 2) % 5]);
            let r = format!("we support {} and {}", right[i % 5], right[(i + 3) % 5]);
            out.push((format!("l{i}"), l, "Left".to_owned()));
            out.push((format!("r{i}"), r, "Right".to_owned()));
        }
        out
    }

    fn as_examples(rows: &[(String, String, String)]) -> Vec<Example<'_>> {
        rows.iter()
            .map(|(id, t, l)| Example {
                id,
                text: t,
                label: l.clone(),
            })
            .collect()
    }

    fn small_config() -> TrainConfig {
        TrainConfig {
            hash_bits: 12,
            epochs: 50,
            batch_size: 4,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn separable_toy_set_is_fit() {
        let rows = toy();
        let ex = as_examples(&rows);
        let (model, log) = train_linear::<f64>(&ex, &[], LabelSpace::Rile3, &small_config()).unwrap();
        assert_eq!(log.epochs.last().unwrap().train_accuracy, 1.0);
        for e in &ex {
            assert_eq!(model.predict_label(e.text), e.label);
        }
    }

    #[test]
    fn training_is_bit_deterministic() {
        let rows = toy();
        let ex = as_examples(&rows);
        let (a, _) = train_linear::<f64>(&ex, &[], LabelSpace::Rile3, &small_config()).unwrap();
        let (b, _) = train_linear::<f64>(&ex, &[], LabelSpace::Rile3, &small_config()).unwrap();
        let bits = |m: &LinearModel<f64>| m.weights.iter().map(|w| w.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn loss_non_increasing_with_small_rate() {
        let rows = toy();
        let ex = as_examples(&rows);
        let cfg = TrainConfig {
            learning_rate: 0.01,
            ..small_config()
        };
        let (_, log) = train_linear::<f64>(&ex, &[], LabelSpace::Rile3, &cfg).unwrap();
        for w in log.epochs.windows(2) {
            assert!(w[1].train_loss <= w[0].train_loss, "{} -> {}", w[0].train_loss, w[1].train_loss);
        }
    }

    #[test]
    fn zero_learning_rate_gives_uniform_probabilities() {
        let rows = toy();
        let ex = as_examples(&rows);
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 3,
            ..small_config()
        };
        let (model, _) = train_linear::<f64>(&ex, &[], LabelSpace::Rile3, &cfg).unwrap();
        assert!(model.weights.iter().all(|&w| w == 0.0));
        assert_eq!(model.probabilities_for("army and peace"), vec![0.5, 0.5]);
    }

    #[test]
    fn dev_checkpoint_selects_best_epoch() {
        let rows = toy();
        let ex = as_examples(&rows);
        let cfg = TrainConfig {
            epochs: 6,
            ..small_config()
        };
        let (_, log) = train_linear::<f64>(&ex[..10], &ex[10..], LabelSpace::Rile3, &cfg).unwrap();
        let best = log
            .epochs
            .iter()
            .map(|e| e.dev_accuracy.unwrap())
            .fold(f64::MIN, f64::max);
        let first_best = log.epochs.iter().find(|e| e.dev_accuracy == Some(best)).unwrap();
        assert_eq!(log.selected_epoch, first_best.epoch);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(train_linear::<f64>(&[], &[], LabelSpace::Rile3, &small_config()).is_err());
        let bad = [Example {
            id: "x",
            text: "t",
            label: "Centre".into(),
        }];
        assert!(matches!(
            train_linear::<f64>(&bad, &[], LabelSpace::Rile3, &small_config()),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn diverging_rate_is_reported() {
        let rows = toy();
        let ex = as_examples(&rows);
        let cfg = TrainConfig {
            learning_rate: 1e300,
            epochs: 3,
            ..small_config()
        };
        assert!(matches!(
            train_linear::<f64>(&ex, &[], LabelSpace::Rile3, &cfg),
            Err(Error::NonFiniteLoss { .. })
        ));
    }

    #[test]
    fn predict_probabilities_sum_to_one() {
        let rows = toy();
        let ex = as_examples(&rows);
        let (model, _) = train_linear::<f32>(&ex, &[], LabelSpace::Rile3, &small_config()).unwrap();
        let inputs: Vec<(&str, &str)> = ex.iter().map(|e| (e.id, e.text)).collect();
        let set = predict(&model, &inputs, "linear", "toy");
        assert_eq!(set.len(), ex.len());
        for p in set.iter() {
            let s: f64 = p.probs.as_ref().unwrap().values().sum();
            assert!((s - 1.0).abs() < 1e-6);
        }
        assert!(predict(&model, &[], "linear", "toy").is_empty());
    }
}
