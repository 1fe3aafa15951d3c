//! Dense feedforward classifier: ReLU hidden layers, softmax output,
//! categorical cross-entropy, mini-batch SGD with momentum.

mod checkpoint;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::rng;

pub use checkpoint::{load_model, read_model, save_model, write_model, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};

#[derive(Debug, Error)]
pub enum MlpError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no training samples")]
    EmptyDataset,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite parameter after training step {0}")]
    NonFinite(usize),
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layer_sizes: Vec<usize>,
    /// `weights[k]` maps layer k to layer k+1 and has shape (out, in).
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
}

/// `[s^2, ceil((s^2 + 100)/2), ceil((h1 + 100)/2), 100]`
pub fn ann1_layer_sizes(side: usize) -> Vec<usize> {
    let input = side * side;
    let h1 = (input + 100).div_ceil(2);
    let h2 = (h1 + 100).div_ceil(2);
    vec![input, h1, h2, 100]
}

/// `[s^2, ceil((s^2 + 2)/2), 2]`
pub fn ann2_layer_sizes(side: usize) -> Vec<usize> {
    let input = side * side;
    vec![input, (input + 2).div_ceil(2), 2]
}

pub fn build_ann1(side: usize, seed: u64) -> MlpModel {
    MlpModel::new(&ann1_layer_sizes(side), seed)
}

pub fn build_ann2(side: usize, seed: u64) -> MlpModel {
    MlpModel::new(&ann2_layer_sizes(side), seed)
}

impl MlpModel {
    /// He-initialised weights (variance 2 / fan_in) and zero biases.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Self {
        assert!(layer_sizes.len() >= 2, "need at least input and output layers");
        assert!(layer_sizes.iter().all(|&d| d > 0), "layer sizes must be positive");
        let mut rng = rng::seeded(seed);
        let weights = layer_sizes
            .windows(2)
            .map(|w| {
                let normal = Normal::new(0.0, (2.0 / w[0] as f64).sqrt()).expect("positive std");
                Array2::from_shape_simple_fn((w[1], w[0]), || normal.sample(&mut rng))
            })
            .collect();
        Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases: layer_sizes[1..].iter().map(|&d| Array1::zeros(d)).collect(),
        }
    }

    pub fn zeros(layer_sizes: &[usize]) -> Self {
        assert!(layer_sizes.len() >= 2, "need at least input and output layers");
        Self {
            layer_sizes: layer_sizes.to_vec(),
            weights: layer_sizes
                .windows(2)
                .map(|w| Array2::zeros((w[1], w[0])))
                .collect(),
            biases: layer_sizes[1..].iter().map(|&d| Array1::zeros(d)).collect(),
        }
    }

    pub(crate) fn from_parts(
        layer_sizes: Vec<usize>,
        weights: Vec<Array2<f64>>,
        biases: Vec<Array1<f64>>,
    ) -> Self {
        Self {
            layer_sizes,
            weights,
            biases,
        }
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().expect("at least two layers")
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [Array2<f64>] {
        &mut self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    pub fn biases_mut(&mut self) -> &mut [Array1<f64>] {
        &mut self.biases
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    fn check_input(&self, width: usize) -> Result<(), MlpError> {
        if width != self.input_size() {
            return Err(MlpError::ShapeMismatch(format!(
                "model expects {} inputs, got {width}",
                self.input_size()
            )));
        }
        Ok(())
    }

    /// Pre-softmax outputs for a batch (rows are samples).
    pub fn logits_batch(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>, MlpError> {
        self.check_input(inputs.ncols())?;
        let last = self.weights.len() - 1;
        let mut act = inputs.to_owned();
        for (k, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            act = act.dot(&w.t()) + b;
            if k < last {
                act.mapv_inplace(relu);
            }
        }
        Ok(standard(act))
    }

    pub fn predict_batch(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>, MlpError> {
        let mut z = self.logits_batch(inputs)?;
        for mut row in z.rows_mut() {
            softmax_inplace(row.as_slice_mut().expect("standard layout"));
        }
        Ok(z)
    }

    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>, MlpError> {
        let view = ArrayView2::from_shape((1, x.len()), x)
            .map_err(|e| MlpError::ShapeMismatch(e.to_string()))?;
        Ok(self.logits_batch(view)?.row(0).to_vec())
    }

    /// Class probabilities for one input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, MlpError> {
        let mut z = self.logits(x)?;
        softmax_inplace(&mut z);
        Ok(z)
    }

    /// Mean cross-entropy and gradients over a batch.
    fn loss_and_gradients(
        &self,
        inputs: ArrayView2<f64>,
        labels: &[usize],
    ) -> (f64, Vec<Array2<f64>>, Vec<Array1<f64>>) {
        let batch = inputs.nrows() as f64;
        let last = self.weights.len() - 1;
        // activations[k] is the input to layer k; pre[k] its pre-activation output.
        let mut activations = vec![inputs.to_owned()];
        let mut pre = Vec::with_capacity(self.weights.len());
        for (k, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = activations[k].dot(&w.t()) + b;
            if k < last {
                activations.push(z.mapv(relu));
            }
            pre.push(z);
        }

        let mut delta = standard(pre.pop().expect("at least one layer"));
        let mut loss = 0.0;
        for (mut row, &y) in delta.rows_mut().into_iter().zip(labels) {
            let slice = row.as_slice_mut().expect("standard layout");
            loss += log_sum_exp(slice) - slice[y];
            softmax_inplace(slice);
            slice[y] -= 1.0;
        }
        delta /= batch;

        let mut grad_w = vec![Array2::zeros((0, 0)); self.weights.len()];
        let mut grad_b = vec![Array1::zeros(0); self.weights.len()];
        for k in (0..self.weights.len()).rev() {
            grad_w[k] = delta.t().dot(&activations[k]);
            grad_b[k] = delta.sum_axis(Axis(0));
            if k > 0 {
                let mut back = delta.dot(&self.weights[k]);
                back.zip_mut_with(&pre[k - 1], |d, &z| {
                    if z <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = back;
            }
        }
        (loss / batch, grad_w, grad_b)
    }

    /// Mean cross-entropy over a set of labelled inputs.
    pub fn loss(&self, inputs: ArrayView2<f64>, labels: &[usize]) -> Result<f64, MlpError> {
        check_labels(self, inputs, labels)?;
        let z = self.logits_batch(inputs)?;
        let total: f64 = z
            .rows()
            .into_iter()
            .zip(labels)
            .map(|(row, &y)| {
                let row = row.as_slice().expect("standard layout");
                log_sum_exp(row) - row[y]
            })
            .sum();
        Ok(total / labels.len() as f64)
    }

    /// Fraction of rows whose argmax matches the label.
    pub fn accuracy(&self, inputs: ArrayView2<f64>, labels: &[usize]) -> Result<f64, MlpError> {
        check_labels(self, inputs, labels)?;
        let z = self.logits_batch(inputs)?;
        let hits = z
            .rows()
            .into_iter()
            .zip(labels)
            .filter(|(row, &y)| argmax(row.as_slice().expect("standard layout")) == y)
            .count();
        Ok(hits as f64 / labels.len() as f64)
    }
}

fn standard(a: Array2<f64>) -> Array2<f64> {
    if a.is_standard_layout() {
        a
    } else {
        a.as_standard_layout().into_owned()
    }
}

fn relu(x: f64) -> f64 {
    x.max(0.0)
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + z.iter().map(|&v| (v - max).exp()).sum::<f64>().ln()
}

/// Max-shifted softmax.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let mut out = z.to_vec();
    softmax_inplace(&mut out);
    out
}

fn softmax_inplace(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn check_labels(model: &MlpModel, inputs: ArrayView2<f64>, labels: &[usize]) -> Result<(), MlpError> {
    if inputs.nrows() == 0 {
        return Err(MlpError::EmptyDataset);
    }
    model.check_input(inputs.ncols())?;
    if labels.len() != inputs.nrows() {
        return Err(MlpError::ShapeMismatch(format!(
            "{} inputs but {} labels",
            inputs.nrows(),
            labels.len()
        )));
    }
    if let Some(&y) = labels.iter().find(|&&y| y >= model.output_size()) {
        return Err(MlpError::ShapeMismatch(format!(
            "label {y} outside the {} output classes",
            model.output_size()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Fraction of samples held out (after a seeded shuffle) for validation.
    pub validation_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            momentum: 0.9,
            batch_size: 32,
            epochs: 50,
            seed: 0,
            validation_fraction: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), MlpError> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(MlpError::InvalidConfig("learning_rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(MlpError::InvalidConfig("momentum must lie in [0, 1)".into()));
        }
        if self.batch_size == 0 {
            return Err(MlpError::InvalidConfig("batch_size must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(MlpError::InvalidConfig(
                "validation_fraction must lie in [0, 1)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean mini-batch loss seen during the epoch.
    pub train_loss: f64,
    pub validation_loss: Option<f64>,
    pub validation_accuracy: Option<f64>,
}

/// Trains in place and returns the per-epoch history. Shuffling and the
/// validation split are driven by `cfg.seed`.
pub fn train(
    model: &mut MlpModel,
    inputs: ArrayView2<f64>,
    labels: &[usize],
    cfg: &TrainConfig,
) -> Result<Vec<EpochStats>, MlpError> {
    cfg.validate()?;
    check_labels(model, inputs, labels)?;

    let mut rng = rng::seeded(cfg.seed);
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(&mut rng);
    let held_out = (labels.len() as f64 * cfg.validation_fraction).floor() as usize;
    let (train_idx, val_idx) = order.split_at(labels.len() - held_out);
    if train_idx.is_empty() {
        return Err(MlpError::EmptyDataset);
    }
    let val_inputs = inputs.select(Axis(0), val_idx);
    let val_labels: Vec<usize> = val_idx.iter().map(|&i| labels[i]).collect();

    let mut velocity_w: Vec<Array2<f64>> = model.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect();
    let mut velocity_b: Vec<Array1<f64>> = model.biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect();
    let mut train_idx = train_idx.to_vec();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut step = 0usize;

    for epoch in 0..cfg.epochs {
        train_idx.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for chunk in train_idx.chunks(cfg.batch_size) {
            let x = inputs.select(Axis(0), chunk);
            let y: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
            let (loss, gw, gb) = model.loss_and_gradients(x.view(), &y);
            for k in 0..model.weights.len() {
                velocity_w[k].zip_mut_with(&gw[k], |v, &g| *v = cfg.momentum * *v - cfg.learning_rate * g);
                velocity_b[k].zip_mut_with(&gb[k], |v, &g| *v = cfg.momentum * *v - cfg.learning_rate * g);
                model.weights[k] += &velocity_w[k];
                model.biases[k] += &velocity_b[k];
            }
            step += 1;
            if !model.is_finite() {
                return Err(MlpError::NonFinite(step));
            }
            loss_sum += loss;
            batches += 1;
        }
        let (validation_loss, validation_accuracy) = if val_labels.is_empty() {
            (None, None)
        } else {
            (
                Some(model.loss(val_inputs.view(), &val_labels)?),
                Some(model.accuracy(val_inputs.view(), &val_labels)?),
            )
        };
        history.push(EpochStats {
            epoch,
            train_loss: loss_sum / batches as f64,
            validation_loss,
            validation_accuracy,
        });
    }
    Ok(history)
}

/// Largest relative discrepancy between backprop gradients of the
/// cross-entropy and central finite differences (step 1e-5).
pub fn gradient_check(model: &MlpModel, x: &[f64], y: usize) -> Result<f64, MlpError> {
    let inputs = ArrayView2::from_shape((1, x.len()), x)
        .map_err(|e| MlpError::ShapeMismatch(e.to_string()))?;
    check_labels(model, inputs, &[y])?;
    let (_, gw, gb) = model.loss_and_gradients(inputs, &[y]);

    const STEP: f64 = 1e-5;
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    let loss_at = |m: &MlpModel| m.loss(inputs, &[y]).expect("shapes already checked");
    for k in 0..model.weights.len() {
        for (idx, &analytic) in gw[k].indexed_iter() {
            let orig = model.weights[k][idx];
            probe.weights[k][idx] = orig + STEP;
            let up = loss_at(&probe);
            probe.weights[k][idx] = orig - STEP;
            let down = loss_at(&probe);
            probe.weights[k][idx] = orig;
            worst = worst.max(relative_error(analytic, (up - down) / (2.0 * STEP)));
        }
        for (idx, &analytic) in gb[k].indexed_iter() {
            let orig = model.biases[k][idx];
            probe.biases[k][idx] = orig + STEP;
            let up = loss_at(&probe);
            probe.biases[k][idx] = orig - STEP;
            let down = loss_at(&probe);
            probe.biases[k][idx] = orig;
            worst = worst.max(relative_error(analytic, (up - down) / (2.0 * STEP)));
        }
    }
    Ok(worst)
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(1e-6)
}

/// Backprop gradients for a single sample, exposed for inspection.
pub fn gradients(
    model: &MlpModel,
    x: &[f64],
    y: usize,
) -> Result<(Vec<Array2<f64>>, Vec<Array1<f64>>), MlpError> {
    let inputs = ArrayView2::from_shape((1, x.len()), x)
        .map_err(|e| MlpError::ShapeMismatch(e.to_string()))?;
    check_labels(model, inputs, &[y])?;
    let (_, gw, gb) = model.loss_and_gradients(inputs, &[y]);
    Ok((gw, gb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn layer_size_formulas() {
        assert_eq!(ann1_layer_sizes(10), vec![100, 100, 100, 100]);
        assert_eq!(ann1_layer_sizes(20), vec![400, 250, 175, 100]);
        assert_eq!(ann1_layer_sizes(2), vec![4, 52, 76, 100]);
        assert_eq!(ann2_layer_sizes(10), vec![100, 51, 2]);
        assert_eq!(ann2_layer_sizes(4), vec![16, 9, 2]);
        assert_eq!(ann2_layer_sizes(2), vec![4, 3, 2]);
        // odd s^2 rounds up
        assert_eq!(ann2_layer_sizes(3), vec![9, 6, 2]);
        assert_eq!(ann1_layer_sizes(3), vec![9, 55, 78, 100]);
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = MlpModel::zeros(&[4, 3, 5]);
        let p = m.forward(&[1.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(p.iter().all(|&v| (v - 0.2).abs() < 1e-15));
    }

    #[test]
    fn dominant_logit() {
        let p = softmax(&[0.0, 50.0, -3.0, 1.0]);
        assert!(p[1] >= 1.0 - 1e-20);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let huge = softmax(&[1000.0, 999.0]);
        assert!(huge.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let m = MlpModel::new(&[4, 3, 2], 1);
        assert!(matches!(m.forward(&[0.0; 5]), Err(MlpError::ShapeMismatch(_))));
        let x = Array2::zeros((2, 4));
        assert!(matches!(
            m.clone().loss(x.view(), &[0, 2]),
            Err(MlpError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[0.25, 0.25, 0.25, 0.25]), 0);
        assert_eq!(argmax(&[0.1, 0.4, 0.4, 0.1]), 1);
    }

    #[test]
    fn zero_input_has_zero_first_layer_gradient() {
        let m = MlpModel::new(&[5, 4, 3], 3);
        let (gw, _) = gradients(&m, &[0.0; 5], 1).unwrap();
        assert!(gw[0].iter().all(|&g| g == 0.0));
    }

    #[test]
    fn dead_relu_unit_gets_no_gradient() {
        let mut m = MlpModel::new(&[3, 4, 2], 5);
        // unit 2 can never activate for non-negative inputs
        m.weights_mut()[0].row_mut(2).fill(-1.0);
        m.biases_mut()[0][2] = -0.5;
        let (gw, gb) = gradients(&m, &[1.0, 0.5, 2.0], 0).unwrap();
        assert!(gw[0].row(2).iter().all(|&g| g == 0.0));
        assert_eq!(gb[0][2], 0.0);
    }

    #[test]
    fn zero_epochs_is_noop() {
        let mut m = MlpModel::new(&[2, 3, 2], 8);
        let before = m.clone();
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let hist = train(&mut m, array![[0.0, 1.0], [1.0, 0.0]].view(), &[0, 1], &cfg).unwrap();
        assert!(hist.is_empty());
        assert_eq!(m, before);
    }

    #[test]
    fn invalid_training_inputs() {
        let mut m = MlpModel::new(&[2, 3, 2], 8);
        let empty = Array2::<f64>::zeros((0, 2));
        assert!(matches!(
            train(&mut m, empty.view(), &[], &TrainConfig::default()),
            Err(MlpError::EmptyDataset)
        ));
        let x = array![[0.0, 1.0]];
        assert!(matches!(
            train(&mut m, x.view(), &[5], &TrainConfig::default()),
            Err(MlpError::ShapeMismatch(_))
        ));
        let bad = TrainConfig {
            learning_rate: -1.0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train(&mut m, x.view(), &[0], &bad),
            Err(MlpError::InvalidConfig(_))
        ));
    }
}
