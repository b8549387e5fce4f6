//! A desk-scale convolutional classifier trained with plain SGD.
//!
//! Everything is `f64`. Training is sequential over mini-batches; inside a
//! batch the per-sample gradients may be computed in parallel but are always
//! reduced in sample order, so results do not depend on the thread count.

mod checkpoint;
mod gradcheck;
mod network;
mod tensor;
mod toy;

use std::path::Path;

use image::RgbImage;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::{read_checkpoint, write_checkpoint, write_loss_history, CHECKPOINT_FORMAT};
pub use gradcheck::{gradient_check, gradient_check_with, GradCheckReport, GRADCHECK_EPS, GRADCHECK_TOLERANCE};
pub use network::{log_sum_exp, softmax, Gradients, LayerSpec, Network, NetworkSpec, Shape};
pub use tensor::Tensor;
pub use toy::bars_dataset;

use crate::fusion::ScoreMatrix;

#[derive(Debug, Error)]
pub enum CnnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("invalid train config: {0}")]
    InvalidConfig(String),
    #[error("tensor holds non-finite values")]
    NonFinite,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("class {0} has no training samples")]
    MissingClass(usize),
    #[error("unreadable image {path}: {reason}")]
    UnreadableImage { path: String, reason: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// SGD schedule. Defaults: 20 epochs, mini-batches of 30, learning rate 0.001.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Reshuffle the sample order (seeded) at the start of every epoch.
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            batch_size: 30,
            learning_rate: 0.001,
            seed: 0,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), CnnError> {
        if self.epochs == 0 {
            return Err(CnnError::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(CnnError::InvalidConfig("batch_size must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(CnnError::InvalidConfig("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

/// One labelled training image.
#[derive(Debug, Clone)]
pub struct Sample {
    pub image: RgbImage,
    pub label: usize,
}

impl Sample {
    pub fn load(path: &Path, label: usize) -> Result<Self, CnnError> {
        let image = image::open(path)
            .map_err(|e| CnnError::UnreadableImage {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?
            .to_rgb8();
        Ok(Self { image, label })
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: Network,
    /// Mean training loss of each epoch.
    pub loss_history: Vec<f64>,
}

fn check_shape(network: &Network, input: &Tensor) -> Result<(), CnnError> {
    let s = network.input_shape();
    if input.shape() != [s.channels, s.height, s.width] {
        return Err(CnnError::ShapeMismatch(format!(
            "expected input [{}, {}, {}], got {:?}",
            s.channels,
            s.height,
            s.width,
            input.shape()
        )));
    }
    Ok(())
}

/// Softmax rows for a batch of inputs.
pub fn forward(network: &Network, batch: &[Tensor]) -> Result<Vec<Vec<f64>>, CnnError> {
    batch
        .par_iter()
        .map(|x| {
            check_shape(network, x)?;
            network.forward_one(x.data())
        })
        .collect()
}

/// Mean cross-entropy over the batch and its gradient for every parameter.
pub fn loss_and_grad(
    network: &Network,
    batch: &[Tensor],
    labels: &[usize],
) -> Result<(f64, Gradients), CnnError> {
    if batch.len() != labels.len() {
        return Err(CnnError::ShapeMismatch(format!(
            "{} inputs but {} labels",
            batch.len(),
            labels.len()
        )));
    }
    if batch.is_empty() {
        return Err(CnnError::EmptyDataset);
    }
    let (loss_sum, mut grads) = summed_loss_and_grad(network, batch, labels)?;
    let scale = 1.0 / batch.len() as f64;
    grads.scale(scale);
    Ok((loss_sum * scale, grads))
}

/// Sum of per-sample losses and gradients, reduced in sample order.
pub fn summed_loss_and_grad(
    network: &Network,
    batch: &[Tensor],
    labels: &[usize],
) -> Result<(f64, Gradients), CnnError> {
    let per_sample: Vec<(f64, Gradients)> = batch
        .par_iter()
        .zip(labels.par_iter())
        .map(|(x, &label)| {
            check_shape(network, x)?;
            let mut g = Gradients::zeros_like(network);
            let loss = network.sample_loss_and_grad(x.data(), label, &mut g)?;
            Ok((loss, g))
        })
        .collect::<Result<_, CnnError>>()?;
    let mut total = Gradients::zeros_like(network);
    let mut loss = 0.0;
    for (l, g) in &per_sample {
        loss += l;
        total.add_assign(g);
    }
    Ok((loss, total))
}

/// Trains a freshly initialised network on `samples`.
///
/// The output width of `spec` must equal the number of classes; use
/// [`NetworkSpec::desk_default`] with the dataset's class count.
pub fn train(samples: &[Sample], spec: &NetworkSpec, config: &TrainConfig) -> Result<TrainOutcome, CnnError> {
    config.validate()?;
    if samples.is_empty() {
        return Err(CnnError::EmptyDataset);
    }
    let n_classes = spec.n_classes()?;
    let mut seen = vec![false; n_classes];
    for s in samples {
        if s.label >= n_classes {
            return Err(CnnError::LabelOutOfRange {
                label: s.label,
                n_classes,
            });
        }
        seen[s.label] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(CnnError::MissingClass(missing));
    }
    let mut network = Network::init(spec, config.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_5eed_5eed_5eed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut loss_history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<Tensor> = chunk.iter().map(|&i| Tensor::from_rgb(&samples[i].image)).collect();
            let labels: Vec<usize> = chunk.iter().map(|&i| samples[i].label).collect();
            let (loss_sum, mut grads) = summed_loss_and_grad(&network, &batch, &labels)?;
            grads.scale(1.0 / chunk.len() as f64);
            network.apply_gradients(&grads, config.learning_rate);
            epoch_loss += loss_sum;
        }
        let mean = epoch_loss / samples.len() as f64;
        log::debug!("epoch {} loss {:.6}", epoch + 1, mean);
        loss_history.push(mean);
    }
    Ok(TrainOutcome { network, loss_history })
}

/// Class-probability rows for `images`, one row per image, ids `"0"`, `"1"`, ...
pub fn predict(network: &Network, images: &[RgbImage]) -> Result<ScoreMatrix, CnnError> {
    let rows: Vec<Vec<f64>> = images
        .par_iter()
        .map(|img| {
            let x = Tensor::from_rgb(img);
            check_shape(network, &x)?;
            network.forward_one(x.data())
        })
        .collect::<Result<_, CnnError>>()?;
    let ids = (0..rows.len()).map(|i| i.to_string()).collect();
    ScoreMatrix::new(ids, network.n_classes(), rows.into_iter().flatten().collect())
        .map_err(|e| CnnError::ShapeMismatch(e.to_string()))
}

/// Fraction of samples whose argmax prediction equals the label.
pub fn accuracy(network: &Network, samples: &[Sample]) -> Result<f64, CnnError> {
    if samples.is_empty() {
        return Err(CnnError::EmptyDataset);
    }
    let images: Vec<RgbImage> = samples.iter().map(|s| s.image.clone()).collect();
    let scores = predict(network, &images)?;
    let correct = samples
        .iter()
        .enumerate()
        .filter(|(i, s)| scores.argmax(*i) == s.label)
        .count();
    Ok(correct as f64 / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    fn random_batch(shape: Shape, n: usize, seed: u64) -> Vec<Tensor> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let data = (0..shape.len()).map(|_| rng.gen::<f64>()).collect();
                Tensor::new(vec![shape.channels, shape.height, shape.width], data).unwrap()
            })
            .collect()
    }

    #[test]
    fn zero_network_is_uniform() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 5);
        let net = Network::zeros(&spec).unwrap();
        let rows = forward(&net, &random_batch(spec.input, 3, 1)).unwrap();
        for row in rows {
            for p in row {
                assert!((p - 0.2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn batch_shape_contract() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 7);
        let net = Network::init(&spec, 4).unwrap();
        let rows = forward(&net, &random_batch(spec.input, 30, 2)).unwrap();
        assert_eq!(rows.len(), 30);
        for row in &rows {
            assert_eq!(row.len(), 7);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(row.iter().all(|p| *p > 0.0));
        }
    }

    #[test]
    fn wrong_input_shape_is_rejected() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 2);
        let net = Network::init(&spec, 4).unwrap();
        let bad = random_batch(Shape::new(3, 9, 8), 1, 2);
        assert!(matches!(forward(&net, &bad), Err(CnnError::ShapeMismatch(_))));
    }

    #[test]
    fn uniform_prediction_loss_is_ln_classes() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 5);
        let net = Network::zeros(&spec).unwrap();
        let (loss, _) = loss_and_grad(&net, &random_batch(spec.input, 4, 3), &[0, 1, 2, 4]).unwrap();
        assert!((loss - 5f64.ln()).abs() < 1e-12);
        assert!((loss - 1.6094).abs() < 1e-4);
    }

    #[test]
    fn confident_correct_prediction_has_zero_output_gradient() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 3);
        let mut net = Network::zeros(&spec).unwrap();
        // a huge bias on class 1 makes p(class 1) == 1 in floating point
        let params = net.parameters_mut();
        let fc_bias = params.into_iter().last().unwrap();
        fc_bias[1] = 1e3;
        let (loss, grads) = loss_and_grad(&net, &random_batch(spec.input, 2, 5), &[1, 1]).unwrap();
        assert_eq!(loss, 0.0);
        let n = grads.tensors.len();
        assert!(grads.tensors[n - 1].iter().all(|g| *g == 0.0));
        assert!(grads.tensors[n - 2].iter().all(|g| *g == 0.0));
    }

    #[test]
    fn label_out_of_range() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 3);
        let net = Network::init(&spec, 0).unwrap();
        let err = loss_and_grad(&net, &random_batch(spec.input, 1, 5), &[3]).unwrap_err();
        assert!(matches!(err, CnnError::LabelOutOfRange { label: 3, n_classes: 3 }));
    }

    #[test]
    fn sgd_step_decreases_single_sample_loss() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 4);
        for seed in 0..5 {
            let mut net = Network::init(&spec, seed).unwrap();
            let x = random_batch(spec.input, 1, seed + 100);
            let (before, grads) = loss_and_grad(&net, &x, &[2]).unwrap();
            net.apply_gradients(&grads, 1e-4);
            let (after, _) = loss_and_grad(&net, &x, &[2]).unwrap();
            assert!(after < before, "seed {seed}: {after} !< {before}");
        }
    }

    #[test]
    fn batch_gradient_is_order_invariant() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 3);
        let net = Network::init(&spec, 9).unwrap();
        let batch = random_batch(spec.input, 6, 10);
        let labels = [0, 1, 2, 2, 1, 0];
        let (_, a) = summed_loss_and_grad(&net, &batch, &labels).unwrap();
        let perm = [3, 0, 5, 1, 4, 2];
        let pb: Vec<Tensor> = perm.iter().map(|&i| batch[i].clone()).collect();
        let pl: Vec<usize> = perm.iter().map(|&i| labels[i]).collect();
        let (_, b) = summed_loss_and_grad(&net, &pb, &pl).unwrap();
        for (ta, tb) in a.tensors.iter().zip(&b.tensors) {
            for (x, y) in ta.iter().zip(tb) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    fn solid(value: u8, size: u32) -> RgbImage {
        RgbImage::from_pixel(size, size, Rgb([value, value, value]))
    }

    #[test]
    fn predict_empty_and_duplicates() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 16, 16), 3);
        let net = Network::init(&spec, 1).unwrap();
        let empty = predict(&net, &[]).unwrap();
        assert_eq!((empty.n_rows(), empty.n_classes()), (0, 3));
        let img = solid(120, 16);
        let scores = predict(&net, &[img.clone(), img]).unwrap();
        assert_eq!(scores.row(0), scores.row(1));
    }

    #[test]
    fn train_rejects_bad_input() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 16, 16), 2);
        let cfg = TrainConfig::default();
        assert!(matches!(train(&[], &spec, &cfg), Err(CnnError::EmptyDataset)));
        let only_zero = vec![Sample { image: solid(0, 16), label: 0 }];
        assert!(matches!(train(&only_zero, &spec, &cfg), Err(CnnError::MissingClass(1))));
        let bad_cfg = TrainConfig { batch_size: 0, ..cfg };
        assert!(train(&only_zero, &spec, &bad_cfg).is_err());
    }
}
