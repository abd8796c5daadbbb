//! Two-class classifier over an explicit degree-2 monomial feature map:
//! standardized quadratic features fed to an L2-regularized hinge-loss
//! linear model trained by epoch-based stochastic subgradient descent with
//! the 1/(λt) step schedule. Same hypothesis class as a quadratic-kernel
//! maximum-margin classifier.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use serde::Serialize;

use crate::dice::sampling::shuffle;
use crate::error::{Error, Result};

/// Regularization strength.
pub const DEFAULT_LAMBDA: f64 = 1e-4;
/// Training epochs.
pub const DEFAULT_EPOCHS: usize = 50;

/// All monomials of the inputs of degree 1 and 2: `z_i`, then `z_i z_j` for
/// `i <= j`. The degree-0 monomial is carried separately as the bias.
pub fn quadratic_features(z: &[f64]) -> Vec<f64> {
    let mut features = Vec::with_capacity(z.len() + z.len() * (z.len() + 1) / 2);
    features.extend_from_slice(z);
    for i in 0..z.len() {
        for j in i..z.len() {
            features.push(z[i] * z[j]);
        }
    }
    features
}

/// Trained model: standardization statistics plus a linear separator over
/// the standardized quadratic features.
#[derive(Debug, Clone)]
pub struct QuadraticClassifier {
    input_dim: usize,
    feature_means: Vec<f64>,
    feature_stds: Vec<f64>,
    weights: Vec<f64>,
    bias: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TrainParams {
    pub lambda: f64,
    pub epochs: usize,
    pub shuffle_seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            lambda: DEFAULT_LAMBDA,
            epochs: DEFAULT_EPOCHS,
            shuffle_seed: 0,
        }
    }
}

/// Trains on projected feature rows (dimension at most 4) with labels 1|2.
/// Standardization statistics come from the training rows only.
pub fn train_classifier(
    rows: &[Vec<f64>],
    labels: &[u8],
    params: TrainParams,
) -> Result<QuadraticClassifier> {
    if rows.len() != labels.len() || rows.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} rows with {} labels",
            rows.len(),
            labels.len()
        )));
    }
    let input_dim = rows[0].len();
    if input_dim == 0 || input_dim > 4 {
        return Err(Error::InvalidInput(format!(
            "feature dimension must be between 1 and 4, got {input_dim}"
        )));
    }
    if rows.iter().any(|r| r.len() != input_dim) {
        return Err(Error::InvalidInput("ragged feature rows".into()));
    }
    if labels.iter().any(|&l| l != 1 && l != 2) {
        return Err(Error::InvalidInput("labels must be 1 or 2".into()));
    }
    if labels.iter().all(|&l| l == labels[0]) {
        return Err(Error::InvalidInput(
            "training set contains a single class".into(),
        ));
    }

    let mapped: Vec<Vec<f64>> = rows.iter().map(|r| quadratic_features(r)).collect();
    let feature_dim = mapped[0].len();
    let count = mapped.len() as f64;
    let mut feature_means = vec![0.0f64; feature_dim];
    for row in &mapped {
        for (m, &v) in feature_means.iter_mut().zip(row) {
            *m += v;
        }
    }
    feature_means.iter_mut().for_each(|m| *m /= count);
    let mut feature_stds = vec![0.0f64; feature_dim];
    for row in &mapped {
        for ((s, m), &v) in feature_stds.iter_mut().zip(&feature_means).zip(row) {
            *s += (v - *m) * (v - *m);
        }
    }
    for s in &mut feature_stds {
        *s = (*s / count).sqrt();
        if *s < 1e-12 {
            *s = 1.0; // constant feature: leave it centered at zero
        }
    }

    let standardized: Vec<Vec<f64>> = mapped
        .iter()
        .map(|row| {
            row.iter()
                .zip(feature_means.iter().zip(&feature_stds))
                .map(|(&v, (&m, &s))| (v - m) / s)
                .collect()
        })
        .collect();
    let targets: Vec<f64> = labels
        .iter()
        .map(|&l| if l == 1 { 1.0 } else { -1.0 })
        .collect();

    let mut weights = vec![0.0f64; feature_dim];
    let mut bias = 0.0f64;
    let mut order: Vec<usize> = (0..standardized.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.shuffle_seed);
    let mut t = 1u64;
    for _epoch in 0..params.epochs {
        shuffle(&mut rng, &mut order);
        for &idx in &order {
            let x = &standardized[idx];
            let y = targets[idx];
            let eta = 1.0 / (params.lambda * t as f64);
            let margin = y * (dot(&weights, x) + bias);
            let shrink = 1.0 - eta * params.lambda;
            weights.iter_mut().for_each(|w| *w *= shrink);
            bias *= shrink;
            if margin < 1.0 {
                for (w, &xi) in weights.iter_mut().zip(x) {
                    *w += eta * y * xi;
                }
                bias += eta * y;
            }
            t += 1;
        }
    }

    Ok(QuadraticClassifier {
        input_dim,
        feature_means,
        feature_stds,
        weights,
        bias,
    })
}

impl QuadraticClassifier {
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Signed decision value; non-negative predicts class 1.
    pub fn decision(&self, row: &[f64]) -> f64 {
        debug_assert_eq!(row.len(), self.input_dim);
        let mapped = quadratic_features(row);
        let mut score = self.bias;
        for ((&v, (&m, &s)), &w) in mapped
            .iter()
            .zip(self.feature_means.iter().zip(&self.feature_stds))
            .zip(&self.weights)
        {
            score += w * (v - m) / s;
        }
        score
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        if self.decision(row) >= 0.0 {
            1
        } else {
            2
        }
    }
}

/// 2x2 confusion counts; rows are true classes (class 1 first), columns are
/// predictions.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let correct = self.counts[0][0] + self.counts[1][1];
        correct as f64 / self.total() as f64
    }
}

pub fn evaluate(
    classifier: &QuadraticClassifier,
    rows: &[Vec<f64>],
    labels: &[u8],
) -> ConfusionMatrix {
    let mut cm = ConfusionMatrix::default();
    for (row, &label) in rows.iter().zip(labels) {
        let predicted = classifier.predict(row);
        cm.counts[(label - 1) as usize][(predicted - 1) as usize] += 1;
    }
    cm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
