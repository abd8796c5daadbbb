//! The end-to-end benchmark: generate (or load) a die dataset, optionally
//! smooth it with the equivariant surface operator, reduce with PCA, and
//! score a quadratic classifier on a stratified 70/30 split.
//!
//! PCA is fitted on the whole dataset (train and test together) by design;
//! only the classifier respects the split.

use std::path::Path;

use serde::Serialize;

use crate::dice::classifier::{evaluate, train_classifier, ConfusionMatrix, TrainParams};
use crate::dice::dataset_io::Dataset;
use crate::dice::lattice::build_cube_group_and_permutants;
use crate::dice::pca::pca_fit;
use crate::dice::sample::{generate_dataset, DieGenerator, DieSample};
use crate::dice::sampling::shuffle;
use crate::dice::surface_op::build_geneo;
use crate::error::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

/// Salt for the train/test shuffle stream.
const SPLIT_SALT: u64 = 0x5317_1e55_ab5e_ed01;
/// Salt for the classifier's epoch shuffles.
const TRAIN_SALT: u64 = 0x7aa1_9e0d_c1a5_5ee1;

/// Weights reported as the best convex combination for this benchmark.
pub const DEFAULT_WEIGHTS: [f64; 3] = [0.318, 0.551, 0.131];

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub pcs: usize,
    pub weights: [f64; 3],
    pub coeff_range: (f64, f64),
    pub use_geneo: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 25,
            count: 10_000,
            seed: 0,
            pcs: 2,
            weights: DEFAULT_WEIGHTS,
            coeff_range: (0.6, 1.0),
            use_geneo: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitScores {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub explained_variance: Vec<f64>,
    pub train: SplitScores,
    pub test: SplitScores,
}

/// Projected points with labels, for plotting.
#[derive(Debug, Clone)]
pub struct Projections {
    pub pcs: usize,
    pub rows: Vec<(Vec<f64>, u8)>,
}

impl Projections {
    /// CSV with header `pc1,..,pck,label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.pcs)
            .map(|c| format!("pc{c}"))
            .chain(["label".to_string()])
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (row, label) in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|v| format!("{v}"))
                .chain([label.to_string()])
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Stratified 70/30 split: indices of each class are shuffled with a stream
/// derived from the seed and the first 70% of each go to the training set.
pub fn stratified_split(labels: &[u8], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ SPLIT_SALT);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [1u8, 2] {
        let mut indices: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == class).then_some(i))
            .collect();
        shuffle(&mut rng, &mut indices);
        let cut = indices.len() * 7 / 10;
        train.extend_from_slice(&indices[..cut]);
        test.extend_from_slice(&indices[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn validate(config: &ExperimentConfig) -> Result<()> {
    if config.pcs == 0 || config.pcs > 4 {
        return Err(Error::InvalidInput(format!(
            "pcs must be between 1 and 4, got {}",
            config.pcs
        )));
    }
    if config.count == 0 || config.count % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "count must be positive and even, got {}",
            config.count
        )));
    }
    Ok(())
}

/// Runs one configuration end to end. A pre-generated dataset may be
/// supplied; it must match the configured lattice side and sample count.
pub fn run_experiment(
    config: &ExperimentConfig,
    dataset: Option<&Dataset>,
) -> Result<(ExperimentReport, Projections)> {
    validate(config)?;
    let owned; // keeps a generated dataset alive
    let samples: &[DieSample] = match dataset {
        Some(data) => {
            if data.n != config.n {
                return Err(Error::InvalidInput(format!(
                    "dataset lattice side {} does not match configured {}",
                    data.n, config.n
                )));
            }
            if data.samples.len() != config.count {
                return Err(Error::InvalidInput(format!(
                    "dataset has {} samples, configured count is {}",
                    data.samples.len(),
                    config.count
                )));
            }
            &data.samples
        }
        None => {
            let generator = DieGenerator::new(config.n, config.coeff_range)?;
            owned = generate_dataset(&generator, config.count, config.seed)?;
            &owned
        }
    };

    let transformed;
    let working: &[DieSample] = if config.use_geneo {
        let symmetries = build_cube_group_and_permutants(config.n)?;
        let operator = build_geneo(&symmetries, config.weights)?;
        transformed = operator.apply_dataset(samples)?;
        &transformed
    } else {
        samples
    };

    let matrix: Vec<Vec<f32>> = working
        .iter()
        .map(|die| die.surface_values.clone())
        .collect();
    let labels: Vec<u8> = working.iter().map(|die| die.label).collect();
    let pca = pca_fit(&matrix, config.pcs)?;
    let projected: Vec<Vec<f64>> = matrix
        .iter()
        .map(|row| pca.project(row, config.pcs))
        .collect();

    let (train_idx, test_idx) = stratified_split(&labels, config.seed);
    let gather = |indices: &[usize]| -> (Vec<Vec<f64>>, Vec<u8>) {
        (
            indices.iter().map(|&i| projected[i].clone()).collect(),
            indices.iter().map(|&i| labels[i]).collect(),
        )
    };
    let (train_rows, train_labels) = gather(&train_idx);
    let (test_rows, test_labels) = gather(&test_idx);

    let params = TrainParams {
        shuffle_seed: config.seed ^ TRAIN_SALT,
        ..TrainParams::default()
    };
    let classifier = train_classifier(&train_rows, &train_labels, params)?;
    let train_cm = evaluate(&classifier, &train_rows, &train_labels);
    let test_cm = evaluate(&classifier, &test_rows, &test_labels);

    let report = ExperimentReport {
        config: config.clone(),
        explained_variance: pca.explained_variance.clone(),
        train: SplitScores {
            confusion: train_cm,
            accuracy: train_cm.accuracy(),
        },
        test: SplitScores {
            confusion: test_cm,
            accuracy: test_cm.accuracy(),
        },
    };
    let projections = Projections {
        pcs: config.pcs,
        rows: projected.into_iter().zip(labels).collect(),
    };
    Ok((report, projections))
}
