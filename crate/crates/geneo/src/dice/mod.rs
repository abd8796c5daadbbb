//! Synthetic die classification benchmark: a cubic lattice with the cube's
//! rotation group acting on it, labeled die scans rendered onto the outer
//! surface, an equivariant non-expansive smoothing operator built from the
//! reflection families, PCA, and a quadratic-feature classifier.

pub mod classifier;
pub mod dataset_io;
pub mod experiment;
pub mod lattice;
pub mod pca;
pub mod sample;
pub mod sampling;
pub mod surface_op;

pub use classifier::{evaluate, train_classifier, ConfusionMatrix, QuadraticClassifier};
pub use dataset_io::{read_dataset, write_dataset, Dataset};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentReport, Projections};
pub use lattice::{build_cube_group_and_permutants, CubeLattice, CubeSymmetries, SurfaceMap};
pub use pca::{pca_fit, Pca};
pub use sample::{generate_dataset, render_face, DieGenerator, DieSample};
pub use surface_op::{build_geneo, combined_measure, SurfaceOperator};
