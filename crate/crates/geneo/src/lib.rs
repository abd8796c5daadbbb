//! Construction, certification and decomposition of linear group-equivariant
//! operators on real-valued signals over a finite set.
//!
//! Any linear operator commuting with a transitive permutation-group action
//! is a weighted sum of right translations, with weights given by a signed
//! measure on the symmetric group that is constant on conjugation orbits.
//! This crate builds such operators from measures, recovers a measure from
//! any equivariant matrix (splitting into positive and negative parts,
//! peeling each into permutation matrices, and averaging the coefficients
//! over conjugation orbits), and certifies non-expansiveness via the total
//! variation of the recovered measure.
//!
//! The [`dice`] module is a self-contained benchmark: synthetic 3D die scans
//! on a cubic lattice, an equivariant smoothing operator assembled from the
//! cube's reflection symmetries, PCA, and a quadratic-feature classifier.

pub mod bvn;
pub mod dice;
pub mod error;
pub mod io;
pub mod measure;
pub mod operator;
pub mod perm;
pub mod represent;

pub use error::{Error, Result};
pub use measure::SignedMeasure;
pub use operator::{OperatorMatrix, Signal};
pub use perm::{Permutation, PermutationGroup};
