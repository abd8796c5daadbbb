//! Equivariant surface operators assembled from the cube's reflection
//! families: a convex combination of the three uniform averaging operators,
//! applied through precomputed surface index maps so the full lattice matrix
//! is never materialized.

use rayon::prelude::*;

use crate::dice::lattice::{CubeSymmetries, SurfaceMap};
use crate::dice::sample::DieSample;
use crate::error::{Error, Result};
use crate::measure::SignedMeasure;
use crate::perm::Permutation;

/// One family of equally weighted index maps (the surface restriction of
/// h⁻¹ for every h in a reflection family).
#[derive(Debug)]
struct Block {
    weight: f64,
    maps: Vec<SurfaceMap>,
}

/// The operator `φ ↦ α₁F₁(φ) + α₂F₂(φ) + α₃F₃(φ)` where `Fᵢ` averages φ∘h⁻¹
/// over the i-th reflection family. With non-negative weights summing to 1
/// the combined measure has total variation 1, so the operator is
/// equivariant and non-expansive.
#[derive(Debug)]
pub struct SurfaceOperator {
    blocks: Vec<Block>,
    surface_len: usize,
}

/// Builds the convex combination with the given weights over the face
/// reflections, edge reflections and central symmetry.
pub fn build_geneo(symmetries: &CubeSymmetries, weights: [f64; 3]) -> Result<SurfaceOperator> {
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "weights must be non-negative and sum to 1, got {weights:?}"
        )));
    }
    let families = [
        &symmetries.face_reflections,
        &symmetries.edge_reflections,
        &symmetries.central_symmetry,
    ];
    let mut blocks = Vec::with_capacity(3);
    for (family, &alpha) in families.iter().zip(&weights) {
        let maps: Vec<SurfaceMap> = family
            .members()
            .iter()
            .map(|h| SurfaceMap::from_permutation(&symmetries.lattice, &h.inverse()))
            .collect::<Result<_>>()?;
        blocks.push(Block {
            weight: alpha / family.len() as f64,
            maps,
        });
    }
    Ok(SurfaceOperator {
        blocks,
        surface_len: symmetries.lattice.surface_len(),
    })
}

impl SurfaceOperator {
    pub fn surface_len(&self) -> usize {
        self.surface_len
    }

    /// Number of index maps (10 for the three cube families).
    pub fn map_count(&self) -> usize {
        self.blocks.iter().map(|b| b.maps.len()).sum()
    }

    /// Sum of all map weights; 1 for a convex combination.
    pub fn weight_total(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.weight * b.maps.len() as f64)
            .sum()
    }

    /// Applies the operator to one surface signal.
    ///
    /// Within each equally weighted family the gathered values are summed in
    /// ascending value order, which makes the result independent of the map
    /// enumeration; conjugating the family by a cube rotation permutes the
    /// gathered multiset only, so equivariance holds bit-exactly.
    pub fn apply(&self, values: &[f32]) -> Result<Vec<f32>> {
        if values.len() != self.surface_len {
            return Err(Error::DegreeMismatch {
                left: self.surface_len,
                right: values.len(),
            });
        }
        let mut out = vec![0.0f32; self.surface_len];
        let mut gathered: Vec<f32> = Vec::with_capacity(8);
        for (s, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0f64;
            for block in &self.blocks {
                gathered.clear();
                gathered.extend(block.maps.iter().map(|m| values[m.source(s)]));
                gathered.sort_by(f32::total_cmp);
                let sum: f64 = gathered.iter().map(|&v| f64::from(v)).sum();
                acc += block.weight * sum;
            }
            *slot = acc as f32;
        }
        Ok(out)
    }

    /// Applies the operator to every sample of a dataset in parallel,
    /// preserving labels and seeds.
    pub fn apply_dataset(&self, data: &[DieSample]) -> Result<Vec<DieSample>> {
        data.par_iter()
            .map(|die| {
                Ok(DieSample {
                    label: die.label,
                    seed: die.seed,
                    surface_values: self.apply(&die.surface_values)?,
                })
            })
            .collect()
    }
}

/// The signed measure of the combined operator on the full lattice, for
/// cross-checking against the dense algebra path at small lattice sides.
pub fn combined_measure(symmetries: &CubeSymmetries, weights: [f64; 3]) -> Result<SignedMeasure> {
    let families = [
        &symmetries.face_reflections,
        &symmetries.edge_reflections,
        &symmetries.central_symmetry,
    ];
    let mut entries: Vec<(Permutation, f64)> = Vec::new();
    for (family, &alpha) in families.iter().zip(&weights) {
        for h in family.members() {
            entries.push((h.clone(), alpha / family.len() as f64));
        }
    }
    SignedMeasure::new(symmetries.lattice.volume(), entries)
}
