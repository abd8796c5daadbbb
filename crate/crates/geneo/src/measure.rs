//! Finitely supported signed measures on the symmetric group, the
//! conjugation-invariance (permutant-measure) predicate, lattice and
//! vector-space operations, and the dimension count for the space of
//! conjugation-invariant measures.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::perm::{Permutation, PermutationGroup};

/// Default threshold below which stored weights are pruned.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// A finitely supported signed measure on the permutations of
/// `{0, .., n-1}`. Entries with `|weight| <= zero_tol` are never stored, so
/// the support map is always minimal and iteration order is the canonical
/// lexicographic order of image arrays.
#[derive(Debug, Clone)]
pub struct SignedMeasure {
    degree: usize,
    weights: BTreeMap<Permutation, f64>,
    zero_tol: f64,
}

impl SignedMeasure {
    /// The zero measure.
    pub fn zero(degree: usize) -> Self {
        SignedMeasure {
            degree,
            weights: BTreeMap::new(),
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }

    /// Builds a measure from `(permutation, weight)` pairs. Weights for
    /// repeated permutations accumulate; near-zero results are pruned.
    pub fn new(
        degree: usize,
        entries: impl IntoIterator<Item = (Permutation, f64)>,
    ) -> Result<Self> {
        let mut measure = Self::zero(degree);
        for (h, w) in entries {
            if h.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: h.degree(),
                });
            }
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite weight {w}")));
            }
            *measure.weights.entry(h).or_insert(0.0) += w;
        }
        measure.prune();
        Ok(measure)
    }

    /// Unit mass `w` on the single permutation `h`.
    pub fn dirac(h: Permutation, w: f64) -> Self {
        let degree = h.degree();
        let mut weights = BTreeMap::new();
        if w.abs() > DEFAULT_ZERO_TOL {
            weights.insert(h, w);
        }
        SignedMeasure {
            degree,
            weights,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }

    /// Replaces the pruning threshold and re-prunes.
    pub fn with_zero_tol(mut self, zero_tol: f64) -> Self {
        self.zero_tol = zero_tol.max(0.0);
        self.prune();
        self
    }

    fn prune(&mut self) {
        let tol = self.zero_tol;
        self.weights.retain(|_, w| w.abs() > tol);
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    /// Support iteration in canonical order.
    pub fn support(&self) -> impl Iterator<Item = (&Permutation, f64)> {
        self.weights.iter().map(|(h, &w)| (h, w))
    }

    /// Weight of a single permutation; absent entries read as zero.
    pub fn weight(&self, h: &Permutation) -> f64 {
        self.weights.get(h).copied().unwrap_or(0.0)
    }

    /// Sum of absolute weights over the support.
    pub fn total_variation(&self) -> f64 {
        self.weights.values().map(|w| w.abs()).sum()
    }

    /// Sum of signed weights over the support.
    pub fn total_mass(&self) -> f64 {
        self.weights.values().sum()
    }

    /// True iff the measure is constant on each conjugation orbit of the
    /// group that meets its support (within `zero_tol`).
    pub fn is_permutant_measure(&self, group: &PermutationGroup) -> Result<bool> {
        if self.degree != group.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: group.degree(),
            });
        }
        for (h, w) in &self.weights {
            for g in group.elements() {
                let conj = h.conjugate_by(g)?;
                if (w - self.weight(&conj)).abs() > self.zero_tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Support-wise equality within `tol` over the union of supports.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.degree != other.degree {
            return false;
        }
        self.weights
            .iter()
            .all(|(h, &w)| (w - other.weight(h)).abs() <= tol)
            && other
                .weights
                .iter()
                .all(|(h, &w)| (w - self.weight(h)).abs() <= tol)
    }

    fn merge(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut weights = BTreeMap::new();
        for h in self.weights.keys().chain(other.weights.keys()) {
            weights
                .entry(h.clone())
                .or_insert_with(|| f(self.weight(h), other.weight(h)));
        }
        let mut out = SignedMeasure {
            degree: self.degree,
            weights,
            zero_tol: self.zero_tol.max(other.zero_tol),
        };
        out.prune();
        Ok(out)
    }

    /// Pointwise minimum over the union of supports.
    pub fn lattice_min(&self, other: &Self) -> Result<Self> {
        self.merge(other, f64::min)
    }

    /// Pointwise maximum over the union of supports.
    pub fn lattice_max(&self, other: &Self) -> Result<Self> {
        self.merge(other, f64::max)
    }

    /// Pointwise absolute value.
    pub fn abs_measure(&self) -> Self {
        let mut out = self.clone();
        for w in out.weights.values_mut() {
            *w = w.abs();
        }
        out
    }
}

/// Pointwise linear combination `Σ coeffs[i] · measures[i]`.
pub fn linear_combination(coeffs: &[f64], measures: &[&SignedMeasure]) -> Result<SignedMeasure> {
    if coeffs.len() != measures.len() {
        return Err(Error::InvalidInput(format!(
            "{} coefficients for {} measures",
            coeffs.len(),
            measures.len()
        )));
    }
    let first = measures
        .first()
        .ok_or_else(|| Error::InvalidInput("no measures given".into()))?;
    let degree = first.degree();
    let mut zero_tol: f64 = DEFAULT_ZERO_TOL;
    let mut entries: Vec<(Permutation, f64)> = Vec::new();
    for (&c, m) in coeffs.iter().zip(measures) {
        if m.degree() != degree {
            return Err(Error::DegreeMismatch {
                left: degree,
                right: m.degree(),
            });
        }
        zero_tol = zero_tol.max(m.zero_tol());
        for (h, w) in m.support() {
            entries.push((h.clone(), c * w));
        }
    }
    Ok(SignedMeasure::new(degree, entries)?.with_zero_tol(zero_tol))
}

/// Dimension of the vector space of conjugation-invariant signed measures,
/// i.e. the number of conjugation orbits of the full symmetric group under
/// `group`, computed in Burnside form
/// `(Σ_{g∈G} |centralizer of g in S_n|) / |G|` from cycle types alone.
pub fn dim_pm(group: &PermutationGroup) -> Result<BigUint> {
    let mut sum = BigUint::from(0u32);
    for g in group.elements() {
        sum += g.centralizer_size_in_symmetric_group();
    }
    let order = BigUint::from(group.order());
    if &sum % &order != BigUint::from(0u32) {
        return Err(Error::VerificationFailed(format!(
            "Burnside sum {sum} not divisible by group order {order}"
        )));
    }
    Ok(sum / order)
}

/// Number of permutants for the group, reported as a base-2 exponent: the
/// count is `2^d` with `d = dim_pm(group)`, and `2^d` is never materialized.
pub fn permutant_count_log2(group: &PermutationGroup) -> Result<BigUint> {
    dim_pm(group)
}
