//! Signals on a finite domain, dense operator matrices, application of
//! measure-defined operators, and certification of equivariance and
//! non-expansiveness.
//!
//! Matrix convention: the operator sends the `j`-th basis signal to the
//! `j`-th **column**, `F(e_j) = Σ_i entries[i][j] · e_i`. All file I/O and
//! decomposition code shares this convention.

use std::fmt;

use crate::error::{Error, Result};
use crate::measure::SignedMeasure;
use crate::perm::{Permutation, PermutationGroup};

/// A real-valued function on `{0, .., n-1}`, stored as `values[j] = φ(x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty signal".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite signal value".into()));
        }
        Ok(Signal { values })
    }

    /// The basis signal taking value 1 at point `j` and 0 elsewhere.
    pub fn basis(degree: usize, j: usize) -> Self {
        let mut values = vec![0.0; degree];
        values[j] = 1.0;
        Signal { values }
    }

    pub fn degree(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Dense square matrix of a linear operator in the basis-signal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    n: usize,
    entries: Vec<f64>, // row-major
}

impl OperatorMatrix {
    pub fn zeros(n: usize) -> Self {
        OperatorMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite entry in row {i}")));
            }
            entries.extend_from_slice(row);
        }
        Ok(OperatorMatrix { n, entries })
    }

    /// Permutation matrix `P(h)`: `P(h) e_j = e_{h(j)}`.
    pub fn permutation(h: &Permutation) -> Self {
        let n = h.degree();
        let mut m = Self::zeros(n);
        for j in 0..n {
            m.set(h.apply(j), j, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Matrix-vector application, `(Bφ)_i = Σ_j b_ij φ_j`.
    pub fn apply(&self, phi: &Signal) -> Result<Signal> {
        if phi.degree() != self.n {
            return Err(Error::DegreeMismatch {
                left: self.n,
                right: phi.degree(),
            });
        }
        let values = (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(phi.values())
                    .map(|(b, v)| b * v)
                    .sum()
            })
            .collect();
        Ok(Signal { values })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        OperatorMatrix {
            n: self.n,
            entries: self.entries.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(OperatorMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Largest absolute entry of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Exact `L∞ → L∞` operator norm: the maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// For a linear operator, non-expansiveness in the sup norm is exactly
    /// `inf_norm <= 1`.
    pub fn is_nonexpansive(&self, tol: f64) -> bool {
        self.inf_norm() <= 1.0 + tol
    }
}

/// Right translation `φ ↦ φ∘h`, i.e. `result[j] = φ(h(x_j))`.
pub fn right_translate(phi: &Signal, h: &Permutation) -> Result<Signal> {
    if phi.degree() != h.degree() {
        return Err(Error::DegreeMismatch {
            left: phi.degree(),
            right: h.degree(),
        });
    }
    Ok(Signal {
        values: (0..phi.degree()).map(|j| phi.values[h.apply(j)]).collect(),
    })
}

/// Applies the operator `F_μ(φ) = Σ_h μ(h) · φh⁻¹` defined by a measure.
/// Uses the identity `(φh⁻¹)(h(x_j)) = φ(x_j)`, so no inverses are formed.
pub fn apply_measure_operator(m: &SignedMeasure, phi: &Signal) -> Result<Signal> {
    if phi.degree() != m.degree() {
        return Err(Error::DegreeMismatch {
            left: m.degree(),
            right: phi.degree(),
        });
    }
    let mut values = vec![0.0; phi.degree()];
    for (h, w) in m.support() {
        for (j, &v) in phi.values().iter().enumerate() {
            values[h.apply(j)] += w * v;
        }
    }
    Ok(Signal { values })
}

/// Matrix `B = Σ_h μ(h) · P(h)`; column `j` equals
/// `apply_measure_operator(μ, e_j)`.
pub fn matrix_of_measure(m: &SignedMeasure) -> OperatorMatrix {
    let n = m.degree();
    let mut out = OperatorMatrix::zeros(n);
    for (h, w) in m.support() {
        for j in 0..n {
            out.entries[h.apply(j) * n + j] += w;
        }
    }
    out
}

/// Witness of an equivariance failure: a group element `g` and an entry
/// `(row, col)` at which `B·P(g)` and `P(g)·B` differ.
#[derive(Debug, Clone)]
pub struct EquivarianceWitness {
    pub generator: Permutation,
    pub row: usize,
    pub col: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for EquivarianceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "B·P(g) != P(g)·B for g = {} at entry ({}, {}): {} vs {}",
            self.generator, self.row, self.col, self.lhs, self.rhs
        )
    }
}

fn commutation_witness(
    b: &OperatorMatrix,
    g: &Permutation,
    tol: f64,
) -> Option<EquivarianceWitness> {
    let n = b.dim();
    let g_inv = g.inverse();
    for i in 0..n {
        for j in 0..n {
            // (B·P(g))[i][j] = B[i][g(j)], (P(g)·B)[i][j] = B[g⁻¹(i)][j].
            let lhs = b.get(i, g.apply(j));
            let rhs = b.get(g_inv.apply(i), j);
            if (lhs - rhs).abs() > tol {
                return Some(EquivarianceWitness {
                    generator: g.clone(),
                    row: i,
                    col: j,
                    lhs,
                    rhs,
                });
            }
        }
    }
    None
}

/// Checks `B·P(g) = P(g)·B` on the group's generators; commutation is
/// multiplicative, so this implies commutation with every element.
pub fn equivariance_witness(
    b: &OperatorMatrix,
    group: &PermutationGroup,
    tol: f64,
) -> Result<Option<EquivarianceWitness>> {
    if b.dim() != group.degree() {
        return Err(Error::DegreeMismatch {
            left: b.dim(),
            right: group.degree(),
        });
    }
    for g in group.generators() {
        if let Some(w) = commutation_witness(b, g, tol) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Exhaustive variant of [`equivariance_witness`] sweeping every element.
pub fn equivariance_witness_all(
    b: &OperatorMatrix,
    group: &PermutationGroup,
    tol: f64,
) -> Result<Option<EquivarianceWitness>> {
    if b.dim() != group.degree() {
        return Err(Error::DegreeMismatch {
            left: b.dim(),
            right: group.degree(),
        });
    }
    for g in group.elements() {
        if let Some(w) = commutation_witness(b, g, tol) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

pub fn is_equivariant(b: &OperatorMatrix, group: &PermutationGroup, tol: f64) -> Result<bool> {
    Ok(equivariance_witness(b, group, tol)?.is_none())
}

/// For an equivariant matrix under a transitive group, every row and every
/// column is a permutation of one shared tuple; this verifies the sorted
/// multiset of each line against row 0 within `tol`. The preconditions
/// (transitivity, equivariance) are re-checked and violations are errors.
pub fn check_row_column_structure(
    b: &OperatorMatrix,
    group: &PermutationGroup,
    tol: f64,
) -> Result<bool> {
    if !group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    if let Some(witness) = equivariance_witness(b, group, tol)? {
        return Err(Error::NotEquivariant(witness));
    }
    let n = b.dim();
    let sorted_line = |values: Vec<f64>| {
        let mut v = values;
        v.sort_by(f64::total_cmp);
        v
    };
    let reference = sorted_line(b.row(0).to_vec());
    for i in 0..n {
        let row = sorted_line(b.row(i).to_vec());
        if row
            .iter()
            .zip(&reference)
            .any(|(a, r)| (a - r).abs() > tol)
        {
            return Ok(false);
        }
    }
    for j in 0..n {
        let col = sorted_line((0..n).map(|i| b.get(i, j)).collect());
        if col
            .iter()
            .zip(&reference)
            .any(|(a, r)| (a - r).abs() > tol)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn cyc(text: &str, degree: usize) -> Permutation {
        Permutation::from_cycles(text, degree).unwrap()
    }

    fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        lo + (rng.next_u64() >> 11) as f64 * (hi - lo) / (1u64 << 53) as f64
    }

    fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Signal {
        Signal::new((0..n).map(|_| uniform(rng, -3.0, 3.0)).collect()).unwrap()
    }

    fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
        let mut images: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            images.swap(i, j);
        }
        Permutation::from_images(images).unwrap()
    }

    /// The signed measure behind the simplest non-trivial representation
    /// example: mass 1 on the identity and -1 on the swap of two points.
    fn simplest_measure() -> SignedMeasure {
        SignedMeasure::new(
            2,
            [(Permutation::identity(2), 1.0), (cyc("(1 2)", 2), -1.0)],
        )
        .unwrap()
    }

    #[test]
    fn right_translate_by_identity_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = random_signal(&mut rng, 5);
        let out = right_translate(&phi, &Permutation::identity(5)).unwrap();
        assert_eq!(out, phi);
    }

    #[test]
    fn basis_translates_to_image_point() {
        // e_{x} h⁻¹ = e_{h(x)} on two points.
        let swap = cyc("(1 2)", 2);
        let e0 = Signal::basis(2, 0);
        let moved = right_translate(&e0, &swap.inverse()).unwrap();
        assert_eq!(moved.values(), &[0.0, 1.0]);
    }

    #[test]
    fn right_translation_composes_contravariantly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..25 {
            let phi = random_signal(&mut rng, 6);
            let h1 = random_permutation(&mut rng, 6);
            let h2 = random_permutation(&mut rng, 6);
            // (φ h1⁻¹) h2⁻¹ = φ (h2 h1)⁻¹
            let lhs = right_translate(
                &right_translate(&phi, &h1.inverse()).unwrap(),
                &h2.inverse(),
            )
            .unwrap();
            let rhs =
                right_translate(&phi, &h2.compose(&h1).unwrap().inverse()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn simplest_operator_on_basis_signal() {
        let m = simplest_measure();
        let out = apply_measure_operator(&m, &Signal::basis(2, 0)).unwrap();
        assert_eq!(out.values(), &[1.0, -1.0]);
    }

    #[test]
    fn unit_mass_on_identity_is_identity_operator() {
        let m = SignedMeasure::dirac(Permutation::identity(3), 1.0);
        assert_eq!(matrix_of_measure(&m), OperatorMatrix::identity(3));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = random_signal(&mut rng, 3);
        assert_eq!(apply_measure_operator(&m, &phi).unwrap(), phi);
    }

    #[test]
    fn simplest_measure_matrix() {
        let b = matrix_of_measure(&simplest_measure());
        assert_eq!(b, OperatorMatrix::from_rows(vec![
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
        ])
        .unwrap());
    }

    #[test]
    fn uniform_reflection_measure_agrees_with_matrix() {
        // Three pairwise-commuting reflections on 4 points standing in for a
        // small permutant; uniform mass c on each.
        let c = 0.4;
        let h1 = cyc("(1 2)", 4);
        let h2 = cyc("(3 4)", 4);
        let h3 = cyc("(1 2)(3 4)", 4);
        let m = SignedMeasure::new(
            4,
            [(h1.clone(), c), (h2.clone(), c), (h3.clone(), c)],
        )
        .unwrap();
        let b = matrix_of_measure(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let phi = random_signal(&mut rng, 4);
            let direct = apply_measure_operator(&m, &phi).unwrap();
            let via_matrix = b.apply(&phi).unwrap();
            // Also spell the operator out as c·φh1⁻¹ + c·φh2⁻¹ + c·φh3⁻¹.
            let spelled: Vec<f64> = (0..4)
                .map(|j| {
                    c * right_translate(&phi, &h1.inverse()).unwrap().values()[j]
                        + c * right_translate(&phi, &h2.inverse()).unwrap().values()[j]
                        + c * right_translate(&phi, &h3.inverse()).unwrap().values()[j]
                })
                .collect();
            for j in 0..4 {
                assert!((direct.values()[j] - via_matrix.values()[j]).abs() < 1e-12);
                assert!((direct.values()[j] - spelled[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_columns_match_basis_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 5;
            let entries: Vec<(Permutation, f64)> = (0..3)
                .map(|_| (random_permutation(&mut rng, n), uniform(&mut rng, -2.0, 2.0)))
                .collect();
            let m = SignedMeasure::new(n, entries).unwrap();
            let b = matrix_of_measure(&m);
            for j in 0..n {
                let col = apply_measure_operator(&m, &Signal::basis(n, j)).unwrap();
                for i in 0..n {
                    assert!((b.get(i, j) - col.values()[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn matrix_of_measure_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 4;
        let m1 = SignedMeasure::new(
            n,
            (0..3).map(|_| (random_permutation(&mut rng, n), uniform(&mut rng, -1.0, 1.0))),
        )
        .unwrap();
        let m2 = SignedMeasure::new(
            n,
            (0..3).map(|_| (random_permutation(&mut rng, n), uniform(&mut rng, -1.0, 1.0))),
        )
        .unwrap();
        let combo = crate::measure::linear_combination(&[1.5, -0.5], &[&m1, &m2]).unwrap();
        let direct = matrix_of_measure(&combo);
        let assembled = matrix_of_measure(&m1)
            .scale(1.5)
            .add(&matrix_of_measure(&m2).scale(-0.5))
            .unwrap();
        assert!(direct.max_abs_diff(&assembled) < 1e-12);
    }

    #[test]
    fn permutation_matrices_are_a_representation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let h1 = random_permutation(&mut rng, 5);
            let h2 = random_permutation(&mut rng, 5);
            let lhs = OperatorMatrix::permutation(&h1.compose(&h2).unwrap());
            let rhs = OperatorMatrix::permutation(&h1)
                .matmul(&OperatorMatrix::permutation(&h2))
                .unwrap();
            assert_eq!(lhs, rhs);
            let inv = OperatorMatrix::permutation(&h1.inverse());
            assert_eq!(
                OperatorMatrix::permutation(&h1).matmul(&inv).unwrap(),
                OperatorMatrix::identity(5)
            );
        }
    }

    #[test]
    fn identity_is_equivariant_under_any_group() {
        let s4 = PermutationGroup::symmetric(4).unwrap();
        assert!(is_equivariant(&OperatorMatrix::identity(4), &s4, 0.0).unwrap());
    }

    #[test]
    fn constant_diagonal_plus_offdiagonal_is_equivariant_under_s4() {
        let (alpha, beta) = (0.7, -0.3);
        let mut b = OperatorMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                b.set(i, j, if i == j { alpha } else { beta });
            }
        }
        let s4 = PermutationGroup::symmetric(4).unwrap();
        assert!(is_equivariant(&b, &s4, 0.0).unwrap());
        assert!(equivariance_witness_all(&b, &s4, 0.0).unwrap().is_none());
        assert!(check_row_column_structure(&b, &s4, 1e-12).unwrap());
    }

    #[test]
    fn collapsing_operator_fails_equivariance_with_witness() {
        // Both columns equal e_1: equivariant for the trivial group only.
        let b = OperatorMatrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let full = PermutationGroup::symmetric(2).unwrap();
        let witness = equivariance_witness(&b, &full, 1e-12).unwrap().unwrap();
        assert_eq!(witness.generator, cyc("(1 2)", 2));
        assert!(is_equivariant(&b, &PermutationGroup::trivial(2), 0.0).unwrap());
    }

    #[test]
    fn inf_norm_examples() {
        assert_eq!(OperatorMatrix::zeros(3).inf_norm(), 0.0);
        let b = matrix_of_measure(&simplest_measure());
        assert_eq!(b.inf_norm(), 2.0);
        assert!(!b.is_nonexpansive(1e-9));
        assert!(b.scale(0.5).is_nonexpansive(1e-9));
        assert!(OperatorMatrix::identity(4).is_nonexpansive(0.0));
    }

    #[test]
    fn inf_norm_is_attained_by_the_sign_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let n = 5;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| uniform(&mut rng, -2.0, 2.0)).collect())
                .collect();
            let b = OperatorMatrix::from_rows(rows).unwrap();
            let norm = b.inf_norm();
            for _ in 0..100 {
                let phi = random_signal(&mut rng, n);
                let ratio = b.apply(&phi).unwrap().sup_norm() / phi.sup_norm();
                assert!(ratio <= norm + 1e-12);
            }
            // Sign vector of the row with maximal absolute sum attains it.
            let max_row = (0..n)
                .max_by(|&a, &b2| {
                    let sa: f64 = b.row(a).iter().map(|v| v.abs()).sum();
                    let sb: f64 = b.row(b2).iter().map(|v| v.abs()).sum();
                    sa.total_cmp(&sb)
                })
                .unwrap();
            let witness = Signal::new(
                b.row(max_row)
                    .iter()
                    .map(|v| if *v >= 0.0 { 1.0 } else { -1.0 })
                    .collect(),
            )
            .unwrap();
            let attained = b.apply(&witness).unwrap().sup_norm();
            assert_eq!(attained, norm);
        }
    }

    #[test]
    fn row_column_structure_requires_preconditions() {
        let b = OperatorMatrix::identity(2);
        let trivial = PermutationGroup::trivial(2);
        assert!(matches!(
            check_row_column_structure(&b, &trivial, 1e-9),
            Err(Error::NotTransitive)
        ));
        let skew = OperatorMatrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let full = PermutationGroup::symmetric(2).unwrap();
        assert!(matches!(
            check_row_column_structure(&skew, &full, 1e-9),
            Err(Error::NotEquivariant(_))
        ));
        assert!(check_row_column_structure(&b, &full, 1e-9).unwrap());
    }
}
