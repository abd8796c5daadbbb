//! Birkhoff–von Neumann decomposition of non-negative matrices with
//! constant row and column sums into weighted permutation matrices, by
//! greedy peeling over perfect matchings of the positive-support graph.

use crate::error::{Error, Result};
use crate::measure::SignedMeasure;
use crate::operator::OperatorMatrix;
use crate::perm::Permutation;

/// Default structural-zero threshold for peeling.
pub const DEFAULT_BVN_TOL: f64 = 1e-9;

/// Result of a decomposition `M ≈ Σ wᵢ · P(hᵢ)`.
#[derive(Debug, Clone)]
pub struct BvnDecomposition {
    /// Peeled terms in extraction order; all weights exceed the tolerance.
    pub terms: Vec<(f64, Permutation)>,
    /// Largest absolute entry of `M − Σ wᵢ P(hᵢ)`.
    pub residual_norm: f64,
    /// The common row/column sum of the input.
    pub line_sum: f64,
}

impl BvnDecomposition {
    /// Sum of the peeled weights; equals the line sum up to accumulated
    /// tolerance.
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|(w, _)| w).sum()
    }

    /// The coefficient function of the decomposition as a measure on the
    /// symmetric group (weights accumulate should a permutation repeat).
    pub fn coefficient_measure(&self, degree: usize) -> Result<SignedMeasure> {
        SignedMeasure::new(
            degree,
            self.terms.iter().map(|(w, h)| (h.clone(), *w)),
        )
    }

    /// Reconstructs `Σ wᵢ P(hᵢ)`.
    pub fn reconstruct(&self, n: usize) -> OperatorMatrix {
        let mut out = OperatorMatrix::zeros(n);
        for (w, h) in &self.terms {
            for j in 0..n {
                let i = h.apply(j);
                out.set(i, j, out.get(i, j) + w);
            }
        }
        out
    }
}

/// Verifies that all row sums and column sums agree within `tol` and that no
/// entry is below `-tol`, returning the common line sum.
pub fn validate_line_sums(m: &OperatorMatrix, tol: f64) -> Result<f64> {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            if v < -tol {
                return Err(Error::NegativeEntry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    let row_sums: Vec<f64> = (0..n)
        .map(|i| m.row(i).iter().map(|v| v.max(0.0)).sum())
        .collect();
    let col_sums: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| m.get(i, j).max(0.0)).sum())
        .collect();
    // Median of all line sums, so a single bad line cannot shift the
    // reference it is compared against.
    let line_sum = {
        let mut all: Vec<f64> = row_sums.iter().chain(&col_sums).copied().collect();
        all.sort_by(f64::total_cmp);
        all[all.len() / 2]
    };
    for (i, sum) in row_sums.iter().enumerate() {
        if (sum - line_sum).abs() > tol {
            return Err(Error::LineSumViolation {
                line: "row",
                index: i,
                sum: *sum,
                expected: line_sum,
            });
        }
    }
    for (j, sum) in col_sums.iter().enumerate() {
        if (sum - line_sum).abs() > tol {
            return Err(Error::LineSumViolation {
                line: "column",
                index: j,
                sum: *sum,
                expected: line_sum,
            });
        }
    }
    Ok(line_sum)
}

/// Augmenting-path bipartite matching over the support graph. Rows are
/// processed in ascending index and candidate columns in ascending index,
/// which makes the whole peeling deterministic.
struct Matcher<'a> {
    adjacency: &'a [Vec<usize>],
    matched_row_of_col: Vec<Option<usize>>,
    visited_rows: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(adjacency: &'a [Vec<usize>], n: usize) -> Self {
        Matcher {
            adjacency,
            matched_row_of_col: vec![None; n],
            visited_rows: vec![false; n],
        }
    }

    fn try_augment(&mut self, row: usize) -> bool {
        if self.visited_rows[row] {
            return false;
        }
        self.visited_rows[row] = true;
        for &col in &self.adjacency[row] {
            let free = match self.matched_row_of_col[col] {
                None => true,
                Some(other) => self.try_augment(other),
            };
            if free {
                self.matched_row_of_col[col] = Some(row);
                return true;
            }
        }
        false
    }

    /// Perfect matching as `col_of_row`, or the Hall-violating row set.
    fn perfect_matching(mut self, n: usize) -> std::result::Result<Vec<usize>, Vec<usize>> {
        for row in 0..n {
            self.visited_rows.iter_mut().for_each(|v| *v = false);
            if !self.try_augment(row) {
                // Rows reachable by alternating paths from the stuck row
                // form a set whose neighborhood is too small.
                let mut violators: Vec<usize> = self
                    .visited_rows
                    .iter()
                    .enumerate()
                    .filter_map(|(r, &seen)| seen.then_some(r))
                    .collect();
                violators.sort_unstable();
                return Err(violators);
            }
        }
        let mut col_of_row = vec![usize::MAX; n];
        for (col, row) in self.matched_row_of_col.iter().enumerate() {
            if let Some(r) = row {
                col_of_row[*r] = col;
            }
        }
        Ok(col_of_row)
    }
}

/// Greedy Birkhoff peeling: repeatedly find a perfect matching of the
/// entries above `tol`, subtract the minimum matched entry times the
/// corresponding permutation matrix, and record the term. The input must
/// pass [`validate_line_sums`] first; remaining mass below `n·tol` per line
/// is treated as dust and left in the residual.
pub fn decompose(m: &OperatorMatrix, tol: f64) -> Result<BvnDecomposition> {
    let line_sum = validate_line_sums(m, tol)?;
    let n = m.dim();
    let mut work = m.clone();
    for i in 0..n {
        for j in 0..n {
            if work.get(i, j) < 0.0 {
                work.set(i, j, 0.0);
            }
        }
    }
    let mut terms: Vec<(f64, Permutation)> = Vec::new();
    loop {
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| work.get(i, j) > tol).collect())
            .collect();
        if adjacency.iter().all(|row| row.is_empty()) {
            break;
        }
        let matching = match Matcher::new(&adjacency, n).perfect_matching(n) {
            Ok(cols) => cols,
            Err(rows) => {
                let max_line: f64 = (0..n)
                    .map(|i| work.row(i).iter().sum())
                    .fold(0.0, f64::max);
                if max_line <= n as f64 * tol {
                    break; // residual dust only
                }
                return Err(Error::NoPerfectMatching { rows });
            }
        };
        let weight = matching
            .iter()
            .enumerate()
            .map(|(i, &j)| work.get(i, j))
            .fold(f64::INFINITY, f64::min);
        let mut images = vec![0usize; n];
        for (i, &j) in matching.iter().enumerate() {
            images[j] = i; // P(h) has its 1 at (i, j), so h sends j to i
            work.set(i, j, work.get(i, j) - weight);
        }
        terms.push((weight, Permutation::from_images(images)?));
        if terms.len() > n * n {
            return Err(Error::VerificationFailed(
                "peeling failed to terminate".into(),
            ));
        }
    }
    let decomposition = BvnDecomposition {
        residual_norm: 0.0,
        line_sum,
        terms,
    };
    let residual_norm = m.max_abs_diff(&decomposition.reconstruct(n));
    Ok(BvnDecomposition {
        residual_norm,
        ..decomposition
    })
}

/// Entrywise positive/negative split: `B⁺ = max(B, 0)`, `B⁻ = max(−B, 0)`,
/// so that `B = B⁺ − B⁻` and the two parts have disjoint supports.
pub fn split_positive_negative(b: &OperatorMatrix) -> (OperatorMatrix, OperatorMatrix) {
    let n = b.dim();
    let mut plus = OperatorMatrix::zeros(n);
    let mut minus = OperatorMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v = b.get(i, j);
            if v > 0.0 {
                plus.set(i, j, v);
            } else if v < 0.0 {
                minus.set(i, j, -v);
            }
        }
    }
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DEFAULT_ZERO_TOL as ZT;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        lo + (rng.next_u64() >> 11) as f64 * (hi - lo) / (1u64 << 53) as f64
    }

    fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
        let mut images: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            images.swap(i, j);
        }
        Permutation::from_images(images).unwrap()
    }

    #[test]
    fn line_sums_of_identity() {
        assert_eq!(
            validate_line_sums(&OperatorMatrix::identity(4), 1e-9).unwrap(),
            1.0
        );
    }

    #[test]
    fn line_sums_of_all_ones() {
        let ones = OperatorMatrix::from_rows(vec![vec![1.0; 3]; 3]).unwrap();
        assert_eq!(validate_line_sums(&ones, 1e-9).unwrap(), 3.0);
    }

    #[test]
    fn perturbed_entry_names_the_offending_line() {
        let mut m = OperatorMatrix::from_rows(vec![vec![1.0; 3]; 3]).unwrap();
        m.set(1, 2, 1.5);
        match validate_line_sums(&m, 1e-9) {
            Err(Error::LineSumViolation { line: "row", index: 1, .. }) => {}
            other => panic!("expected row-1 violation, got {other:?}"),
        }
        let mut neg = OperatorMatrix::identity(2);
        neg.set(0, 1, -0.5);
        assert!(matches!(
            validate_line_sums(&neg, 1e-9),
            Err(Error::NegativeEntry { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn permutation_matrix_peels_to_one_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let h = random_permutation(&mut rng, 6);
            let d = decompose(&OperatorMatrix::permutation(&h), 1e-9).unwrap();
            assert_eq!(d.terms.len(), 1);
            assert_eq!(d.terms[0].1, h);
            assert!((d.terms[0].0 - 1.0).abs() < 1e-15);
            assert_eq!(d.residual_norm, 0.0);
        }
    }

    #[test]
    fn all_ones_decomposes_into_three_disjoint_permutations() {
        let ones = OperatorMatrix::from_rows(vec![vec![1.0; 3]; 3]).unwrap();
        let d = decompose(&ones, 1e-9).unwrap();
        assert_eq!(d.terms.len(), 3);
        assert!(d.residual_norm <= 1e-12);
        assert!((d.weight_sum() - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_matrix_gives_empty_decomposition() {
        let d = decompose(&OperatorMatrix::zeros(4), 1e-9).unwrap();
        assert!(d.terms.is_empty());
        assert_eq!(d.line_sum, 0.0);
    }

    #[test]
    fn planted_decompositions_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let n = 5;
            let k = 1 + (rng.next_u64() % (n as u64 - 1)) as usize;
            let mut m = OperatorMatrix::zeros(n);
            for _ in 0..k {
                let h = random_permutation(&mut rng, n);
                let w = uniform(&mut rng, 0.1, 2.0);
                m = m.add(&OperatorMatrix::permutation(&h).scale(w)).unwrap();
            }
            let d = decompose(&m, 1e-9).unwrap();
            assert!(d.residual_norm <= 1e-9, "residual {}", d.residual_norm);
            assert!(d.terms.len() <= (n - 1) * (n - 1) + 1);
            assert!((d.weight_sum() - d.line_sum).abs() <= n as f64 * 1e-9);
        }
    }

    #[test]
    fn non_line_constant_input_is_rejected() {
        let m = OperatorMatrix::from_rows(vec![vec![1.0, 0.5], vec![0.5, 0.8]]).unwrap();
        assert!(decompose(&m, 1e-9).is_err());
    }

    #[test]
    fn split_examples() {
        let b = OperatorMatrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let (plus, minus) = split_positive_negative(&b);
        assert_eq!(plus, OperatorMatrix::identity(2));
        assert_eq!(
            minus,
            OperatorMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
        );
        let nonneg = OperatorMatrix::from_rows(vec![vec![0.5, 0.0], vec![0.25, 1.0]]).unwrap();
        let (p2, m2) = split_positive_negative(&nonneg);
        assert_eq!(p2, nonneg);
        assert_eq!(m2, OperatorMatrix::zeros(2));
    }

    #[test]
    fn split_reconstructs_and_has_disjoint_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let rows: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..4).map(|_| uniform(&mut rng, -2.0, 2.0)).collect())
                .collect();
            let b = OperatorMatrix::from_rows(rows).unwrap();
            let (plus, minus) = split_positive_negative(&b);
            assert_eq!(plus.sub(&minus).unwrap(), b);
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(plus.get(i, j) * minus.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn coefficient_measure_collects_terms() {
        let ones = OperatorMatrix::from_rows(vec![vec![1.0; 3]; 3]).unwrap();
        let d = decompose(&ones, 1e-9).unwrap();
        let c = d.coefficient_measure(3).unwrap();
        assert_eq!(c.support_size(), 3);
        assert!((c.total_variation() - 3.0).abs() < ZT * 10.0);
    }
}
