//! Recovery of a conjugation-invariant signed measure from any linear
//! equivariant operator under a transitive action, and certification of
//! non-expansive equivariant operators.
//!
//! Pipeline: split the matrix into positive and negative parts, peel each
//! into weighted permutation matrices, average the peeled coefficients over
//! conjugation orbits, and re-verify both the reconstruction and the norm
//! identity `Σ|μ| = ‖B‖∞` before returning anything.

use std::collections::BTreeSet;

use crate::bvn;
use crate::error::{Error, Result};
use crate::measure::{linear_combination, SignedMeasure};
use crate::operator::{equivariance_witness, matrix_of_measure, OperatorMatrix};
use crate::perm::{Permutation, PermutationGroup};

/// Tolerances for the decomposition pipeline. Reconstruction and norm
/// checks sit one order above the peeling tolerance to absorb averaging
/// error.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub equivariance: f64,
    pub line_sums: f64,
    pub reconstruction: f64,
    pub norm_identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            equivariance: 1e-9,
            line_sums: 1e-9,
            reconstruction: 1e-8,
            norm_identity: 1e-8,
        }
    }
}

impl Tolerances {
    /// Derives the full set from one base tolerance: certification checks at
    /// `tol`, verification gaps at `10·tol`.
    pub fn from_base(tol: f64) -> Self {
        Tolerances {
            equivariance: tol,
            line_sums: tol,
            reconstruction: 10.0 * tol,
            norm_identity: 10.0 * tol,
        }
    }
}

/// A certified decomposition of an equivariant operator.
#[derive(Debug, Clone)]
pub struct RepresentationResult {
    /// Conjugation-invariant measure with `matrix_of_measure(measure) ≈ B`.
    pub measure: SignedMeasure,
    /// `|Σ|μ| − ‖B‖∞|`.
    pub norm_identity_gap: f64,
    /// Largest absolute entry of `B − matrix_of_measure(measure)`.
    pub reconstruction_gap: f64,
    /// Conjugation orbits represented in the support of the measure.
    pub orbit_count_used: usize,
}

/// Averages a non-negative coefficient measure over each conjugation orbit
/// that meets its support; the result is conjugation-invariant by
/// construction and conserves per-orbit mass.
pub fn symmetrize(c: &SignedMeasure, group: &PermutationGroup) -> Result<SignedMeasure> {
    if c.degree() != group.degree() {
        return Err(Error::DegreeMismatch {
            left: c.degree(),
            right: group.degree(),
        });
    }
    if let Some((h, w)) = c.support().find(|(_, w)| *w < -c.zero_tol()) {
        return Err(Error::InvalidInput(format!(
            "symmetrize requires a non-negative measure; found weight {w} on {h}"
        )));
    }
    let mut visited: BTreeSet<Permutation> = BTreeSet::new();
    let mut entries: Vec<(Permutation, f64)> = Vec::new();
    for (h, _) in c.support() {
        if visited.contains(h) {
            continue;
        }
        let orbit = group.conjugation_orbit(h)?;
        let mass: f64 = orbit.members().iter().map(|f| c.weight(f)).sum();
        let average = mass / orbit.size() as f64;
        for member in orbit.members() {
            entries.push((member.clone(), average));
        }
        visited.extend(orbit.members().iter().cloned());
    }
    SignedMeasure::new(c.degree(), entries).map(|m| m.with_zero_tol(c.zero_tol()))
}

fn count_orbits(m: &SignedMeasure, group: &PermutationGroup) -> Result<usize> {
    let mut visited: BTreeSet<Permutation> = BTreeSet::new();
    let mut orbits = 0;
    for (h, _) in m.support() {
        if visited.contains(h) {
            continue;
        }
        orbits += 1;
        visited.extend(group.conjugation_orbit(h)?.members().iter().cloned());
    }
    Ok(orbits)
}

/// Recovers a conjugation-invariant measure representing the equivariant
/// operator `B` under the transitive group `G`, with
/// `Σ|μ| = ‖B‖∞` (verified before returning).
pub fn geo_to_permutant_measure(
    b: &OperatorMatrix,
    group: &PermutationGroup,
    tol: &Tolerances,
) -> Result<RepresentationResult> {
    if b.dim() != group.degree() {
        return Err(Error::DegreeMismatch {
            left: b.dim(),
            right: group.degree(),
        });
    }
    if !group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    if let Some(witness) = equivariance_witness(b, group, tol.equivariance)? {
        return Err(Error::NotEquivariant(witness));
    }

    let (b_plus, b_minus) = bvn::split_positive_negative(b);
    // Both parts inherit line-constancy from equivariance + transitivity;
    // a violation here means the equivariance tolerance was too loose.
    let d_plus = bvn::decompose(&b_plus, tol.line_sums)?;
    let d_minus = bvn::decompose(&b_minus, tol.line_sums)?;

    let c_plus = d_plus.coefficient_measure(b.dim())?;
    let c_minus = d_minus.coefficient_measure(b.dim())?;
    let mu_plus = symmetrize(&c_plus, group)?;
    let mu_minus = symmetrize(&c_minus, group)?;
    let measure = linear_combination(&[1.0, -1.0], &[&mu_plus, &mu_minus])?;

    let reconstruction_gap = b.max_abs_diff(&matrix_of_measure(&measure));
    if reconstruction_gap > tol.reconstruction {
        return Err(Error::VerificationFailed(format!(
            "reconstruction gap {reconstruction_gap} exceeds {}",
            tol.reconstruction
        )));
    }
    let norm_identity_gap = (measure.total_variation() - b.inf_norm()).abs();
    if norm_identity_gap > tol.norm_identity {
        return Err(Error::VerificationFailed(format!(
            "norm identity gap {norm_identity_gap} exceeds {}",
            tol.norm_identity
        )));
    }
    debug_assert!(measure.is_permutant_measure(group)?);
    let orbit_count_used = count_orbits(&measure, group)?;
    Ok(RepresentationResult {
        measure,
        norm_identity_gap,
        reconstruction_gap,
        orbit_count_used,
    })
}

/// Outcome of a non-expansiveness certification.
#[derive(Debug, Clone)]
pub struct GeneoCertificate {
    pub is_geneo: bool,
    /// The witnessing measure when the operator is certified, `None`
    /// otherwise.
    pub measure: Option<SignedMeasure>,
    pub total_variation: f64,
    pub reconstruction_gap: f64,
    pub norm_identity_gap: f64,
}

/// Certifies whether `B` is a non-expansive equivariant operator: it is if
/// and only if the representing measure has total variation at most 1.
pub fn certify_geneo(
    b: &OperatorMatrix,
    group: &PermutationGroup,
    tol: &Tolerances,
) -> Result<GeneoCertificate> {
    let result = geo_to_permutant_measure(b, group, tol)?;
    let total_variation = result.measure.total_variation();
    let is_geneo = total_variation <= 1.0 + tol.norm_identity;
    Ok(GeneoCertificate {
        is_geneo,
        measure: is_geneo.then_some(result.measure),
        total_variation,
        reconstruction_gap: result.reconstruction_gap,
        norm_identity_gap: result.norm_identity_gap,
    })
}

/// Operator-level round trip: builds the matrix of a conjugation-invariant
/// measure, recovers a measure from it, and compares the two *matrices*
/// within the reconstruction tolerance. Measure-level equality is not
/// required because decompositions are non-unique.
pub fn measure_to_geo_roundtrip(
    m: &SignedMeasure,
    group: &PermutationGroup,
    tol: &Tolerances,
) -> Result<bool> {
    if !m.is_permutant_measure(group)? {
        return Err(Error::InvalidInput(
            "measure is not conjugation-invariant for the group".into(),
        ));
    }
    let b = matrix_of_measure(m);
    let recovered = geo_to_permutant_measure(&b, group, tol)?;
    Ok(b.max_abs_diff(&matrix_of_measure(&recovered.measure)) <= tol.reconstruction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{apply_measure_operator, is_equivariant, right_translate, Signal};
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn cyc(text: &str, degree: usize) -> Permutation {
        Permutation::from_cycles(text, degree).unwrap()
    }

    fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        lo + (rng.next_u64() >> 11) as f64 * (hi - lo) / (1u64 << 53) as f64
    }

    fn s4_constant_matrix(alpha: f64, beta: f64) -> OperatorMatrix {
        let mut b = OperatorMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                b.set(i, j, if i == j { alpha } else { beta });
            }
        }
        b
    }

    #[test]
    fn symmetrize_leaves_invariant_measures_unchanged() {
        let s4 = PermutationGroup::symmetric(4).unwrap();
        let orbit = s4.conjugation_orbit(&cyc("(1 2)", 4)).unwrap();
        let m = SignedMeasure::new(
            4,
            orbit.members().iter().map(|h| (h.clone(), 0.5)),
        )
        .unwrap();
        let out = symmetrize(&m, &s4).unwrap();
        assert!(out.approx_eq(&m, 1e-15));
    }

    #[test]
    fn symmetrize_spreads_cyclic_coefficients() {
        // Coefficients α on the identity and β on each power of the
        // 4-cycle average to β/3 across both non-trivial orbits.
        let (alpha, beta) = (0.8, 0.6);
        let s4 = PermutationGroup::symmetric(4).unwrap();
        let sigma = cyc("(1 2 3 4)", 4);
        let sigma2 = sigma.compose(&sigma).unwrap();
        let sigma3 = sigma2.compose(&sigma).unwrap();
        let c = SignedMeasure::new(
            4,
            [
                (Permutation::identity(4), alpha),
                (sigma.clone(), beta),
                (sigma2.clone(), beta),
                (sigma3.clone(), beta),
            ],
        )
        .unwrap();
        let mu = symmetrize(&c, &s4).unwrap();
        assert!((mu.weight(&Permutation::identity(4)) - alpha).abs() < 1e-15);
        for h in s4.conjugation_orbit(&sigma).unwrap().members() {
            assert!((mu.weight(h) - beta / 3.0).abs() < 1e-15);
        }
        for h in s4.conjugation_orbit(&sigma2).unwrap().members() {
            assert!((mu.weight(h) - beta / 3.0).abs() < 1e-15);
        }
        assert_eq!(mu.support_size(), 10);
    }

    #[test]
    fn symmetrize_conserves_orbit_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 3..=5usize {
            let group = PermutationGroup::symmetric(n).unwrap();
            let all = crate::perm::all_permutations(n).unwrap();
            let entries: Vec<(Permutation, f64)> = (0..6)
                .map(|_| {
                    let h = all[(rng.next_u64() % all.len() as u64) as usize].clone();
                    (h, uniform(&mut rng, 0.0, 2.0))
                })
                .collect();
            let c = SignedMeasure::new(n, entries).unwrap();
            let mu = symmetrize(&c, &group).unwrap();
            let mut visited: BTreeSet<Permutation> = BTreeSet::new();
            for (h, _) in c.support() {
                if visited.contains(h) {
                    continue;
                }
                let orbit = group.conjugation_orbit(h).unwrap();
                let before: f64 = orbit.members().iter().map(|f| c.weight(f)).sum();
                let after: f64 = orbit.members().iter().map(|f| mu.weight(f)).sum();
                assert!((before - after).abs() < 1e-12);
                visited.extend(orbit.members().iter().cloned());
            }
        }
    }

    #[test]
    fn symmetrize_rejects_negative_input() {
        let s3 = PermutationGroup::symmetric(3).unwrap();
        let c = SignedMeasure::dirac(cyc("(1 2)", 3), -1.0);
        assert!(symmetrize(&c, &s3).is_err());
    }

    #[test]
    fn simplest_example_decomposes_exactly() {
        let b = OperatorMatrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let g = PermutationGroup::symmetric(2).unwrap();
        let result = geo_to_permutant_measure(&b, &g, &Tolerances::default()).unwrap();
        assert!((result.measure.weight(&Permutation::identity(2)) - 1.0).abs() < 1e-12);
        assert!((result.measure.weight(&cyc("(1 2)", 2)) + 1.0).abs() < 1e-12);
        assert!((result.measure.total_variation() - 2.0).abs() < 1e-12);
        assert!((b.inf_norm() - 2.0).abs() < 1e-15);
        assert!(result.reconstruction_gap <= 1e-10);
        assert!(result.norm_identity_gap <= 1e-10);
        assert_eq!(result.orbit_count_used, 2);
    }

    #[test]
    fn identity_recovers_unit_mass_on_identity() {
        let g = PermutationGroup::close(&[cyc("(1 2 3 4 5)", 5)]).unwrap();
        let result =
            geo_to_permutant_measure(&OperatorMatrix::identity(5), &g, &Tolerances::default())
                .unwrap();
        assert_eq!(result.measure.support_size(), 1);
        assert!((result.measure.weight(&Permutation::identity(5)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_transitive_group_is_rejected() {
        // Both columns e_1: a linear equivariant operator for the trivial
        // group that no measure can represent.
        let b = OperatorMatrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let trivial = PermutationGroup::trivial(2);
        assert!(matches!(
            geo_to_permutant_measure(&b, &trivial, &Tolerances::default()),
            Err(Error::NotTransitive)
        ));
        let full = PermutationGroup::symmetric(2).unwrap();
        assert!(matches!(
            geo_to_permutant_measure(&b, &full, &Tolerances::default()),
            Err(Error::NotEquivariant(_))
        ));
    }

    #[test]
    fn s4_family_obeys_the_norm_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s4 = PermutationGroup::symmetric(4).unwrap();
        for trial in 0..20 {
            let (alpha, beta) = if trial % 2 == 0 {
                (uniform(&mut rng, 0.0, 2.0), uniform(&mut rng, 0.0, 2.0))
            } else {
                (uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0))
            };
            let b = s4_constant_matrix(alpha, beta);
            let result = geo_to_permutant_measure(&b, &s4, &Tolerances::default()).unwrap();
            assert!(result.reconstruction_gap <= 1e-8);
            assert!(result.norm_identity_gap <= 1e-8);
            if alpha >= 0.0 && beta >= 0.0 {
                assert!(
                    (result.measure.total_variation() - (alpha + 3.0 * beta)).abs() <= 1e-8
                );
            }
        }
    }

    #[test]
    fn geneo_certification_examples() {
        let g = PermutationGroup::symmetric(2).unwrap();
        let b = OperatorMatrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let cert = certify_geneo(&b, &g, &Tolerances::default()).unwrap();
        assert!(!cert.is_geneo);
        assert!(cert.measure.is_none());
        assert!((cert.total_variation - 2.0).abs() < 1e-12);

        let half = certify_geneo(&b.scale(0.5), &g, &Tolerances::default()).unwrap();
        assert!(half.is_geneo);
        assert!((half.total_variation - 1.0).abs() < 1e-12);
        assert!(half.measure.is_some());

        let id = certify_geneo(&OperatorMatrix::identity(2), &g, &Tolerances::default())
            .unwrap();
        assert!(id.is_geneo);
        let witness = id.measure.unwrap();
        assert_eq!(witness.support_size(), 1);
        assert!((witness.weight(&Permutation::identity(2)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dirac_round_trip_is_exact() {
        let g = PermutationGroup::symmetric(3).unwrap();
        let m = SignedMeasure::dirac(Permutation::identity(3), 1.0);
        assert!(measure_to_geo_roundtrip(&m, &g, &Tolerances::default()).unwrap());
        let recovered =
            geo_to_permutant_measure(&matrix_of_measure(&m), &g, &Tolerances::default())
                .unwrap();
        assert!(recovered.measure.approx_eq(&m, 1e-12));
    }

    #[test]
    fn rotation_measure_round_trip() {
        // Unit mass on one rotation of the cyclic rotation group.
        let sigma = cyc("(1 2 3 4 5 6)", 6);
        let group = PermutationGroup::close(&[sigma.clone()]).unwrap();
        let hbar = sigma.compose(&sigma).unwrap();
        let m = SignedMeasure::dirac(hbar, 1.0);
        assert!(measure_to_geo_roundtrip(&m, &group, &Tolerances::default()).unwrap());
    }

    #[test]
    fn roundtrip_rejects_non_invariant_measures() {
        let s4 = PermutationGroup::symmetric(4).unwrap();
        let m = SignedMeasure::dirac(cyc("(1 2)", 4), 1.0);
        assert!(measure_to_geo_roundtrip(&m, &s4, &Tolerances::default()).is_err());
    }

    #[test]
    fn forward_direction_gives_equivariance() {
        // The matrix of any conjugation-invariant measure commutes with the
        // whole group, checked exhaustively for small degrees.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3usize, 4] {
            let group = PermutationGroup::symmetric(n).unwrap();
            let all = crate::perm::all_permutations(n).unwrap();
            for _ in 0..10 {
                let h = all[(rng.next_u64() % all.len() as u64) as usize].clone();
                let w = uniform(&mut rng, -2.0, 2.0);
                let orbit = group.conjugation_orbit(&h).unwrap();
                let m = SignedMeasure::new(
                    n,
                    orbit.members().iter().map(|f| (f.clone(), w)),
                )
                .unwrap();
                let b = matrix_of_measure(&m);
                assert!(
                    crate::operator::equivariance_witness_all(&b, &group, 1e-12)
                        .unwrap()
                        .is_none()
                );
            }
        }
    }

    #[test]
    fn measure_operator_is_equivariant_on_signals() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let group = PermutationGroup::symmetric(4).unwrap();
        let orbit = group.conjugation_orbit(&cyc("(1 2)(3 4)", 4)).unwrap();
        let m = SignedMeasure::new(
            4,
            orbit
                .members()
                .iter()
                .map(|h| (h.clone(), 0.7))
                .chain([(Permutation::identity(4), -0.2)]),
        )
        .unwrap();
        for _ in 0..50 {
            let phi = Signal::new((0..4).map(|_| uniform(&mut rng, -1.0, 1.0)).collect())
                .unwrap();
            for g in group.elements() {
                let lhs =
                    apply_measure_operator(&m, &right_translate(&phi, g).unwrap()).unwrap();
                let rhs =
                    right_translate(&apply_measure_operator(&m, &phi).unwrap(), g).unwrap();
                for j in 0..4 {
                    assert!((lhs.values()[j] - rhs.values()[j]).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn equivariant_nonexpansive_matrix_is_certified() {
        let s4 = PermutationGroup::symmetric(4).unwrap();
        let b = s4_constant_matrix(0.4, 0.15); // row sum 0.85 < 1
        let cert = certify_geneo(&b, &s4, &Tolerances::default()).unwrap();
        assert!(cert.is_geneo);
        assert!(is_equivariant(&b, &s4, 0.0).unwrap());
        assert!(b.is_nonexpansive(0.0));
    }
}
