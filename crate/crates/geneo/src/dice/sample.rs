//! Synthetic die scans: truncated Gaussian dot rendering, per-class face
//! arrangements, random re-orientation and deterministic dataset generation.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rayon::prelude::*;

use crate::dice::lattice::{axis_quarter_turns, CubeLattice, SurfaceMap};
use crate::dice::sampling::{shuffle, uniform_f64, uniform_index};
use crate::error::{Error, Result};

/// Dot layout anchors on a face, 1-based.
pub const DOT_ANCHORS: (usize, usize, usize) = (6, 13, 20);

/// Chebyshev truncation radius of a dot.
pub const DOT_RADIUS: usize = 3;

/// Face ids: `2·axis + side` with side 0 at coordinate 1 and side 1 at
/// coordinate `n`; opposite faces are `(2a, 2a+1)`.
pub const FACE_COUNT: usize = 6;

/// One labeled die: class 1 dice have opposite-face dot counts that always
/// sum to seven, class 2 dice never do.
#[derive(Debug, Clone)]
pub struct DieSample {
    pub label: u8,
    pub seed: u64,
    pub surface_values: Vec<f32>,
}

/// Dot centers for a face showing `count` dots, in draw order.
pub fn dot_centers(count: usize) -> Result<Vec<(usize, usize)>> {
    let (n1, n2, n3) = DOT_ANCHORS;
    let centers = match count {
        1 => vec![(n2, n2)],
        2 => vec![(n1, n1), (n3, n3)],
        3 => vec![(n1, n1), (n2, n2), (n3, n3)],
        4 => vec![(n1, n1), (n1, n3), (n3, n1), (n3, n3)],
        5 => vec![(n1, n1), (n1, n3), (n2, n2), (n3, n1), (n3, n3)],
        6 => vec![(n1, n1), (n1, n2), (n1, n3), (n3, n1), (n3, n2), (n3, n3)],
        other => {
            return Err(Error::InvalidInput(format!(
                "a face shows 1 to 6 dots, got {other}"
            )))
        }
    };
    Ok(centers)
}

/// Renders one face as an `n×n` grid (row-major over 1-based coordinates
/// `(a, b)`): the sum of truncated Gaussian spots
/// `kᵢ · exp(−((a−ā)² + (b−b̄)²)/2)` over `max(|a−ā|, |b−b̄|) ≤ 3`.
pub fn render_face(dot_count: usize, coefficients: &[f64], n: usize) -> Result<Vec<f64>> {
    if n < 21 {
        return Err(Error::InvalidInput(format!(
            "face side must be at least 21 so the dot layout fits, got {n}"
        )));
    }
    let centers = dot_centers(dot_count)?;
    if coefficients.len() != centers.len() {
        return Err(Error::InvalidInput(format!(
            "{} coefficients for {} dots",
            coefficients.len(),
            centers.len()
        )));
    }
    let mut grid = vec![0.0f64; n * n];
    let radius = DOT_RADIUS as isize;
    for (&(ca, cb), &k) in centers.iter().zip(coefficients) {
        for da in -radius..=radius {
            for db in -radius..=radius {
                let a = ca as isize + da;
                let b = cb as isize + db;
                if a < 1 || b < 1 || a > n as isize || b > n as isize {
                    continue;
                }
                let d2 = (da * da + db * db) as f64;
                grid[(a as usize - 1) * n + (b as usize - 1)] += k * (-d2 / 2.0).exp();
            }
        }
    }
    Ok(grid)
}

/// Generator for labeled die samples on a fixed lattice. Holds the surface
/// restrictions of the inverse face-axis quarter turns so that applying a
/// rotation to a die is a single index gather.
#[derive(Debug)]
pub struct DieGenerator {
    lattice: CubeLattice,
    /// Pullback maps of g⁻¹ for the three quarter turns g.
    rotation_pullbacks: [SurfaceMap; 3],
    /// Face id permutation induced by each quarter turn (push direction).
    rotation_face_maps: [[usize; FACE_COUNT]; 3],
    coeff_lo: f64,
    coeff_hi: f64,
}

impl DieGenerator {
    pub fn new(n: usize, coeff_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = coeff_range;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidInput(format!(
                "coefficient range must satisfy 0 <= lo <= hi <= 1, got [{lo}, {hi}]"
            )));
        }
        let lattice = CubeLattice::new(n)?;
        if n < 21 {
            return Err(Error::InvalidInput(format!(
                "die lattice side must be at least 21, got {n}"
            )));
        }
        let turns = axis_quarter_turns(&lattice)?;
        let rotation_pullbacks = [
            SurfaceMap::from_permutation(&lattice, &turns[0].inverse())?,
            SurfaceMap::from_permutation(&lattice, &turns[1].inverse())?,
            SurfaceMap::from_permutation(&lattice, &turns[2].inverse())?,
        ];
        let mut rotation_face_maps = [[0usize; FACE_COUNT]; 3];
        for (axis, turn) in turns.iter().enumerate() {
            for face in 0..FACE_COUNT {
                let center = face_center(&lattice, face);
                let image = turn.apply(center);
                rotation_face_maps[axis][face] = face_of(&lattice, image);
            }
        }
        Ok(DieGenerator {
            lattice,
            rotation_pullbacks,
            rotation_face_maps,
            coeff_lo: lo,
            coeff_hi: hi,
        })
    }

    pub fn lattice(&self) -> &CubeLattice {
        &self.lattice
    }

    /// Generates one die of the given class from its own seed.
    pub fn generate(&self, class: u8, seed: u64) -> Result<DieSample> {
        self.generate_with_counts(class, seed).map(|(die, _)| die)
    }

    /// As [`generate`], also returning the per-face dot counts in the final
    /// orientation (face ids `2·axis + side`).
    ///
    /// [`generate`]: DieGenerator::generate
    pub fn generate_with_counts(&self, class: u8, seed: u64) -> Result<(DieSample, [u8; 6])> {
        if class != 1 && class != 2 {
            return Err(Error::InvalidInput(format!("class must be 1 or 2, got {class}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = match class {
            1 => arrange_class_one(&mut rng),
            _ => arrange_class_two(&mut rng),
        };

        let n = self.lattice.side();
        let mut surface = vec![0.0f64; self.lattice.surface_len()];
        for face in 0..FACE_COUNT {
            let dots = counts[face] as usize;
            let coefficients: Vec<f64> = (0..dots)
                .map(|_| uniform_f64(&mut rng, self.coeff_lo, self.coeff_hi))
                .collect();
            let grid = render_face(dots, &coefficients, n)?;
            for a in 1..=n {
                for b in 1..=n {
                    let v = grid[(a - 1) * n + (b - 1)];
                    if v == 0.0 {
                        continue;
                    }
                    let flat = face_cell(&self.lattice, face, a, b);
                    let pos = self
                        .lattice
                        .surface_position(flat)
                        .expect("face cells lie on the surface");
                    surface[pos] += v;
                }
            }
        }

        // Random re-orientation: 1-5 quarter turns about uniformly drawn
        // face axes. Rotating the die by g turns φ into φ∘g⁻¹.
        let p = 1 + uniform_index(&mut rng, 5);
        for _ in 0..p {
            let axis = uniform_index(&mut rng, 3);
            surface = self.rotation_pullbacks[axis].apply_f64(&surface);
            let mut rotated = [0u8; FACE_COUNT];
            for face in 0..FACE_COUNT {
                rotated[self.rotation_face_maps[axis][face]] = counts[face];
            }
            counts = rotated;
        }

        let die = DieSample {
            label: class,
            seed,
            surface_values: surface.into_iter().map(|v| v as f32).collect(),
        };
        Ok((die, counts))
    }
}

/// Opposite-face pairs always summing to seven, randomly assigned to axes
/// with random side order.
fn arrange_class_one(rng: &mut ChaCha8Rng) -> [u8; 6] {
    const PAIRS: [(u8, u8); 3] = [(1, 6), (2, 5), (3, 4)];
    let mut order = [0usize, 1, 2];
    shuffle(rng, &mut order);
    let mut counts = [0u8; 6];
    for axis in 0..3 {
        let (lo, hi) = PAIRS[order[axis]];
        let flipped = uniform_index(rng, 2) == 1;
        counts[2 * axis] = if flipped { hi } else { lo };
        counts[2 * axis + 1] = if flipped { lo } else { hi };
    }
    counts
}

/// Rejection-samples a bijection of `{1, .., 6}` onto the faces until no
/// opposite pair sums to seven (acceptance rate 384/720).
fn arrange_class_two(rng: &mut ChaCha8Rng) -> [u8; 6] {
    loop {
        let mut faces = [1u8, 2, 3, 4, 5, 6];
        shuffle(rng, &mut faces);
        if (0..3).all(|axis| faces[2 * axis] + faces[2 * axis + 1] != 7) {
            return faces;
        }
    }
}

/// Flat index of the cell at face coordinates `(a, b)` on the given face.
/// The free coordinates are taken in ascending axis order.
fn face_cell(lattice: &CubeLattice, face: usize, a: usize, b: usize) -> usize {
    let n = lattice.side();
    let fixed = if face % 2 == 0 { 1 } else { n };
    match face / 2 {
        0 => lattice.flat(fixed, a, b),
        1 => lattice.flat(a, fixed, b),
        _ => lattice.flat(a, b, fixed),
    }
}

/// Flat index of the center cell of a face (unambiguous for n >= 3).
fn face_center(lattice: &CubeLattice, face: usize) -> usize {
    let mid = (lattice.side() + 1) / 2;
    face_cell(lattice, face, mid, mid)
}

/// Face id containing a flat index that lies strictly inside one face.
fn face_of(lattice: &CubeLattice, flat: usize) -> usize {
    let n = lattice.side();
    let (i, j, k) = lattice.coords(flat);
    if i == 1 {
        0
    } else if i == n {
        1
    } else if j == 1 {
        2
    } else if j == n {
        3
    } else if k == 1 {
        4
    } else if k == n {
        5
    } else {
        unreachable!("face centers lie on the surface")
    }
}

/// Deterministic dataset of alternating classes: the die at index `idx`
/// (0-based) has class `1 + idx mod 2` and per-die seed `seed ⊕ idx`.
pub fn generate_dataset(
    generator: &DieGenerator,
    count: usize,
    seed: u64,
) -> Result<Vec<DieSample>> {
    if count == 0 || count % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "dataset size must be positive and even, got {count}"
        )));
    }
    (0..count)
        .into_par_iter()
        .map(|idx| generator.generate(1 + (idx % 2) as u8, seed ^ idx as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_value_at_center_is_the_coefficient() {
        let grid = render_face(1, &[0.85], 25).unwrap();
        let (_, n2, _) = DOT_ANCHORS;
        assert_eq!(grid[(n2 - 1) * 25 + (n2 - 1)], 0.85);
    }

    #[test]
    fn dot_truncates_at_chebyshev_radius_three() {
        let grid = render_face(1, &[1.0], 25).unwrap();
        let (_, n2, _) = DOT_ANCHORS;
        assert_eq!(grid[(n2 - 1 + 4) * 25 + (n2 - 1)], 0.0);
        assert_eq!(grid[(n2 - 1) * 25 + (n2 - 1 + 4)], 0.0);
        let at_three = grid[(n2 - 1 + 3) * 25 + (n2 - 1)];
        assert!((at_three - (-4.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn dot_neighbor_value_matches_the_gaussian() {
        let grid = render_face(1, &[1.0], 25).unwrap();
        let (_, n2, _) = DOT_ANCHORS;
        let neighbor = grid[(n2 - 1 + 1) * 25 + (n2 - 1)];
        assert!((neighbor - (-0.5f64).exp()).abs() < 1e-15);
        assert!((neighbor - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn render_rejects_bad_inputs() {
        assert!(render_face(0, &[], 25).is_err());
        assert!(render_face(7, &[1.0; 7], 25).is_err());
        assert!(render_face(2, &[1.0], 25).is_err());
        assert!(render_face(1, &[1.0], 20).is_err());
    }

    #[test]
    fn class_one_dice_sum_to_seven_after_rotation() {
        let generator = DieGenerator::new(25, (0.6, 1.0)).unwrap();
        for seed in 0..40u64 {
            let (die, counts) = generator.generate_with_counts(1, seed).unwrap();
            assert_eq!(die.label, 1);
            for axis in 0..3 {
                assert_eq!(counts[2 * axis] + counts[2 * axis + 1], 7);
            }
        }
    }

    #[test]
    fn class_two_dice_never_sum_to_seven() {
        let generator = DieGenerator::new(25, (0.6, 1.0)).unwrap();
        for seed in 0..40u64 {
            let (_, counts) = generator.generate_with_counts(2, seed).unwrap();
            let mut all: Vec<u8> = counts.to_vec();
            all.sort_unstable();
            assert_eq!(all, vec![1, 2, 3, 4, 5, 6]);
            for axis in 0..3 {
                assert_ne!(counts[2 * axis] + counts[2 * axis + 1], 7);
            }
        }
    }

    #[test]
    fn total_mass_matches_the_stencil_sum() {
        // With all coefficients 1 the surface mass is the total dot count
        // times the 7×7 stencil mass. The rotation permutes values, so the
        // invariant holds for every seed.
        let generator = DieGenerator::new(25, (1.0, 1.0)).unwrap();
        let stencil: f64 = (-3i32..=3)
            .flat_map(|da| (-3i32..=3).map(move |db| (da, db)))
            .map(|(da, db)| (-f64::from(da * da + db * db) / 2.0).exp())
            .sum();
        for seed in [0u64, 9, 77] {
            let (die, counts) = generator.generate_with_counts(1, seed).unwrap();
            let dots: f64 = counts.iter().map(|&c| f64::from(c)).sum();
            let mass: f64 = die.surface_values.iter().map(|&v| f64::from(v)).sum();
            assert!(
                (mass - dots * stencil).abs() < 1e-3,
                "mass {mass} vs expected {}",
                dots * stencil
            );
        }
    }

    #[test]
    fn interior_values_are_never_stored() {
        let generator = DieGenerator::new(25, (0.6, 1.0)).unwrap();
        let die = generator.generate(2, 5).unwrap();
        assert_eq!(die.surface_values.len(), 3458);
        assert!(die.surface_values.iter().all(|v| (0.0..=1.2).contains(&f64::from(*v))));
    }

    #[test]
    fn dataset_alternates_classes_and_is_deterministic() {
        let generator = DieGenerator::new(25, (0.6, 1.0)).unwrap();
        let data = generate_dataset(&generator, 10, 123).unwrap();
        assert_eq!(data.iter().filter(|d| d.label == 1).count(), 5);
        assert_eq!(data.iter().filter(|d| d.label == 2).count(), 5);
        assert_eq!(data[0].label, 1);
        assert_eq!(data[1].label, 2);
        let again = generate_dataset(&generator, 10, 123).unwrap();
        for (a, b) in data.iter().zip(&again) {
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.surface_values, b.surface_values);
        }
        assert!(generate_dataset(&generator, 7, 0).is_err());
    }
}
