//! The cubic lattice `{1, .., n}³`, its outer surface, the rotation group of
//! the cube acting on lattice points, and the three reflection families used
//! to build surface operators.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::perm::{Permutant, Permutation, PermutationGroup};

/// Cubic lattice with a fixed enumeration of its outer surface: a point
/// `(i, j, k)` (1-based) is on the surface iff some coordinate is `1` or `n`.
#[derive(Debug, Clone)]
pub struct CubeLattice {
    n: usize,
    /// Flat lattice index of each surface position, ascending.
    surface_index: Vec<u32>,
    /// Surface position of each flat index, `u32::MAX` for interior points.
    surface_pos: Vec<u32>,
}

impl CubeLattice {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "lattice side must be at least 2, got {n}"
            )));
        }
        let volume = n * n * n;
        let mut surface_index = Vec::new();
        let mut surface_pos = vec![u32::MAX; volume];
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    if i == 1 || i == n || j == 1 || j == n || k == 1 || k == n {
                        let flat = (i - 1) * n * n + (j - 1) * n + (k - 1);
                        surface_pos[flat] = surface_index.len() as u32;
                        surface_index.push(flat as u32);
                    }
                }
            }
        }
        Ok(CubeLattice {
            n,
            surface_index,
            surface_pos,
        })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn volume(&self) -> usize {
        self.n * self.n * self.n
    }

    /// `n³ − (n−2)³`.
    pub fn surface_len(&self) -> usize {
        self.surface_index.len()
    }

    /// Flat index of 1-based coordinates.
    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!((1..=self.n).contains(&i));
        debug_assert!((1..=self.n).contains(&j));
        debug_assert!((1..=self.n).contains(&k));
        (i - 1) * self.n * self.n + (j - 1) * self.n + (k - 1)
    }

    /// 1-based coordinates of a flat index.
    pub fn coords(&self, flat: usize) -> (usize, usize, usize) {
        let k = flat % self.n;
        let j = (flat / self.n) % self.n;
        let i = flat / (self.n * self.n);
        (i + 1, j + 1, k + 1)
    }

    pub fn is_surface(&self, i: usize, j: usize, k: usize) -> bool {
        i == 1 || i == self.n || j == 1 || j == self.n || k == 1 || k == self.n
    }

    /// Surface position of a flat index, if it lies on the surface.
    pub fn surface_position(&self, flat: usize) -> Option<usize> {
        match self.surface_pos[flat] {
            u32::MAX => None,
            pos => Some(pos as usize),
        }
    }

    /// Flat index of a surface position.
    pub fn surface_flat(&self, pos: usize) -> usize {
        self.surface_index[pos] as usize
    }

    /// Builds the lattice permutation of a 1-based coordinate map.
    pub fn permutation_from_coords(
        &self,
        f: impl Fn(usize, usize, usize) -> (usize, usize, usize),
    ) -> Result<Permutation> {
        let mut images = vec![0usize; self.volume()];
        for flat in 0..self.volume() {
            let (i, j, k) = self.coords(flat);
            let (a, b, c) = f(i, j, k);
            if !(1..=self.n).contains(&a)
                || !(1..=self.n).contains(&b)
                || !(1..=self.n).contains(&c)
            {
                return Err(Error::InvalidInput(format!(
                    "coordinate map leaves the lattice at ({i}, {j}, {k})"
                )));
            }
            images[flat] = self.flat(a, b, c);
        }
        Permutation::from_images(images)
    }
}

/// Restriction of a surface-preserving lattice permutation to surface
/// positions, stored in pullback form: `apply(in)[s] = in[map[s]]` where
/// `map[s]` is the surface position of `p(x_s)`.
#[derive(Debug, Clone)]
pub struct SurfaceMap {
    map: Vec<u32>,
}

impl SurfaceMap {
    pub fn from_permutation(lattice: &CubeLattice, p: &Permutation) -> Result<Self> {
        if p.degree() != lattice.volume() {
            return Err(Error::DegreeMismatch {
                left: lattice.volume(),
                right: p.degree(),
            });
        }
        let mut map = Vec::with_capacity(lattice.surface_len());
        for pos in 0..lattice.surface_len() {
            let image = p.apply(lattice.surface_flat(pos));
            let image_pos = lattice.surface_position(image).ok_or_else(|| {
                Error::InvalidInput("permutation does not preserve the surface".into())
            })?;
            map.push(image_pos as u32);
        }
        Ok(SurfaceMap { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn source(&self, s: usize) -> usize {
        self.map[s] as usize
    }

    /// Pullback application into a fresh buffer.
    pub fn apply_f64(&self, input: &[f64]) -> Vec<f64> {
        self.map.iter().map(|&m| input[m as usize]).collect()
    }

    pub fn apply_f32(&self, input: &[f32]) -> Vec<f32> {
        self.map.iter().map(|&m| input[m as usize]).collect()
    }
}

/// The rotation group of the cube on lattice points together with its three
/// reflection families: the face-plane reflections, the edge-plane
/// reflections and the central symmetry. Each family is stable under
/// conjugation by the rotation group.
#[derive(Debug, Clone)]
pub struct CubeSymmetries {
    pub lattice: CubeLattice,
    /// The 24 orientation-preserving symmetries.
    pub rotations: PermutationGroup,
    /// Reflections across the three planes parallel to a pair of faces.
    pub face_reflections: Permutant,
    /// Reflections across the six planes through opposite edges.
    pub edge_reflections: Permutant,
    /// The point reflection through the center.
    pub central_symmetry: Permutant,
}

/// Builds the rotation group (order 24) and the three reflection permutants
/// on the `n³` lattice. With `r(t) = n + 1 − t`:
/// quarter turns `(i,j,k) ↦ (i, r(k), j)` and `(i,j,k) ↦ (r(k), j, i)`
/// generate the rotations; the families are
/// `{(r(i),j,k), (i,r(j),k), (i,j,r(k))}`,
/// `{(j,i,k), (r(j),r(i),k), (k,j,i), (r(k),j,r(i)), (i,k,j), (i,r(k),r(j))}`
/// and `{(r(i),r(j),r(k))}`.
pub fn build_cube_group_and_permutants(n: usize) -> Result<CubeSymmetries> {
    let lattice = CubeLattice::new(n)?;
    let r = move |t: usize| n + 1 - t;

    let turn_i = lattice.permutation_from_coords(|i, j, k| (i, r(k), j))?;
    let turn_j = lattice.permutation_from_coords(|i, j, k| (r(k), j, i))?;
    let rotations = PermutationGroup::close(&[turn_i, turn_j])?;
    debug_assert_eq!(rotations.order(), 24);

    let face: BTreeSet<Permutation> = [
        lattice.permutation_from_coords(|i, j, k| (r(i), j, k))?,
        lattice.permutation_from_coords(|i, j, k| (i, r(j), k))?,
        lattice.permutation_from_coords(|i, j, k| (i, j, r(k)))?,
    ]
    .into_iter()
    .collect();
    let edge: BTreeSet<Permutation> = [
        lattice.permutation_from_coords(|i, j, k| (j, i, k))?,
        lattice.permutation_from_coords(|i, j, k| (r(j), r(i), k))?,
        lattice.permutation_from_coords(|i, j, k| (k, j, i))?,
        lattice.permutation_from_coords(|i, j, k| (r(k), j, r(i)))?,
        lattice.permutation_from_coords(|i, j, k| (i, k, j))?,
        lattice.permutation_from_coords(|i, j, k| (i, r(k), r(j)))?,
    ]
    .into_iter()
    .collect();
    let central: BTreeSet<Permutation> =
        [lattice.permutation_from_coords(|i, j, k| (r(i), r(j), r(k)))?]
            .into_iter()
            .collect();

    let face_reflections = Permutant::new(face, &rotations)?;
    let edge_reflections = Permutant::new(edge, &rotations)?;
    let central_symmetry = Permutant::new(central, &rotations)?;

    Ok(CubeSymmetries {
        lattice,
        rotations,
        face_reflections,
        edge_reflections,
        central_symmetry,
    })
}

/// The three face-axis quarter turns (about the i, j and k axes), in the
/// positive direction fixed by the generator convention above.
pub fn axis_quarter_turns(lattice: &CubeLattice) -> Result<[Permutation; 3]> {
    let n = lattice.side();
    let r = move |t: usize| n + 1 - t;
    Ok([
        lattice.permutation_from_coords(|i, j, k| (i, r(k), j))?,
        lattice.permutation_from_coords(|i, j, k| (r(k), j, i))?,
        lattice.permutation_from_coords(|i, j, k| (r(j), i, k))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_count_matches_formula() {
        for n in [2usize, 3, 5, 25] {
            let lattice = CubeLattice::new(n).unwrap();
            let expected = n * n * n - (n - 2) * (n - 2) * (n - 2);
            assert_eq!(lattice.surface_len(), expected);
        }
        assert_eq!(CubeLattice::new(25).unwrap().surface_len(), 3458);
    }

    #[test]
    fn surface_points_touch_a_boundary_plane() {
        let lattice = CubeLattice::new(4).unwrap();
        for pos in 0..lattice.surface_len() {
            let (i, j, k) = lattice.coords(lattice.surface_flat(pos));
            assert!(lattice.is_surface(i, j, k));
            assert_eq!(
                lattice.surface_position(lattice.surface_flat(pos)),
                Some(pos)
            );
        }
    }

    #[test]
    fn rotation_group_has_order_24() {
        for n in [2usize, 3] {
            let sym = build_cube_group_and_permutants(n).unwrap();
            assert_eq!(sym.rotations.order(), 24);
            assert!(sym.rotations.is_transitive() == (n == 2));
        }
    }

    #[test]
    fn reflection_families_have_expected_sizes() {
        let sym = build_cube_group_and_permutants(3).unwrap();
        assert_eq!(sym.face_reflections.len(), 3);
        assert_eq!(sym.edge_reflections.len(), 6);
        assert_eq!(sym.central_symmetry.len(), 1);
    }

    #[test]
    fn face_reflections_form_a_single_conjugation_orbit() {
        let sym = build_cube_group_and_permutants(3).unwrap();
        let first = sym.face_reflections.members().iter().next().unwrap();
        let orbit = sym.rotations.conjugation_orbit(first).unwrap();
        assert_eq!(orbit.members(), sym.face_reflections.members());
    }

    #[test]
    fn symmetries_preserve_the_surface() {
        let sym = build_cube_group_and_permutants(3).unwrap();
        let all: Vec<&Permutation> = sym
            .rotations
            .elements()
            .iter()
            .chain(sym.face_reflections.members())
            .chain(sym.edge_reflections.members())
            .chain(sym.central_symmetry.members())
            .collect();
        for p in all {
            let map = SurfaceMap::from_permutation(&sym.lattice, p).unwrap();
            let mut hit = vec![false; map.len()];
            for s in 0..map.len() {
                hit[map.source(s)] = true;
            }
            assert!(hit.iter().all(|&h| h), "restriction is not a bijection");
        }
    }

    #[test]
    fn quarter_turns_have_order_four_and_lie_in_the_group() {
        let sym = build_cube_group_and_permutants(3).unwrap();
        for turn in axis_quarter_turns(&sym.lattice).unwrap() {
            let squared = turn.compose(&turn).unwrap();
            let fourth = squared.compose(&squared).unwrap();
            assert!(fourth.is_identity());
            assert!(!squared.is_identity());
            assert!(sym.rotations.contains(&turn));
        }
    }

    #[test]
    fn reflections_are_involutions_outside_the_rotation_group() {
        let sym = build_cube_group_and_permutants(3).unwrap();
        for h in sym
            .face_reflections
            .members()
            .iter()
            .chain(sym.edge_reflections.members())
            .chain(sym.central_symmetry.members())
        {
            assert!(h.compose(h).unwrap().is_identity());
            assert!(!sym.rotations.contains(h));
        }
    }
}
