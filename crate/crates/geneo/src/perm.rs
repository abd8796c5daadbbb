//! Permutations on a finite indexed set `{0, .., n-1}`, finite permutation
//! groups stored by exhaustive element lists, conjugation orbits, permutants
//! and weak versatility.
//!
//! Composition uses multiplicative notation: `a.compose(&b)` applies `b`
//! first, then `a`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Default cap on group closure size.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// Largest degree for which conjugation orbits of the full symmetric group
/// are enumerated directly.
pub const MAX_ENUMERATION_DEGREE: usize = 7;

/// A bijection of `{0, .., n-1}` stored by its image array:
/// `images[j] = i` means the permutation sends point `j` to point `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Identity permutation on `n` points.
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from an image array, validating bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::InvalidPermutation("empty image array".into()));
        }
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image {i} out of range for degree {n}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidPermutation(format!("duplicate image {i}")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Parses 1-based cycle notation such as `"(1 2)(3 4)"` into a
    /// permutation of the given degree. Commas and whitespace both separate
    /// entries; `"()"`, `"id"` and the empty string denote the identity.
    /// Non-disjoint cycles compose right-to-left, matching [`compose`].
    ///
    /// [`compose`]: Permutation::compose
    pub fn from_cycles(text: &str, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "id" || trimmed == "()" {
            return Ok(Self::identity(degree));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = trimmed;
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| {
                Error::InvalidPermutation(format!("expected '(' in cycle notation: {text:?}"))
            })?;
            if !rest[..open].trim().is_empty() {
                return Err(Error::InvalidPermutation(format!(
                    "unexpected text before '(': {text:?}"
                )));
            }
            let close = rest.find(')').ok_or_else(|| {
                Error::InvalidPermutation(format!("unbalanced '(' in cycle notation: {text:?}"))
            })?;
            if close < open {
                return Err(Error::InvalidPermutation(format!(
                    "unbalanced ')' in cycle notation: {text:?}"
                )));
            }
            let body = &rest[open + 1..close];
            let mut cycle = Vec::new();
            for token in body.split(|c: char| c == ',' || c.is_whitespace()) {
                if token.is_empty() {
                    continue;
                }
                let value: usize = token.parse().map_err(|_| {
                    Error::InvalidPermutation(format!("bad cycle entry {token:?}"))
                })?;
                if value == 0 || value > degree {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle entry {value} out of range 1..={degree}"
                    )));
                }
                cycle.push(value - 1);
            }
            let mut sorted = cycle.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != cycle.len() {
                return Err(Error::InvalidPermutation(format!(
                    "repeated point within a cycle: {text:?}"
                )));
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = rest[close + 1..].trim_start();
        }
        // Rightmost cycle acts first.
        let mut result = Self::identity(degree);
        for cycle in cycles.iter().rev() {
            let mut images: Vec<usize> = (0..degree).collect();
            for w in 0..cycle.len() {
                images[cycle[w]] = cycle[(w + 1) % cycle.len()];
            }
            let step = Permutation { images };
            result = step.compose(&result)?;
        }
        Ok(result)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of point `j`.
    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// Product `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_degree(self.degree(), other.degree())?;
        Ok(Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (j, &i) in self.images.iter().enumerate() {
            images[i] = j;
        }
        Permutation { images }
    }

    /// Conjugate `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &Self) -> Result<Self> {
        check_degree(self.degree(), g.degree())?;
        let mut images = vec![0; self.degree()];
        for (j, &i) in self.images.iter().enumerate() {
            images[g.images[j]] = g.images[i];
        }
        Ok(Permutation { images })
    }

    /// Cycle type as a sorted list of cycle lengths (fixed points included).
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable();
        lengths
    }

    /// Order of the centralizer of this permutation inside the full
    /// symmetric group, via the cycle-type formula `Π_k k^{m_k} · m_k!`
    /// where `m_k` counts the k-cycles.
    pub fn centralizer_size_in_symmetric_group(&self) -> BigUint {
        let mut counts = vec![0usize; self.degree() + 1];
        for len in self.cycle_lengths() {
            counts[len] += 1;
        }
        let mut size = BigUint::from(1u32);
        for (k, &m) in counts.iter().enumerate().skip(1) {
            if m == 0 {
                continue;
            }
            size *= BigUint::from(k).pow(m as u32);
            for f in 1..=m {
                size *= BigUint::from(f);
            }
        }
        size
    }

    /// 1-based cycle notation; fixed points are omitted and the identity
    /// prints as `"id"`.
    pub fn cycle_string(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut j = start;
            let mut first = true;
            while !seen[j] {
                seen[j] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&(j + 1).to_string());
                first = false;
                j = self.images[j];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("id");
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_string())
    }
}

fn check_degree(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DegreeMismatch { left, right });
    }
    Ok(())
}

/// All permutations of degree `n` in lexicographic order of image arrays.
/// Intended for small degrees; errors above [`MAX_ENUMERATION_DEGREE`].
pub fn all_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n == 0 || n > MAX_ENUMERATION_DEGREE {
        return Err(Error::DegreeTooLarge {
            op: "all_permutations",
            degree: n,
            max: MAX_ENUMERATION_DEGREE,
        });
    }
    let mut out = Vec::new();
    let mut images: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation {
            images: images.clone(),
        });
        if !next_lex(&mut images) {
            break;
        }
    }
    Ok(out)
}

fn next_lex(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// A finite permutation group stored by its full element list in canonical
/// lexicographic order, together with the generators it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationGroup {
    degree: usize,
    elements: Vec<Permutation>,
    generators: Vec<Permutation>,
}

impl PermutationGroup {
    /// Smallest group containing the given generators, built by
    /// breadth-first multiplication with the default element cap.
    pub fn close(generators: &[Permutation]) -> Result<Self> {
        Self::close_with_cap(generators, DEFAULT_CLOSURE_CAP)
    }

    /// Closure with an explicit element cap.
    pub fn close_with_cap(generators: &[Permutation], cap: usize) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidInput("generator list is empty".into()))?;
        let degree = first.degree();
        for g in generators {
            check_degree(degree, g.degree())?;
        }
        let mut set: BTreeSet<Permutation> = BTreeSet::new();
        set.insert(Permutation::identity(degree));
        let mut queue: Vec<Permutation> = vec![Permutation::identity(degree)];
        while let Some(current) = queue.pop() {
            for g in generators {
                let product = current.compose(g)?;
                if set.insert(product.clone()) {
                    if set.len() > cap {
                        return Err(Error::GroupTooLarge { cap });
                    }
                    queue.push(product);
                }
            }
        }
        let elements: Vec<Permutation> = set.into_iter().collect();
        if degree <= 8 {
            let factorial: u64 = (1..=degree as u64).product();
            debug_assert_eq!(factorial % elements.len() as u64, 0, "Lagrange violation");
        }
        let mut gens: Vec<Permutation> = generators.to_vec();
        gens.sort();
        gens.dedup();
        Ok(PermutationGroup {
            degree,
            elements,
            generators: gens,
        })
    }

    /// The trivial group on `n` points.
    pub fn trivial(n: usize) -> Self {
        PermutationGroup {
            degree: n,
            elements: vec![Permutation::identity(n)],
            generators: vec![Permutation::identity(n)],
        }
    }

    /// The full symmetric group on `n` points (small `n` only).
    pub fn symmetric(n: usize) -> Result<Self> {
        let elements = all_permutations(n)?;
        let generators = if n == 1 {
            vec![Permutation::identity(1)]
        } else {
            let swap = Permutation::from_images(
                (0..n).map(|j| match j {
                    0 => 1,
                    1 => 0,
                    other => other,
                })
                .collect(),
            )?;
            let cycle = Permutation::from_images((0..n).map(|j| (j + 1) % n).collect())?;
            vec![swap, cycle]
        };
        Ok(PermutationGroup {
            degree: n,
            elements,
            generators,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements in canonical lexicographic order.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn contains(&self, h: &Permutation) -> bool {
        h.degree() == self.degree && self.elements.binary_search(h).is_ok()
    }

    /// Orbit of a point under the group action.
    pub fn point_orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[x] = true;
        let mut queue = vec![x];
        let mut orbit = vec![x];
        while let Some(p) = queue.pop() {
            for g in &self.generators {
                let q = g.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                    queue.push(q);
                }
            }
        }
        orbit.sort_unstable();
        orbit
    }

    /// True iff the orbit of point 0 is the whole domain.
    pub fn is_transitive(&self) -> bool {
        self.degree > 0 && self.point_orbit(0).len() == self.degree
    }

    /// Orbit of `h` under the conjugation action `h ↦ g·h·g⁻¹`.
    pub fn conjugation_orbit(&self, h: &Permutation) -> Result<ConjugationOrbit> {
        check_degree(self.degree, h.degree())?;
        let mut members = BTreeSet::new();
        for g in &self.elements {
            members.insert(h.conjugate_by(g)?);
        }
        Ok(ConjugationOrbit { members })
    }

    /// True iff `set` is empty or stable under conjugation by every group
    /// element, i.e. a union of conjugation orbits.
    pub fn is_permutant(&self, set: &BTreeSet<Permutation>) -> bool {
        set.iter().all(|h| {
            h.degree() == self.degree
                && self.elements.iter().all(|g| {
                    h.conjugate_by(g)
                        .map(|c| set.contains(&c))
                        .unwrap_or(false)
                })
        })
    }

    /// k-weak versatility via the stabilizer-orbit criterion: for every pair
    /// of distinct points `x ≠ z`, the orbit of `z` under the stabilizer of
    /// `x` must have more than `k` points.
    pub fn is_k_weakly_versatile(&self, k: usize) -> Result<bool> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        let n = self.degree;
        for x in 0..n {
            let stabilizer: Vec<&Permutation> =
                self.elements.iter().filter(|g| g.apply(x) == x).collect();
            let mut orbit_of = vec![usize::MAX; n];
            for z in 0..n {
                if z == x || orbit_of[z] != usize::MAX {
                    continue;
                }
                let mut orbit = vec![z];
                let mut seen = vec![false; n];
                seen[z] = true;
                let mut queue = vec![z];
                while let Some(p) = queue.pop() {
                    for g in &stabilizer {
                        let q = g.apply(p);
                        if !seen[q] {
                            seen[q] = true;
                            orbit.push(q);
                            queue.push(q);
                        }
                    }
                }
                let size = orbit.len();
                for p in orbit {
                    orbit_of[p] = size;
                }
                if size <= k {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Minimum cardinality over permutants other than `∅` and `{id}`, or
    /// `None` when no such permutant exists. Enumerates the conjugation
    /// orbits of the full symmetric group under this group, so the degree is
    /// capped at [`MAX_ENUMERATION_DEGREE`].
    pub fn min_nontrivial_permutant_size(&self) -> Result<Option<usize>> {
        if self.degree > MAX_ENUMERATION_DEGREE {
            return Err(Error::DegreeTooLarge {
                op: "min_nontrivial_permutant_size",
                degree: self.degree,
                max: MAX_ENUMERATION_DEGREE,
            });
        }
        let mut visited: BTreeSet<Permutation> = BTreeSet::new();
        let mut min_size: Option<usize> = None;
        for h in all_permutations(self.degree)? {
            if h.is_identity() || visited.contains(&h) {
                continue;
            }
            let orbit = self.conjugation_orbit(&h)?;
            let size = orbit.size();
            if min_size.map(|m| size < m).unwrap_or(true) {
                min_size = Some(size);
            }
            visited.extend(orbit.members.into_iter());
        }
        Ok(min_size)
    }
}

/// Orbit of a permutation under the conjugation action of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugationOrbit {
    members: BTreeSet<Permutation>,
}

impl ConjugationOrbit {
    pub fn members(&self) -> &BTreeSet<Permutation> {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, h: &Permutation) -> bool {
        self.members.contains(h)
    }
}

/// A subset of the symmetric group stable under conjugation by a given
/// group (equivalently, a union of conjugation orbits). May be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutant {
    members: BTreeSet<Permutation>,
}

impl Permutant {
    /// Validates the conjugation-stability invariant against `group`.
    pub fn new(members: BTreeSet<Permutation>, group: &PermutationGroup) -> Result<Self> {
        if !group.is_permutant(&members) {
            return Err(Error::InvalidInput(
                "set is not closed under conjugation by the group".into(),
            ));
        }
        Ok(Permutant { members })
    }

    pub fn empty() -> Self {
        Permutant {
            members: BTreeSet::new(),
        }
    }

    pub fn members(&self) -> &BTreeSet<Permutation> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
