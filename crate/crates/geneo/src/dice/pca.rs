//! Principal component analysis by simultaneous power iteration: a block of
//! `k + 2` vectors is driven through the covariance together (deflation by
//! re-orthonormalization each sweep) and the components are read off as
//! Rayleigh-Ritz vectors of the covariance restricted to the block span.
//! The padding and the in-span rotation matter because symmetric data
//! forces near-degenerate eigenvalue multiplets, on which one vector at a
//! time cannot converge in direction.
//!
//! The covariance (normalized by 1/N) is never materialized: each multiply
//! is two passes over the data with f64 accumulation, so the full dice
//! dataset stays cheap. Single-threaded and deterministic.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::dice::sampling::uniform_f64;
use crate::error::{Error, Result};

/// Convergence threshold on the per-sweep change of each returned component.
const EIGENVECTOR_TOL: f64 = 1e-7;
/// Sweep cap.
const MAX_ITERATIONS: usize = 1000;
/// At the sweep cap, a change below this ceiling means the components are
/// only drifting inside a numerically tied multiplet; they are accepted.
/// Anything larger is a genuine non-convergence.
const STAGNATION_CEILING: f64 = 1e-4;
/// Orthonormality budget for the returned components.
const ORTHONORMAL_TOL: f64 = 1e-6;
/// Seed for the deterministic start vectors.
const START_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Fitted components: `components[c]` is the c-th orthonormal direction and
/// `explained_variance[c]` its covariance eigenvalue, non-increasing.
#[derive(Debug, Clone)]
pub struct Pca {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
}

impl Pca {
    /// Projects one sample onto the first `k` components.
    pub fn project(&self, sample: &[f32], k: usize) -> Vec<f64> {
        debug_assert!(k <= self.components.len());
        self.components[..k]
            .iter()
            .map(|component| {
                sample
                    .iter()
                    .zip(component.iter().zip(&self.mean))
                    .map(|(&x, (&c, &m))| (f64::from(x) - m) * c)
                    .sum()
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// One implicit covariance multiply: `w = (Σᵢ (xᵢ−m)((xᵢ−m)·v)) / N`.
fn covariance_mul(data: &[Vec<f32>], mean: &[f64], v: &[f64]) -> Vec<f64> {
    let dim = mean.len();
    let mean_dot_v = dot(mean, v);
    let mut w = vec![0.0f64; dim];
    let mut t_sum = 0.0f64;
    for x in data {
        let t = x
            .iter()
            .zip(v)
            .map(|(&xi, &vi)| f64::from(xi) * vi)
            .sum::<f64>()
            - mean_dot_v;
        t_sum += t;
        for (wi, &xi) in w.iter_mut().zip(x) {
            *wi += t * f64::from(xi);
        }
    }
    let inv_n = 1.0 / data.len() as f64;
    for (wi, &mi) in w.iter_mut().zip(mean) {
        *wi = (*wi - t_sum * mi) * inv_n;
    }
    w
}

/// Fits the top-`k` principal components of the sample rows.
pub fn pca_fit(data: &[Vec<f32>], k: usize) -> Result<Pca> {
    if k == 0 || k > 4 {
        return Err(Error::InvalidInput(format!(
            "component count must be between 1 and 4, got {k}"
        )));
    }
    if data.len() < k.max(2) {
        return Err(Error::InvalidInput(format!(
            "{} samples are too few for {k} components",
            data.len()
        )));
    }
    let dim = data[0].len();
    if dim == 0 || data.iter().any(|x| x.len() != dim) {
        return Err(Error::InvalidInput("ragged or empty sample rows".into()));
    }

    let mut mean = vec![0.0f64; dim];
    for x in data {
        for (m, &xi) in mean.iter_mut().zip(x) {
            *m += f64::from(xi);
        }
    }
    for m in &mut mean {
        *m /= data.len() as f64;
    }

    let block = (k + 2).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let fresh: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..dim).map(|_| uniform_f64(&mut rng, -1.0, 1.0)).collect())
        .collect();
    let mut basis = orthonormal_block(fresh.clone(), &fresh);

    let mut components: Vec<Vec<f64>> = Vec::new();
    let mut explained_variance: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut change = f64::INFINITY;
    for _sweep in 0..MAX_ITERATIONS {
        let products: Vec<Vec<f64>> = basis
            .iter()
            .map(|v| covariance_mul(data, &mean, v))
            .collect();
        let (values, vectors) = ritz_pairs(&basis, &products, k);

        change = 0.0;
        for (new, old) in vectors.iter().zip(&components) {
            let aligned_sign = if dot(new, old) < 0.0 { -1.0 } else { 1.0 };
            let diff = new
                .iter()
                .zip(old)
                .map(|(a, b)| (aligned_sign * a - b) * (aligned_sign * a - b))
                .sum::<f64>()
                .sqrt();
            change = change.max(diff);
        }
        if components.is_empty() {
            change = f64::INFINITY;
        }
        components = vectors;
        explained_variance = values;
        if change < EIGENVECTOR_TOL {
            converged = true;
            break;
        }
        basis = orthonormal_block(products, &basis);
    }
    if !converged && change > STAGNATION_CEILING {
        return Err(Error::NonConvergence {
            component: 0,
            iterations: MAX_ITERATIONS,
        });
    }

    for a in 0..k {
        for b in 0..=a {
            let expected = if a == b { 1.0 } else { 0.0 };
            let d = dot(&components[a], &components[b]);
            if (d - expected).abs() > ORTHONORMAL_TOL {
                return Err(Error::VerificationFailed(format!(
                    "components {a} and {b} are not orthonormal: dot = {d}"
                )));
            }
        }
    }
    for pair in explained_variance.windows(2) {
        if pair[1] > pair[0] * (1.0 + 1e-6) + 1e-12 {
            return Err(Error::VerificationFailed(format!(
                "explained variances increase: {} then {}",
                pair[0], pair[1]
            )));
        }
    }

    Ok(Pca {
        mean,
        components,
        explained_variance,
    })
}

/// Top-`k` Rayleigh-Ritz pairs of the covariance restricted to the span of
/// an orthonormal block, given the precomputed products `C·basis[i]`:
/// eigenpairs of `H = basisᵀ·C·basis`, rotated back and sorted by value,
/// descending. Inside an eigenvalue multiplet the raw block columns are an
/// arbitrary basis; this rotation pins down the best per-component
/// estimates the span supports.
fn ritz_pairs(
    basis: &[Vec<f64>],
    products: &[Vec<f64>],
    k: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let b = basis.len();
    let mut h = vec![vec![0.0f64; b]; b];
    for p in 0..b {
        for q in 0..b {
            h[p][q] = dot(&basis[p], &products[q]);
        }
    }
    for p in 0..b {
        for q in (p + 1)..b {
            let s = 0.5 * (h[p][q] + h[q][p]);
            h[p][q] = s;
            h[q][p] = s;
        }
    }
    let (values, vectors) = symmetric_eigen(&h);
    let mut order: Vec<usize> = (0..b).collect();
    order.sort_by(|&p, &q| values[q].total_cmp(&values[p]));

    let dim = basis[0].len();
    let mut top_values = Vec::with_capacity(k);
    let mut top_vectors = Vec::with_capacity(k);
    for &col in order.iter().take(k) {
        let mut vector = vec![0.0f64; dim];
        for (p, base) in basis.iter().enumerate() {
            let c = vectors[p][col];
            for (vi, &bi) in vector.iter_mut().zip(base) {
                *vi += c * bi;
            }
        }
        top_values.push(values[col]);
        top_vectors.push(vector);
    }
    (top_values, top_vectors)
}

/// Gram-Schmidt orthonormalization of a block. A candidate column that
/// collapses (the data rank is smaller than the block) falls back to the
/// matching previous basis column, then to deterministic fresh directions.
fn orthonormal_block(candidates: Vec<Vec<f64>>, previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = previous[0].len();
    let scale = candidates
        .iter()
        .map(|c| norm(c))
        .fold(f64::MIN_POSITIVE, f64::max);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(candidates.len());
    for (i, candidate) in candidates.into_iter().enumerate() {
        let mut accepted = None;
        let fresh_start = ChaCha8Rng::seed_from_u64(START_SEED ^ (i as u64 + 1));
        let mut fresh_rng = fresh_start;
        for attempt in 0..8 {
            let mut column = match attempt {
                0 => candidate.clone(),
                1 => previous[i].clone(),
                _ => (0..dim)
                    .map(|_| uniform_f64(&mut fresh_rng, -1.0, 1.0))
                    .collect(),
            };
            orthogonalize(&mut column, &out);
            let n = norm(&column);
            if n > scale * 1e-13 && n > 0.0 {
                column.iter_mut().for_each(|x| *x /= n);
                accepted = Some(column);
                break;
            }
        }
        out.push(accepted.expect("an independent direction always exists for block <= dim"));
    }
    out
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix; returns
/// eigenvalues and the orthogonal matrix whose column `c` is the
/// eigenvector of eigenvalue `c`.
fn symmetric_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut q = vec![vec![0.0f64; k]; k];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..60 {
        let off: f64 = (0..k)
            .flat_map(|p| ((p + 1)..k).map(move |r| (p, r)))
            .map(|(p, r)| a[p][r] * a[p][r])
            .sum();
        if off < 1e-28 {
            break;
        }
        for p in 0..k {
            for r in (p + 1)..k {
                if a[p][r].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * a[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..k {
                    let (aip, air) = (a[i][p], a[i][r]);
                    a[i][p] = c * aip - s * air;
                    a[i][r] = s * aip + c * air;
                }
                for j in 0..k {
                    let (apj, arj) = (a[p][j], a[r][j]);
                    a[p][j] = c * apj - s * arj;
                    a[r][j] = s * apj + c * arj;
                }
                for row in q.iter_mut() {
                    let (vp, vr) = (row[p], row[r]);
                    row[p] = c * vp - s * vr;
                    row[r] = s * vp + c * vr;
                }
            }
        }
    }
    ((0..k).map(|i| a[i][i]).collect(), q)
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for u in basis {
        let c = dot(u, v);
        for (vi, &ui) in v.iter_mut().zip(u) {
            *vi -= c * ui;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::RngCore;

    #[test]
    fn axis_aligned_data_recovers_the_dominant_axis() {
        // x-variance 4, y-variance 1 (covariance normalized by 1/N).
        let data: Vec<Vec<f32>> = vec![
            vec![2.0, 0.0],
            vec![-2.0, 0.0],
            vec![2.0, 1.0],
            vec![-2.0, -1.0],
            vec![2.0, -1.0],
            vec![-2.0, 1.0],
        ];
        let pca = pca_fit(&data, 2).unwrap();
        assert!((pca.explained_variance[0] - 4.0).abs() < 1e-9);
        assert!((pca.components[0][0].abs() - 1.0).abs() < 1e-7);
        assert!(pca.components[0][1].abs() < 1e-6);
        assert!(
            (pca.explained_variance[1] - 2.0 / 3.0).abs() < 1e-9,
            "second eigenvalue {}",
            pca.explained_variance[1]
        );
    }

    #[test]
    fn rejects_bad_shapes() {
        let data = vec![vec![1.0f32, 2.0], vec![3.0, 4.0]];
        assert!(pca_fit(&data, 0).is_err());
        assert!(pca_fit(&data, 5).is_err());
        assert!(pca_fit(&data[..1], 1).is_err());
        let ragged = vec![vec![1.0f32, 2.0], vec![3.0]];
        assert!(pca_fit(&ragged, 1).is_err());
    }

    /// Cyclic Jacobi eigendecomposition, used only as an independent oracle.
    fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = a.len();
        let mut vecs = vec![vec![0.0; n]; n];
        for (i, row) in vecs.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for _sweep in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p][q] * a[p][q];
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for i in 0..n {
                        let (aip, aiq) = (a[i][p], a[i][q]);
                        a[i][p] = c * aip - s * aiq;
                        a[i][q] = s * aip + c * aiq;
                    }
                    for j in 0..n {
                        let (apj, aqj) = (a[p][j], a[q][j]);
                        a[p][j] = c * apj - s * aqj;
                        a[q][j] = s * apj + c * aqj;
                    }
                    for row in vecs.iter_mut() {
                        let (vp, vq) = (row[p], row[q]);
                        row[p] = c * vp - s * vq;
                        row[q] = s * vp + c * vq;
                    }
                }
            }
        }
        let eigenvalues: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        // Column i of `vecs` is the eigenvector of eigenvalues[i].
        let eigenvectors: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|r| vecs[r][i]).collect())
            .collect();
        (eigenvalues, eigenvectors)
    }

    #[test]
    fn top_two_eigenpairs_match_a_jacobi_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _trial in 0..5 {
            // Enough samples and scale separation that the sample spectrum
            // keeps clear gaps; near-equal top eigenvalues legitimately stop
            // power iteration at the iteration cap.
            let samples = 400;
            let dim = 6;
            let data: Vec<Vec<f32>> = (0..samples)
                .map(|_| {
                    (0..dim)
                        .map(|d| {
                            let scale = ((d + 1) * (d + 1)) as f64;
                            (uniform_f64(&mut rng, -1.0, 1.0) * scale) as f32
                        })
                        .collect()
                })
                .collect();
            // Dense covariance of the same data, normalized by 1/N.
            let mean: Vec<f64> = (0..dim)
                .map(|d| data.iter().map(|x| f64::from(x[d])).sum::<f64>() / samples as f64)
                .collect();
            let mut cov = vec![vec![0.0f64; dim]; dim];
            for x in &data {
                for a in 0..dim {
                    for b in 0..dim {
                        cov[a][b] += (f64::from(x[a]) - mean[a]) * (f64::from(x[b]) - mean[b]);
                    }
                }
            }
            for row in &mut cov {
                for v in row.iter_mut() {
                    *v /= samples as f64;
                }
            }
            let (mut values, vectors) = jacobi_eigen(cov);
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
            values.sort_by(|a, b| b.total_cmp(a));

            let pca = pca_fit(&data, 2).unwrap();
            for c in 0..2 {
                assert!(
                    (pca.explained_variance[c] - values[c]).abs() < 1e-5,
                    "eigenvalue {c}: {} vs {}",
                    pca.explained_variance[c],
                    values[c]
                );
                let oracle = &vectors[order[c]];
                let alignment = dot(&pca.components[c], oracle).abs();
                assert!(alignment > 1.0 - 1e-5, "component {c} alignment {alignment}");
            }
        }
    }

    #[test]
    fn projection_recovers_centered_coordinates() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let data: Vec<Vec<f32>> = (0..40)
            .map(|_| {
                let t = uniform_f64(&mut rng, -1.0, 1.0);
                let noise = (rng.next_u64() % 3) as f64 * 1e-3;
                vec![(3.0 * t) as f32, (0.5 * t + noise) as f32, 0.25]
            })
            .collect();
        let pca = pca_fit(&data, 2).unwrap();
        // Reconstruction error from k components is non-increasing in k.
        let recon_err = |k: usize| -> f64 {
            data.iter()
                .map(|x| {
                    let p = pca.project(x, k);
                    let mut err = 0.0;
                    for d in 0..3 {
                        let mut approx = pca.mean[d];
                        for (c, comp) in pca.components[..k].iter().enumerate() {
                            approx += p[c] * comp[d];
                        }
                        err += (f64::from(x[d]) - approx).powi(2);
                    }
                    err
                })
                .sum()
        };
        assert!(recon_err(2) <= recon_err(1) + 1e-12);
    }
}
