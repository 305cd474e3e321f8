//! Lowest eigenpairs of symmetric banded matrices.
//!
//! Shift-and-invert subspace iteration with Rayleigh-Ritz projection
//! locates the bottom of the spectrum; each Ritz pair is then polished by
//! Rayleigh-quotient iteration with deflation against the pairs already
//! accepted. A Sylvester inertia count certifies that no eigenvalue below
//! the reported ones was missed.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::numerics::banded::BandedMatrix;

pub const MAX_EIGENPAIRS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSettings {
    /// Shift of the subspace iteration; should sit below the wanted eigenvalues.
    pub shift: f64,
    /// Extra subspace vectors beyond the requested count.
    pub guard: usize,
    pub max_subspace_iters: usize,
    /// Residual of the shifted inverse on the Ritz vectors, relative to its
    /// eigenvalue, at which subspace iteration hands over to Rayleigh-quotient
    /// refinement.
    pub handover_tol: f64,
    /// Requested residual `|A x - l x| / |x|` before the roundoff floor.
    pub residual_tol: f64,
    pub max_refine_iters: usize,
}

impl Default for EigenSettings {
    fn default() -> Self {
        EigenSettings {
            shift: -0.5,
            guard: 12,
            max_subspace_iters: 2000,
            handover_tol: 1e-3,
            residual_tol: 1e-8,
            max_refine_iters: 12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Unit Euclidean norm.
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale(x: &mut [f64], s: f64) {
    for v in x.iter_mut() {
        *v *= s;
    }
}

/// Attainable residual floor for a backward-stable matrix-vector product.
pub fn residual_floor(a: &BandedMatrix) -> f64 {
    100.0 * f64::EPSILON * a.max_abs()
}

fn residual(a: &BandedMatrix, x: &[f64], value: f64) -> f64 {
    let ax = a.matvec(x);
    let r: f64 = ax.iter().zip(x).map(|(p, q)| (p - value * q).powi(2)).sum();
    r.sqrt() / norm(x)
}

/// Orthonormalizes `vs` in place (two passes of modified Gram-Schmidt) against
/// `locked` and each other. Returns false when a vector collapses.
fn orthonormalize(vs: &mut [Vec<f64>], locked: &[Vec<f64>]) -> bool {
    for i in 0..vs.len() {
        for _ in 0..2 {
            for q in locked {
                let c = dot(q, &vs[i]);
                axpy(&mut vs[i], -c, q);
            }
            for j in 0..i {
                let (done, rest) = vs.split_at_mut(i);
                let c = dot(&done[j], &rest[0]);
                axpy(&mut rest[0], -c, &done[j]);
            }
        }
        let nv = norm(&vs[i]);
        if !(nv > 1e-300) {
            return false;
        }
        scale(&mut vs[i], 1.0 / nv);
    }
    true
}

/// Deterministic start vectors (splitmix64 hash of the index).
fn start_vectors(n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let mut z = (i as u64)
                        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                        .wrapping_add((j as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
                    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
                    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
                    z ^= z >> 31;
                    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                })
                .collect()
        })
        .collect()
}

/// Cyclic Jacobi diagonalization of a small dense symmetric matrix.
/// Returns eigenvalues ascending and eigenvectors as columns `vecs[row][col]`.
pub fn symmetric_eigen_dense(mat: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = mat.len();
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    let mut v: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..m).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-32 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..m {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..m).map(|r| order.iter().map(|&c| v[r][c]).collect()).collect();
    (values, vecs)
}

/// Rayleigh-Ritz on an orthonormal basis; returns sorted Ritz pairs.
fn rayleigh_ritz(a: &BandedMatrix, basis: &[Vec<f64>]) -> Vec<(f64, Vec<f64>)> {
    let m = basis.len();
    let images: Vec<Vec<f64>> = basis.iter().map(|b| a.matvec(b)).collect();
    let mut h = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    let (values, y) = symmetric_eigen_dense(&h);
    let n = basis[0].len();
    values
        .into_iter()
        .enumerate()
        .map(|(c, value)| {
            let mut x = vec![0.0; n];
            for (r, b) in basis.iter().enumerate() {
                axpy(&mut x, y[r][c], b);
            }
            let nx = norm(&x);
            scale(&mut x, 1.0 / nx);
            (value, x)
        })
        .collect()
}

/// Number of eigenvalues of the symmetric matrix `a` strictly below `mu`,
/// from the signs of an unpivoted LDL^T factorization of `a - mu I`.
pub fn count_below(a: &BandedMatrix, mu: f64) -> Option<usize> {
    let n = a.dim();
    let b = a.lower().max(a.upper());
    // Dense band copy of the lower triangle: l[i][d] = entry (i, i - d).
    let mut l = vec![vec![0.0; b + 1]; n];
    for (i, row) in l.iter_mut().enumerate() {
        for (d, entry) in row.iter_mut().enumerate() {
            if d <= i {
                *entry = a.get(i, i - d);
            }
        }
        row[0] -= mu;
    }
    let mut negatives = 0;
    let mut dvals = vec![0.0; n];
    for i in 0..n {
        // Row i of L D: entries for columns i-b..i.
        for d in (1..=b.min(i)).rev() {
            let j = i - d;
            let mut s = l[i][d];
            for e in 1..=b {
                let k = match j.checked_sub(e) {
                    Some(k) if i - k <= b => k,
                    _ => continue,
                };
                s -= l[i][i - k] * l[j][e] * dvals[k];
            }
            l[i][d] = s / dvals[j];
        }
        let mut di = l[i][0];
        for d in 1..=b.min(i) {
            let j = i - d;
            di -= l[i][d] * l[i][d] * dvals[j];
        }
        if di == 0.0 || !di.is_finite() {
            return None;
        }
        dvals[i] = di;
        if di < 0.0 {
            negatives += 1;
        }
    }
    Some(negatives)
}

/// The `k` smallest eigenpairs of the symmetric banded matrix `a`, ascending.
pub fn lowest_eigenpairs(a: &BandedMatrix, k: usize, settings: &EigenSettings) -> Result<Vec<EigenPair>> {
    let n = a.dim();
    if k == 0 || k > MAX_EIGENPAIRS {
        return invalid(format!("requested {k} eigenpairs; allowed 1..={MAX_EIGENPAIRS}"));
    }
    if k > n {
        return invalid("more eigenpairs requested than the dimension");
    }
    let tol = settings.residual_tol.max(residual_floor(a));
    let mut m = (k + settings.guard).min(n);
    let mut shift = settings.shift;
    // Subspace iteration finds the eigenvalues nearest the shift, so it must
    // sit below the whole spectrum.
    if count_below(a, shift) != Some(0) {
        shift = gershgorin_lower(a) - 1.0;
    }
    for _attempt in 0..4 {
        let pairs = subspace_then_refine(a, k, m, shift, tol, settings)?;
        match missed_below(a, &pairs) {
            None => return Ok(pairs),
            Some(0) => shift = gershgorin_lower(a) - 1.0,
            Some(_) => m = (2 * m).min(n),
        }
    }
    Err(LabError::EigenNonConvergence("bottom of spectrum not captured".into()))
}

/// Index of the first reported eigenvalue with more eigenvalues below it than
/// reported, by Sylvester inertia; `None` when the report is complete.
fn missed_below(a: &BandedMatrix, pairs: &[EigenPair]) -> Option<usize> {
    pairs.iter().enumerate().find_map(|(j, p)| {
        let margin = p.residual.max(1e-9 * (1.0 + p.value.abs()));
        match count_below(a, p.value - margin) {
            Some(c) if c > j => Some(j),
            _ => None,
        }
    })
}

pub fn gershgorin_lower(a: &BandedMatrix) -> f64 {
    let n = a.dim();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(a.lower());
            let hi = (i + a.upper()).min(n - 1);
            let off: f64 = (lo..=hi).filter(|&j| j != i).map(|j| a.get(i, j).abs()).sum();
            a.get(i, i) - off
        })
        .fold(f64::INFINITY, f64::min)
}

fn subspace_then_refine(
    a: &BandedMatrix,
    k: usize,
    m: usize,
    shift: f64,
    tol: f64,
    settings: &EigenSettings,
) -> Result<Vec<EigenPair>> {
    let n = a.dim();
    let lu = a
        .shifted(shift)
        .factor_with_threshold(0.0)
        .map_err(|_| LabError::EigenNonConvergence(format!("shift {shift} is an exact eigenvalue")))?;
    let mut basis = start_vectors(n, m);
    orthonormalize(&mut basis, &[]);
    let mut ritz: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut converged = false;
    for _ in 0..settings.max_subspace_iters {
        let mut next: Vec<Vec<f64>> = basis.iter().map(|b| lu.solve(b)).collect();
        // Residual of the shifted inverse, relative to its eigenvalue: an
        // angle measure that does not depend on the norm of `a`.
        let worst = ritz
            .iter()
            .take(k)
            .zip(&next)
            .map(|((theta, x), y)| {
                let inv = 1.0 / (theta - shift);
                let r: f64 = y.iter().zip(x).map(|(p, q)| (p - inv * q).powi(2)).sum();
                r.sqrt() / inv.abs()
            })
            .fold(if ritz.is_empty() { f64::INFINITY } else { 0.0 }, f64::max);
        if worst <= settings.handover_tol {
            converged = true;
            break;
        }
        if !orthonormalize(&mut next, &[]) {
            return Err(LabError::EigenNonConvergence("subspace collapsed".into()));
        }
        ritz = rayleigh_ritz(a, &next);
        basis = ritz.iter().map(|(_, x)| x.clone()).collect();
    }
    if !converged {
        return Err(LabError::EigenNonConvergence("subspace iteration stalled".into()));
    }

    // Rayleigh-quotient polishing with deflation against accepted vectors.
    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    for (theta0, x0) in ritz.into_iter().take(k) {
        let mut x = vec![x0];
        orthonormalize(&mut x, &accepted);
        let mut x = x.pop().expect("one vector");
        let mut theta = theta0;
        let mut res = residual(a, &x, theta);
        let mut iters = 0;
        while res > tol && iters < settings.max_refine_iters {
            iters += 1;
            let lu = match a.shifted(theta).factor_with_threshold(0.0) {
                Ok(lu) => lu,
                Err(_) => break,
            };
            let mut y = vec![lu.solve(&x)];
            if !orthonormalize(&mut y, &accepted) {
                break;
            }
            let y = y.pop().expect("one vector");
            let ay = a.matvec(&y);
            let t = dot(&y, &ay);
            let r = residual(a, &y, t);
            if !(r.is_finite()) {
                break;
            }
            x = y;
            theta = t;
            res = r;
        }
        accepted.push(x);
        values.push(theta);
    }
    // Final projection on the polished vectors restores exact ordering.
    let pairs = rayleigh_ritz(a, &accepted);
    let out: Vec<EigenPair> = pairs
        .into_iter()
        .map(|(value, vector)| {
            let residual = residual(a, &vector, value);
            EigenPair { value, vector, residual }
        })
        .collect();
    if let Some(bad) = out.iter().find(|p| p.residual > tol) {
        return Err(LabError::EigenNonConvergence(format!(
            "residual {:e} above tolerance {:e} at eigenvalue {}",
            bad.residual, tol, bad.value
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize, h: f64) -> BandedMatrix {
        let mut m = BandedMatrix::zeros(n, 1, 1).unwrap();
        for i in 0..n {
            m.set(i, i, 2.0 / (h * h));
            if i > 0 {
                m.set(i, i - 1, -1.0 / (h * h));
            }
            if i + 1 < n {
                m.set(i, i + 1, -1.0 / (h * h));
            }
        }
        m
    }

    #[test]
    fn dense_jacobi_small() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (vals, vecs) = symmetric_eigen_dense(&m);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        assert!((vecs[0][0].abs() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn laplacian_on_zero_pi() {
        let n = 399;
        let h = std::f64::consts::PI / (n + 1) as f64;
        let a = laplacian(n, h);
        let pairs = lowest_eigenpairs(&a, 3, &EigenSettings::default()).unwrap();
        for (j, p) in pairs.iter().enumerate() {
            let exact = ((j + 1) as f64).powi(2);
            // Discrete eigenvalue (4/h^2) sin^2(j h / 2) differs by O(h^2 j^4).
            let discrete = 4.0 / (h * h) * (((j + 1) as f64) * h / 2.0).sin().powi(2);
            assert!((p.value - discrete).abs() < 1e-8, "{} vs {}", p.value, discrete);
            assert!((p.value - exact).abs() < 1e-3 * exact);
        }
    }

    #[test]
    fn inertia_counts() {
        let n = 50;
        let h = std::f64::consts::PI / (n + 1) as f64;
        let a = laplacian(n, h);
        assert_eq!(count_below(&a, 0.5), Some(0));
        assert_eq!(count_below(&a, 2.5), Some(1));
        assert_eq!(count_below(&a, 4.5), Some(2));
        assert_eq!(count_below(&a, 9.5), Some(3));
    }

    #[test]
    fn negative_spectrum_found_via_restart() {
        // Diagonal with eigenvalues well below the default shift.
        let mut a = BandedMatrix::zeros(40, 1, 1).unwrap();
        for i in 0..40 {
            a.set(i, i, i as f64 - 30.0);
        }
        let pairs = lowest_eigenpairs(&a, 2, &EigenSettings::default()).unwrap();
        assert!((pairs[0].value + 30.0).abs() < 1e-10);
        assert!((pairs[1].value + 29.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_too_many() {
        let a = laplacian(20, 0.1);
        assert!(lowest_eigenpairs(&a, 9, &EigenSettings::default()).is_err());
    }
}
