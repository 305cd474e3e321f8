//! Banded matrices and LU factorization with partial pivoting.
//!
//! Row `i` stores the columns `i - kl ..= i + kl + ku`; the extra `kl`
//! super-diagonals hold the fill produced by row interchanges. Multipliers
//! are kept apart and are not permuted by later interchanges, so the solve
//! applies swap and elimination step by step.

use crate::error::{invalid, LabError, Result};

pub const MAX_BANDWIDTH: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Result<Self> {
        if kl > MAX_BANDWIDTH || ku > MAX_BANDWIDTH {
            return invalid(format!("bandwidth ({kl}, {ku}) exceeds {MAX_BANDWIDTH}"));
        }
        if n == 0 {
            return invalid("empty banded matrix");
        }
        let width = 2 * kl + ku + 1;
        Ok(BandedMatrix { n, kl, ku, width, data: vec![0.0; n * width] })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BandedMatrix::zeros(n, 0, 0).expect("valid shape");
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Panics when `(i, j)` lies outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += value;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.idx(i, j)] * x[j]).sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: f64) -> BandedMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.add(i, i, -shift);
        }
        m
    }

    pub fn transpose(&self) -> BandedMatrix {
        let mut t = BandedMatrix::zeros(self.n, self.ku, self.kl).expect("valid shape");
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for j in lo..=hi {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// LU factorization; pivots at or below `64 eps max|A|` are reported as singular.
    pub fn factor(&self) -> Result<BandedLu> {
        self.factor_with_threshold(64.0 * f64::EPSILON * self.max_abs())
    }

    /// LU factorization rejecting only pivots with magnitude `<= threshold`.
    pub fn factor_with_threshold(&self, threshold: f64) -> Result<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let reach = kl + ku;
        let mut a = self.clone();
        let mut multipliers = vec![0.0; n * kl.max(1)];
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a.data[a.idx(k, k)].abs();
            for i in k + 1..=last {
                let v = a.data[a.idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > threshold) {
                return Err(LabError::SingularPivot { row: k });
            }
            pivots[k] = p;
            let cmax = (k + reach).min(n - 1);
            if p != k {
                for c in k..=cmax {
                    let (ik, ip) = (a.idx(k, c), a.idx(p, c));
                    a.data.swap(ik, ip);
                }
            }
            let pivot = a.data[a.idx(k, k)];
            for i in k + 1..=last {
                let m = a.data[a.idx(i, k)] / pivot;
                multipliers[k * kl + (i - k - 1)] = m;
                if m != 0.0 {
                    for c in k + 1..=cmax {
                        let v = a.data[a.idx(k, c)];
                        let ic = a.idx(i, c);
                        a.data[ic] -= m * v;
                    }
                }
            }
        }
        Ok(BandedLu { factors: a, multipliers, pivots })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    factors: BandedMatrix,
    multipliers: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let a = &self.factors;
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        assert_eq!(rhs.len(), n);
        let mut b = rhs.to_vec();
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.multipliers[k * kl + (i - k - 1)] * bk;
            }
        }
        for k in (0..n).rev() {
            let cmax = (k + kl + ku).min(n - 1);
            let mut s = b[k];
            for c in k + 1..=cmax {
                s -= a.data[a.idx(k, c)] * b[c];
            }
            b[k] = s / a.data[a.idx(k, k)];
        }
        b
    }

    /// Smallest pivot magnitude, a cheap conditioning indicator.
    pub fn min_pivot(&self) -> f64 {
        (0..self.factors.n).map(|k| self.factors.get(k, k).abs()).fold(f64::INFINITY, f64::min)
    }
}

/// A banded matrix together with its right-hand side.
#[derive(Debug, Clone)]
pub struct BandedSystem {
    pub matrix: BandedMatrix,
    pub rhs: Vec<f64>,
}

pub fn solve_banded(system: &BandedSystem) -> Result<Vec<f64>> {
    if system.rhs.len() != system.matrix.dim() {
        return Err(LabError::LengthMismatch { expected: system.matrix.dim(), got: system.rhs.len() });
    }
    Ok(system.matrix.factor()?.solve(&system.rhs))
}
