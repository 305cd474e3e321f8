//! Finite-difference stencils on nonuniform meshes.

use crate::numerics::grid::Grid;

/// Three-point first-derivative weights `(w_{k-1}, w_k, w_{k+1})` at an
/// interior node with left spacing `hm` and right spacing `hp`.
#[inline]
pub fn central_weights(hm: f64, hp: f64) -> [f64; 3] {
    [-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))]
}

/// Nodal first derivatives: central three-point in the interior, one-sided
/// three-point at both ends. Second order on smoothly graded meshes.
pub fn derivative(grid: &Grid, f: &[f64]) -> Vec<f64> {
    let x = grid.nodes();
    let n = x.len();
    assert_eq!(f.len(), n);
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let w = central_weights(x[k] - x[k - 1], x[k + 1] - x[k]);
        d[k] = w[0] * f[k - 1] + w[1] * f[k] + w[2] * f[k + 1];
    }
    d[0] = one_sided(x[0], x[1], x[2], f[0], f[1], f[2]);
    d[n - 1] = one_sided(x[n - 1], x[n - 2], x[n - 3], f[n - 1], f[n - 2], f[n - 3]);
    d
}

/// Derivative at `x0` of the parabola through three points.
fn one_sided(x0: f64, x1: f64, x2: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    let (h1, h2) = (x1 - x0, x2 - x0);
    f0 * (-(h1 + h2) / (h1 * h2)) + f1 * (h2 / (h1 * (h2 - h1))) + f2 * (-h1 / (h2 * (h2 - h1)))
}

/// Flux difference `(f_{k+1} - f_k)/h_+ - (f_k - f_{k-1})/h_-`, which equals
/// the node weight `(h_- + h_+)/2` times the three-point second derivative.
#[inline]
pub fn flux_difference(x: &[f64], f: &[f64], k: usize) -> f64 {
    let (hm, hp) = (x[k] - x[k - 1], x[k + 1] - x[k]);
    (f[k + 1] - f[k]) / hp - (f[k] - f[k - 1]) / hm
}

/// Three-point second derivatives at interior nodes; the end values copy
/// their neighbours.
pub fn second_derivative(grid: &Grid, f: &[f64]) -> Vec<f64> {
    let x = grid.nodes();
    let n = x.len();
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        d[k] = flux_difference(x, f, k) * 2.0 / (x[k + 1] - x[k - 1]);
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    d
}
