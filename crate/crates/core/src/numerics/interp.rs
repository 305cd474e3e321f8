//! Local cubic (four-point Lagrange) interpolation of nodal data.

use crate::error::{LabError, Result};
use crate::numerics::grid::Grid;

/// Interpolates `values` at `x`, which must lie inside the grid span.
pub fn cubic_at(grid: &Grid, values: &[f64], x: f64) -> Result<f64> {
    let (lo, hi) = (grid.start(), grid.end());
    if !(x >= lo && x <= hi) {
        return Err(LabError::OutOfRange { coordinate: x, lo, hi });
    }
    Ok(cubic_unchecked(grid, values, x))
}

pub(crate) fn cubic_unchecked(grid: &Grid, values: &[f64], x: f64) -> f64 {
    let nodes = grid.nodes();
    let n = nodes.len();
    let k = grid.locate(x);
    let start = k.saturating_sub(1).min(n - 4);
    let xs = &nodes[start..start + 4];
    let fs = &values[start..start + 4];
    let mut acc = 0.0;
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if j != i {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += w * fs[i];
    }
    acc
}

/// Resamples nodal data from `from` onto every node of `to`.
pub fn resample(from: &Grid, values: &[f64], to: &Grid) -> Result<Vec<f64>> {
    to.nodes().iter().map(|&x| cubic_at(from, values, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::{make_grid, Grading};

    #[test]
    fn cubics_reproduced() {
        let g = make_grid(-1.0, 2.0, 20, Grading::Graded { center: 0.0, width: 0.4 }).unwrap();
        let p = |x: f64| 0.5 - x + 2.0 * x * x - 0.3 * x * x * x;
        let v: Vec<f64> = g.nodes().iter().map(|&x| p(x)).collect();
        for x in [-1.0, -0.77, 0.0, 0.013, 1.5, 2.0] {
            assert!((cubic_at(&g, &v, x).unwrap() - p(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn outside_is_error() {
        let g = make_grid(0.0, 1.0, 17, Grading::Uniform).unwrap();
        assert!(cubic_at(&g, &[0.0; 17], 1.5).is_err());
    }
}
