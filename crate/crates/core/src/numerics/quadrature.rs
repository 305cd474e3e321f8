use crate::error::{LabError, Result};
use crate::numerics::grid::Grid;

/// Composite trapezoid rule over the grid nodes.
pub fn quadrature(values: &[f64], grid: &Grid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(LabError::LengthMismatch { expected: grid.len(), got: values.len() });
    }
    let x = grid.nodes();
    Ok(x.windows(2).zip(values.windows(2)).map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1])).sum())
}
