//! Linearization of the system about a heteroclinic and the bottom of its
//! spectrum.
//!
//! The operator acting on `(phi1, phi2)` is
//!
//! ```text
//! -phi1'' + (3 v1^2 - 1 + lambda v2^2) phi1 + 2 lambda v1 v2 phi2,
//! -phi2'' + (3 v2^2 - 1 + lambda v1^2) phi2 + 2 lambda v1 v2 phi1,
//! ```
//!
//! with Dirichlet conditions at `+-L`. On interior nodes the flux-form
//! discretization reads `(S + W P) phi = mu W phi` with `S` symmetric and `W`
//! the diagonal of control-volume lengths; the stored matrix is the
//! symmetric `W^{-1/2} (S + W P) W^{-1/2}`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::heteroclinic::{FieldPair, HeteroclinicSolution};
use crate::numerics::banded::BandedMatrix;
use crate::numerics::eigen::{self, EigenSettings};
use crate::numerics::grid::Grid;
use crate::profiles::interleave;

pub const DEFAULT_EIGENPAIRS: usize = 4;
/// Eigenvectors with at least this share of their mass outside the central
/// fifth of the domain are attributed to the truncated continuum.
const EDGE_MASS_SHARE: f64 = 0.5;
const EDGE_FRACTION: f64 = 0.2;

#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    pub lambda: f64,
    pub grid: Grid,
    /// Symmetric, interleaved over interior nodes `1..n-1`.
    pub matrix: BandedMatrix,
    /// Control-volume lengths of the interior nodes.
    pub weights: Vec<f64>,
    /// `(3 v1^2 - 1 + lambda v2^2, 3 v2^2 - 1 + lambda v1^2, 2 lambda v1 v2)` per interior node.
    pub potentials: Vec<(f64, f64, f64)>,
}

pub fn assemble_linearized(sol: &HeteroclinicSolution) -> Result<LinearizedOperator> {
    assemble_linearized_fields(sol.lambda, &sol.fields)
}

pub fn assemble_linearized_fields(lambda: f64, fields: &FieldPair) -> Result<LinearizedOperator> {
    let x = fields.grid.nodes();
    let n = x.len();
    if n < 4 {
        return invalid("linearization needs at least two interior nodes");
    }
    let m = n - 2;
    let mut a = BandedMatrix::zeros(2 * m, 2, 2)?;
    let weights: Vec<f64> = (1..n - 1).map(|k| 0.5 * (x[k + 1] - x[k - 1])).collect();
    let mut potentials = Vec::with_capacity(m);
    for i in 0..m {
        let k = i + 1;
        let (hm, hp) = (x[k] - x[k - 1], x[k + 1] - x[k]);
        let w = weights[i];
        let (v1, v2) = (fields.v1[k], fields.v2[k]);
        let p1 = 3.0 * v1 * v1 - 1.0 + lambda * v2 * v2;
        let p2 = 3.0 * v2 * v2 - 1.0 + lambda * v1 * v1;
        let c = 2.0 * lambda * v1 * v2;
        potentials.push((p1, p2, c));
        let diag = 1.0 / hm + 1.0 / hp;
        let (r1, r2) = (2 * i, 2 * i + 1);
        a.set(r1, r1, diag / w + p1);
        a.set(r2, r2, diag / w + p2);
        a.set(r1, r2, c);
        a.set(r2, r1, c);
        if i + 1 < m {
            let off = -1.0 / (hp * (w * weights[i + 1]).sqrt());
            a.set(r1, r1 + 2, off);
            a.set(r1 + 2, r1, off);
            a.set(r2, r2 + 2, off);
            a.set(r2 + 2, r2, off);
        }
    }
    Ok(LinearizedOperator { lambda, grid: fields.grid.clone(), matrix: a, weights, potentials })
}

impl LinearizedOperator {
    pub fn interior_len(&self) -> usize {
        self.weights.len()
    }

    /// Interior values of a nodal pair mapped to symmetrized coordinates `W^{1/2} phi`.
    pub fn to_symmetric(&self, phi1: &[f64], phi2: &[f64]) -> Vec<f64> {
        let m = self.interior_len();
        let a: Vec<f64> = (0..m).map(|i| phi1[i + 1] * self.weights[i].sqrt()).collect();
        let b: Vec<f64> = (0..m).map(|i| phi2[i + 1] * self.weights[i].sqrt()).collect();
        interleave(&a, &b)
    }

    /// Nodal pair (zero at the ends) from symmetrized coordinates.
    pub fn from_symmetric(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.interior_len();
        let mut a = vec![0.0; m + 2];
        let mut b = vec![0.0; m + 2];
        for i in 0..m {
            let s = 1.0 / self.weights[i].sqrt();
            a[i + 1] = y[2 * i] * s;
            b[i + 1] = y[2 * i + 1] * s;
        }
        (a, b)
    }

    /// The operator applied to a nodal pair, at interior nodes. Boundary
    /// values of the pair enter through the stencils.
    pub fn apply(&self, phi1: &[f64], phi2: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let x = self.grid.nodes();
        let m = self.interior_len();
        let mut out1 = Vec::with_capacity(m);
        let mut out2 = Vec::with_capacity(m);
        for i in 0..m {
            let k = i + 1;
            let w = self.weights[i];
            let (p1, p2, c) = self.potentials[i];
            let lap = |f: &[f64]| ((f[k + 1] - f[k]) / (x[k + 1] - x[k]) - (f[k] - f[k - 1]) / (x[k] - x[k - 1])) / w;
            out1.push(-lap(phi1) + p1 * phi1[k] + c * phi2[k]);
            out2.push(-lap(phi2) + p2 * phi2[k] + c * phi1[k]);
        }
        (out1, out2)
    }

    /// `sup` of the operator applied to the sampled translation mode `(v1', v2')`.
    pub fn translation_residual(&self, fields: &FieldPair) -> f64 {
        let (a, b) = self.apply(&fields.dv1, &fields.dv2);
        a.iter().chain(&b).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Weighted Rayleigh quotient of a nodal pair.
    pub fn rayleigh_quotient(&self, phi1: &[f64], phi2: &[f64]) -> f64 {
        let y = self.to_symmetric(phi1, phi2);
        let ay = self.matrix.matvec(&y);
        let num: f64 = y.iter().zip(&ay).map(|(p, q)| p * q).sum();
        let den: f64 = y.iter().map(|p| p * p).sum();
        num / den
    }

    /// Largest `|A_ij - A_ji|` relative to `max |A|`.
    pub fn asymmetry(&self) -> f64 {
        let a = &self.matrix;
        let n = a.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(2)..(i + 3).min(n) {
                worst = worst.max((a.get(i, j) - a.get(j, i)).abs());
            }
        }
        worst / a.max_abs()
    }
}

/// An eigenpair of the linearization with its nodal eigenfunction.
#[derive(Debug, Clone)]
pub struct Mode {
    pub value: f64,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    /// `|A y - mu y|` in symmetrized coordinates, `|y| = 1`.
    pub residual: f64,
    /// Symmetrized coordinates, unit norm.
    pub vector: Vec<f64>,
}

pub fn lowest_eigenpairs(op: &LinearizedOperator, k: usize, settings: &EigenSettings) -> Result<Vec<Mode>> {
    let pairs = eigen::lowest_eigenpairs(&op.matrix, k, settings)?;
    Ok(pairs
        .into_iter()
        .map(|p| {
            let (phi1, phi2) = op.from_symmetric(&p.vector);
            Mode { value: p.value, phi1, phi2, residual: p.residual, vector: p.vector }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub alignment: f64,
    pub gap: f64,
    pub essential_edge_estimate: Option<f64>,
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub eigenvalues: Vec<f64>,
    /// Rayleigh quotient of the sampled `(v1', v2')`.
    pub translation_quotient: f64,
    /// Sign changes of the dominant component of the bottom eigenfunction.
    pub bottom_sign_changes: usize,
    pub max_residual: f64,
}

pub fn nondegeneracy_report(sol: &HeteroclinicSolution, k: usize, settings: &EigenSettings) -> Result<SpectrumReport> {
    if k < 2 {
        return invalid("the report needs at least two eigenpairs");
    }
    let op = assemble_linearized(sol)?;
    let modes = lowest_eigenpairs(&op, k, settings)?;
    let f = &sol.fields;
    let t = op.to_symmetric(&f.dv1, &f.dv2);
    let tn = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    let bottom = &modes[0];
    let overlap: f64 = bottom.vector.iter().zip(&t).map(|(p, q)| p * q).sum();
    let alignment = (overlap.abs() / tn).min(1.0);

    let z = op.grid.nodes();
    let edge = EDGE_FRACTION * z[z.len() - 1].abs().max(z[0].abs());
    let essential_edge_estimate = modes
        .iter()
        .find(|mode| {
            let outer: f64 = (0..op.interior_len())
                .filter(|i| z[i + 1].abs() >= edge)
                .map(|i| mode.vector[2 * i].powi(2) + mode.vector[2 * i + 1].powi(2))
                .sum();
            outer >= EDGE_MASS_SHARE
        })
        .map(|mode| mode.value);

    let dominant = {
        let e1: f64 = bottom.phi1.iter().map(|v| v * v).sum();
        let e2: f64 = bottom.phi2.iter().map(|v| v * v).sum();
        if e1 >= e2 {
            &bottom.phi1
        } else {
            &bottom.phi2
        }
    };
    let peak = dominant.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let significant: Vec<f64> = dominant.iter().copied().filter(|v| v.abs() > 1e-6 * peak).collect();
    let bottom_sign_changes = significant.windows(2).filter(|w| w[0] * w[1] < 0.0).count();

    Ok(SpectrumReport {
        lambda: sol.lambda,
        lambda1: modes[0].value,
        lambda2: modes[1].value,
        alignment,
        gap: modes[1].value - modes[0].value,
        essential_edge_estimate,
        n: f.len(),
        half_width: sol.half_width(),
        eigenvalues: modes.iter().map(|m| m.value).collect(),
        translation_quotient: op.rayleigh_quotient(&f.dv1, &f.dv2),
        bottom_sign_changes,
        max_residual: modes.iter().fold(0.0, |m, p| m.max(p.residual)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::{make_grid, Grading};

    #[test]
    fn constant_state_potentials() {
        let g = make_grid(-5.0, 5.0, 33, Grading::Uniform).unwrap();
        let f = FieldPair::from_fn(g, |_| (1.0, 0.0));
        let op = assemble_linearized_fields(7.0, &f).unwrap();
        for &(p1, p2, c) in &op.potentials {
            assert_eq!((p1, p2, c), (2.0, 6.0, 0.0));
        }
        assert_eq!(op.asymmetry(), 0.0);
    }
}
