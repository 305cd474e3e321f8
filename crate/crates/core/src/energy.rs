//! Interface tension and its expansion for strong segregation.
//!
//! On a heteroclinic the energy density
//! `sum_i [v_i'^2/2 + (1 - v_i^2)^2/4] + lambda v1^2 v2^2 / 2 - 1/4`
//! equals `v1'^2 + v2'^2` pointwise because the Hamiltonian is `-1/4`, so the
//! gap between the two quadratures measures how well a field solves the system.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::heteroclinic::{FieldPair, HeteroclinicSolution};
use crate::numerics::grid::{make_grid, Grading};
use crate::numerics::quadrature::quadrature;
use crate::profiles::{outer_derivative, BlowupProfile, Branch};

/// `2 sqrt(2) / 3`, the tension of two independent tanh fronts.
pub const LEADING_TENSION: f64 = 2.0 * SQRT_2 / 3.0;

const PARTITION_EXTENT: f64 = 40.0;
const PARTITION_NODES: usize = 4097;

pub fn gradient_energy(fields: &FieldPair) -> f64 {
    let density: Vec<f64> = fields.dv1.iter().zip(&fields.dv2).map(|(a, b)| a * a + b * b).collect();
    quadrature(&density, &fields.grid).expect("lengths match")
}

pub fn full_energy(lambda: f64, fields: &FieldPair) -> f64 {
    let well = |v: f64| (1.0 - v * v).powi(2) / 4.0;
    let density: Vec<f64> = (0..fields.len())
        .map(|k| {
            let (a, b) = (fields.v1[k], fields.v2[k]);
            let (d1, d2) = (fields.dv1[k], fields.dv2[k]);
            0.5 * (d1 * d1 + d2 * d2) + well(a) + well(b) + 0.5 * lambda * a * a * b * b - 0.25
        })
        .collect();
    quadrature(&density, &fields.grid).expect("lengths match")
}

pub fn sigma_gradient_form(sol: &HeteroclinicSolution) -> f64 {
    gradient_energy(&sol.fields)
}

pub fn sigma_full_form(sol: &HeteroclinicSolution) -> f64 {
    full_energy(sol.lambda, &sol.fields)
}

/// `I1 = int V1' (V1' - psi0) dx` over the profile window.
pub fn blowup_energy_coefficient(blowup: &BlowupProfile) -> f64 {
    let psi0 = blowup.psi0;
    let density: Vec<f64> = blowup.dv1.iter().map(|d| d * (d - psi0)).collect();
    quadrature(&density, &blowup.grid).expect("lengths match")
}

/// `int V2' (V2' + psi0) dx`, equal to `I1` by mirror symmetry.
pub fn blowup_energy_coefficient_mirror(blowup: &BlowupProfile) -> f64 {
    let psi0 = blowup.psi0;
    let density: Vec<f64> = blowup.dv2.iter().map(|d| d * (d + psi0)).collect();
    quadrature(&density, &blowup.grid).expect("lengths match")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub lambda: f64,
    pub sigma_gradient: f64,
    pub sigma_full: f64,
    pub leading: f64,
    pub i1: f64,
    pub first_order: f64,
    pub residual: f64,
    /// `(sigma - leading) lambda^{1/4} / (2 I1)`, which tends to 1.
    pub coefficient_ratio: f64,
}

pub fn expansion_residual(sol: &HeteroclinicSolution, blowup: &BlowupProfile) -> Result<EnergyReport> {
    if (blowup.psi0 - crate::profiles::PSI0).abs() > 1e-12 {
        return invalid(format!("blow-up profile has slope {} instead of the normalized one", blowup.psi0));
    }
    let lambda = sol.lambda;
    let sigma_gradient = sigma_gradient_form(sol);
    let sigma_full = sigma_full_form(sol);
    let i1 = blowup_energy_coefficient(blowup);
    let scale = lambda.powf(-0.25);
    let first_order = LEADING_TENSION + 2.0 * scale * i1;
    Ok(EnergyReport {
        lambda,
        sigma_gradient,
        sigma_full,
        leading: LEADING_TENSION,
        i1,
        first_order,
        residual: sigma_gradient - first_order,
        coefficient_ratio: (sigma_gradient - LEADING_TENSION) / (2.0 * scale * i1),
    })
}

/// `int_0^40 U1'^2` and `int_{-40}^0 U2'^2` by the trapezoid rule.
pub fn partition_halves() -> (f64, f64) {
    let half = |branch: Branch, a: f64, b: f64| {
        let grid = make_grid(a, b, PARTITION_NODES, Grading::Uniform).expect("valid grid");
        let density: Vec<f64> =
            grid.nodes().iter().map(|&z| outer_derivative(branch, z).expect("on the half-line").powi(2)).collect();
        quadrature(&density, &grid).expect("lengths match")
    };
    (half(Branch::First, 0.0, PARTITION_EXTENT), half(Branch::Second, -PARTITION_EXTENT, 0.0))
}

/// Tension of the fully segregated limit, `2 sqrt(2) / 3`.
pub fn partition_constant() -> f64 {
    let (a, b) = partition_halves();
    a + b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_value() {
        let (a, b) = partition_halves();
        assert!((a - SQRT_2 / 3.0).abs() < 1e-10);
        assert!((a - b).abs() < 1e-15);
        assert!((partition_constant() - LEADING_TENSION).abs() < 1e-8);
    }
}
