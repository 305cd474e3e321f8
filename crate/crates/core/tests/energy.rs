mod common;

use std::f64::consts::SQRT_2;

use bec_lab::continuation::ContinuationPolicy;
use bec_lab::energy::*;
use bec_lab::heteroclinic::*;
use bec_lab::numerics::NewtonSettings;
use bec_lab::profiles::{solve_blowup, DEFAULT_HALF_WIDTH, DEFAULT_NODES};
use bec_lab::sweep::solve_from_composite;

#[test]
fn partition_constant_matches_closed_form() {
    let (a, b) = partition_halves();
    assert!((partition_constant() - 2.0 * SQRT_2 / 3.0).abs() <= 1e-8);
    assert!((a - b).abs() < 1e-14);
    assert_eq!(LEADING_TENSION, 2.0 * SQRT_2 / 3.0);
}

#[test]
fn explicit_coupling_tension() {
    let grid = heteroclinic_grid(3.0, 20.0, 8193).unwrap();
    let init = FieldPair::from_fn(grid.clone(), explicit_lambda3);
    let sol = solve_heteroclinic_on(3.0, grid, &init, &NewtonSettings::default()).unwrap();
    // 2 int ((1/(2 sqrt2)) sech^2(z/sqrt2))^2 dz = sqrt(2)/3.
    assert!((sigma_gradient_form(&sol) - SQRT_2 / 3.0).abs() < 1e-6);
    assert!((sigma_full_form(&sol) - sigma_gradient_form(&sol)).abs() < 1e-6);
}

#[test]
fn energy_coefficient_matches_shooting() {
    let b = solve_blowup(DEFAULT_HALF_WIDTH, DEFAULT_NODES, &NewtonSettings::default()).unwrap();
    let oracle = common::shooting_energy_coefficient();
    let i1 = blowup_energy_coefficient(&b);
    assert!(i1 < 0.0);
    assert!((i1 - oracle).abs() < 1e-5, "{i1} vs {oracle}");
}

#[test]
fn expansion_at_strong_coupling() {
    let b = solve_blowup(DEFAULT_HALF_WIDTH, DEFAULT_NODES, &NewtonSettings::default()).unwrap();
    let mut last = f64::INFINITY;
    for lambda in [1e3, 1e4, 1e5] {
        let sol = solve_from_composite(lambda, &b, &ContinuationPolicy::default()).unwrap();
        let r = expansion_residual(&sol, &b).unwrap();
        assert!((r.coefficient_ratio - 1.0).abs() < 0.05, "{lambda}: {}", r.coefficient_ratio);
        assert!((r.sigma_full - r.sigma_gradient).abs() <= 1e-6);
        assert!(r.sigma_gradient < LEADING_TENSION);
        assert!(r.residual.abs() < last);
        last = r.residual.abs();
    }
}
