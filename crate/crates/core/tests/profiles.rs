mod common;

use bec_lab::numerics::NewtonSettings;
use bec_lab::profiles::*;

fn profile() -> BlowupProfile {
    solve_blowup(DEFAULT_HALF_WIDTH, DEFAULT_NODES, &NewtonSettings::default()).unwrap()
}

#[test]
fn first_integral_holds_at_every_node() {
    let p = profile();
    assert!(p.hamiltonian_dev <= 1e-6, "{}", p.hamiltonian_dev);
    for h in p.hamiltonian_values() {
        assert!((h - PSI0 * PSI0).abs() <= 1e-6);
    }
}

#[test]
fn mirror_symmetry() {
    assert!(profile().mirror_deviation() <= 1e-6);
}

#[test]
fn kappa_matches_shooting() {
    let (a, kappa) = common::shooting_kappa();
    let p = profile();
    assert!(p.kappa > 0.0);
    assert!((p.kappa - kappa).abs() <= 1e-6, "{} vs {}", p.kappa, kappa);
    let centre = p.sample(0.0).unwrap();
    assert!((centre.v1 - a).abs() <= 1e-6 && (centre.v2 - a).abs() <= 1e-6);
}

#[test]
fn kappa_stable_under_window_and_mesh() {
    let s = NewtonSettings::default();
    let a = profile().kappa;
    let wide = solve_blowup(16.0, 5465, &s).unwrap().kappa;
    let fine = solve_blowup(DEFAULT_HALF_WIDTH, 2 * DEFAULT_NODES - 1, &s).unwrap().kappa;
    assert!((a - wide).abs() < 1e-6);
    assert!((a - fine).abs() < 1e-6);
}

#[test]
fn scaling_family_multiplies_first_integral() {
    let p = profile();
    let q = rescale_blowup(&p, 2.0, 0.3).unwrap();
    // V -> mu V(mu x) scales the first integral by mu^4.
    let expected = 16.0 * PSI0 * PSI0;
    for h in q.hamiltonian_values() {
        assert!((h - expected).abs() <= 16.0 * 1e-6);
    }
    assert!((q.psi0 - 2.0 * 2.0 * PSI0).abs() < 1e-14);
    let x = 0.7;
    let direct = p.sample(2.0 * (x - 0.3)).unwrap().v1 * 2.0;
    assert!((q.sample(x).unwrap().v1 - direct).abs() < 1e-9);
}

#[test]
fn translation_moves_the_offset() {
    let p = profile();
    let q = rescale_blowup(&p, 1.0, 0.5).unwrap();
    assert!((q.kappa - (p.kappa - PSI0 * 0.5)).abs() < 1e-12);
    assert!((q.sample(0.5).unwrap().v1 - p.sample(0.0).unwrap().v1).abs() < 1e-12);
}

#[test]
fn second_order_residual_is_small() {
    assert!(profile().continuum_residual() < 1e-4);
}

#[test]
fn energy_coefficient_is_negative() {
    let p = profile();
    assert!(bec_lab::energy::blowup_energy_coefficient(&p) < 0.0);
    let a = bec_lab::energy::blowup_energy_coefficient(&p);
    let b = bec_lab::energy::blowup_energy_coefficient_mirror(&p);
    assert!((a - b).abs() < 1e-6);
}

#[test]
fn decaying_component_is_gaussian() {
    let p = profile();
    // WKB: -V2'/V2 ~ V1 where V1 grows linearly.
    let n = p.v2.len();
    assert!(p.v2[n - 1].abs() < 1e-15);
    let k = p.grid.nearest(5.0);
    let ratio = -p.dv2[k] / p.v2[k] / p.v1[k];
    assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    assert!(p.v2[k] < 1e-4);
}

#[test]
fn rejects_small_windows() {
    let s = NewtonSettings::default();
    assert!(solve_blowup(3.0, 4097, &s).is_err());
    assert!(solve_blowup(12.0, 100, &s).is_err());
}

#[test]
fn tanh_profile_slope_at_origin() {
    assert!((tanh_profile_derivative(0.0) - PSI0).abs() < 1e-12);
    assert!((outer_value(Branch::Second, -1.3).unwrap() - outer_value(Branch::First, 1.3).unwrap()).abs() < 1e-15);
}
