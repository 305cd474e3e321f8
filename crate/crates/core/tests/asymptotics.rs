use bec_lab::asymptotics::*;
use bec_lab::continuation::ContinuationPolicy;
use bec_lab::heteroclinic::{heteroclinic_grid, inner_layer_width};
use bec_lab::numerics::NewtonSettings;
use bec_lab::profiles::{solve_blowup, tanh_profile, BlowupProfile, DEFAULT_HALF_WIDTH, DEFAULT_NODES};
use bec_lab::sweep::solve_from_composite;

fn blowup() -> BlowupProfile {
    solve_blowup(DEFAULT_HALF_WIDTH, DEFAULT_NODES, &NewtonSettings::default()).unwrap()
}

fn synthetic(lambda: f64) -> ErrorReport {
    let l = lambda.ln();
    ErrorReport {
        lambda,
        variant: Variant::Shifted,
        c_weight: 1.0,
        outer_sup_weighted: 2.0 * lambda.powf(-0.75),
        outer_deriv: 0.3 * lambda.powf(-0.5),
        inner_sup: l * lambda.powf(-0.75),
        inner_sub_sup: 0.5 * lambda.powf(-0.75),
        inner_deriv: 1.0,
        jump: l.powi(3) * lambda.powf(-0.75),
        outer_limit: 10.0,
    }
}

#[test]
fn fits_recover_synthetic_orders() {
    let reports: Vec<ErrorReport> = [1e2, 1e3, 1e4, 1e5, 1e6].iter().map(|l| synthetic(*l)).collect();
    let o = fit_error_orders(&reports).unwrap();
    assert!((o.outer_order.slope + 0.75).abs() < 1e-12);
    assert!((o.outer_deriv_order.slope + 0.5).abs() < 1e-12);
    assert!((o.inner_order.slope + 0.75).abs() < 1e-12);
    // Logarithmic factors pull the apparent slope up.
    assert!(o.jump_order.slope > -0.6);
    assert!(fit_error_orders(&reports[..3]).is_err());
    let narrow: Vec<ErrorReport> = [10.0, 20.0, 40.0, 80.0].iter().map(|l| synthetic(*l)).collect();
    assert!(fit_error_orders(&narrow).is_err());
}

#[test]
fn shift_search_recovers_composite_shift() {
    let b = blowup();
    let lambda = 1e4;
    let c = build_composite(lambda, &b, Variant::Shifted).unwrap();
    let grid = heteroclinic_grid(lambda, 20.0, 8193).unwrap();
    let fields = c.sample(grid).unwrap();
    let xi = shift_estimate_fields(lambda, &fields, b.kappa, b.psi0).unwrap();
    assert!((xi / c.xi - 1.0).abs() < 1e-6, "{xi} vs {}", c.xi);
    assert!((c.xi * lambda.powf(0.25) - b.kappa / b.psi0).abs() < 1e-12);
}

#[test]
fn outer_pieces_are_shifted_fronts() {
    let b = blowup();
    let lambda = 1e3;
    let c = build_composite(lambda, &b, Variant::Shifted).unwrap();
    let z = 2.0;
    assert_eq!(c.region(z), Region::Right);
    assert!((c.value(z).unwrap().0 - tanh_profile(z + c.xi)).abs() < 1e-15);
    assert_eq!(c.value(z).unwrap().1, 0.0);
    let lead = build_composite(lambda, &b, Variant::Leading).unwrap();
    assert_eq!(lead.xi, 0.0);
    assert_eq!(c.region(0.5 * inner_layer_width(lambda)), Region::Inner);
}

#[test]
fn translation_commutes_with_evaluation() {
    let b = blowup();
    let c = build_composite(1e3, &b, Variant::Shifted).unwrap();
    let d = 0.37;
    let t = c.translated(d);
    for z in [-3.0, -0.1, 0.0, 0.05, 0.4, 2.5] {
        let (a1, a2) = t.value(z + d).unwrap();
        let (b1, b2) = c.value(z).unwrap();
        assert!((a1 - b1).abs() < 1e-14 && (a2 - b2).abs() < 1e-14);
    }
}

#[test]
fn composite_needs_core_inside_blowup_window() {
    let b = blowup();
    assert!(build_composite(1e6, &b, Variant::Shifted).is_err());
    assert!(build_composite(1.0, &b, Variant::Shifted).is_err());
    assert!(build_composite(1e5, &b, Variant::Shifted).is_ok());
}

#[test]
fn shifted_composite_beats_leading_order() {
    let b = blowup();
    let lambda = 1e4;
    let sol = solve_from_composite(lambda, &b, &ContinuationPolicy::default()).unwrap();
    let shifted = measure_errors(&sol, &build_composite(lambda, &b, Variant::Shifted).unwrap(), 1.0).unwrap();
    let leading = measure_errors(&sol, &build_composite(lambda, &b, Variant::Leading).unwrap(), 1.0).unwrap();
    assert!(shifted.outer_sup_weighted * 5.0 < leading.outer_sup_weighted);
    // Inner error at the core scale is of order lambda^{-3/4}.
    let scaled = shifted.inner_sub_sup * lambda.powf(0.75);
    assert!(scaled > 0.1 && scaled < 2.0, "{scaled}");
    assert!(measure_errors(&sol, &build_composite(1e3, &b, Variant::Shifted).unwrap(), 1.0).is_err());
}
