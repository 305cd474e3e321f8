use std::f64::consts::PI;

use bec_lab::continuation::{continue_in_lambda, ContinuationPolicy};
use bec_lab::heteroclinic::*;
use bec_lab::numerics::{make_grid, EigenSettings, Grading, NewtonSettings};
use bec_lab::spectrum::*;

fn explicit_solution(n: usize) -> HeteroclinicSolution {
    let grid = heteroclinic_grid(3.0, 20.0, n).unwrap();
    let init = FieldPair::from_fn(grid.clone(), explicit_lambda3);
    solve_heteroclinic_on(3.0, grid, &init, &NewtonSettings::default()).unwrap()
}

#[test]
fn constant_state_gives_shifted_dirichlet_laplacian() {
    let half = 5.0;
    let n = 801;
    let g = make_grid(-half, half, n, Grading::Uniform).unwrap();
    let f = FieldPair::from_fn(g, |_| (1.0, 0.0));
    let op = assemble_linearized_fields(4.0, &f).unwrap();
    let modes = lowest_eigenpairs(&op, 3, &EigenSettings::default()).unwrap();
    let h = 2.0 * half / (n - 1) as f64;
    for (j, m) in modes.iter().enumerate() {
        let k = (j + 1) as f64;
        // Discrete Dirichlet eigenvalue of -d^2/dz^2, shifted by the potential 2.
        let exact = 2.0 + 4.0 / (h * h) * (k * PI * h / (4.0 * half)).sin().powi(2);
        assert!((m.value - exact).abs() < 1e-9, "{} vs {exact}", m.value);
    }
}

#[test]
fn explicit_coupling_spectrum() {
    let sol = explicit_solution(8193);
    let r = nondegeneracy_report(&sol, 4, &EigenSettings::default()).unwrap();
    assert!(r.lambda1.abs() < 1e-6, "{}", r.lambda1);
    assert!(r.alignment > 0.999999);
    assert!(r.lambda2 > 1.0 && r.lambda2 < 2.0);
    assert_eq!(r.bottom_sign_changes, 0);
    assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    let op = assemble_linearized(&sol).unwrap();
    assert_eq!(op.asymmetry(), 0.0);
    assert!(r.translation_quotient.abs() < 1e-6);
}

#[test]
fn reflection_preserves_spectrum() {
    let sol = explicit_solution(4097);
    let a = nondegeneracy_report(&sol, 3, &EigenSettings::default()).unwrap();
    let reflected = HeteroclinicSolution::from_fields(3.0, sol.fields.reflected()).unwrap();
    let b = nondegeneracy_report(&reflected, 3, &EigenSettings::default()).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn bottom_eigenvalue_shrinks_under_refinement() {
    let start = explicit_solution(default_nodes(3.0));
    let lambda = 1e3;
    let mut values = Vec::new();
    for (half_width, n) in [
        (default_half_width(lambda), 4097),
        (default_half_width(lambda) + 4.0, 8193),
        (default_half_width(lambda) + 8.0, 16385),
    ] {
        // A loose Newton stop would leave a residual floor under the bottom eigenvalue.
        let newton = NewtonSettings { residual_tol: 1e-12, ..NewtonSettings::default() };
        let policy = ContinuationPolicy {
            half_width: Some(half_width),
            nodes: Some(n),
            newton,
            ..ContinuationPolicy::default()
        };
        let trace = continue_in_lambda(&start, &[lambda], &policy).unwrap();
        let r = nondegeneracy_report(&trace.solutions[0], 2, &EigenSettings::default()).unwrap();
        values.push(r.lambda1.abs());
    }
    assert!(values[1] < values[0] && values[2] < values[1], "{values:?}");
}

#[test]
fn rejects_single_pair_report() {
    let sol = explicit_solution(1025);
    assert!(nondegeneracy_report(&sol, 1, &EigenSettings::default()).is_err());
}
