use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;

use bec_lab::heteroclinic::{heteroclinic_jacobian, heteroclinic_residual};
use bec_lab::numerics::eigen::count_below;
use bec_lab::numerics::{lowest_eigenpairs, make_grid, BandedMatrix, EigenSettings, Grading, Grid};
use bec_lab::profiles::{blowup_jacobian, blowup_residual};

fn dense(a: &BandedMatrix) -> DMatrix<f64> {
    let n = a.dim();
    DMatrix::from_fn(n, n, |i, j| if a.in_band(i, j) { a.get(i, j) } else { 0.0 })
}

fn banded_strategy() -> impl Strategy<Value = (BandedMatrix, Vec<f64>)> {
    (4usize..48, 0usize..=2, 0usize..=2).prop_flat_map(|(n, kl, ku)| {
        let entries = prop::collection::vec(-1.0f64..1.0, n * (kl + ku + 1));
        let rhs = prop::collection::vec(-1.0f64..1.0, n);
        (Just((n, kl, ku)), entries, rhs).prop_map(|((n, kl, ku), e, rhs)| {
            let mut a = BandedMatrix::zeros(n, kl, ku).unwrap();
            let mut it = e.into_iter();
            for i in 0..n {
                for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                    let v = it.next().unwrap();
                    // Keep the diagonal away from zero so the system is well posed.
                    a.set(i, j, if i == j { v + 3.0 * v.signum() + 0.5 } else { v });
                }
            }
            (a, rhs)
        })
    })
}

fn symmetric_strategy() -> impl Strategy<Value = BandedMatrix> {
    (8usize..40).prop_flat_map(|n| {
        prop::collection::vec(-2.0f64..2.0, 3 * n).prop_map(move |e| {
            let mut a = BandedMatrix::zeros(n, 2, 2).unwrap();
            for i in 0..n {
                a.set(i, i, e[3 * i]);
                for d in 1..=2 {
                    if i + d < n {
                        a.set(i, i + d, e[3 * i + d]);
                        a.set(i + d, i, e[3 * i + d]);
                    }
                }
            }
            a
        })
    })
}

fn fd_jacobian_gap(r: impl Fn(&[f64]) -> Vec<f64>, jac: &BandedMatrix, u: &[f64]) -> f64 {
    let n = u.len();
    let delta = 1e-6;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let mut up = u.to_vec();
        let mut dn = u.to_vec();
        up[j] += delta;
        dn[j] -= delta;
        let (rp, rm) = (r(&up), r(&dn));
        for i in 0..n {
            let fd = (rp[i] - rm[i]) / (2.0 * delta);
            let an = if jac.in_band(i, j) { jac.get(i, j) } else { 0.0 };
            worst = worst.max((fd - an).abs());
        }
    }
    worst / jac.max_abs().max(1.0)
}

fn coarse_grid(uniform: bool, half: f64) -> Grid {
    let grading = if uniform { Grading::Uniform } else { Grading::Graded { center: 0.0, width: 1.5 } };
    make_grid(-half, half, 33, grading).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn banded_solve_matches_dense((a, rhs) in banded_strategy()) {
        let x = a.factor().unwrap().solve(&rhs);
        let d = dense(&a);
        let reference = d.clone().lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
        let scale = reference.amax().max(1.0);
        for (p, q) in x.iter().zip(reference.iter()) {
            prop_assert!((p - q).abs() <= 1e-10 * scale);
        }
        let ax = a.matvec(&x);
        for (p, q) in ax.iter().zip(&rhs) {
            prop_assert!((p - q).abs() <= 1e-10);
        }
        let dx = &d * DVector::from_vec(x.clone());
        for (p, q) in dx.iter().zip(&ax) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn inertia_and_bottom_pairs_match_dense(a in symmetric_strategy()) {
        let ev = SymmetricEigen::new(dense(&a)).eigenvalues;
        let mut sorted: Vec<f64> = ev.iter().copied().collect();
        sorted.sort_by(f64::total_cmp);
        let mu = 0.5 * (sorted[2] + sorted[3]);
        if sorted[3] - sorted[2] > 1e-6 {
            prop_assert_eq!(count_below(&a, mu), Some(3));
        }
        let pairs = lowest_eigenpairs(&a, 3, &EigenSettings::default()).unwrap();
        for (p, e) in pairs.iter().zip(&sorted) {
            prop_assert!((p.value - e).abs() <= 1e-8, "{} vs {}", p.value, e);
        }
    }

    #[test]
    fn blowup_jacobian_is_consistent(
        vals in prop::collection::vec(0.0f64..3.0, 66),
        uniform in any::<bool>(),
    ) {
        let grid = coarse_grid(uniform, 6.0);
        let gap = fd_jacobian_gap(|u| blowup_residual(&grid, u), &blowup_jacobian(&grid, &vals), &vals);
        prop_assert!(gap <= 1e-5, "{}", gap);
    }

    #[test]
    fn heteroclinic_jacobian_is_consistent(
        vals in prop::collection::vec(0.0f64..1.0, 66),
        lambda in 1.5f64..1e4,
        uniform in any::<bool>(),
    ) {
        let grid = coarse_grid(uniform, 20.0);
        let gap = fd_jacobian_gap(
            |u| heteroclinic_residual(lambda, &grid, u),
            &heteroclinic_jacobian(lambda, &grid, &vals),
            &vals,
        );
        prop_assert!(gap <= 1e-5, "{}", gap);
    }
}
