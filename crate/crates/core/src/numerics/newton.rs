//! Damped Newton iteration for banded nonlinear systems.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::numerics::banded::BandedMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonSettings {
    /// Sup-norm of the discrete residual at which iteration stops.
    pub residual_tol: f64,
    pub max_iters: usize,
    /// Backtracking factor applied to the step after a failed decrease test.
    pub damping: f64,
    /// Smallest step multiplier tried before giving up.
    pub min_step: f64,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings { residual_tol: 1e-10, max_iters: 50, damping: 0.5, min_step: 2f64.powi(-20) }
    }
}

impl NewtonSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return invalid("residual_tol must be positive");
        }
        if self.max_iters < 1 {
            return invalid("max_iters must be at least 1");
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return invalid("damping must lie in (0, 1)");
        }
        if !(self.min_step > 0.0 && self.min_step <= 1.0) {
            return invalid("min_step must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn l2_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Armijo constant of the sufficient-decrease test on `|r|_2^2`.
const ARMIJO: f64 = 1e-4;

pub fn newton_solve<R, J>(
    mut residual: R,
    mut jacobian: J,
    init: Vec<f64>,
    settings: &NewtonSettings,
) -> Result<NewtonOutcome>
where
    R: FnMut(&[f64]) -> Vec<f64>,
    J: FnMut(&[f64]) -> BandedMatrix,
{
    settings.validate()?;
    let mut u = init;
    let mut r = residual(&u);
    if r.len() != u.len() {
        return Err(LabError::LengthMismatch { expected: u.len(), got: r.len() });
    }
    let mut rnorm = sup_norm(&r);
    let mut best = rnorm;
    if !rnorm.is_finite() {
        return Err(LabError::NonConvergence { iterations: 0, best_residual: rnorm });
    }
    if rnorm <= settings.residual_tol {
        return Ok(NewtonOutcome { solution: u, iterations: 0, residual: rnorm });
    }
    for iteration in 1..=settings.max_iters {
        let lu = jacobian(&u).factor().map_err(|_| LabError::SingularJacobian { iteration })?;
        let delta = lu.solve(&r);
        let merit = l2_sq(&r);
        let mut step = 1.0;
        let mut trial;
        loop {
            trial = u.iter().zip(&delta).map(|(ui, di)| ui - step * di).collect::<Vec<_>>();
            let rt = residual(&trial);
            let mt = l2_sq(&rt);
            if mt.is_finite() && mt <= (1.0 - 2.0 * ARMIJO * step) * merit {
                r = rt;
                break;
            }
            step *= settings.damping;
            if step < settings.min_step {
                return Err(LabError::NonConvergence { iterations: iteration, best_residual: best });
            }
        }
        u = trial;
        rnorm = sup_norm(&r);
        best = best.min(rnorm);
        if rnorm <= settings.residual_tol {
            return Ok(NewtonOutcome { solution: u, iterations: iteration, residual: rnorm });
        }
    }
    Err(LabError::NonConvergence { iterations: settings.max_iters, best_residual: best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_jac(d: f64) -> BandedMatrix {
        let mut m = BandedMatrix::zeros(1, 0, 0).unwrap();
        m.set(0, 0, d);
        m
    }

    #[test]
    fn sqrt_two() {
        let out = newton_solve(
            |x| vec![x[0] * x[0] - 2.0],
            |x| scalar_jac(2.0 * x[0]),
            vec![1.0],
            &NewtonSettings { residual_tol: 1e-14, ..Default::default() },
        )
        .unwrap();
        assert!((out.solution[0] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn one_iteration_from_far_is_nonconvergence() {
        let err = newton_solve(
            |x| vec![x[0] * x[0] - 2.0],
            |x| scalar_jac(2.0 * x[0]),
            vec![1e3],
            &NewtonSettings { max_iters: 1, ..Default::default() },
        )
        .unwrap_err();
        assert!(matches!(err, LabError::NonConvergence { iterations: 1, .. }));
    }

    #[test]
    fn singular_jacobian_reported() {
        let err = newton_solve(|x| vec![x[0] * x[0] + 1.0], |_| scalar_jac(0.0), vec![0.0], &NewtonSettings::default())
            .unwrap_err();
        assert_eq!(err, LabError::SingularJacobian { iteration: 1 });
    }

    #[test]
    fn rejects_bad_settings() {
        let s = NewtonSettings { damping: 1.5, ..Default::default() };
        assert!(s.validate().is_err());
        let s = NewtonSettings { residual_tol: 0.0, ..Default::default() };
        assert!(s.validate().is_err());
        let s = NewtonSettings { max_iters: 0, ..Default::default() };
        assert!(s.validate().is_err());
    }
}
