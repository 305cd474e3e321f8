//! Natural-parameter continuation of the heteroclinic branch in `lambda`.
//!
//! Steps are uniform in `ln lambda`. A failed solve halves the step and
//! retries from the last accepted solution; after a success the step grows
//! back toward its initial size.

use serde::{Deserialize, Serialize};

use crate::energy::sigma_gradient_form;
use crate::error::{invalid, LabError, Result};
use crate::heteroclinic::{
    default_half_width, default_nodes, heteroclinic_grid, solve_heteroclinic_on, HeteroclinicSolution,
};
use crate::numerics::newton::NewtonSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationPolicy {
    /// Ratio between consecutive couplings of a full step (`> 1`).
    pub initial_step_factor: f64,
    pub max_halvings: usize,
    /// Fixed half-width; the per-coupling default when `None`.
    pub half_width: Option<f64>,
    /// Fixed node count; the per-coupling default when `None`.
    pub nodes: Option<usize>,
    pub newton: NewtonSettings,
}

impl Default for ContinuationPolicy {
    fn default() -> Self {
        ContinuationPolicy {
            initial_step_factor: 10f64.powf(0.1),
            max_halvings: 10,
            half_width: None,
            nodes: None,
            newton: NewtonSettings::default(),
        }
    }
}

impl ContinuationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_step_factor > 1.0 && self.initial_step_factor.is_finite()) {
            return invalid(format!("step factor must exceed 1, got {}", self.initial_step_factor));
        }
        self.newton.validate()
    }

    pub fn mesh_for(&self, lambda: f64) -> (f64, usize) {
        (
            self.half_width.unwrap_or_else(|| default_half_width(lambda)),
            self.nodes.unwrap_or_else(|| default_nodes(lambda)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub newton_residual: f64,
    pub hamiltonian_dev: f64,
    pub sigma_lambda: f64,
    /// `v1(0)`.
    pub crossing_value: f64,
    pub min_component: f64,
}

impl Summary {
    pub fn of(sol: &HeteroclinicSolution) -> Summary {
        Summary {
            newton_residual: sol.newton_residual,
            hamiltonian_dev: sol.hamiltonian_dev,
            sigma_lambda: sigma_gradient_form(sol),
            crossing_value: sol.fields.value_at(0.0).0,
            min_component: sol.flags.min_component,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub lambda: f64,
    pub summary: Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepOutcome {
    Accepted,
    Halved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub from: f64,
    pub to: f64,
    pub outcome: StepOutcome,
    /// Solver message for halved steps.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ContinuationTrace {
    /// One entry per accepted solve, starting with the seed.
    pub entries: Vec<TraceEntry>,
    pub steps: Vec<StepRecord>,
    /// Solutions at the requested targets, in target order.
    pub solutions: Vec<HeteroclinicSolution>,
}

impl ContinuationTrace {
    pub fn halvings(&self) -> usize {
        self.steps.iter().filter(|s| s.outcome == StepOutcome::Halved).count()
    }
}

fn recoverable(e: &LabError) -> bool {
    matches!(
        e,
        LabError::NonConvergence { .. }
            | LabError::SingularJacobian { .. }
            | LabError::SingularPivot { .. }
            | LabError::SignViolation(_)
    )
}

/// Follows the branch from `start` through `targets`, which must move
/// strictly monotonically away from `start.lambda`.
pub fn continue_in_lambda(
    start: &HeteroclinicSolution,
    targets: &[f64],
    policy: &ContinuationPolicy,
) -> Result<ContinuationTrace> {
    policy.validate()?;
    if targets.is_empty() {
        return invalid("no continuation targets");
    }
    let up = targets[0] > start.lambda;
    let mut prev_lambda = start.lambda;
    for &t in targets {
        if !(t > 1.0 && t.is_finite()) || (up && t <= prev_lambda) || (!up && t >= prev_lambda) {
            return invalid(format!("targets must be monotone couplings beyond {}, got {t}", start.lambda));
        }
        prev_lambda = t;
    }

    let full = policy.initial_step_factor.ln();
    let mut step = full;
    let mut halvings = 0;
    let mut current = start.clone();
    let mut trace = ContinuationTrace {
        entries: vec![TraceEntry { lambda: start.lambda, summary: Summary::of(start) }],
        ..Default::default()
    };

    for &target in targets {
        while current.lambda != target {
            let log_gap = (target / current.lambda).ln().abs();
            let next = if log_gap <= step * (1.0 + 1e-9) {
                target
            } else {
                current.lambda * if up { step.exp() } else { (-step).exp() }
            };
            let (half_width, n) = policy.mesh_for(next);
            let attempt = heteroclinic_grid(next, half_width, n)
                .and_then(|grid| solve_heteroclinic_on(next, grid, &current.fields, &policy.newton));
            match attempt {
                Ok(sol) => {
                    trace.steps.push(StepRecord {
                        from: current.lambda,
                        to: next,
                        outcome: StepOutcome::Accepted,
                        reason: None,
                    });
                    trace.entries.push(TraceEntry { lambda: next, summary: Summary::of(&sol) });
                    current = sol;
                    halvings = 0;
                    step = (2.0 * step).min(full);
                }
                Err(e) if recoverable(&e) => {
                    trace.steps.push(StepRecord {
                        from: current.lambda,
                        to: next,
                        outcome: StepOutcome::Halved,
                        reason: Some(e.to_string()),
                    });
                    halvings += 1;
                    if halvings > policy.max_halvings {
                        return Err(LabError::StepUnderflow { at_lambda: current.lambda });
                    }
                    step *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
        trace.solutions.push(current.clone());
    }
    Ok(trace)
}

/// Couplings `a, ..., b` spaced uniformly in `log10` with `per_decade`
/// points per decade; both ends included.
pub fn log_range(a: f64, b: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || per_decade == 0 {
        return invalid(format!("bad range {a}:{b}:{per_decade}"));
    }
    let decades = (b / a).log10();
    let steps = (decades.abs() * per_decade as f64).round().max(1.0) as usize;
    Ok((0..=steps)
        .map(|k| match k {
            0 => a,
            k if k == steps => b,
            k => a * 10f64.powf(decades * k as f64 / steps as f64),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_range_hits_ends() {
        let r = log_range(10.0, 1e4, 1).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r[0], 10.0);
        assert_eq!(r[3], 1e4);
        assert!((r[1] - 100.0).abs() < 1e-10);
        assert!(log_range(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn policy_validation() {
        let p = ContinuationPolicy { initial_step_factor: 1.0, ..Default::default() };
        assert!(p.validate().is_err());
        assert!(ContinuationPolicy::default().validate().is_ok());
    }
}
