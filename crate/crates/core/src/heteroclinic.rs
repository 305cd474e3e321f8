//! Heteroclinic solutions of the segregated two-component system
//!
//! ```text
//! -v1'' + v1^3 - v1 + lambda v2^2 v1 = 0,
//! -v2'' + v2^3 - v2 + lambda v1^2 v2 = 0,
//! ```
//!
//! connecting `(0, 1)` at `-inf` to `(1, 0)` at `+inf`, truncated to `[-L, L]`
//! with the limit states imposed as Dirichlet data.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::numerics::banded::BandedMatrix;
use crate::numerics::fd::{derivative, flux_difference};
use crate::numerics::grid::{make_grid, Grading, Grid};
use crate::numerics::interp::cubic_unchecked;
use crate::numerics::newton::{newton_solve, NewtonSettings};
use crate::profiles::{interleave, roundoff_floor, split, tanh_profile};

/// Value of the Hamiltonian on the heteroclinic.
pub const HAMILTONIAN_LEVEL: f64 = -0.25;
pub const MIN_HALF_WIDTH: f64 = 20.0;

/// Node values of `(v1, v2)` and their nodal derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub grid: Grid,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub dv1: Vec<f64>,
    pub dv2: Vec<f64>,
}

impl FieldPair {
    /// Derivatives are taken with the mesh stencils.
    pub fn new(grid: Grid, v1: Vec<f64>, v2: Vec<f64>) -> Result<FieldPair> {
        for v in [&v1, &v2] {
            if v.len() != grid.len() {
                return Err(LabError::LengthMismatch { expected: grid.len(), got: v.len() });
            }
        }
        let dv1 = derivative(&grid, &v1);
        let dv2 = derivative(&grid, &v2);
        Ok(FieldPair { grid, v1, v2, dv1, dv2 })
    }

    /// Samples a closed-form pair; derivatives still come from the stencils.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> (f64, f64)) -> FieldPair {
        let (v1, v2): (Vec<f64>, Vec<f64>) = grid.nodes().iter().map(|&z| f(z)).unzip();
        FieldPair::new(grid, v1, v2).expect("lengths match by construction")
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Cubic interpolation of `(v1, v2)`; outside the mesh the pair is
    /// continued by the limit states.
    pub fn value_at(&self, z: f64) -> (f64, f64) {
        if z <= self.grid.start() {
            return (0.0, 1.0);
        }
        if z >= self.grid.end() {
            return (1.0, 0.0);
        }
        (cubic_unchecked(&self.grid, &self.v1, z), cubic_unchecked(&self.grid, &self.v2, z))
    }

    pub fn derivative_at(&self, z: f64) -> (f64, f64) {
        if z <= self.grid.start() || z >= self.grid.end() {
            return (0.0, 0.0);
        }
        (cubic_unchecked(&self.grid, &self.dv1, z), cubic_unchecked(&self.grid, &self.dv2, z))
    }

    /// Transfers the pair to another mesh.
    pub fn resample(&self, grid: Grid) -> FieldPair {
        FieldPair::from_fn(grid, |z| self.value_at(z))
    }

    /// The pair `(v1(z - shift), v2(z - shift))` on the translated mesh.
    pub fn translated(&self, shift: f64) -> FieldPair {
        let grading = match self.grid.grading() {
            Grading::Uniform => Grading::Uniform,
            Grading::Graded { center, width } => Grading::Graded { center: center + shift, width },
        };
        let grid = Grid::from_mapped_nodes(self.grid.nodes().iter().map(|z| z + shift).collect(), grading);
        FieldPair { grid, v1: self.v1.clone(), v2: self.v2.clone(), dv1: self.dv1.clone(), dv2: self.dv2.clone() }
    }

    /// The reflected pair `(v2(-z), v1(-z))`, again a solution when `self` is.
    pub fn reflected(&self) -> FieldPair {
        let grading = match self.grid.grading() {
            Grading::Uniform => Grading::Uniform,
            Grading::Graded { center, width } => Grading::Graded { center: -center, width },
        };
        let grid = Grid::from_mapped_nodes(self.grid.nodes().iter().rev().map(|z| -z).collect(), grading);
        let rev = |v: &[f64], s: f64| v.iter().rev().map(|x| s * x).collect::<Vec<_>>();
        FieldPair {
            grid,
            v1: rev(&self.v2, 1.0),
            v2: rev(&self.v1, 1.0),
            dv1: rev(&self.dv2, -1.0),
            dv2: rev(&self.dv1, -1.0),
        }
    }
}

/// Closed-form solution at `lambda = 3`, where `v1 + v2 = 1`.
pub fn explicit_lambda3(z: f64) -> (f64, f64) {
    let v1 = 0.5 * (1.0 + tanh_profile(z));
    (v1, 1.0 - v1)
}

pub fn explicit_lambda3_derivative(z: f64) -> (f64, f64) {
    let c = (z / SQRT_2).cosh();
    let d = 0.5 / (SQRT_2 * c * c);
    (d, -d)
}

/// Default truncation `L = max(20, 12/sqrt(min(2, lambda-1)) + 10 ln(lambda) lambda^{-1/4})`.
pub fn default_half_width(lambda: f64) -> f64 {
    let outer = 12.0 / (lambda - 1.0).min(2.0).sqrt();
    MIN_HALF_WIDTH.max(outer + 10.0 * inner_layer_width(lambda).max(0.0))
}

/// `ln(lambda) lambda^{-1/4}`, the extent of the interface core.
pub fn inner_layer_width(lambda: f64) -> f64 {
    lambda.ln() * lambda.powf(-0.25)
}

/// Default node count: grows with `ln(lambda)` so that the core stays
/// resolved at roughly fixed relative accuracy. Always odd, so `z = 0` is a node.
pub fn default_nodes(lambda: f64) -> usize {
    let per_log = 6000.0 * lambda.ln().max(1.0);
    let n = (per_log / 2048.0).ceil() as usize * 2048 + 1;
    n.max(8193)
}

/// Symmetric sinh-graded mesh on `[-L, L]` holding about half its nodes in
/// `|z| <= 4 ln(lambda) lambda^{-1/4}`.
pub fn heteroclinic_grid(lambda: f64, half_width: f64, n: usize) -> Result<Grid> {
    let core = 4.0 * inner_layer_width(lambda);
    if !(core > 0.0) || core >= 0.5 * half_width {
        return make_grid(-half_width, half_width, n, Grading::Uniform);
    }
    // Width A with A sinh(asinh(L/A)/2) = core, i.e. the half-way node sits at `core`.
    let half_node = |a: f64| a * ((half_width / a).asinh() * 0.5).sinh();
    let (mut lo, mut hi) = (1e-12 * half_width, half_width);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if half_node(mid) > core {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    make_grid(-half_width, half_width, n, Grading::Graded { center: 0.0, width: hi })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return invalid(format!("coupling must exceed 1, got {lambda}"));
    }
    Ok(())
}

/// Flux-form residual on interleaved unknowns `[v1_0, v2_0, v1_1, ...]`;
/// the end rows impose the limit states.
pub fn heteroclinic_residual(lambda: f64, grid: &Grid, u: &[f64]) -> Vec<f64> {
    let x = grid.nodes();
    let n = x.len();
    let (v1, v2) = split(u);
    let mut r = vec![0.0; 2 * n];
    r[0] = v1[0];
    r[1] = v2[0] - 1.0;
    for k in 1..n - 1 {
        let w = 0.5 * (x[k + 1] - x[k - 1]);
        let (a, b) = (v1[k], v2[k]);
        r[2 * k] = flux_difference(x, &v1, k) - w * a * (a * a - 1.0 + lambda * b * b);
        r[2 * k + 1] = flux_difference(x, &v2, k) - w * b * (b * b - 1.0 + lambda * a * a);
    }
    r[2 * n - 2] = v1[n - 1] - 1.0;
    r[2 * n - 1] = v2[n - 1];
    r
}

pub fn heteroclinic_jacobian(lambda: f64, grid: &Grid, u: &[f64]) -> BandedMatrix {
    let x = grid.nodes();
    let n = x.len();
    let (v1, v2) = split(u);
    let mut j = BandedMatrix::zeros(2 * n, 2, 2).expect("valid shape");
    j.set(0, 0, 1.0);
    j.set(1, 1, 1.0);
    for k in 1..n - 1 {
        let (hm, hp) = (x[k] - x[k - 1], x[k + 1] - x[k]);
        let w = 0.5 * (hm + hp);
        let (a, b) = (v1[k], v2[k]);
        let (r1, r2) = (2 * k, 2 * k + 1);
        let couple = -2.0 * w * lambda * a * b;
        j.set(r1, r1 - 2, 1.0 / hm);
        j.set(r1, r1 + 2, 1.0 / hp);
        j.set(r1, r1, -1.0 / hm - 1.0 / hp - w * (3.0 * a * a - 1.0 + lambda * b * b));
        j.set(r1, r2, couple);
        j.set(r2, r2 - 2, 1.0 / hm);
        j.set(r2, r2 + 2, 1.0 / hp);
        j.set(r2, r2, -1.0 / hm - 1.0 / hp - w * (3.0 * b * b - 1.0 + lambda * a * a));
        j.set(r2, r1, couple);
    }
    j.set(2 * n - 2, 2 * n - 2, 1.0);
    j.set(2 * n - 1, 2 * n - 1, 1.0);
    j
}

/// Qualitative diagnostics of a computed solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    /// `v1` increasing and `v2` decreasing at all resolvable nodes.
    pub monotone: bool,
    /// Both components in `[0, 1]` (open where resolvable) and `v1^2 + v2^2 < 1`.
    pub bounded: bool,
    /// Whenever `v1' > 0` at every node, also `v2' < 0` at every node.
    pub half_monotone: bool,
    pub symmetric_dev: f64,
    pub pinning_dev: f64,
    /// Interpolated location of `v1 = v2`.
    pub crossing: f64,
    pub min_component: f64,
    /// Coefficient `b` of the fit `ln v2 = a + b sqrt(lambda) z^2` on the
    /// window `[lambda^{-1/4}, ln(lambda) lambda^{-1/4}]`.
    pub gaussian_coefficient: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct HeteroclinicSolution {
    pub lambda: f64,
    pub fields: FieldPair,
    pub newton_residual: f64,
    pub iterations: usize,
    pub hamiltonian_dev: f64,
    pub flags: Flags,
}

impl HeteroclinicSolution {
    pub fn grid(&self) -> &Grid {
        &self.fields.grid
    }

    pub fn half_width(&self) -> f64 {
        self.fields.grid.end()
    }

    /// Wraps a field pair that is known to solve the system, e.g. a closed form.
    pub fn from_fields(lambda: f64, fields: FieldPair) -> Result<HeteroclinicSolution> {
        check_lambda(lambda)?;
        let u = interleave(&fields.v1, &fields.v2);
        let residual = heteroclinic_residual(lambda, &fields.grid, &u).iter().fold(0.0, |m: f64, r| m.max(r.abs()));
        let mut sol = HeteroclinicSolution {
            lambda,
            fields,
            newton_residual: residual,
            iterations: 0,
            hamiltonian_dev: 0.0,
            flags: Flags {
                monotone: false,
                bounded: false,
                half_monotone: false,
                symmetric_dev: 0.0,
                pinning_dev: 0.0,
                crossing: 0.0,
                min_component: 0.0,
                gaussian_coefficient: None,
            },
        };
        sol.hamiltonian_dev = hamiltonian_along(&sol).1;
        sol.flags = qualitative_checks(&sol);
        Ok(sol)
    }
}

/// Newton solve on the default mesh for `(lambda, L, n)`; `init` is
/// resampled onto that mesh.
pub fn solve_heteroclinic(
    lambda: f64,
    half_width: f64,
    n: usize,
    init: &FieldPair,
    settings: &NewtonSettings,
) -> Result<HeteroclinicSolution> {
    check_lambda(lambda)?;
    if !(half_width >= MIN_HALF_WIDTH) {
        return invalid(format!("half-width must be at least {MIN_HALF_WIDTH}, got {half_width}"));
    }
    let grid = heteroclinic_grid(lambda, half_width, n)?;
    solve_heteroclinic_on(lambda, grid, init, settings)
}

/// Newton solve on a given mesh.
pub fn solve_heteroclinic_on(
    lambda: f64,
    grid: Grid,
    init: &FieldPair,
    settings: &NewtonSettings,
) -> Result<HeteroclinicSolution> {
    check_lambda(lambda)?;
    let seed = if init.grid == grid { init.clone() } else { init.resample(grid.clone()) };
    let floor = roundoff_floor(&seed.v1, &seed.v2);
    if seed.v1.iter().chain(&seed.v2).any(|v| !(*v >= -floor)) {
        return invalid("initial guess has a negative component");
    }
    let out = newton_solve(
        |u| heteroclinic_residual(lambda, &grid, u),
        |u| heteroclinic_jacobian(lambda, &grid, u),
        interleave(&seed.v1, &seed.v2),
        settings,
    )?;
    let (v1, v2) = split(&out.solution);
    let floor = roundoff_floor(&v1, &v2);
    for (name, v) in [("v1", &v1), ("v2", &v2)] {
        if let Some(k) = v.iter().position(|x| !(*x > -floor)) {
            return Err(LabError::SignViolation(format!("{name} = {} at z = {}", v[k], grid.nodes()[k])));
        }
    }
    let fields = FieldPair::new(grid, v1, v2)?;
    let mut sol = HeteroclinicSolution::from_fields(lambda, fields)?;
    sol.newton_residual = out.residual;
    sol.iterations = out.iterations;
    Ok(sol)
}

/// Hamiltonian at every node and its maximal deviation from `-1/4`.
pub fn hamiltonian_along(sol: &HeteroclinicSolution) -> (Vec<f64>, f64) {
    let f = &sol.fields;
    let values: Vec<f64> =
        (0..f.len()).map(|k| hamiltonian(sol.lambda, f.v1[k], f.v2[k], f.dv1[k], f.dv2[k])).collect();
    let dev = values.iter().fold(0.0, |m: f64, h| m.max((h - HAMILTONIAN_LEVEL).abs()));
    (values, dev)
}

pub fn hamiltonian(lambda: f64, v1: f64, v2: f64, d1: f64, d2: f64) -> f64 {
    let well = |v: f64| (1.0 - v * v).powi(2) / 4.0;
    0.5 * (d1 * d1 + d2 * d2) - well(v1) - well(v2) - 0.5 * lambda * v1 * v1 * v2 * v2
}

/// Distance to the nearer of the two limit values 0 and 1.
fn resolvable(v: f64, floor: f64) -> bool {
    v.abs().min((1.0 - v).abs()) > floor
}

pub fn qualitative_checks(sol: &HeteroclinicSolution) -> Flags {
    let f = &sol.fields;
    let (v1, v2) = (&f.v1, &f.v2);
    let z = f.grid.nodes();
    let n = z.len();
    let floor = roundoff_floor(v1, v2);

    // Strict where both cell ends are resolvable, non-decreasing within
    // roundoff elsewhere.
    let ordered = |v: &[f64], sign: f64| {
        v.windows(2).all(|w| {
            let step = sign * (w[1] - w[0]);
            if resolvable(w[0], floor) && resolvable(w[1], floor) {
                step > 0.0
            } else {
                step > -floor
            }
        })
    };
    let monotone = ordered(v1, 1.0) && ordered(v2, -1.0);

    let interior = 1..n - 1;
    let bounded = interior.clone().all(|k| {
        let in_range = |v: f64| {
            if resolvable(v, floor) {
                v > 0.0 && v < 1.0
            } else {
                v > -floor && v < 1.0 + floor
            }
        };
        let s = v1[k] * v1[k] + v2[k] * v2[k];
        let below = if resolvable(v1[k], floor) || resolvable(v2[k], floor) { s < 1.0 } else { s < 1.0 + floor };
        in_range(v1[k]) && in_range(v2[k]) && below
    });

    let d1_pos = f.dv1.iter().all(|d| *d > -floor);
    let d2_neg = f.dv2.iter().all(|d| *d < floor);
    let half_monotone = !d1_pos || d2_neg;

    let symmetric_dev = (0..n).map(|k| (v1[k] - v2[n - 1 - k]).abs()).fold(0.0, f64::max);

    let mirrored = z.first().map(|a| *a == -z[n - 1]).unwrap_or(false);
    let pinning_dev = if mirrored && n % 2 == 1 {
        (v1[n / 2] - v2[n / 2]).abs()
    } else {
        let (a, b) = f.value_at(0.0);
        (a - b).abs()
    };

    let crossing = (0..n - 1)
        .find(|&k| v1[k] <= v2[k] && v1[k + 1] > v2[k + 1])
        .map(|k| {
            let (d0, d1) = (v1[k] - v2[k], v1[k + 1] - v2[k + 1]);
            z[k] + (z[k + 1] - z[k]) * d0 / (d0 - d1)
        })
        .unwrap_or(f64::NAN);

    let min_component = v1[1..n - 1].iter().chain(&v2[1..n - 1]).fold(f64::INFINITY, |m, v| m.min(*v));

    Flags {
        monotone,
        bounded,
        half_monotone,
        symmetric_dev,
        pinning_dev,
        crossing,
        min_component,
        gaussian_coefficient: gaussian_fit(sol.lambda, z, v2, floor),
    }
}

fn gaussian_fit(lambda: f64, z: &[f64], v2: &[f64], floor: f64) -> Option<f64> {
    let scale = lambda.powf(-0.25);
    let (lo, hi) = (scale, lambda.ln() * scale);
    let pts: Vec<(f64, f64)> = z
        .iter()
        .zip(v2)
        .filter(|(zk, v)| **zk >= lo && **zk <= hi && **v > floor)
        .map(|(zk, v)| (lambda.sqrt() * zk * zk, v.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (x - mx), b + (x - mx) * (y - my)));
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Result of reducing the general two-parameter system to the canonical one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rescaling {
    pub valid: bool,
    pub canonical_lambda: f64,
    /// `(amplitude_1, length_1, amplitude_2, length_2)`.
    pub scaling: (f64, f64, f64, f64),
}

/// Reduction of `-nu v1'' + g1 v1^3 - lambda1 v1 + Lambda v2^2 v1 = 0` (and the
/// analogue for `v2` with `g2, lambda2`) to the canonical system. Compatibility
/// `lambda1^2/g1 = lambda2^2/g2` is reported, not enforced.
pub fn rescale_general(g1: f64, g2: f64, lambda1: f64, lambda2: f64, nu: f64, big_lambda: f64) -> Result<Rescaling> {
    let inputs = [g1, g2, lambda1, lambda2, nu, big_lambda];
    if inputs.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return invalid(format!("rescaling needs positive inputs, got {inputs:?}"));
    }
    let (c1, c2) = (lambda1 * lambda1 / g1, lambda2 * lambda2 / g2);
    let valid = (c1 - c2).abs() <= 1e-12 * c1.abs().max(c2.abs());
    Ok(Rescaling {
        valid,
        canonical_lambda: lambda2 * big_lambda / (lambda1 * g2),
        scaling: ((g1 / lambda1).sqrt(), (1.0 / lambda1).sqrt(), (g2 / lambda2).sqrt(), (nu / lambda2).sqrt()),
    })
}
