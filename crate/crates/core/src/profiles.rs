//! Outer tanh profiles and the blow-up profile of the interface core.
//!
//! The blow-up pair solves `V1'' = V2^2 V1`, `V2'' = V1^2 V2` on `[-X, X]`
//! with `V1(-X) = 0`, `V2'(-X) = -psi0`, `V1'(X) = psi0`, `V2(X) = 0`. The
//! slope conditions fix the scaling and the two zeros fix the translation,
//! so mirror symmetry `V1(-x) = V2(x)` is a check rather than a constraint.
//!
//! Equations are assembled in flux form: node `k` carries
//! `(f_{k+1}-f_k)/h_+ - (f_k-f_{k-1})/h_- - w_k * source`, with `w_k` the
//! control-volume length, which keeps roundoff in the residual near `eps/h`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{invalid, LabError, Result};
use crate::numerics::banded::BandedMatrix;
use crate::numerics::fd::{derivative, flux_difference};
use crate::numerics::grid::{make_grid, Grading, Grid};
use crate::numerics::interp::cubic_at;
use crate::numerics::newton::{newton_solve, NewtonSettings};

/// Interface slope `U1'(0)`.
pub const PSI0: f64 = FRAC_1_SQRT_2;

pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
pub const DEFAULT_NODES: usize = 4097;
pub const MIN_HALF_WIDTH: f64 = 10.0;
pub const MIN_NODES: usize = 513;
/// Sinh-grading width of the blow-up mesh.
pub const CORE_WIDTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `U1`, defined on `z >= 0`, vanishing at 0 and tending to 1 at `+inf`.
    First,
    /// `U2(z) = U1(-z)`, defined on `z <= 0`.
    Second,
}

impl Branch {
    fn check(self, z: f64) -> Result<()> {
        let ok = match self {
            Branch::First => z >= 0.0,
            Branch::Second => z <= 0.0,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("z = {z} outside the half-line of {self:?}"))
        }
    }
}

/// `tanh(z / sqrt 2)`, the saturating solution of `u'' + u - u^3 = 0`.
#[inline]
pub fn tanh_profile(s: f64) -> f64 {
    (s / SQRT_2).tanh()
}

#[inline]
pub fn tanh_profile_derivative(s: f64) -> f64 {
    let c = (s / SQRT_2).cosh();
    1.0 / (SQRT_2 * c * c)
}

pub fn outer_value(branch: Branch, z: f64) -> Result<f64> {
    branch.check(z)?;
    Ok(match branch {
        Branch::First => tanh_profile(z),
        Branch::Second => tanh_profile(-z),
    })
}

pub fn outer_derivative(branch: Branch, z: f64) -> Result<f64> {
    branch.check(z)?;
    Ok(match branch {
        Branch::First => tanh_profile_derivative(z),
        Branch::Second => -tanh_profile_derivative(-z),
    })
}

#[derive(Debug, Clone)]
pub struct BlowupProfile {
    pub grid: Grid,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub dv1: Vec<f64>,
    pub dv2: Vec<f64>,
    /// Far-field slope of `V1`; equals [`PSI0`] for the normalized profile.
    pub psi0: f64,
    pub kappa: f64,
    pub half_width: f64,
    pub residual: f64,
    pub iterations: usize,
    /// `max_k |V1'^2 + V2'^2 - V1^2 V2^2 - psi0^2|`.
    pub hamiltonian_dev: f64,
}

/// Smooth positive ramp with slope `psi0` at `+inf` and 0 at `-inf`.
pub fn blowup_seed(x: f64) -> f64 {
    0.5 * PSI0 * (x + (x * x + 1.0).sqrt())
}

pub fn blowup_residual(grid: &Grid, u: &[f64]) -> Vec<f64> {
    let x = grid.nodes();
    let n = x.len();
    let (v1, v2) = split(u);
    let mut r = vec![0.0; 2 * n];
    r[0] = v1[0];
    let h0 = x[1] - x[0];
    r[1] = (v2[1] - v2[0]) / h0 + PSI0 - 0.5 * h0 * v1[0] * v1[0] * v2[0];
    for k in 1..n - 1 {
        let w = 0.5 * (x[k + 1] - x[k - 1]);
        r[2 * k] = flux_difference(x, &v1, k) - w * v2[k] * v2[k] * v1[k];
        r[2 * k + 1] = flux_difference(x, &v2, k) - w * v1[k] * v1[k] * v2[k];
    }
    let m = n - 1;
    let hm = x[m] - x[m - 1];
    r[2 * m] = PSI0 - (v1[m] - v1[m - 1]) / hm - 0.5 * hm * v2[m] * v2[m] * v1[m];
    r[2 * m + 1] = v2[m];
    r
}

pub fn blowup_jacobian(grid: &Grid, u: &[f64]) -> BandedMatrix {
    let x = grid.nodes();
    let n = x.len();
    let (v1, v2) = split(u);
    let mut j = BandedMatrix::zeros(2 * n, 2, 2).expect("valid shape");
    j.set(0, 0, 1.0);
    let h0 = x[1] - x[0];
    j.set(1, 1, -1.0 / h0 - 0.5 * h0 * v1[0] * v1[0]);
    j.set(1, 3, 1.0 / h0);
    j.set(1, 0, -h0 * v1[0] * v2[0]);
    for k in 1..n - 1 {
        let (hm, hp) = (x[k] - x[k - 1], x[k + 1] - x[k]);
        let w = 0.5 * (hm + hp);
        let (a, b) = (2 * k, 2 * k + 1);
        j.set(a, a - 2, 1.0 / hm);
        j.set(a, a + 2, 1.0 / hp);
        j.set(a, a, -1.0 / hm - 1.0 / hp - w * v2[k] * v2[k]);
        j.set(a, b, -2.0 * w * v2[k] * v1[k]);
        j.set(b, b - 2, 1.0 / hm);
        j.set(b, b + 2, 1.0 / hp);
        j.set(b, b, -1.0 / hm - 1.0 / hp - w * v1[k] * v1[k]);
        j.set(b, a, -2.0 * w * v1[k] * v2[k]);
    }
    let m = n - 1;
    let hm = x[m] - x[m - 1];
    let (a, b) = (2 * m, 2 * m + 1);
    j.set(a, a, -1.0 / hm - 0.5 * hm * v2[m] * v2[m]);
    j.set(a, a - 2, 1.0 / hm);
    j.set(a, b, -hm * v2[m] * v1[m]);
    j.set(b, b, 1.0);
    j
}

/// Magnitude below which a computed component is indistinguishable from zero.
pub fn roundoff_floor(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0_f64, |m, v| m.max(v.abs()));
    64.0 * f64::EPSILON * scale.max(1.0)
}

pub(crate) fn split(u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (u.iter().step_by(2).copied().collect(), u.iter().skip(1).step_by(2).copied().collect())
}

pub(crate) fn interleave(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).flat_map(|(x, y)| [*x, *y]).collect()
}

pub fn blowup_grid(half_width: f64, n: usize) -> Result<Grid> {
    make_grid(-half_width, half_width, n, Grading::Graded { center: 0.0, width: CORE_WIDTH })
}

pub fn solve_blowup(half_width: f64, n: usize, settings: &NewtonSettings) -> Result<BlowupProfile> {
    if !(half_width >= MIN_HALF_WIDTH) {
        return invalid(format!("blow-up half-width must be at least {MIN_HALF_WIDTH}, got {half_width}"));
    }
    if n < MIN_NODES {
        return invalid(format!("blow-up mesh needs at least {MIN_NODES} nodes, got {n}"));
    }
    let grid = blowup_grid(half_width, n)?;
    let seed1: Vec<f64> = grid.nodes().iter().map(|&x| blowup_seed(x)).collect();
    let seed2: Vec<f64> = grid.nodes().iter().map(|&x| blowup_seed(-x)).collect();
    solve_blowup_on(grid, interleave(&seed1, &seed2), settings)
}

/// Newton solve of the blow-up system on a given mesh from a given
/// interleaved seed `[V1_0, V2_0, V1_1, ...]`.
pub fn solve_blowup_on(grid: Grid, seed: Vec<f64>, settings: &NewtonSettings) -> Result<BlowupProfile> {
    if seed.len() != 2 * grid.len() {
        return Err(LabError::LengthMismatch { expected: 2 * grid.len(), got: seed.len() });
    }
    let out = newton_solve(|u| blowup_residual(&grid, u), |u| blowup_jacobian(&grid, u), seed, settings)?;
    let (v1, v2) = split(&out.solution);
    let n = grid.len();
    // The decaying tails underflow to roundoff, so only values below the
    // roundoff floor count as sign violations.
    let floor = -roundoff_floor(&v1, &v2);
    if let Some(k) = (1..n).find(|&k| !(v1[k] > floor)) {
        return Err(LabError::SignViolation(format!("V1 = {} at node {k}", v1[k])));
    }
    if let Some(k) = (0..n - 1).find(|&k| !(v2[k] > floor)) {
        return Err(LabError::SignViolation(format!("V2 = {} at node {k}", v2[k])));
    }
    let mut dv1 = derivative(&grid, &v1);
    let mut dv2 = derivative(&grid, &v2);
    dv2[0] = -PSI0;
    dv1[n - 1] = PSI0;
    let half_width = grid.end();
    let mut profile = BlowupProfile {
        grid,
        v1,
        v2,
        dv1,
        dv2,
        psi0: PSI0,
        kappa: f64::NAN,
        half_width,
        residual: out.residual,
        iterations: out.iterations,
        hamiltonian_dev: 0.0,
    };
    profile.hamiltonian_dev = profile.hamiltonian_values().iter().fold(0.0, |m, h| m.max((h - PSI0 * PSI0).abs()));
    profile.kappa = extract_kappa(&profile)?;
    Ok(profile)
}

/// Far-field offset `V1(x) - psi0 x`, averaged over the estimates at `X` and `0.9 X`.
pub fn extract_kappa(profile: &BlowupProfile) -> Result<f64> {
    let x_end = profile.grid.end();
    let x_in = 0.9 * x_end;
    let at_end = profile.v1[profile.v1.len() - 1] - profile.psi0 * x_end;
    let inner = cubic_at(&profile.grid, &profile.v1, x_in)? - profile.psi0 * x_in;
    let gap = (at_end - inner).abs();
    if gap > 1e-8 {
        return Err(LabError::FarFieldDisagreement(gap));
    }
    Ok(0.5 * (at_end + inner))
}

/// The member `(mu V1(mu (x - h)), mu V2(mu (x - h)))` of the scaling family,
/// sampled on the image `x_k = h + y_k / mu` of the source mesh.
pub fn rescale_blowup(profile: &BlowupProfile, mu: f64, h: f64) -> Result<BlowupProfile> {
    if !(mu > 0.0 && mu.is_finite() && h.is_finite()) {
        return invalid(format!("rescaling needs mu > 0 and finite h, got ({mu}, {h})"));
    }
    let src = &profile.grid;
    let grading = match src.grading() {
        Grading::Uniform => Grading::Uniform,
        Grading::Graded { center, width } => Grading::Graded { center: h + center / mu, width: width / mu },
    };
    // Images of the source nodes, kept exactly.
    let grid = Grid::from_mapped_nodes(src.nodes().iter().map(|y| h + y / mu).collect(), grading);
    let scale_all = |v: &[f64], s: f64| v.iter().map(|x| s * x).collect::<Vec<_>>();
    let slope = profile.psi0 * mu * mu;
    let mut out = BlowupProfile {
        grid,
        v1: scale_all(&profile.v1, mu),
        v2: scale_all(&profile.v2, mu),
        dv1: scale_all(&profile.dv1, mu * mu),
        dv2: scale_all(&profile.dv2, mu * mu),
        psi0: slope,
        kappa: mu * profile.kappa - slope * h,
        half_width: profile.half_width / mu,
        residual: profile.residual,
        iterations: profile.iterations,
        hamiltonian_dev: 0.0,
    };
    out.hamiltonian_dev = out.hamiltonian_values().iter().fold(0.0, |m, v| m.max((v - slope * slope).abs()));
    Ok(out)
}

/// Interpolated `(V1, V2, V1', V2')` at `x`.
#[derive(Debug, Clone, Copy)]
pub struct BlowupSample {
    pub v1: f64,
    pub v2: f64,
    pub dv1: f64,
    pub dv2: f64,
}

impl BlowupProfile {
    pub fn hamiltonian_values(&self) -> Vec<f64> {
        (0..self.v1.len())
            .map(|k| self.dv1[k] * self.dv1[k] + self.dv2[k] * self.dv2[k] - (self.v1[k] * self.v2[k]).powi(2))
            .collect()
    }

    pub fn sample(&self, x: f64) -> Result<BlowupSample> {
        Ok(BlowupSample {
            v1: cubic_at(&self.grid, &self.v1, x)?,
            v2: cubic_at(&self.grid, &self.v2, x)?,
            dv1: cubic_at(&self.grid, &self.dv1, x)?,
            dv2: cubic_at(&self.grid, &self.dv2, x)?,
        })
    }

    /// Max over nodes of `|V1(x) - V2(-x)|` relative to `1 + |x|`.
    pub fn mirror_deviation(&self) -> f64 {
        let n = self.v1.len();
        let x = self.grid.nodes();
        (0..n).map(|k| (self.v1[k] - self.v2[n - 1 - k]).abs() / (1.0 + x[k].abs())).fold(0.0, f64::max)
    }

    /// Max over interior nodes of the three-point residual of the ODE system.
    pub fn continuum_residual(&self) -> f64 {
        let x = self.grid.nodes();
        (1..x.len() - 1)
            .map(|k| {
                let w = 0.5 * (x[k + 1] - x[k - 1]);
                let r1 = flux_difference(x, &self.v1, k) / w - self.v2[k] * self.v2[k] * self.v1[k];
                let r2 = flux_difference(x, &self.v2, k) / w - self.v1[k] * self.v1[k] * self.v2[k];
                r1.abs().max(r2.abs())
            })
            .fold(0.0, f64::max)
    }
}
