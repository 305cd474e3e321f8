//! Composite inner/outer approximation of the heteroclinic for large coupling.
//!
//! Outside `|z| <= m`, `m = ln(lambda) lambda^{-1/4}`, each component is a
//! shifted tanh front `U1(z + xi)`, `U2(z - xi)` with `xi = kappa lambda^{-1/4} / psi0`
//! (or `xi = 0` for the leading variant); on the other side of the core it is
//! zero. Inside, it is the stretched blow-up pair `lambda^{-1/4} V_i(lambda^{1/4} z)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::heteroclinic::{inner_layer_width, FieldPair, HeteroclinicSolution};
use crate::numerics::fit::{fit_loglog, OrderFit};
use crate::numerics::grid::Grid;
use crate::profiles::{tanh_profile, tanh_profile_derivative, BlowupProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Leading,
    Shifted,
}

impl std::str::FromStr for Variant {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "leading" => Ok(Variant::Leading),
            "shifted" => Ok(Variant::Shifted),
            other => invalid(format!("unknown variant {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompositeApproximation {
    pub lambda: f64,
    pub xi: f64,
    pub match_point: f64,
    pub variant: Variant,
    /// Interface location; the pieces are laid out around it.
    pub center: f64,
    blowup: BlowupProfile,
    stretch: f64,
}

/// Which piece of the composite covers a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Left,
    Inner,
    Right,
}

pub fn build_composite(lambda: f64, blowup: &BlowupProfile, variant: Variant) -> Result<CompositeApproximation> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return invalid(format!("coupling must exceed 1, got {lambda}"));
    }
    let stretch = lambda.powf(0.25);
    let match_point = inner_layer_width(lambda);
    let reach = match_point * stretch;
    let (lo, hi) = (blowup.grid.start(), blowup.grid.end());
    if -reach < lo || reach > hi {
        return Err(LabError::OutOfRange { coordinate: reach, lo, hi });
    }
    let xi = match variant {
        Variant::Leading => 0.0,
        Variant::Shifted => blowup.kappa / (blowup.psi0 * stretch),
    };
    Ok(CompositeApproximation { lambda, xi, match_point, variant, center: 0.0, blowup: blowup.clone(), stretch })
}

impl CompositeApproximation {
    pub fn translated(&self, shift: f64) -> CompositeApproximation {
        CompositeApproximation { center: self.center + shift, ..self.clone() }
    }

    pub fn region(&self, z: f64) -> Region {
        let s = z - self.center;
        if s < -self.match_point {
            Region::Left
        } else if s > self.match_point {
            Region::Right
        } else {
            Region::Inner
        }
    }

    /// Outer pieces `(U1(s + xi), U2(s - xi))`, each zero on the far side.
    pub fn outer(&self, z: f64) -> (f64, f64) {
        let s = z - self.center;
        let a = if s >= 0.0 { tanh_profile(s + self.xi) } else { 0.0 };
        let b = if s <= 0.0 { tanh_profile(-(s - self.xi)) } else { 0.0 };
        (a, b)
    }

    pub fn outer_derivative(&self, z: f64) -> (f64, f64) {
        let s = z - self.center;
        let a = if s >= 0.0 { tanh_profile_derivative(s + self.xi) } else { 0.0 };
        let b = if s <= 0.0 { -tanh_profile_derivative(-(s - self.xi)) } else { 0.0 };
        (a, b)
    }

    fn stretched(&self, z: f64) -> Result<f64> {
        let x = (z - self.center) * self.stretch;
        let (lo, hi) = (self.blowup.grid.start(), self.blowup.grid.end());
        if x < lo || x > hi {
            return Err(LabError::OutOfRange { coordinate: x, lo, hi });
        }
        Ok(x)
    }

    /// `lambda^{-1/4} V_i(lambda^{1/4} s)`.
    pub fn inner(&self, z: f64) -> Result<(f64, f64)> {
        let p = self.blowup.sample(self.stretched(z)?)?;
        Ok((p.v1 / self.stretch, p.v2 / self.stretch))
    }

    /// `V_i'(lambda^{1/4} s)`.
    pub fn inner_derivative(&self, z: f64) -> Result<(f64, f64)> {
        let p = self.blowup.sample(self.stretched(z)?)?;
        Ok((p.dv1, p.dv2))
    }

    pub fn value(&self, z: f64) -> Result<(f64, f64)> {
        match self.region(z) {
            Region::Inner => self.inner(z),
            _ => Ok(self.outer(z)),
        }
    }

    pub fn derivative(&self, z: f64) -> Result<(f64, f64)> {
        match self.region(z) {
            Region::Inner => self.inner_derivative(z),
            _ => Ok(self.outer_derivative(z)),
        }
    }

    /// Largest difference between the inner and outer pieces at `center +- m`.
    pub fn jump(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in [-self.match_point, self.match_point] {
            let z = self.center + s;
            let (a, b) = self.inner(z)?;
            let (c, d) = self.outer(z);
            worst = worst.max((a - c).abs()).max((b - d).abs());
        }
        Ok(worst)
    }

    /// The composite sampled on a mesh, with mesh-stencil derivatives.
    pub fn sample(&self, grid: Grid) -> Result<FieldPair> {
        let pairs = grid.nodes().iter().map(|&z| self.value(z)).collect::<Result<Vec<_>>>()?;
        let (v1, v2) = pairs.into_iter().unzip();
        FieldPair::new(grid, v1, v2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub lambda: f64,
    pub variant: Variant,
    pub c_weight: f64,
    /// `sup |v_i - U_i| e^{c|s|}` over `m <= (-1)^{i+1} s <= L/2`.
    pub outer_sup_weighted: f64,
    /// `sup |v_i' - U_i'| e^{c|s|} / (|s| + lambda^{-1/4})` on the same window.
    pub outer_deriv: f64,
    /// `sup |v_i - inner_i|` over `|s| <= m`.
    pub inner_sup: f64,
    /// The same over `|s| <= lambda^{-1/4}`.
    pub inner_sub_sup: f64,
    /// `sup |v_i' - V_i'|` over `|s| <= m`.
    pub inner_deriv: f64,
    pub jump: f64,
    /// Upper end of the outer window, `L/2`.
    pub outer_limit: f64,
}

/// Region-wise deviations of `sol` from `approx` at the nodes of `sol`.
///
/// The outer window stops at `L/2`: beyond it the weight `e^{c|s|}` amplifies
/// the exponentially small effect of truncating the domain.
pub fn measure_errors(
    sol: &HeteroclinicSolution,
    approx: &CompositeApproximation,
    c_weight: f64,
) -> Result<ErrorReport> {
    if (sol.lambda - approx.lambda).abs() > 1e-12 * sol.lambda {
        return Err(LabError::LambdaMismatch(sol.lambda, approx.lambda));
    }
    if !(c_weight >= 0.0 && c_weight.is_finite()) {
        return invalid(format!("weight exponent must be nonnegative, got {c_weight}"));
    }
    let f = &sol.fields;
    let z = f.grid.nodes();
    let m = approx.match_point;
    let sub = approx.lambda.powf(-0.25);
    let outer_limit = 0.25 * (f.grid.end() - f.grid.start());
    let mut rep = ErrorReport {
        lambda: sol.lambda,
        variant: approx.variant,
        c_weight,
        outer_sup_weighted: 0.0,
        outer_deriv: 0.0,
        inner_sup: 0.0,
        inner_sub_sup: 0.0,
        inner_deriv: 0.0,
        jump: approx.jump()?,
        outer_limit,
    };
    for k in 0..z.len() {
        let s = z[k] - approx.center;
        let (v1, v2, d1, d2) = (f.v1[k], f.v2[k], f.dv1[k], f.dv2[k]);
        if s.abs() <= m {
            let (a, b) = approx.inner(z[k])?;
            let (da, db) = approx.inner_derivative(z[k])?;
            let e = (v1 - a).abs().max((v2 - b).abs());
            rep.inner_sup = rep.inner_sup.max(e);
            if s.abs() <= sub {
                rep.inner_sub_sup = rep.inner_sub_sup.max(e);
            }
            rep.inner_deriv = rep.inner_deriv.max((d1 - da).abs().max((d2 - db).abs()));
        } else if s.abs() <= outer_limit {
            let (a, b) = approx.outer(z[k]);
            let (da, db) = approx.outer_derivative(z[k]);
            // Only the component whose front lives on this side is compared.
            let (e, de) = if s > 0.0 { ((v1 - a).abs(), (d1 - da).abs()) } else { ((v2 - b).abs(), (d2 - db).abs()) };
            let w = (c_weight * s.abs()).exp();
            rep.outer_sup_weighted = rep.outer_sup_weighted.max(e * w);
            rep.outer_deriv = rep.outer_deriv.max(de * w / (s.abs() + sub));
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorOrders {
    pub outer_order: OrderFit,
    pub outer_deriv_order: OrderFit,
    pub inner_order: OrderFit,
    pub jump_order: OrderFit,
}

/// Log-log slopes of the error measures against `lambda`; needs at least
/// four couplings spanning three decades.
pub fn fit_error_orders(reports: &[ErrorReport]) -> Result<ErrorOrders> {
    if reports.len() < 4 {
        return invalid(format!("order fits need at least 4 couplings, got {}", reports.len()));
    }
    let (lo, hi) = reports.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), r| (a.min(r.lambda), b.max(r.lambda)));
    if (hi / lo).log10() < 3.0 - 1e-9 {
        return invalid(format!("sweep spans {:.2} decades, need 3", (hi / lo).log10()));
    }
    let fit =
        |get: fn(&ErrorReport) -> f64| fit_loglog(&reports.iter().map(|r| (r.lambda, get(r))).collect::<Vec<_>>());
    Ok(ErrorOrders {
        outer_order: fit(|r| r.outer_sup_weighted)?,
        outer_deriv_order: fit(|r| r.outer_deriv)?,
        inner_order: fit(|r| r.inner_sub_sup)?,
        jump_order: fit(|r| r.jump)?,
    })
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Shift `xi` minimizing `sup_{z >= m} |v1(z) - U1(z + xi)|` over
/// `[0, 4 kappa lambda^{-1/4} / psi0]`, by golden-section search.
pub fn shift_estimate(sol: &HeteroclinicSolution, kappa: f64, psi0: f64) -> Result<f64> {
    shift_estimate_fields(sol.lambda, &sol.fields, kappa, psi0)
}

pub fn shift_estimate_fields(lambda: f64, fields: &FieldPair, kappa: f64, psi0: f64) -> Result<f64> {
    if !(kappa > 0.0 && psi0 > 0.0 && lambda > 1.0) {
        return invalid(format!("shift search needs kappa, psi0 > 0 and lambda > 1, got ({kappa}, {psi0}, {lambda})"));
    }
    let m = inner_layer_width(lambda);
    let pts: Vec<(f64, f64)> =
        fields.grid.nodes().iter().zip(&fields.v1).filter(|(z, _)| **z >= m).map(|(z, v)| (*z, *v)).collect();
    if pts.is_empty() {
        return invalid("no nodes beyond the match point");
    }
    let cost = |xi: f64| pts.iter().fold(0.0_f64, |acc, (z, v)| acc.max((v - tanh_profile(z + xi)).abs()));
    let hi_edge = 4.0 * kappa / (psi0 * lambda.powf(0.25));
    let (mut a, mut b) = (0.0, hi_edge);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    while b - a > 1e-12 * hi_edge {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = cost(d);
        }
    }
    let xi = 0.5 * (a + b);
    if xi < 1e-6 * hi_edge || xi > (1.0 - 1e-6) * hi_edge {
        return Err(LabError::BracketEdge(xi));
    }
    Ok(xi)
}
