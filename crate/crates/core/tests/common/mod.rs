//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

pub const PSI0: f64 = FRAC_1_SQRT_2;

fn rhs(y: [f64; 4]) -> [f64; 4] {
    [y[2], y[3], y[1] * y[1] * y[0], y[0] * y[0] * y[1]]
}

fn rk4(y: [f64; 4], h: f64) -> [f64; 4] {
    let add = |a: [f64; 4], b: [f64; 4], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]];
    let k1 = rhs(y);
    let k2 = rhs(add(y, k1, h / 2.0));
    let k3 = rhs(add(y, k2, h / 2.0));
    let k4 = rhs(add(y, k3, h));
    let mut out = y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates the symmetric blow-up orbit from `V1(0) = V2(0) = a` with the
/// first integral fixed at `PSI0^2`. Returns -1 if `V2` crosses zero, +1 if
/// `V2` turns upward, 0 otherwise, with the state at the stopping point.
fn shoot(a: f64, x_max: f64, h: f64) -> (i32, [f64; 4]) {
    let s = ((PSI0 * PSI0 + a.powi(4)) / 2.0).sqrt();
    let mut y = [a, a, s, -s];
    for _ in 0..(x_max / h).round() as usize {
        y = rk4(y, h);
        if y[1] < 0.0 {
            return (-1, y);
        }
        if y[3] > 0.0 {
            return (1, y);
        }
    }
    (0, y)
}

/// `(V1(0), kappa)` by bisection on the symmetric shooting problem; kappa is
/// the intercept of the tangent of `V1` at `x = 6`.
pub fn shooting_kappa() -> (f64, f64) {
    let h = 1e-3;
    let (mut lo, mut hi) = (0.1, 2.0);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if shoot(m, 8.0, h).0 == -1 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let a = 0.5 * (lo + hi);
    let x = 6.0;
    let (_, y) = shoot(a, x, h);
    (a, y[0] - x * y[2])
}

/// `int V1' (V1' - psi0)` over the line from the shooting orbit, folding the
/// negative half-line onto the positive one by mirror symmetry.
pub fn shooting_energy_coefficient() -> f64 {
    let (a, _) = shooting_kappa();
    let h = 1e-3;
    let s = ((PSI0 * PSI0 + a.powi(4)) / 2.0).sqrt();
    let mut y = [a, a, s, -s];
    let density = |y: [f64; 4]| y[2] * (y[2] - PSI0) + y[3] * (y[3] + PSI0);
    let mut total = 0.5 * h * density(y);
    let steps = 6000;
    for k in 1..=steps {
        y = rk4(y, h);
        let w = if k == steps { 0.5 } else { 1.0 };
        total += w * h * density(y);
    }
    total
}
