//! Text renderings of profiles and sweeps: CSV with `#` metadata lines and
//! full-precision numbers, and pretty JSON.

use std::fmt::Write;

use serde::Serialize;

use crate::heteroclinic::FieldPair;
use crate::profiles::BlowupProfile;
use crate::sweep::Sweep;

/// CSV text. Metadata lines come first as `# key = value`.
pub fn csv(meta: &[(&str, String)], columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
    let _ = writeln!(out, "{}", columns.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn fields_csv(meta: &[(&str, String)], fields: &FieldPair) -> String {
    let rows: Vec<Vec<f64>> = (0..fields.len())
        .map(|k| vec![fields.grid.nodes()[k], fields.v1[k], fields.v2[k], fields.dv1[k], fields.dv2[k]])
        .collect();
    csv(meta, &["z", "v1", "v2", "dv1", "dv2"], &rows)
}

pub fn blowup_csv(profile: &BlowupProfile) -> String {
    let meta = [
        ("psi0", format!("{:.16e}", profile.psi0)),
        ("kappa", format!("{:.16e}", profile.kappa)),
        ("X", format!("{}", profile.half_width)),
        ("n", format!("{}", profile.grid.len())),
        ("newton_residual", format!("{:e}", profile.residual)),
        ("hamiltonian_dev", format!("{:e}", profile.hamiltonian_dev)),
    ];
    let rows: Vec<Vec<f64>> = (0..profile.grid.len())
        .map(|k| vec![profile.grid.nodes()[k], profile.v1[k], profile.v2[k], profile.dv1[k], profile.dv2[k]])
        .collect();
    csv(&meta, &["x", "V1", "V2", "dV1", "dV2"], &rows)
}

/// One row per sweep point.
pub fn sweep_csv(sweep: &Sweep) -> String {
    let meta = [
        ("kappa", format!("{:.16e}", sweep.blowup.kappa)),
        ("psi0", format!("{:.16e}", sweep.blowup.psi0)),
        ("blowup_X", format!("{}", sweep.blowup.half_width)),
        ("blowup_n", format!("{}", sweep.blowup.n)),
        ("i1", format!("{:.16e}", sweep.blowup.i1)),
        ("halvings", format!("{}", sweep.halvings)),
    ];
    let columns = [
        "lambda",
        "n",
        "L",
        "newton_residual",
        "hamiltonian_dev",
        "v1_at_0",
        "outer_err",
        "outer_deriv_err",
        "inner_err",
        "inner_sub_err",
        "jump",
        "outer_err_leading",
        "shift",
        "lambda1",
        "lambda2",
        "alignment",
        "sigma_gradient",
        "sigma_full",
        "sigma_residual",
        "coefficient_ratio",
    ];
    let rows: Vec<Vec<f64>> = sweep
        .points
        .iter()
        .map(|p| {
            vec![
                p.lambda,
                p.n as f64,
                p.half_width,
                p.summary.newton_residual,
                p.summary.hamiltonian_dev,
                p.summary.crossing_value,
                p.errors.outer_sup_weighted,
                p.errors.outer_deriv,
                p.errors.inner_sup,
                p.errors.inner_sub_sup,
                p.errors.jump,
                p.errors_leading.outer_sup_weighted,
                p.shift_estimate.unwrap_or(f64::NAN),
                p.spectrum.lambda1,
                p.spectrum.lambda2,
                p.spectrum.alignment,
                p.energy.sigma_gradient,
                p.energy.sigma_full,
                p.energy.residual,
                p.energy.coefficient_ratio,
            ]
        })
        .collect();
    csv(&meta, &columns, &rows)
}

/// Pretty JSON with a trailing newline. Non-finite floats become `null`.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}"));
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_values() {
        let text = csv(&[("a", "1".into())], &["x", "y"], &[vec![0.1, -2.5e-300]]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# a = 1"));
        assert_eq!(lines.next(), Some("x,y"));
        let vals: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(vals, vec![0.1, -2.5e-300]);
    }
}
