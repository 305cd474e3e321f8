//! Coupling sweeps: solve the branch at a list of couplings, analyse every
//! solution against the composite approximation, the linearized spectrum
//! and the tension expansion, and grade the results against fixed bands.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{build_composite, measure_errors, shift_estimate, ErrorReport, Variant};
use crate::continuation::{continue_in_lambda, ContinuationPolicy, Summary, TraceEntry};
use crate::energy::{blowup_energy_coefficient, expansion_residual, EnergyReport};
use crate::error::{invalid, Result};
use crate::heteroclinic::{
    explicit_lambda3, heteroclinic_grid, solve_heteroclinic_on, FieldPair, Flags, HeteroclinicSolution,
};
use crate::numerics::eigen::EigenSettings;
use crate::numerics::fit::fit_loglog;
use crate::parallel::{par_map, Execution};
use crate::profiles::{self, solve_blowup, BlowupProfile};
use crate::spectrum::{nondegeneracy_report, SpectrumReport, DEFAULT_EIGENPAIRS};

/// Couplings at or above this value enter the order fits.
pub const ASYMPTOTIC_FLOOR: f64 = 100.0;
/// Coupling of the closed-form starting solution.
pub const SEED_LAMBDA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seeding {
    /// One ordered continuation from the closed-form solution.
    Continuation,
    /// Every coupling solved independently from the sampled composite.
    Composite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    /// Blow-up half-width; `max(12, ln(max lambda) + 2)` when `None`.
    pub blowup_half_width: Option<f64>,
    pub blowup_nodes: Option<usize>,
    pub policy: ContinuationPolicy,
    pub c_weight: f64,
    pub eigenpairs: usize,
    pub eigen: EigenSettings,
    pub seeding: Seeding,
    pub execution: Execution,
}

impl SweepConfig {
    pub fn new(lambdas: Vec<f64>) -> SweepConfig {
        SweepConfig {
            lambdas,
            blowup_half_width: None,
            blowup_nodes: None,
            policy: ContinuationPolicy::default(),
            c_weight: 1.0,
            eigenpairs: DEFAULT_EIGENPAIRS,
            eigen: EigenSettings::default(),
            seeding: Seeding::Continuation,
            execution: Execution::default(),
        }
    }

    /// At least four distinct couplings above 1 spanning three decades.
    pub fn validate(&self) -> Result<()> {
        let l = &self.lambdas;
        if l.len() < 4 {
            return invalid(format!("a sweep needs at least 4 couplings, got {}", l.len()));
        }
        if l.iter().any(|v| !(*v > 1.0 && v.is_finite())) {
            return invalid("sweep couplings must exceed 1");
        }
        if l.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("sweep couplings must be strictly increasing");
        }
        let decades = (l[l.len() - 1] / l[0]).log10();
        if decades < 3.0 - 1e-9 {
            return invalid(format!("sweep spans {decades:.2} decades, need at least 3"));
        }
        self.policy.validate()
    }

    pub fn blowup_size(&self) -> (f64, usize) {
        let top = self.lambdas.iter().fold(1.0_f64, |m, v| m.max(*v));
        let x = self.blowup_half_width.unwrap_or_else(|| profiles::DEFAULT_HALF_WIDTH.max(top.ln() + 2.0));
        let n = self.blowup_nodes.unwrap_or_else(|| {
            let scaled = (profiles::DEFAULT_NODES - 1) as f64 * x / profiles::DEFAULT_HALF_WIDTH;
            (scaled / 2.0).ceil() as usize * 2 + 1
        });
        (x, n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupSummary {
    pub psi0: f64,
    pub kappa: f64,
    #[serde(rename = "X")]
    pub half_width: f64,
    pub n: usize,
    pub residual: f64,
    pub hamiltonian_dev: f64,
    pub mirror_dev: f64,
    pub i1: f64,
}

impl BlowupSummary {
    pub fn of(p: &BlowupProfile) -> BlowupSummary {
        BlowupSummary {
            psi0: p.psi0,
            kappa: p.kappa,
            half_width: p.half_width,
            n: p.grid.len(),
            residual: p.residual,
            hamiltonian_dev: p.hamiltonian_dev,
            mirror_dev: p.mirror_deviation(),
            i1: blowup_energy_coefficient(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub summary: Summary,
    pub flags: Flags,
    pub errors: ErrorReport,
    pub errors_leading: ErrorReport,
    pub shift_estimate: Option<f64>,
    pub spectrum: SpectrumReport,
    pub energy: EnergyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub config: SweepConfig,
    pub blowup: BlowupSummary,
    pub trace: Vec<TraceEntry>,
    pub halvings: usize,
    pub points: Vec<SweepPoint>,
}

/// Closed-form solution at the seed coupling, polished by Newton on the
/// policy's mesh.
pub fn seed_solution(policy: &ContinuationPolicy) -> Result<HeteroclinicSolution> {
    let (half_width, n) = policy.mesh_for(SEED_LAMBDA);
    let grid = heteroclinic_grid(SEED_LAMBDA, half_width, n)?;
    let init = FieldPair::from_fn(grid.clone(), explicit_lambda3);
    solve_heteroclinic_on(SEED_LAMBDA, grid, &init, &policy.newton)
}

/// Solutions at every coupling of `lambdas` (increasing), continued up and
/// down from the seed. Returns them in coupling order with the joint trace.
pub fn continue_to_all(
    lambdas: &[f64],
    policy: &ContinuationPolicy,
) -> Result<(Vec<HeteroclinicSolution>, Vec<TraceEntry>, usize)> {
    let start = seed_solution(policy)?;
    let below: Vec<f64> = lambdas.iter().copied().filter(|l| *l < SEED_LAMBDA).rev().collect();
    let above: Vec<f64> = lambdas.iter().copied().filter(|l| *l > SEED_LAMBDA).collect();
    let mut solutions = Vec::with_capacity(lambdas.len());
    let mut trace = Vec::new();
    let mut halvings = 0;
    if !below.is_empty() {
        let t = continue_in_lambda(&start, &below, policy)?;
        halvings += t.halvings();
        trace.extend(t.entries.into_iter().rev());
        solutions.extend(t.solutions.into_iter().rev());
    } else {
        trace.push(TraceEntry { lambda: start.lambda, summary: Summary::of(&start) });
    }
    if lambdas.contains(&SEED_LAMBDA) {
        solutions.push(start.clone());
    }
    if !above.is_empty() {
        let t = continue_in_lambda(&start, &above, policy)?;
        halvings += t.halvings();
        trace.extend(t.entries.into_iter().skip(1));
        solutions.extend(t.solutions);
    }
    Ok((solutions, trace, halvings))
}

/// Solves at `lambda` from the sampled shifted composite.
pub fn solve_from_composite(
    lambda: f64,
    blowup: &BlowupProfile,
    policy: &ContinuationPolicy,
) -> Result<HeteroclinicSolution> {
    let composite = build_composite(lambda, blowup, Variant::Shifted)?;
    let (half_width, n) = policy.mesh_for(lambda);
    let grid = heteroclinic_grid(lambda, half_width, n)?;
    let seed = composite.sample(grid.clone())?;
    solve_heteroclinic_on(lambda, grid, &seed, &policy.newton)
}

pub fn analyze_point(sol: &HeteroclinicSolution, blowup: &BlowupProfile, cfg: &SweepConfig) -> Result<SweepPoint> {
    let shifted = build_composite(sol.lambda, blowup, Variant::Shifted)?;
    let leading = build_composite(sol.lambda, blowup, Variant::Leading)?;
    Ok(SweepPoint {
        lambda: sol.lambda,
        n: sol.fields.len(),
        half_width: sol.half_width(),
        summary: Summary::of(sol),
        flags: sol.flags.clone(),
        errors: measure_errors(sol, &shifted, cfg.c_weight)?,
        errors_leading: measure_errors(sol, &leading, cfg.c_weight)?,
        shift_estimate: shift_estimate(sol, blowup.kappa, blowup.psi0).ok(),
        spectrum: nondegeneracy_report(sol, cfg.eigenpairs, &cfg.eigen)?,
        energy: expansion_residual(sol, blowup)?,
    })
}

/// Solves and analyses every coupling of the sweep. With continuation
/// seeding the solves are ordered; the analyses always run through
/// [`par_map`] under `cfg.execution`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Sweep> {
    cfg.validate()?;
    let (x, n) = cfg.blowup_size();
    let blowup = solve_blowup(x, n, &cfg.policy.newton)?;
    let (solutions, trace, halvings) = match cfg.seeding {
        Seeding::Continuation => continue_to_all(&cfg.lambdas, &cfg.policy)?,
        Seeding::Composite => {
            let sols = par_map(cfg.execution, &cfg.lambdas, |l| solve_from_composite(*l, &blowup, &cfg.policy))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let trace = sols.iter().map(|s| TraceEntry { lambda: s.lambda, summary: Summary::of(s) }).collect();
            (sols, trace, 0)
        }
    };
    let points = par_map(cfg.execution, &solutions, |s| analyze_point(s, &blowup, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { config: cfg.clone(), blowup: BlowupSummary::of(&blowup), trace, halvings, points })
}

/// Outcome of one graded check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    /// The measured quantity the bound applies to.
    pub value: f64,
    pub bound: String,
    pub detail: String,
}

fn verdict(name: &str, pass: bool, value: f64, bound: String, detail: String) -> Verdict {
    Verdict { name: name.to_string(), pass, value, bound, detail }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Log-log slope of the composite's inner/outer mismatch at the match points.
    pub jump_slope: Option<f64>,
    pub outer_deriv_slope: Option<f64>,
    /// Whether the tension grows with the coupling along the sweep.
    pub sigma_increasing: bool,
    pub essential_edges: Vec<Option<f64>>,
    pub shifted_never_worse: bool,
}

fn ratio_of(values: &[f64]) -> f64 {
    let (lo, hi) = values.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), v| (a.min(*v), b.max(*v)));
    hi / lo
}

fn slope_of(points: &[(f64, f64)]) -> std::result::Result<f64, String> {
    fit_loglog(points).map(|f| f.slope).map_err(|e| e.to_string())
}

/// Grades a sweep. `slack` scales every band about its target: 1 applies the
/// nominal bands, 0 collapses them onto the targets.
pub fn evaluate(sweep: &Sweep, slack: f64) -> Vec<Verdict> {
    let s = slack.max(0.0);
    let pts = &sweep.points;
    let asym: Vec<&SweepPoint> = pts.iter().filter(|p| p.lambda >= ASYMPTOTIC_FLOOR).collect();
    let mut out = Vec::new();

    let b = &sweep.blowup;
    out.push(verdict(
        "blowup_hamiltonian",
        b.hamiltonian_dev <= 1e-6 * s,
        b.hamiltonian_dev,
        format!("<= {:e}", 1e-6 * s),
        "max node deviation of the blow-up first integral".into(),
    ));
    out.push(verdict(
        "blowup_mirror",
        b.mirror_dev <= 1e-6 * s,
        b.mirror_dev,
        format!("<= {:e}", 1e-6 * s),
        "max |V1(x) - V2(-x)| / (1 + |x|)".into(),
    ));
    out.push(verdict("kappa_positive", b.kappa > 0.0, b.kappa, "> 0".into(), "far-field offset".into()));

    let h = pts.iter().fold(0.0_f64, |m, p| m.max(p.summary.hamiltonian_dev));
    out.push(verdict(
        "heteroclinic_hamiltonian",
        h <= 1e-6 * s,
        h,
        format!("<= {:e}", 1e-6 * s),
        "max over the sweep of |H + 1/4|".into(),
    ));
    let bad: Vec<f64> = pts
        .iter()
        .filter(|p| !(p.flags.monotone && p.flags.bounded && p.flags.half_monotone))
        .map(|p| p.lambda)
        .collect();
    out.push(verdict(
        "heteroclinic_shape",
        bad.is_empty(),
        bad.len() as f64,
        "0 violations".into(),
        format!("monotone, bounded, half-monotone; violations at {bad:?}"),
    ));
    let scaled: Vec<f64> = asym.iter().map(|p| p.summary.crossing_value * p.lambda.powf(0.25)).collect();
    let r = if scaled.is_empty() { f64::NAN } else { ratio_of(&scaled) };
    out.push(verdict(
        "min_scaling_band",
        r <= 1.0 + s,
        r,
        format!("ratio <= {}", 1.0 + s),
        format!("v1(0) lambda^(1/4) over lambda >= {ASYMPTOTIC_FLOOR}: {scaled:?}"),
    ));

    let outer: Vec<(f64, f64)> = asym.iter().map(|p| (p.lambda, p.errors.outer_sup_weighted)).collect();
    let (lo, hi) = (-0.75 - 0.15 * s, -0.75 + 0.15 * s);
    out.push(match slope_of(&outer) {
        Ok(k) => verdict(
            "outer_order",
            k >= lo && k <= hi,
            k,
            format!("in [{lo}, {hi}]"),
            "log-log slope of the weighted outer error".into(),
        ),
        Err(e) => verdict("outer_order", false, f64::NAN, format!("in [{lo}, {hi}]"), e),
    });
    let inner: Vec<f64> = pts.iter().map(|p| p.errors.inner_sub_sup * p.lambda.powf(0.75)).collect();
    let r = ratio_of(&inner);
    out.push(verdict(
        "inner_scaled_band",
        r <= 1.0 + 2.0 * s,
        r,
        format!("ratio <= {}", 1.0 + 2.0 * s),
        format!("inner error near the center times lambda^(3/4): {inner:?}"),
    ));
    let target = b.kappa / b.psi0;
    let mut worst: f64 = 0.0;
    let mut shift_ok = true;
    let mut shift_detail = Vec::new();
    for p in pts.iter().filter(|p| p.lambda >= 1e4 * (1.0 - 1e-12)) {
        let tol = if p.lambda >= 1e6 * (1.0 - 1e-12) { 0.05 } else { 0.10 } * s;
        let dev = p.shift_estimate.map(|x| (x * p.lambda.powf(0.25) / target - 1.0).abs()).unwrap_or(f64::INFINITY);
        shift_ok &= dev <= tol;
        worst = worst.max(dev);
        shift_detail.push(format!("{:e}: {dev:.3e} (tol {tol})", p.lambda));
    }
    out.push(verdict(
        "shift_law",
        shift_ok && !shift_detail.is_empty(),
        worst,
        format!("relative deviation <= {} below 1e6, <= {} from 1e6", 0.10 * s, 0.05 * s),
        shift_detail.join("; "),
    ));

    let gap_ok = pts
        .iter()
        .all(|p| p.spectrum.lambda1.abs() * 10.0 <= p.spectrum.lambda2 * s && p.spectrum.alignment >= 1.0 - 1e-3 * s);
    let worst_ratio = pts.iter().map(|p| p.spectrum.lambda1.abs() / p.spectrum.lambda2).fold(0.0_f64, f64::max);
    out.push(verdict(
        "spectral_gap",
        gap_ok,
        worst_ratio,
        format!("|lambda1|/lambda2 <= {}, alignment >= {}", 0.1 * s, 1.0 - 1e-3 * s),
        format!("alignments {:?}", pts.iter().map(|p| p.spectrum.alignment).collect::<Vec<_>>()),
    ));
    let band: Vec<&SweepPoint> = asym.iter().copied().filter(|p| p.lambda <= 1e6 * (1.0 + 1e-12)).collect();
    let l2: Vec<(f64, f64)> = band.iter().map(|p| (p.lambda, p.spectrum.lambda2)).collect();
    let r = ratio_of(&l2.iter().map(|p| p.1).collect::<Vec<_>>());
    out.push(match slope_of(&l2) {
        Ok(k) => verdict(
            "gap_uniformity",
            r <= 1.0 + 2.0 * s && k.abs() <= 0.1 * s,
            k,
            format!("|slope| <= {}, ratio <= {}", 0.1 * s, 1.0 + 2.0 * s),
            format!("lambda2 ratio {r:.4}; values {:?}", l2.iter().map(|p| p.1).collect::<Vec<_>>()),
        ),
        Err(e) => verdict("gap_uniformity", false, f64::NAN, "slope fit".into(), e),
    });

    let top = pts.iter().max_by(|a, b| a.lambda.total_cmp(&b.lambda)).expect("nonempty sweep");
    let dev = (top.energy.coefficient_ratio - 1.0).abs();
    out.push(verdict(
        "tension_coefficient",
        dev <= 0.02 * s,
        top.energy.coefficient_ratio,
        format!("in [{}, {}]", 1.0 - 0.02 * s, 1.0 + 0.02 * s),
        format!("(sigma - 2 sqrt2/3) lambda^(1/4) / (2 I1) at lambda = {:e}", top.lambda),
    ));
    let res: Vec<(f64, f64)> = asym.iter().map(|p| (p.lambda, p.energy.residual.abs())).collect();
    // One-sided in substance; the wide floor only makes zero slack a closed band.
    let (lo, hi) = (-0.75 - 0.75 * s, -0.75 + 0.15 * s);
    out.push(match slope_of(&res) {
        Ok(k) => verdict(
            "tension_residual_order",
            k >= lo && k <= hi,
            k,
            format!("in [{lo}, {hi}]"),
            "log-log slope of |sigma - first order|".into(),
        ),
        Err(e) => verdict("tension_residual_order", false, f64::NAN, format!("in [{lo}, {hi}]"), e),
    });
    out.push(verdict("i1_negative", b.i1 < 0.0, b.i1, "< 0".into(), "blow-up energy coefficient".into()));
    let gap = pts.iter().map(|p| (p.energy.sigma_gradient - p.energy.sigma_full).abs()).fold(0.0_f64, f64::max);
    out.push(verdict(
        "tension_forms",
        gap <= 1e-6 * s,
        gap,
        format!("<= {:e}", 1e-6 * s),
        "max |gradient form - full form|".into(),
    ));
    out
}

pub fn diagnostics(sweep: &Sweep) -> Diagnostics {
    let asym: Vec<&SweepPoint> = sweep.points.iter().filter(|p| p.lambda >= ASYMPTOTIC_FLOOR).collect();
    let slope =
        |get: fn(&SweepPoint) -> f64| slope_of(&asym.iter().map(|p| (p.lambda, get(p))).collect::<Vec<_>>()).ok();
    Diagnostics {
        jump_slope: slope(|p| p.errors.jump),
        outer_deriv_slope: slope(|p| p.errors.outer_deriv),
        sigma_increasing: sweep.points.windows(2).all(|w| w[1].energy.sigma_gradient > w[0].energy.sigma_gradient),
        essential_edges: sweep.points.iter().map(|p| p.spectrum.essential_edge_estimate).collect(),
        shifted_never_worse: sweep
            .points
            .iter()
            .all(|p| p.errors.outer_sup_weighted <= p.errors_leading.outer_sup_weighted),
    }
}
