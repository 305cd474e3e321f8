//! Subcommand implementations. Every output file carries the resolved
//! configuration: CSV files in a `# config = ...` line, JSON files under
//! `"config"`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;
use serde_json::{json, Value};

use bec_lab::asymptotics::{build_composite, measure_errors, shift_estimate, Variant};
use bec_lab::continuation::{continue_in_lambda, ContinuationPolicy, Summary};
use bec_lab::energy::{blowup_energy_coefficient, expansion_residual};
use bec_lab::export::{blowup_csv, csv, fields_csv, json as to_json, sweep_csv};
use bec_lab::heteroclinic::{heteroclinic_grid, solve_heteroclinic_on, FieldPair, HeteroclinicSolution};
use bec_lab::numerics::{EigenSettings, Grid, NewtonSettings};
use bec_lab::profiles::{self, solve_blowup, BlowupProfile};
use bec_lab::spectrum::{assemble_linearized, lowest_eigenpairs, nondegeneracy_report, DEFAULT_EIGENPAIRS};
use bec_lab::sweep::{continue_to_all, diagnostics, evaluate, run_sweep, seed_solution, SweepConfig, SEED_LAMBDA};

use crate::config::RunConfig;
use crate::Failure;

type Outcome = Result<(), Failure>;

fn io(e: anyhow::Error) -> Failure {
    Failure::Numerical(e)
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, Failure> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display())).map_err(io)?;
    Ok(cfg.out.clone())
}

fn write(dir: &Path, name: &str, text: &str) -> Outcome {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display())).map_err(io)
}

/// Writes `body` with the configuration attached, and echoes it to stdout.
fn write_json(cfg: &RunConfig, dir: &Path, name: &str, body: Value) -> Outcome {
    let mut doc = json!({ "config": cfg });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    let text = to_json(&doc);
    write(dir, name, &text)?;
    print!("{text}");
    Ok(())
}

fn meta(cfg: &RunConfig, extra: Vec<(&'static str, String)>) -> Vec<(&'static str, String)> {
    let mut m = vec![("config", cfg.metadata())];
    m.extend(extra);
    m
}

fn tag(lambda: f64) -> String {
    format!("{lambda:e}")
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn newton(cfg: &RunConfig) -> NewtonSettings {
    NewtonSettings {
        residual_tol: cfg.tol.unwrap_or(NewtonSettings::default().residual_tol),
        ..NewtonSettings::default()
    }
}

fn policy(cfg: &RunConfig) -> ContinuationPolicy {
    ContinuationPolicy { half_width: cfg.l, nodes: cfg.n, newton: newton(cfg), ..ContinuationPolicy::default() }
}

/// Blow-up profile wide enough for the composite at `lambda_max`.
fn blowup_for(cfg: &RunConfig, lambdas: Vec<f64>) -> Result<BlowupProfile, Failure> {
    let mut sc = SweepConfig::new(lambdas);
    sc.blowup_half_width = cfg.x;
    let (x, n) = sc.blowup_size();
    Ok(solve_blowup(x, n, &newton(cfg))?)
}

fn read_seed(path: &Path) -> Result<FieldPair, Failure> {
    let usage = |e: anyhow::Error| Failure::Usage(e.context(format!("seed file {}", path.display())));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| usage(e.into()))?;
    let (mut z, mut v1, mut v2) = (Vec::new(), Vec::new(), Vec::new());
    for rec in reader.records() {
        let rec = rec.map_err(|e| usage(e.into()))?;
        let col = |i: usize| -> anyhow::Result<f64> {
            Ok(rec.get(i).ok_or_else(|| anyhow!("row with fewer than 3 columns"))?.parse::<f64>()?)
        };
        z.push(col(0).map_err(usage)?);
        v1.push(col(1).map_err(usage)?);
        v2.push(col(2).map_err(usage)?);
    }
    let grid = Grid::from_nodes(z)?;
    Ok(FieldPair::new(grid, v1, v2)?)
}

/// The heteroclinic at `cfg.lambda`: from the seed file when given, directly
/// from the explicit solution when the coupling is within one step of it,
/// and by continuation otherwise.
fn obtain_solution(cfg: &RunConfig) -> Result<HeteroclinicSolution, Failure> {
    let lambda = cfg.require_lambda().map_err(Failure::Usage)?;
    let p = policy(cfg);
    let (half_width, n) = p.mesh_for(lambda);
    if let Some(path) = &cfg.seed {
        let seed = read_seed(path)?;
        let grid = heteroclinic_grid(lambda, half_width, n)?;
        return Ok(solve_heteroclinic_on(lambda, grid, &seed, &p.newton)?);
    }
    if (lambda / SEED_LAMBDA).ln().abs() <= p.initial_step_factor.ln() {
        let start = seed_solution(&ContinuationPolicy { half_width: Some(half_width), nodes: Some(n), ..p.clone() })?;
        if lambda == SEED_LAMBDA {
            return Ok(start);
        }
        let grid = heteroclinic_grid(lambda, half_width, n)?;
        return Ok(solve_heteroclinic_on(lambda, grid, &start.fields, &p.newton)?);
    }
    let start = seed_solution(&p)?;
    let mut trace = continue_in_lambda(&start, &[lambda], &p)?;
    Ok(trace.solutions.remove(0))
}

fn solution_report(sol: &HeteroclinicSolution) -> Value {
    json!({
        "lambda": sol.lambda,
        "n": sol.fields.len(),
        "L": sol.half_width(),
        "newton_residual": sol.newton_residual,
        "iterations": sol.iterations,
        "hamiltonian_dev": sol.hamiltonian_dev,
        "flags": value(&sol.flags),
        "summary": value(&Summary::of(sol)),
    })
}

fn solution_csv(cfg: &RunConfig, sol: &HeteroclinicSolution) -> String {
    fields_csv(
        &meta(
            cfg,
            vec![
                ("lambda", format!("{:e}", sol.lambda)),
                ("L", format!("{}", sol.half_width())),
                ("n", format!("{}", sol.fields.len())),
                ("newton_residual", format!("{:e}", sol.newton_residual)),
                ("hamiltonian_dev", format!("{:e}", sol.hamiltonian_dev)),
            ],
        ),
        &sol.fields,
    )
}

pub fn blowup(cfg: &RunConfig) -> Outcome {
    let x = cfg.x.unwrap_or(profiles::DEFAULT_HALF_WIDTH);
    let n = cfg.n.unwrap_or(profiles::DEFAULT_NODES);
    let p = solve_blowup(x, n, &newton(cfg))?;
    let dir = out_dir(cfg)?;
    let mut text = String::new();
    text.push_str(&format!("# config = {}\n", cfg.metadata()));
    text.push_str(&blowup_csv(&p));
    write(&dir, "blowup.csv", &text)?;
    write_json(
        cfg,
        &dir,
        "blowup.json",
        json!({
            "psi0": p.psi0,
            "kappa": p.kappa,
            "X": p.half_width,
            "n": p.grid.len(),
            "newton_residual": p.residual,
            "iterations": p.iterations,
            "hamiltonian_dev": p.hamiltonian_dev,
            "mirror_dev": p.mirror_deviation(),
            "continuum_residual": p.continuum_residual(),
            "i1": blowup_energy_coefficient(&p),
        }),
    )
}

pub fn solve(cfg: &RunConfig) -> Outcome {
    let sol = obtain_solution(cfg)?;
    let dir = out_dir(cfg)?;
    let t = tag(sol.lambda);
    write(&dir, &format!("solution_lambda_{t}.csv"), &solution_csv(cfg, &sol))?;
    write_json(cfg, &dir, &format!("solve_lambda_{t}.json"), solution_report(&sol))
}

pub fn continue_branch(cfg: &RunConfig) -> Outcome {
    let lambdas = match (&cfg.lambdas, cfg.lambda) {
        (Some(l), _) => l.clone(),
        (None, Some(l)) => vec![l],
        (None, None) => return Err(Failure::Usage(anyhow!("continue needs --lambda-range or --lambda"))),
    };
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::Usage(anyhow!("couplings must be strictly increasing")));
    }
    let (solutions, trace, halvings) = continue_to_all(&lambdas, &policy(cfg))?;
    let dir = out_dir(cfg)?;
    for sol in &solutions {
        write(&dir, &format!("solution_lambda_{}.csv", tag(sol.lambda)), &solution_csv(cfg, sol))?;
    }
    let rows: Vec<Vec<f64>> = trace
        .iter()
        .map(|e| {
            let s = &e.summary;
            vec![e.lambda, s.newton_residual, s.hamiltonian_dev, s.sigma_lambda, s.crossing_value, s.min_component]
        })
        .collect();
    let columns = ["lambda", "newton_residual", "hamiltonian_dev", "sigma", "v1_at_0", "min_component"];
    write(&dir, "trace.csv", &csv(&meta(cfg, vec![]), &columns, &rows))?;
    write_json(
        cfg,
        &dir,
        "continue.json",
        json!({
            "halvings": halvings,
            "trace": value(&trace),
            "solutions": solutions.iter().map(solution_report).collect::<Vec<_>>(),
        }),
    )
}

pub fn composite(cfg: &RunConfig) -> Outcome {
    let sol = obtain_solution(cfg)?;
    let blowup = blowup_for(cfg, vec![sol.lambda])?;
    let approx = build_composite(sol.lambda, &blowup, cfg.variant)?;
    let errors = measure_errors(&sol, &approx, 1.0)?;
    let sampled = approx.sample(sol.grid().clone())?;
    let z = sol.grid().nodes();
    let rows: Vec<Vec<f64>> =
        (0..z.len()).map(|k| vec![z[k], sampled.v1[k], sampled.v2[k], sol.fields.v1[k], sol.fields.v2[k]]).collect();
    let dir = out_dir(cfg)?;
    let t = tag(sol.lambda);
    let m =
        meta(cfg, vec![("xi", format!("{:.16e}", approx.xi)), ("match_point", format!("{:.16e}", approx.match_point))]);
    write(&dir, &format!("composite_lambda_{t}.csv"), &csv(&m, &["z", "w1", "w2", "v1", "v2"], &rows))?;
    let shift = match approx.variant {
        Variant::Shifted => shift_estimate(&sol, blowup.kappa, blowup.psi0).ok(),
        Variant::Leading => None,
    };
    write_json(
        cfg,
        &dir,
        &format!("composite_lambda_{t}.json"),
        json!({
            "lambda": sol.lambda,
            "variant": value(&approx.variant),
            "xi": approx.xi,
            "match_point": approx.match_point,
            "kappa": blowup.kappa,
            "blowup_X": blowup.half_width,
            "errors": value(&errors),
            "shift_estimate": shift,
        }),
    )
}

pub fn spectrum(cfg: &RunConfig) -> Outcome {
    let sol = obtain_solution(cfg)?;
    let eigen = EigenSettings::default();
    let report = nondegeneracy_report(&sol, DEFAULT_EIGENPAIRS, &eigen)?;
    let op = assemble_linearized(&sol)?;
    let modes = lowest_eigenpairs(&op, DEFAULT_EIGENPAIRS, &eigen)?;
    let z = sol.grid().nodes();
    let mut columns = vec!["z".to_string()];
    for j in 0..modes.len() {
        columns.push(format!("phi1_{j}"));
        columns.push(format!("phi2_{j}"));
    }
    let rows: Vec<Vec<f64>> = (0..z.len())
        .map(|k| {
            let mut r = vec![z[k]];
            for m in &modes {
                r.push(m.phi1[k]);
                r.push(m.phi2[k]);
            }
            r
        })
        .collect();
    let dir = out_dir(cfg)?;
    let t = tag(sol.lambda);
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    write(&dir, &format!("modes_lambda_{t}.csv"), &csv(&meta(cfg, vec![]), &cols, &rows))?;
    write_json(cfg, &dir, &format!("spectrum_lambda_{t}.json"), json!({ "spectrum": value(&report) }))
}

pub fn energy(cfg: &RunConfig) -> Outcome {
    let sol = obtain_solution(cfg)?;
    let blowup = blowup_for(cfg, vec![sol.lambda])?;
    let report = expansion_residual(&sol, &blowup)?;
    let dir = out_dir(cfg)?;
    write_json(cfg, &dir, &format!("energy_lambda_{}.json", tag(sol.lambda)), json!({ "energy": value(&report) }))
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let lambdas = match &cfg.lambdas {
        Some(l) => l.clone(),
        None => bec_lab::continuation::log_range(10.0, 1e6, 1)?,
    };
    let mut sc = SweepConfig::new(lambdas);
    sc.blowup_half_width = cfg.x;
    sc.policy = policy(cfg);
    sc.seeding = cfg.seeding;
    sc.validate()?;
    let sweep = run_sweep(&sc)?;
    let verdicts = evaluate(&sweep, cfg.slack);
    let dir = out_dir(cfg)?;
    let mut text = format!("# config = {}\n", cfg.metadata());
    text.push_str(&sweep_csv(&sweep));
    write(&dir, "sweep.csv", &text)?;
    write(&dir, "sweep.json", &to_json(&json!({ "config": cfg, "sweep": value(&sweep) })))?;
    for v in &verdicts {
        println!("{} {} = {:.6e} ({})", if v.pass { "PASS" } else { "FAIL" }, v.name, v.value, v.bound);
    }
    let map: serde_json::Map<String, Value> = verdicts.iter().map(|v| (v.name.clone(), value(v))).collect();
    let failed: Vec<String> = verdicts.iter().filter(|v| !v.pass).map(|v| v.name.clone()).collect();
    let doc = json!({
        "config": cfg,
        "all_pass": failed.is_empty(),
        "verdicts": map,
        "diagnostics": value(&diagnostics(&sweep)),
    });
    write(&dir, "verdicts.json", &to_json(&doc))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed))
    }
}
