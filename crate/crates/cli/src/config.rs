//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use bec_lab::asymptotics::Variant;
use bec_lab::continuation::log_range;
use bec_lab::sweep::Seeding;

/// Flags shared by every subcommand. Each may also be set in the `--config`
/// file under the same name (with `_` for `-`); flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Coupling constant (> 1).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Explicit coupling list (config file only).
    #[arg(skip)]
    pub lambdas: Option<Vec<f64>>,
    /// Couplings `a:b:per_decade`, log-spaced with both ends included.
    #[arg(long = "lambda-range", value_name = "A:B:PER_DECADE")]
    pub lambda_range: Option<String>,
    /// Blow-up half-width.
    #[arg(long = "X", value_name = "X")]
    #[serde(rename = "X")]
    pub x: Option<f64>,
    /// Heteroclinic half-width.
    #[arg(long = "L", value_name = "L")]
    #[serde(rename = "L")]
    pub l: Option<f64>,
    /// Node count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Newton residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed CSV with columns `z, v1, v2` (further columns ignored).
    #[arg(long, value_name = "FILE")]
    pub seed: Option<PathBuf>,
    /// Composite variant: `leading` or `shifted`.
    #[arg(long)]
    pub variant: Option<String>,
    /// Sweep seeding: `continuation` or `composite`.
    #[arg(long)]
    pub seeding: Option<String>,
    /// Scale of the verification bands; 1 is nominal, 0 collapses them.
    #[arg(long)]
    pub slack: Option<f64>,
    /// TOML file with default values for any of these options.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Options {
    fn overlay(self, file: Options) -> Options {
        Options {
            lambda: self.lambda.or(file.lambda),
            lambdas: self.lambdas.or(file.lambdas),
            lambda_range: self.lambda_range.or(file.lambda_range),
            x: self.x.or(file.x),
            l: self.l.or(file.l),
            n: self.n.or(file.n),
            tol: self.tol.or(file.tol),
            out: self.out.or(file.out),
            seed: self.seed.or(file.seed),
            variant: self.variant.or(file.variant),
            seeding: self.seeding.or(file.seeding),
            slack: self.slack.or(file.slack),
            config: self.config,
        }
    }
}

/// Fully resolved configuration; echoed into every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub lambda: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    #[serde(rename = "X")]
    pub x: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub out: PathBuf,
    pub seed: Option<PathBuf>,
    pub variant: Variant,
    pub seeding: Seeding,
    pub slack: f64,
    pub config_file: Option<PathBuf>,
}

fn read_file(path: &Path) -> Result<Options> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("lambda range must be a:b:per_decade, got {spec:?}");
    }
    let a: f64 = parts[0].trim().parse().with_context(|| format!("range start {:?}", parts[0]))?;
    let b: f64 = parts[1].trim().parse().with_context(|| format!("range end {:?}", parts[1]))?;
    let k: usize = parts[2].trim().parse().with_context(|| format!("points per decade {:?}", parts[2]))?;
    Ok(log_range(a, b, k)?)
}

fn positive(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => bail!("{name} must be positive and finite, got {x}"),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn resolve(command: &str, flags: Options) -> Result<RunConfig> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => Options::default(),
        };
        let config_file = flags.config.clone();
        let o = flags.overlay(file);
        let lambdas = match (&o.lambdas, &o.lambda_range) {
            (Some(_), Some(_)) => bail!("give either a lambda list or a lambda range, not both"),
            (Some(l), None) => Some(l.clone()),
            (None, Some(r)) => Some(parse_range(r)?),
            (None, None) => None,
        };
        let variant = o.variant.as_deref().unwrap_or("shifted").parse::<Variant>()?;
        let seeding = match o.seeding.as_deref().unwrap_or("continuation") {
            "continuation" => Seeding::Continuation,
            "composite" => Seeding::Composite,
            other => bail!("unknown seeding {other:?}; use continuation or composite"),
        };
        positive("X", o.x)?;
        positive("L", o.l)?;
        positive("tol", o.tol)?;
        let slack = o.slack.unwrap_or(1.0);
        if !(slack >= 0.0 && slack.is_finite()) {
            bail!("slack must be a nonnegative number, got {slack}");
        }
        if let Some(l) = o.lambda {
            if !(l > 1.0 && l.is_finite()) {
                bail!("lambda must exceed 1, got {l}");
            }
        }
        Ok(RunConfig {
            command: command.to_string(),
            lambda: o.lambda,
            lambdas,
            x: o.x,
            l: o.l,
            n: o.n,
            tol: o.tol,
            out: o.out.unwrap_or_else(|| PathBuf::from("out")),
            seed: o.seed,
            variant,
            seeding,
            slack,
            config_file,
        })
    }

    pub fn require_lambda(&self) -> Result<f64> {
        match self.lambda {
            Some(l) => Ok(l),
            None => bail!("{} needs --lambda", self.command),
        }
    }

    pub fn metadata(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }
}
