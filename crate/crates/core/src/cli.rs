//! Command-line front end.
//!
//! Exit codes: 0 success (or stable), 1 no inner equilibrium or not stable,
//! 2 configuration error, 3 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::equilibria::{all_equilibria, inner_equilibrium, EquilibriumRecord};
use crate::error::Error;
use crate::integrator::{integrate, lyapunov_trace, IntegrationOptions};
use crate::lyapunov::{condition4, search_coeffs, Condition4Variant, LyapunovCoeffs};
use crate::model::{ModelParams, State};
use crate::stability::{classify_equilibrium, StabilityRecord, Verdict};
use crate::sweep::{stability_map, SweepGrid};

#[derive(Debug, Parser)]
#[command(
    name = "retrovir",
    version,
    about = "Retrovirus dynamics: equilibria, stability, simulation"
)]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the inner and boundary equilibria with residuals.
    Equilibria,
    /// Integrate from `initial_state` and print the trajectory as CSV.
    Simulate,
    /// Classify the inner equilibrium and search for Lyapunov weights.
    Stability {
        #[arg(long, value_enum, default_value_t = VariantArg::Corrected)]
        variant: VariantArg,
    },
    /// Map stability over the configured (alpha, k) grid as CSV.
    Sweep,
    /// Integrate and trace the Lyapunov functional as CSV.
    Lyapunov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Corrected,
    AsWritten,
}

impl From<VariantArg> for Condition4Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Corrected => Condition4Variant::Corrected,
            VariantArg::AsWritten => Condition4Variant::AsWritten,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    #[serde(default)]
    pub initial_state: Option<State>,
    #[serde(default)]
    pub integration: Option<IntegrationOptions>,
    #[serde(default)]
    pub lyapunov: Option<LyapunovCoeffs>,
    #[serde(default)]
    pub sweep: Option<SweepAxes>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    pub alpha: Axis,
    pub k: Axis,
}

/// Either explicit values or a generated range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range(AxisRange),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub from: f64,
    pub to: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Values(v) => v.clone(),
            Axis::Range(r) => match (r.spacing, r.count) {
                (_, 0) => Vec::new(),
                (_, 1) => vec![r.from],
                (Spacing::Log, n) => crate::lyapunov::log_space(r.from, r.to, n),
                (Spacing::Linear, n) => (0..n)
                    .map(|i| r.from + (r.to - r.from) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.params.validate().map_err(|e| e.to_string())?;
        if let Some(opts) = &cfg.integration {
            opts.validate().map_err(|e| e.to_string())?;
        }
        if let Some(w) = &cfg.lyapunov {
            w.validate().map_err(|e| e.to_string())?;
        }
        if let Some(s) = &cfg.initial_state {
            if !s.is_finite() || s.min_coord() < 0.0 {
                return Err("initial_state must be finite and nonnegative".into());
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn sweep_grid(&self) -> Option<SweepGrid> {
        self.sweep
            .as_ref()
            .map(|axes| SweepGrid::new(self.params, axes.alpha.values(), axes.k.values()))
    }
}

#[derive(Debug)]
enum Failure {
    /// Exit 1, with a diagnostic.
    Absent(String),
    Config(String),
    Runtime(String),
    /// The reader went away (`| head`); stop quietly.
    Closed,
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Absent(_) => 1,
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
            Failure::Closed => 0,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Absent(m) | Failure::Config(m) | Failure::Runtime(m) => m,
            Failure::Closed => "",
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            Failure::Closed
        } else {
            Failure::Runtime(format!("write failed: {e}"))
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        match e.io_error_kind() {
            Some(kind) => std::io::Error::from(kind).into(),
            None => Failure::Runtime(e.to_string()),
        }
    }
}

fn require<T: Clone>(value: &Option<T>, section: &str) -> Result<T, Failure> {
    value
        .clone()
        .ok_or_else(|| Failure::Config(format!("config section `{section}` is required")))
}

fn runtime(e: Error) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let outcome = match &cli.config {
        None => Err(Failure::Config("--config <PATH> is required".into())),
        Some(path) => RunConfig::load(path)
            .map_err(Failure::Config)
            .and_then(|cfg| dispatch(&cli.command, &cfg, out, err)),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Closed) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(
    cmd: &Command,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    match cmd {
        Command::Equilibria => cmd_equilibria(cfg, out, err),
        Command::Simulate => cmd_simulate(cfg, out),
        Command::Stability { variant } => cmd_stability(cfg, (*variant).into(), out, err),
        Command::Sweep => cmd_sweep(cfg, out),
        Command::Lyapunov => cmd_lyapunov(cfg, out),
    }
}

fn cmd_equilibria(
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let eqs = all_equilibria(&cfg.params).map_err(|e| Failure::Config(e.to_string()))?;
    let records: Vec<EquilibriumRecord> = eqs.iter().map(EquilibriumRecord::from).collect();
    serde_json::to_writer_pretty(&mut *out, &records)?;
    writeln!(out)?;
    if records.first().map(|r| r.kind) == Some(crate::equilibria::EquilibriumKind::Inner) {
        Ok(0)
    } else {
        writeln!(err, "no inner equilibrium for these parameters")?;
        Ok(1)
    }
}

fn cmd_simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let s0 = require(&cfg.initial_state, "initial_state")?;
    let opts = require(&cfg.integration, "integration")?;
    let traj = integrate(&cfg.params, &s0, &opts).map_err(runtime)?;
    traj.write_csv(out)?;
    Ok(0)
}

fn cmd_stability(
    cfg: &RunConfig,
    variant: Condition4Variant,
    out: &mut dyn Write,
    _err: &mut dyn Write,
) -> Result<i32, Failure> {
    let params = &cfg.params;
    let eq = inner_equilibrium(params)
        .map_err(|e| Failure::Config(e.to_string()))?
        .ok_or_else(|| Failure::Absent("no inner equilibrium for these parameters".into()))?;
    let report = classify_equilibrium(params, &eq).map_err(runtime)?;
    let cond = condition4(params, &eq, variant).map_err(runtime)?;
    let search = search_coeffs(params, &eq).map_err(runtime)?;
    let doc = json!({
        "equilibrium": EquilibriumRecord::from(&eq),
        "routh_hurwitz": StabilityRecord::from(&report),
        "condition4": cond,
        "lyapunov_search": match &search {
            Some(found) => json!({
                "found": true,
                "coeffs": found.coeffs,
                "minors": found.form.minors,
                "omega": found.form,
            }),
            None => json!({ "found": false }),
        },
    });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(if report.verdict == Verdict::Stable {
        0
    } else {
        1
    })
}

fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let grid = cfg
        .sweep_grid()
        .ok_or_else(|| Failure::Config("config section `sweep` is required".into()))?;
    grid.validate()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let result = stability_map(&grid).map_err(runtime)?;
    result.write_csv(out)?;
    Ok(0)
}

fn cmd_lyapunov(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let s0 = require(&cfg.initial_state, "initial_state")?;
    let opts = require(&cfg.integration, "integration")?;
    let coeffs = require(&cfg.lyapunov, "lyapunov")?;
    if !s0.is_strictly_positive() {
        return Err(Failure::Config(
            "initial_state must be strictly positive for a Lyapunov trace".into(),
        ));
    }
    let eq = inner_equilibrium(&cfg.params)
        .map_err(|e| Failure::Config(e.to_string()))?
        .ok_or_else(|| Failure::Absent("no inner equilibrium for these parameters".into()))?;
    let traj = lyapunov_trace(&cfg.params, &coeffs, &eq, &s0, &opts).map_err(runtime)?;
    traj.write_csv(out)?;
    Ok(0)
}
