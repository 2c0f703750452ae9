//! The `cusp-surgery` command line: symbolic order queries, spectral sweeps
//! and resolvent-trace fits driven by a flat config file.

mod config;
mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dirac::{neck_mass, spectral_sweep, trace_from_table, LabError};
use crate::expfit::{compare_models, BasisSpec, FitError, FitReport};
use crate::surgery::{
    composition_orders, fixture, mapping_orders, trace_expansion_terms, OpOrders, SurgeryError,
};
use crate::Rational;

pub use config::{ConfigError, RunConfig};
pub use output::{fmt_float, rational_json, Csv, Outputs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_CONFIG: i32 = 78;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Lab(#[from] LabError),
    #[error("{0}")]
    Surgery(#[from] SurgeryError),
    #[error("fit: {0}")]
    Fit(#[from] FitError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Verification(_) => EXIT_VERIFY,
            CliError::Lab(_) | CliError::Surgery(_) | CliError::Fit(_) | CliError::Io { .. } => EXIT_RUNTIME,
        }
    }
}

/// Exact rational from `p/q`, an integer, or a plain decimal such as `-0.25`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Ok(q) = s.parse::<Rational>() {
        return Ok(q);
    }
    let err = || format!("`{s}` is not a rational number");
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').ok_or_else(err)?;
    if frac.is_empty() && int.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || !int.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int}{frac}");
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| err())? };
    let denom = 10i64.checked_pow(frac.len() as u32).ok_or_else(err)?;
    let q = Rational::new(numer, denom);
    Ok(if neg { -q } else { q })
}

fn parse_orders(s: &str) -> Result<OpOrders, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("`{s}` is not `m,alpha,beta`"));
    }
    Ok(OpOrders::new(parse_rational(parts[0])?, parse_rational(parts[1])?, parse_rational(parts[2])?))
}

fn parse_pair(s: &str) -> Result<(Rational, Rational), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("`{s}` is not `alpha',beta'`"))?;
    Ok((parse_rational(a)?, parse_rational(b)?))
}

#[derive(Debug, Parser)]
#[command(name = "cusp-surgery", version, about = "Cusp-surgery order calculus and Dirac spectral lab")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Order arithmetic of the calculus.
    #[command(subcommand)]
    Symbols(SymbolsCmd),
    /// Spectra of the squared Dirac operator on the neck.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Relative resolvent traces and their small-t fits.
    #[command(subcommand)]
    Trace(TraceCmd),
}

#[derive(Debug, Subcommand)]
enum SymbolsCmd {
    /// Check the invariants of the space and projection fixtures.
    VerifyFixture,
    /// Orders at (ff, tf) of A u.
    MappingOrders {
        /// Operator orders `m,alpha,beta`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_orders)]
        orders: OpOrders,
        /// Orders `alpha',beta'` of the section.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        section: (Rational, Rational),
    },
    /// Orders of the composition A B.
    ComposeOrders {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_orders)]
        a: OpOrders,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_orders)]
        b: OpOrders,
    },
    /// Leading terms of the small-t expansion of the trace.
    TraceExpansion {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        alpha: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        beta: Rational,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum SpectrumCmd {
    /// Eigenvalues for every t and mode: spectrum.csv.
    Sweep(RunArgs),
    /// Eigenvalue counts in the configured windows: counts.csv.
    Count(RunArgs),
    /// Neck mass of the lowest eigenvectors: mass.csv.
    Mass(RunArgs),
}

#[derive(Debug, Subcommand)]
enum TraceCmd {
    /// Relative resolvent trace for every t: trace.csv.
    Compute(RunArgs),
    /// Fit the trace with and without the log term: fit.json.
    Fit {
        #[command(flatten)]
        run: RunArgs,
        /// Fit `t,g` samples from this CSV instead of computing them.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Symbols(cmd) => {
            let (value, ok) = symbols(cmd)?;
            println!("{value}");
            if ok {
                Ok(())
            } else {
                Err(CliError::Verification("fixture invariants".into()))
            }
        }
        Command::Spectrum(cmd) => spectrum(cmd),
        Command::Trace(cmd) => trace(cmd),
    }
}

fn symbols(cmd: SymbolsCmd) -> Result<(Value, bool), CliError> {
    let orders_json = |o: &OpOrders| json!([rational_json(o.m), rational_json(o.alpha), rational_json(o.beta)]);
    Ok(match cmd {
        SymbolsCmd::VerifyFixture => {
            let checks = fixture().verify();
            let ok = checks.iter().all(|c| c.passed);
            let list: Vec<Value> = checks.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect();
            (json!({"passed": ok, "checks": list}), ok)
        }
        SymbolsCmd::MappingOrders { orders, section } => {
            let (ff, tf) = mapping_orders(&orders, section)?;
            (json!({"orders": [rational_json(ff), rational_json(tf)]}), true)
        }
        SymbolsCmd::ComposeOrders { a, b } => {
            let o = composition_orders(&a, &b)?;
            (json!({"orders": orders_json(&o)}), true)
        }
        SymbolsCmd::TraceExpansion { alpha, beta } => {
            let terms: Vec<Value> = trace_expansion_terms(alpha, beta)?
                .iter()
                .map(|t| json!([rational_json(t.z), t.k]))
                .collect();
            (json!({"terms": terms}), true)
        }
    })
}

fn load(run: &RunArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let text = fs::read_to_string(&run.config).map_err(|source| CliError::Io { path: run.config.clone(), source })?;
    let config = RunConfig::parse(&text)?;
    let dir = run.output_dir.clone().unwrap_or_else(|| config.output_dir.clone());
    Ok((config, dir))
}

fn finish(outputs: &Outputs, dir: &Path, command: &str, config: &RunConfig) -> Result<(), CliError> {
    let written = outputs
        .write(dir, command, &config.serialize())
        .map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn spectrum(cmd: SpectrumCmd) -> Result<(), CliError> {
    let (name, run) = match &cmd {
        SpectrumCmd::Sweep(r) => ("spectrum sweep", r),
        SpectrumCmd::Count(r) => ("spectrum count", r),
        SpectrumCmd::Mass(r) => ("spectrum mass", r),
    };
    let (config, dir) = load(run)?;
    let mut params = config.lab_params();
    let mut outputs = Outputs::default();
    match cmd {
        SpectrumCmd::Sweep(_) => {
            let table = spectral_sweep(&config.t_grid, &params)?;
            let mut csv = Csv::new(&["t", "k", "j", "mu", "lambda"]);
            for r in &table.rows {
                csv.row(&[fmt_float(r.t), r.k.to_string(), r.j.to_string(), fmt_float(r.mu), fmt_float(r.lambda)]);
            }
            outputs.add("spectrum.csv", csv.into_string());
        }
        SpectrumCmd::Count(_) => {
            if config.windows.is_empty() {
                return Err(ConfigError::Missing("windows").into());
            }
            let table = spectral_sweep(&config.t_grid, &params)?;
            let mut csv = Csv::new(&["t", "a", "b", "count"]);
            for &t in &config.t_grid {
                for &(a, b) in &config.windows {
                    csv.row(&[fmt_float(t), fmt_float(a), fmt_float(b), table.eigen_count(a, b, t).to_string()]);
                }
            }
            outputs.add("counts.csv", csv.into_string());
        }
        SpectrumCmd::Mass(_) => {
            params.vector_levels = config.mass_levels;
            let table = spectral_sweep(&config.t_grid, &params)?;
            let mut csv = Csv::new(&["t", "j", "window", "fraction"]);
            for &t in &config.t_grid {
                for j in 1..=config.mass_levels {
                    let Some((_, Some(v))) = table.ranked(t, j) else { continue };
                    let fraction = neck_mass(v, config.mass_window)?;
                    csv.row(&[fmt_float(t), j.to_string(), fmt_float(config.mass_window), fmt_float(fraction)]);
                }
            }
            outputs.add("mass.csv", csv.into_string());
        }
    }
    finish(&outputs, &dir, name, &config)
}

fn computed_trace(config: &RunConfig) -> Result<Vec<(f64, f64)>, CliError> {
    let params = config.lab_params();
    let table = spectral_sweep(&config.t_grid, &params)?;
    config
        .t_grid
        .iter()
        .map(|&t| Ok((t, trace_from_table(&table, t, config.lambda, config.lambda0, params.tol)?.g)))
        .collect()
}

fn trace_csv(samples: &[(f64, f64)]) -> String {
    let mut csv = Csv::new(&["t", "g"]);
    for &(t, g) in samples {
        csv.row(&[fmt_float(t), fmt_float(g)]);
    }
    csv.into_string()
}

fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').map(str::trim).collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (Some(ti), Some(gi)) = (col("t"), col("g")) else {
        return Err(CliError::Usage(format!("{}: header must name columns `t` and `g`", path.display())));
    };
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |c: usize| fields.get(c).and_then(|s| s.parse::<f64>().ok());
            match (get(ti), get(gi)) {
                (Some(t), Some(g)) => Ok((t, g)),
                _ => Err(CliError::Usage(format!("{}: bad row {}", path.display(), i + 2))),
            }
        })
        .collect()
}

fn report_json(basis: &BasisSpec, r: &FitReport) -> Value {
    let monomials: Vec<Value> = basis.monomials.iter().map(|m| json!([rational_json(m.z), m.k])).collect();
    json!({
        "basis": monomials,
        "coefficients": r.coefficients,
        "rms_residual": r.rms_residual,
        "condition_estimate": r.condition_estimate,
    })
}

fn trace(cmd: TraceCmd) -> Result<(), CliError> {
    let mut outputs = Outputs::default();
    match cmd {
        TraceCmd::Compute(run) => {
            let (config, dir) = load(&run)?;
            outputs.add("trace.csv", trace_csv(&computed_trace(&config)?));
            finish(&outputs, &dir, "trace compute", &config)
        }
        TraceCmd::Fit { run, input } => {
            let (config, dir) = load(&run)?;
            let samples = match &input {
                Some(path) => read_samples(path)?,
                None => {
                    if config.t_grid.contains(&0.0) {
                        return Err(ConfigError::Value {
                            key: "t_grid".into(),
                            reason: "fits need t > 0".into(),
                        }
                        .into());
                    }
                    if config.lambda == config.lambda0 {
                        return Err(ConfigError::Value {
                            key: "lambda0".into(),
                            reason: "must differ from lambda".into(),
                        }
                        .into());
                    }
                    let s = computed_trace(&config)?;
                    outputs.add("trace.csv", trace_csv(&s));
                    s
                }
            };
            let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
            let c = compare_models(&ts, &ys, &config.smooth_basis, &config.log_basis)?;
            let fit = json!({
                "source": if input.is_some() { "input" } else { "computed" },
                "samples": ts.len(),
                "smooth": report_json(&config.smooth_basis, &c.smooth),
                "log": report_json(&config.log_basis, &c.log),
                "residual_smooth": c.residual_smooth,
                "residual_log": c.residual_log,
                "ratio": c.ratio,
            });
            outputs.add("fit.json", output::to_json_text(&fit));
            finish(&outputs, &dir, "trace fit", &config)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("-2").unwrap(), Rational::from(-2));
        assert_eq!(parse_rational("5/2").unwrap(), Rational::new(5, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational::new(-1, 4));
        assert_eq!(parse_rational("1.5").unwrap(), Rational::new(3, 2));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational(".").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn orders_parse() {
        assert_eq!(parse_orders("-1,-1,0").unwrap(), OpOrders::new(-1, -1, 0));
        assert!(parse_orders("1,2").is_err());
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["cusp-surgery", "symbols", "nope"]), EXIT_USAGE);
        assert_eq!(run(["cusp-surgery", "symbols", "trace-expansion", "--alpha", "x", "--beta", "0"]), EXIT_USAGE);
    }
}
