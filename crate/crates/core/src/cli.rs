//! Command-line front end.
//!
//! Every subcommand is a thin wrapper around library calls; [`run`] returns
//! the exit code and the text destined for stdout/stderr so the binary and
//! the tests share one code path.
//!
//! Exit codes: 0 success, 2 input/data error, 3 parameter error, 4 solver
//! infeasibility.

use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotic::{optimal_gamma, AsymptoticProblem, OptimalGamma};
use crate::estimation::{
    default_starts, em_fit_multistart, plug_in_gamma, zscores, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::exact::{self, ExactSettings};
use crate::mixture::{Cdf, MixtureModel, PiecewiseLinear};
use crate::optimality::{delta_grid, figure1_data, optimal_cv};
use crate::procedures::step_up;
use crate::scaling::{build_thresholds, ScalingFunction};
use crate::simulation::{default_lambda_grid, run_grid, Scenario};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_PARAM: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SCALEDMT_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("data error: {0}")]
    Data(String),
    #[error("parameter error: {0}")]
    Param(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => EXIT_DATA,
            CliError::Param(_) => EXIT_PARAM,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Data(_) => CliError::Data(e.to_string()),
            Error::NoSolution(_) => CliError::Infeasible(e.to_string()),
            _ => CliError::Param(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "scaledmt", version, about = "Scaled step-up multiple testing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a step-up procedure to a column of p-values.
    Reject(RejectArgs),
    /// Exact finite-m quantities under the two-groups model.
    Exact(ExactArgs),
    /// Asymptotically optimal scaling exponent.
    OptimalGamma(OptimalGammaArgs),
    /// Monte Carlo loss study over a gamma x lambda grid.
    Simulate(SimulateArgs),
    /// Price-of-effect curves of the two-test model case.
    ModelCase(ModelCaseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendArg {
    Standard,
    Extended,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScalingArgs {
    /// Exponent of s(r) = r^gamma.
    #[arg(long, conflicts_with = "scaling_file")]
    pub gamma: Option<f64>,
    /// CSV with header `s` listing s(1), ..., s(m).
    #[arg(long)]
    pub scaling_file: Option<PathBuf>,
}

/// Exponent used when neither `--gamma` nor `--scaling-file` is given.
pub const DEFAULT_GAMMA: f64 = 0.5;

impl ScalingArgs {
    fn resolve(&self) -> CliResult<ScalingFunction> {
        match (&self.gamma, &self.scaling_file) {
            (_, Some(path)) => read_scaling(path),
            (Some(g), None) => Ok(ScalingFunction::power(*g)?),
            (None, None) => Ok(ScalingFunction::power(DEFAULT_GAMMA)?),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RejectArgs {
    /// CSV with header `pvalue`.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    /// Write the per-hypothesis CSV here; the JSON summary goes to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(clap::ArgGroup::new("nulls").args(["pi0", "m0", "m1"]).required(true)))]
#[command(group(clap::ArgGroup::new("alt").args(["delta", "f1_file"]).required(true)))]
#[command(group(clap::ArgGroup::new("quantity").args(["cdf", "moment", "sev", "power"]).required(true)))]
pub struct ExactArgs {
    #[arg(long)]
    pub m: usize,
    /// Null proportion.
    #[arg(long)]
    pub pi0: Option<f64>,
    /// Number of nulls; sets pi0 = m0 / m.
    #[arg(long)]
    pub m0: Option<usize>,
    /// Number of alternatives; sets pi0 = 1 - m1 / m.
    #[arg(long)]
    pub m1: Option<usize>,
    /// Gaussian one-sided effect.
    #[arg(long)]
    pub delta: Option<f64>,
    /// CSV with header `u,F` tabulating the alternative cdf.
    #[arg(long, value_name = "PATH")]
    pub f1_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    /// P(V / s(R v 1) <= x).
    #[arg(long, alias = "x", value_name = "X")]
    pub cdf: Option<f64>,
    /// E[(V / s(R v 1))^kappa].
    #[arg(long, alias = "kappa", value_name = "KAPPA")]
    pub moment: Option<usize>,
    /// E[V / s(R v 1)].
    #[arg(long)]
    pub sev: bool,
    /// Expected fraction of alternatives rejected.
    #[arg(long)]
    pub power: bool,
    #[arg(long, value_enum, default_value_t = BackendArg::Standard)]
    pub backend: BackendArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(clap::ArgGroup::new("nulls").args(["m0", "m1"])))]
pub struct OptimalGammaArgs {
    #[arg(long, required_unless_present = "estimate")]
    pub m: Option<usize>,
    #[arg(long)]
    pub m0: Option<usize>,
    #[arg(long)]
    pub m1: Option<usize>,
    #[arg(long, required_unless_present = "estimate")]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    /// Also solve on the default price grid (20 log-spaced points in [1, 100]).
    #[arg(long)]
    pub grid: bool,
    /// Estimate m0 and delta from data by EM (needs --in).
    #[arg(long, requires = "input", conflicts_with_all = ["m", "m0", "m1", "delta"])]
    pub estimate: bool,
    /// CSV with header `pvalue` (or `z` for scores).
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(clap::ArgGroup::new("nulls").args(["m0", "m1"]).required(true)))]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    #[arg(long)]
    pub m0: Option<usize>,
    #[arg(long)]
    pub m1: Option<usize>,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = crate::simulation::DEFAULT_REPLICATIONS)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Comma-separated exponents (default 0, 0.02, ..., 1).
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// Comma-separated prices (default 20 log-spaced points in [1, 100]).
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Write the CSV table here; the JSON summary goes to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelCaseArgs {
    /// Comma-separated levels.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.05])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta_step: f64,
    /// Tabulate the optimal critical value at this price instead.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAM } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Outcome { code, stdout, stderr };
        }
    };
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Some(n),
            _ => {
                return Outcome {
                    code: EXIT_PARAM,
                    stdout: String::new(),
                    stderr: format!("parameter error: {THREADS_ENV} must be a positive integer, got {v:?}\n"),
                }
            }
        },
        Err(_) => None,
    };
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(CliError::Param(format!("cannot start {n} worker threads: {e}"))),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("{e}\n") },
    }
}

fn dispatch(command: &Command) -> CliResult<String> {
    match command {
        Command::Reject(a) => run_reject(a),
        Command::Exact(a) => run_exact(a),
        Command::OptimalGamma(a) => run_optimal_gamma(a),
        Command::Simulate(a) => run_simulate(a),
        Command::ModelCase(a) => run_model_case(a),
    }
}

/// `%.17g`-style formatting: 17 significant digits, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{exp}")
    }
}

fn check_alpha(alpha: f64) -> CliResult<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Param(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    Ok(())
}

fn open_csv(path: &Path) -> CliResult<csv::Reader<File>> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

/// Reads the named numeric columns; rows are reported by file line number.
fn read_columns(path: &Path, names: &[&str]) -> CliResult<Vec<Vec<f64>>> {
    let mut rdr = open_csv(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("{}: bad header: {e}", path.display())))?
        .clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            headers.iter().position(|h| h == *n).ok_or_else(|| {
                CliError::Data(format!("{}: missing column `{n}` in header", path.display()))
            })
        })
        .collect::<CliResult<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| CliError::Data(format!("{}: row {line}: {e}", path.display())))?;
        for (k, &j) in idx.iter().enumerate() {
            let field = rec.get(j).unwrap_or("");
            let x: f64 = field.parse().map_err(|_| {
                CliError::Data(format!(
                    "{}: row {line}: `{field}` in column `{}` is not a number",
                    path.display(),
                    names[k]
                ))
            })?;
            cols[k].push(x);
        }
    }
    if cols[0].is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Ok(cols)
}

/// P-values from a CSV with header `pvalue`.
pub fn read_pvalues(path: &Path) -> CliResult<Vec<f64>> {
    let p = read_columns(path, &["pvalue"])?.remove(0);
    if let Some(i) = p.iter().position(|x| !(0.0..=1.0).contains(x)) {
        return Err(CliError::Data(format!(
            "{}: row {}: p-value {} outside [0, 1]",
            path.display(),
            i + 2,
            p[i]
        )));
    }
    Ok(p)
}

fn read_scaling(path: &Path) -> CliResult<ScalingFunction> {
    let values = read_columns(path, &["s"])?.remove(0);
    Ok(ScalingFunction::table(values)?)
}

fn read_cdf_table(path: &Path) -> CliResult<Cdf> {
    let mut cols = read_columns(path, &["u", "F"])?;
    let f = cols.pop().unwrap();
    let u = cols.pop().unwrap();
    Ok(Cdf::Table(PiecewiseLinear::new(u, f)?))
}

/// Scores for EM: a `z` column is used as is, otherwise `pvalue` is transformed.
fn read_scores(path: &Path) -> CliResult<Vec<f64>> {
    let mut rdr = open_csv(path)?;
    let has_z = rdr
        .headers()
        .map(|h| h.iter().any(|c| c == "z"))
        .unwrap_or(false);
    if has_z {
        Ok(read_columns(path, &["z"])?.remove(0))
    } else {
        Ok(zscores(&read_pvalues(path)?)?)
    }
}

fn write_csv(rows: &[Vec<String>], header: &[&str]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Data(format!("cannot format CSV: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Data(format!("cannot format CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialise");
    s.push('\n');
    s
}

fn config_json<T: Serialize>(subcommand: &str, args: &T) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialise");
    if let Value::Object(map) = &mut v {
        map.insert("subcommand".into(), json!(subcommand));
        if let Ok(t) = std::env::var(THREADS_ENV) {
            map.insert("threads".into(), json!(t));
        }
    }
    v
}

pub fn run_reject(a: &RejectArgs) -> CliResult<String> {
    check_alpha(a.alpha)?;
    let s = a.scaling.resolve()?;
    let p = read_pvalues(&a.input)?;
    let t = build_thresholds(&s, p.len(), a.alpha)?;
    let out = step_up(&p, &t)?;
    let r = out.r();
    let mut config = config_json("reject", a);
    if let Value::Object(map) = &mut config {
        map.insert("gamma".into(), json!(s.gamma()));
    }
    let summary = json!({
        "m": p.len(),
        "R": r,
        "t_R": if r > 0 { Some(t.as_slice()[r - 1]) } else { None },
        "alpha": a.alpha,
        "scaling": s.label(),
        "config": config,
    });
    let rows: Vec<Vec<String>> = p
        .iter()
        .enumerate()
        .map(|(i, &x)| vec![(i + 1).to_string(), fmt_num(x), out.is_rejected(i).to_string()])
        .collect();
    let table = write_csv(&rows, &["index", "pvalue", "rejected"])?;
    match (&a.out, a.format) {
        (Some(path), _) => {
            write_file(path, &table)?;
            Ok(to_json(&summary))
        }
        (None, Format::Csv) => Ok(table),
        (None, Format::Json) => Ok(to_json(&summary)),
    }
}

fn resolve_pi0(m: usize, pi0: Option<f64>, m0: Option<usize>, m1: Option<usize>) -> CliResult<f64> {
    let pi0 = match (pi0, m0, m1) {
        (Some(p), _, _) => p,
        (_, Some(m0), _) if m0 <= m => m0 as f64 / m as f64,
        (_, _, Some(m1)) if m1 <= m => 1.0 - m1 as f64 / m as f64,
        _ => return Err(CliError::Param("m0 / m1 must not exceed m".into())),
    };
    if !(0.0..=1.0).contains(&pi0) {
        return Err(CliError::Param(format!("pi0 = {pi0} must lie in [0, 1]")));
    }
    Ok(pi0)
}

/// Library-side evaluation behind `exact`: `(quantity name, value, pmf of R)`.
pub fn exact_quantity(a: &ExactArgs) -> CliResult<(String, f64, Vec<f64>)> {
    check_alpha(a.alpha)?;
    if a.m == 0 {
        return Err(CliError::Param("m must be >= 1".into()));
    }
    let pi0 = resolve_pi0(a.m, a.pi0, a.m0, a.m1)?;
    let alt = match (&a.delta, &a.f1_file) {
        (Some(d), _) => Cdf::gaussian_shift(*d)?,
        (None, Some(path)) => read_cdf_table(path)?,
        (None, None) => unreachable!("clap requires an alternative"),
    };
    let model = MixtureModel::new(a.m, pi0, alt)?;
    let s = a.scaling.resolve()?;
    let t = build_thresholds(&s, a.m, a.alpha)?;
    let settings = match a.backend {
        BackendArg::Standard => ExactSettings::default(),
        BackendArg::Extended => ExactSettings::extended(),
    };
    let (name, value) = if let Some(x) = a.cdf {
        ("cdf".to_string(), exact::sfdp_cdf(&model, &t, &s, x, &settings)?)
    } else if let Some(k) = a.moment {
        (format!("moment{k}"), exact::sfdp_moment(&model, &t, &s, k, &settings)?)
    } else if a.sev {
        ("sev".to_string(), exact::sev_exact(&model, &t, &s, &settings)?)
    } else {
        ("power".to_string(), exact::power_exact(&model, &t, &settings)?)
    };
    let pmf = exact::rejection_count_pmf(&model, &t, &settings)?;
    Ok((name, value, pmf))
}

pub fn run_exact(a: &ExactArgs) -> CliResult<String> {
    let (name, value, pmf) = exact_quantity(a)?;
    match a.format {
        Format::Json => Ok(to_json(&json!({
            "quantity": name,
            "value": value,
            "pmf": pmf,
            "config": config_json("exact", a),
        }))),
        Format::Csv => {
            let mut rows = vec![vec![name, String::new(), fmt_num(value)]];
            rows.extend(
                pmf.iter()
                    .enumerate()
                    .map(|(r, &p)| vec!["pmf".into(), r.to_string(), fmt_num(p)]),
            );
            write_csv(&rows, &["kind", "r", "value"])
        }
    }
}

fn solution_json(lambda: f64, sol: &OptimalGamma) -> Value {
    json!({
        "lambda": lambda,
        "gamma_star": sol.gamma,
        "u_star": sol.ustar,
        "residuals": {
            "threshold": sol.residual_threshold,
            "stationarity": sol.residual_stationarity,
        },
        "boundary": sol.boundary,
        "loss": sol.loss,
        "expected_rejections": sol.expected_rejections,
        "bonferroni_loss": sol.bonferroni_loss,
    })
}

pub fn run_optimal_gamma(a: &OptimalGammaArgs) -> CliResult<String> {
    check_alpha(a.alpha)?;
    let lambdas: Vec<f64> = if a.grid { default_lambda_grid() } else { vec![a.lambda] };
    let mut main = Value::Null;
    let mut curve = Vec::new();
    let mut rows = Vec::new();
    if a.estimate {
        let path = a.input.as_ref().expect("clap requires --in with --estimate");
        let z = read_scores(path)?;
        let fit = em_fit_multistart(&z, &default_starts(), DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        let fit_json = json!({
            "pi0": fit.pi0,
            "delta": fit.delta,
            "iterations": fit.iterations,
            "converged": fit.converged,
            "degenerate": fit.degenerate,
            "loglik": fit.final_loglik(),
        });
        for &lambda in std::iter::once(&a.lambda).chain(if a.grid { lambdas.iter() } else { [].iter() }) {
            let est = plug_in_gamma(fit.clone(), z.len(), a.alpha, lambda)?;
            let mut v = match &est.solution {
                Some(sol) => solution_json(lambda, sol),
                None => json!({ "lambda": lambda, "gamma_star": est.gamma, "u_star": null, "residuals": null }),
            };
            if let Value::Object(map) = &mut v {
                map.insert("fallback".into(), json!(est.fallback));
                map.insert("m0_hat".into(), json!(est.m0));
            }
            rows.push(vec![
                fmt_num(lambda),
                fmt_num(est.gamma),
                est.solution.map_or(String::new(), |s| fmt_num(s.ustar)),
                est.fallback.to_string(),
            ]);
            if main.is_null() {
                main = v;
                if a.grid {
                    rows.clear();
                }
            } else {
                curve.push(v);
            }
        }
        if let Value::Object(map) = &mut main {
            map.insert("mode".into(), json!("em-estimated"));
            map.insert("fit".into(), fit_json);
        }
    } else {
        let m = a.m.expect("clap requires --m");
        let delta = a.delta.expect("clap requires --delta");
        let m0 = match (a.m0, a.m1) {
            (Some(m0), _) => m0,
            (None, Some(m1)) if m1 <= m => m - m1,
            (None, Some(_)) => return Err(CliError::Param("m1 must not exceed m".into())),
            (None, None) => return Err(CliError::Param("one of --m0 / --m1 is required".into())),
        };
        let base = AsymptoticProblem::gaussian(m, m0, a.alpha, a.lambda, delta, 1.0)?;
        let sol = optimal_gamma(&base)?;
        main = solution_json(a.lambda, &sol);
        if let Value::Object(map) = &mut main {
            map.insert("mode".into(), json!("known-parameters"));
        }
        if !a.grid {
            rows.push(vec![fmt_num(a.lambda), fmt_num(sol.gamma), fmt_num(sol.ustar), sol.boundary.to_string()]);
        }
        for &lambda in if a.grid { lambdas.iter() } else { [].iter() } {
            let sol = optimal_gamma(&base.with_lambda(lambda)?)?;
            rows.push(vec![fmt_num(lambda), fmt_num(sol.gamma), fmt_num(sol.ustar), sol.boundary.to_string()]);
            curve.push(solution_json(lambda, &sol));
        }
    }
    if let Value::Object(map) = &mut main {
        if a.grid {
            map.insert("curve".into(), Value::Array(curve));
        }
        map.insert("config".into(), config_json("optimal-gamma", a));
    }
    match a.format {
        Format::Json => Ok(to_json(&main)),
        Format::Csv => {
            let last = if a.estimate { "fallback" } else { "boundary" };
            write_csv(&rows, &["lambda", "gamma_star", "u_star", last])
        }
    }
}

/// Scenario described by `simulate` arguments.
pub fn simulate_scenario(a: &SimulateArgs) -> CliResult<Scenario> {
    check_alpha(a.alpha)?;
    let m1 = match (a.m0, a.m1) {
        (_, Some(m1)) => m1,
        (Some(m0), None) if m0 <= a.m => a.m - m0,
        _ => return Err(CliError::Param("m0 must not exceed m".into())),
    };
    let mut s = Scenario::new(a.m, m1, a.delta, a.alpha, a.seed)?.with_replications(a.reps)?;
    if !a.gamma.is_empty() {
        s = s.with_gammas(a.gamma.clone())?;
    }
    if !a.lambda.is_empty() {
        s = s.with_lambdas(a.lambda.clone())?;
    }
    Ok(s)
}

pub fn run_simulate(a: &SimulateArgs) -> CliResult<String> {
    let scenario = simulate_scenario(a)?;
    let res = run_grid(&scenario)?;
    let mut rows = Vec::with_capacity(res.loss.len());
    for (k, g) in res.per_gamma.iter().enumerate() {
        for j in 0..scenario.lambdas.len() {
            let c = res.loss_at(k, j);
            rows.push(vec![
                fmt_num(c.gamma),
                fmt_num(c.lambda),
                fmt_num(c.mean),
                fmt_num(c.se),
                fmt_num(g.mean_v),
                fmt_num(g.mean_t),
                fmt_num(g.sev),
                fmt_num(g.fdr),
                g.power.map_or(String::new(), fmt_num),
            ]);
        }
    }
    let table = write_csv(
        &rows,
        &["gamma", "lambda", "mean_loss", "se_loss", "mean_V", "mean_T", "sev_hat", "fdr_hat", "power_hat"],
    )?;
    let summary = json!({
        "argmin": res.argmin,
        "per_gamma": res.per_gamma,
        "scenario": res.scenario,
        "config": config_json("simulate", a),
    });
    match (&a.out, a.format) {
        (Some(path), _) => {
            write_file(path, &table)?;
            Ok(to_json(&summary))
        }
        (None, Format::Csv) => Ok(table),
        (None, Format::Json) => Ok(to_json(&summary)),
    }
}

pub fn run_model_case(a: &ModelCaseArgs) -> CliResult<String> {
    let deltas = delta_grid(a.delta_min, a.delta_max, a.delta_step)?;
    let (header, rows, body): (Vec<&str>, Vec<Vec<String>>, Value) = match a.lambda {
        Some(lambda) => {
            let rows: Vec<(f64, f64)> = deltas
                .iter()
                .map(|&d| Ok((d, optimal_cv(d, lambda)?)))
                .collect::<crate::Result<_>>()?;
            (
                vec!["delta", "lambda", "cv_opt"],
                rows.iter()
                    .map(|&(d, cv)| vec![fmt_num(d), fmt_num(lambda), fmt_num(cv)])
                    .collect(),
                json!({ "rows": rows.iter().map(|&(d, cv)| json!({"delta": d, "lambda": lambda, "cv_opt": cv})).collect::<Vec<_>>() }),
            )
        }
        None => {
            for &alpha in &a.alpha {
                check_alpha(alpha)?;
            }
            let fig = figure1_data(&a.alpha, &deltas)?;
            let mut rows: Vec<Vec<String>> = fig
                .rows
                .iter()
                .map(|r| vec!["curve".into(), fmt_num(r.alpha), fmt_num(r.delta), fmt_num(r.lambda)])
                .collect();
            rows.extend(fig.peaks.iter().map(|p| {
                vec!["peak".into(), fmt_num(p.alpha), fmt_num(p.delta), fmt_num(p.lambda_closed_form)]
            }));
            (
                vec!["kind", "alpha", "delta", "lambda"],
                rows,
                json!({ "peaks": fig.peaks, "rows": fig.rows }),
            )
        }
    };
    let table = write_csv(&rows, &header)?;
    let mut body = body;
    if let Value::Object(map) = &mut body {
        map.insert("config".into(), config_json("model-case", a));
    }
    match (&a.out, a.format) {
        (Some(path), _) => {
            write_file(path, &table)?;
            Ok(to_json(&body))
        }
        (None, Format::Csv) => Ok(table),
        (None, Format::Json) => Ok(to_json(&body)),
    }
}
