//! The `curvflow` command line.
//!
//! Every subcommand reads one JSON config (`--config FILE`; defaults apply
//! to missing keys, unknown keys are rejected) and writes its artifacts to
//! `--out DIR`. `--print-config` echoes the fully resolved config and
//! exits. Reports are JSON with sorted keys; numbers in CSV files carry
//! 17 significant digits, so identical inputs give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::counterexample::{scan_pinch_violation, PinchProfileSpec, DEFAULT_QUAD_TOL};
use crate::curvature::{critical_ratio, PrincipalCurvatures};
use crate::curvature::{q_form_degree_alpha, q_form_degree_alpha_coefficients};
use crate::error::{Error, Result};
use crate::flow::{run, FlowConfig, RescaleMode, RunOutcome, Termination, SERIES_HEADER};
use crate::geometry::{make_ball, make_spheroid, profile_to_support, SupportProfile};
use crate::io::{read_snapshot, write_profile_file, write_support_file, write_table, Snapshot};
use crate::speeds::{check_derivatives, check_homogeneity, Speed, SpeedFunction};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CONVEXITY_LOSS: i32 = 2;
pub const EXIT_NO_WITNESS: i32 = 3;
pub const EXIT_IDENTITY_FAILURE: i32 = 4;
pub const EXIT_SCAN_MISMATCH: i32 = 5;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "curvflow", version, about = "Curvature flows of convex surfaces of revolution")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON config for the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for independent sweep entries.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Print the resolved config as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a body and record monitors.
    Simulate,
    /// Build a prescribed-ratio profile and scan it for pinching growth.
    BuildCounterexample,
    /// Check Euler identities and derivatives of speed functions.
    VerifyIdentities,
    /// Scan the degree-α gradient form over pinching ratios.
    QformScan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialBody {
    Ball { radius: f64 },
    Spheroid { a: f64, b: f64 },
    ProfileFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeedList {
    One(String),
    Many(Vec<String>),
}

impl SpeedList {
    fn names(&self) -> Vec<String> {
        match self {
            SpeedList::One(s) => vec![s.clone()],
            SpeedList::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub initial: InitialBody,
    /// One speed or a list; a list is run as independent jobs.
    pub speed: SpeedList,
    pub n: usize,
    pub cfl_safety: f64,
    pub stop_inradius_fraction: f64,
    pub max_steps: usize,
    pub record_every: usize,
    pub rescale_mode: RescaleMode,
    pub t_end: Option<f64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        let flow = FlowConfig::default();
        Self {
            initial: InitialBody::Ball { radius: 1.0 },
            speed: SpeedList::One("mean".into()),
            n: flow.n,
            cfl_safety: flow.cfl_safety,
            stop_inradius_fraction: flow.stop_inradius_fraction,
            max_steps: flow.max_steps,
            record_every: flow.record_every,
            rescale_mode: flow.rescale_mode,
            t_end: flow.t_end,
        }
    }
}

impl SimulateConfig {
    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            n: self.n,
            cfl_safety: self.cfl_safety,
            stop_inradius_fraction: self.stop_inradius_fraction,
            max_steps: self.max_steps,
            record_every: self.record_every,
            rescale_mode: self.rescale_mode,
            t_end: self.t_end,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildConfig {
    pub r1: f64,
    pub u0: f64,
    #[serde(rename = "U")]
    pub big_u: f64,
    pub speed: String,
    /// Profile nodes.
    pub m: usize,
    pub quad_tol: f64,
    /// Also write the support function on this many θ nodes.
    pub support_n: Option<usize>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            r1: 3.5,
            u0: 0.05,
            big_u: 1.0,
            speed: "gauss".into(),
            m: 4096,
            quad_tol: DEFAULT_QUAD_TOL,
            support_n: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub speeds: Vec<String>,
    pub samples: usize,
    pub threshold: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            speeds: SpeedFunction::catalog().iter().map(|s| s.to_string()).collect(),
            samples: 10_000,
            threshold: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QformConfig {
    /// Degree; the default speed is `pow:mean:<alpha>`.
    pub alpha: Option<f64>,
    /// Any degree-α speed; overrides the default.
    pub speed: Option<String>,
    pub step: f64,
    /// Largest scanned ratio; default `max(10, 2·r₀(α))`.
    pub r_max: Option<f64>,
}

impl Default for QformConfig {
    fn default() -> Self {
        Self { alpha: Some(2.0), speed: None, step: 0.01, r_max: None }
    }
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Round trip through `Value` so maps come out with sorted keys.
fn to_value<T: Serialize>(v: &T) -> Value {
    let raw = serde_json::to_value(v).expect("config types serialize");
    serde_json::from_str(&raw.to_string()).expect("round trip")
}

fn label(speed: &str) -> String {
    speed.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

fn initial_profile(body: &InitialBody, n: usize) -> Result<SupportProfile> {
    match body {
        InitialBody::Ball { radius } => make_ball(*radius, n),
        InitialBody::Spheroid { a, b } => make_spheroid(*a, *b, n),
        InitialBody::ProfileFile { path } => match read_snapshot(path)? {
            Snapshot::Profile(p) => profile_to_support(&p, n),
            Snapshot::Support(s) if s.n() == n => Ok(s),
            Snapshot::Support(s) => {
                Err(Error::Config(format!("support file has {} nodes but the config asks for n = {n}", s.n())))
            }
        },
    }
}

fn termination_value(t: &Termination) -> Value {
    match t {
        Termination::InradiusThreshold => json!({"kind": "inradius_threshold"}),
        Termination::MaxSteps => json!({"kind": "max_steps"}),
        Termination::TimeLimit => json!({"kind": "time_limit"}),
        Termination::ConvexityLoss { node, radius, t } => {
            json!({"kind": "convexity_loss", "node": node, "radius": radius, "t": t})
        }
    }
}

fn write_run(dir: &Path, speed: &str, outcome: &RunOutcome, seed: u64, config: &Value) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_table(fs::File::create(dir.join("series.csv"))?, SERIES_HEADER, outcome.records.iter().map(|r| r.csv_row()))?;
    write_support_file(&dir.join("final_support.csv"), &outcome.final_state.profile)?;
    if let Some(p) = &outcome.rescaled {
        write_support_file(&dir.join("rescaled_support.csv"), p)?;
    }
    let last = outcome.records.last().expect("runs record their initial state");
    let summary = json!({
        "speed": speed,
        "seed": seed,
        "config": config,
        "termination": termination_value(&outcome.termination),
        "steps": outcome.steps,
        "records": outcome.records.len(),
        "t_final": outcome.final_state.t,
        "extinction_time": outcome.extinction_time,
        "final": {
            "g_max": last.g_max,
            "pinch": last.pinch,
            "f_min": last.f_min,
            "r_minus": last.r_minus,
            "r_plus": last.r_plus,
            "kdiff_max": last.kdiff_max,
            "sphere_dev": last.sphere_dev,
        },
    });
    write_json(&dir.join("summary.json"), &summary)
}

fn cmd_simulate(cfg: &SimulateConfig, global: &GlobalArgs) -> Result<i32> {
    let names = cfg.speed.names();
    if names.is_empty() {
        return Err(Error::Config("speed list is empty".into()));
    }
    let speeds = names.iter().map(|s| s.parse::<SpeedFunction>()).collect::<Result<Vec<_>>>()?;
    let flow = cfg.flow_config();
    flow.validate()?;
    let initial = initial_profile(&cfg.initial, cfg.n)?;
    let outcomes: Vec<Result<RunOutcome>> = speeds.par_iter().map(|s| run(&initial, s, &flow)).collect();
    let config = to_value(cfg);
    fs::create_dir_all(&global.out)?;
    let mut code = EXIT_OK;
    for (name, outcome) in names.iter().zip(outcomes) {
        let outcome = outcome?;
        let dir = if names.len() == 1 { global.out.clone() } else { global.out.join(label(name)) };
        write_run(&dir, name, &outcome, global.seed, &config)?;
        if let Termination::ConvexityLoss { node, radius, t } = outcome.termination {
            eprintln!("{name}: convexity lost at node {node} (radius {radius:e}) at t = {t:e}");
            code = EXIT_CONVEXITY_LOSS;
        }
    }
    Ok(code)
}

fn cmd_build(cfg: &BuildConfig, global: &GlobalArgs) -> Result<i32> {
    let speed: SpeedFunction = cfg.speed.parse()?;
    let spec = PinchProfileSpec { r1: cfg.r1, u0: cfg.u0, big_u: cfg.big_u, quad_tol: cfg.quad_tol };
    spec.validate()?;
    let profile = crate::counterexample::build_profile(&spec, cfg.m)?;
    let scan = scan_pinch_violation(&speed, &spec, cfg.m)?;
    fs::create_dir_all(&global.out)?;
    write_profile_file(&global.out.join("profile.csv"), &profile)?;
    if let Some(n) = cfg.support_n {
        write_support_file(&global.out.join("support.csv"), &profile_to_support(&profile, n)?)?;
    }
    let report = json!({
        "L": scan.half_length,
        "max_uprime_on_annulus": scan.max_uprime_on_annulus,
        "witness": scan.witness,
        "speed": cfg.speed,
        "alpha": speed.degree(),
        "spec": spec,
        "seed": global.seed,
    });
    write_json(&global.out.join("witness.json"), &report)?;
    Ok(if scan.witness.is_some() { EXIT_OK } else { EXIT_NO_WITNESS })
}

fn cmd_verify(cfg: &VerifyConfig, global: &GlobalArgs) -> Result<i32> {
    if cfg.speeds.is_empty() {
        return Err(Error::Config("speed list is empty".into()));
    }
    if cfg.samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    let speeds = cfg.speeds.iter().map(|s| s.parse::<SpeedFunction>()).collect::<Result<Vec<_>>>()?;
    let seed = global.seed;
    let rows: Vec<(String, Value, bool)> = speeds
        .par_iter()
        .map(|s| {
            let h = check_homogeneity(s, cfg.samples, seed);
            let d = check_derivatives(s, cfg.samples, seed);
            let pass = h.euler_first < cfg.threshold && h.euler_second < cfg.threshold;
            let row = json!({
                "alpha": s.degree(),
                "euler_first": h.euler_first,
                "euler_second": h.euler_second,
                "gradient_vs_fd": d.gradient,
                "hessian_vs_fd": d.hessian,
                "pass": pass,
            });
            (s.to_string(), row, pass)
        })
        .collect();
    let all = rows.iter().all(|r| r.2);
    let per_speed: serde_json::Map<String, Value> = rows.into_iter().map(|(k, v, _)| (k, v)).collect();
    let report = json!({
        "seed": seed,
        "samples": cfg.samples,
        "threshold": cfg.threshold,
        "speeds": per_speed,
        "pass": all,
    });
    fs::create_dir_all(&global.out)?;
    write_json(&global.out.join("identities.json"), &report)?;
    Ok(if all { EXIT_OK } else { EXIT_IDENTITY_FAILURE })
}

/// Outcome of a ratio scan of the degree-α gradient form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QformScan {
    pub alpha: f64,
    pub critical_ratio: Option<f64>,
    /// First scanned ratio at which the `(∇₂h₁₁)²` coefficient is no
    /// longer negative.
    pub sign_change: Option<f64>,
    pub all_q_nonpositive: bool,
    pub rows: Vec<[f64; 4]>,
}

impl QformScan {
    /// Sign change within one grid step of `r₀(α)`, or no sign change and
    /// `Q ≤ 0` throughout when `α = 1`.
    pub fn consistent(&self, step: f64) -> bool {
        match (self.critical_ratio, self.sign_change) {
            (Some(r0), Some(r)) => (r - r0).abs() <= step * (1.0 + 1e-9),
            (None, None) => self.all_q_nonpositive,
            _ => false,
        }
    }
}

/// Scans `κ = (1, r)` on the grid `r = 1 + k·step`, `k ≥ 1`, recording the
/// two coefficients and `Q` at unit gradients.
pub fn qform_scan<S: Speed + ?Sized>(speed: &S, step: f64, r_max: Option<f64>) -> Result<QformScan> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::Config(format!("step must lie in (0, 1), got {step}")));
    }
    let alpha = speed.degree();
    let r0 = if alpha > 1.0 + 1e-12 { Some(critical_ratio(alpha)?) } else { None };
    let r_max = r_max.unwrap_or_else(|| r0.map_or(10.0, |r| (2.0 * r).max(10.0)));
    if !(r_max > 1.0 + step) {
        return Err(Error::Config(format!("r_max must exceed 1 + step, got {r_max}")));
    }
    let count = ((r_max - 1.0) / step).floor() as usize;
    let mut rows = Vec::with_capacity(count);
    let mut sign_change = None;
    let mut all_q_nonpositive = true;
    for k in 1..=count {
        let r = 1.0 + k as f64 * step;
        let kappa = PrincipalCurvatures::new(1.0, r)?;
        let [c1, c2] = q_form_degree_alpha_coefficients(speed, &kappa)?;
        let q = q_form_degree_alpha(speed, &kappa, 1.0, 1.0)?;
        if sign_change.is_none() && c2 >= 0.0 {
            sign_change = Some(r);
        }
        all_q_nonpositive &= q <= 0.0;
        rows.push([r, c1, c2, q]);
    }
    Ok(QformScan { alpha, critical_ratio: r0, sign_change, all_q_nonpositive, rows })
}

fn qform_speed(cfg: &QformConfig) -> Result<SpeedFunction> {
    match (&cfg.speed, cfg.alpha) {
        (Some(name), alpha) => {
            let s: SpeedFunction = name.parse()?;
            if let Some(a) = alpha {
                if (s.degree() - a).abs() > 1e-12 {
                    return Err(Error::Config(format!(
                        "speed `{name}` has degree {}, config says alpha = {a}",
                        s.degree()
                    )));
                }
            }
            Ok(s)
        }
        (None, Some(a)) => SpeedFunction::power_of(SpeedFunction::mean(), a),
        (None, None) => Err(Error::Config("qform-scan needs `alpha` or `speed`".into())),
    }
}

fn cmd_qform(cfg: &QformConfig, global: &GlobalArgs) -> Result<i32> {
    let speed = qform_speed(cfg)?;
    let scan = qform_scan(&speed, cfg.step, cfg.r_max)?;
    fs::create_dir_all(&global.out)?;
    write_table(
        fs::File::create(global.out.join("qform_scan.csv"))?,
        "r,coef_d1h22,coef_d2h11,q",
        scan.rows.iter().map(|r| r.to_vec()),
    )?;
    let consistent = scan.consistent(cfg.step);
    let report = json!({
        "speed": speed.to_string(),
        "alpha": scan.alpha,
        "critical_ratio": scan.critical_ratio,
        "sign_change": scan.sign_change,
        "all_q_nonpositive": scan.all_q_nonpositive,
        "step": cfg.step,
        "consistent": consistent,
        "seed": global.seed,
    });
    write_json(&global.out.join("qform_scan.json"), &report)?;
    Ok(if consistent { EXIT_OK } else { EXIT_SCAN_MISMATCH })
}

fn dispatch<T, F>(global: &GlobalArgs, f: F) -> Result<i32>
where
    T: DeserializeOwned + Serialize + Default,
    F: FnOnce(&T, &GlobalArgs) -> Result<i32>,
{
    let cfg: T = load_config(global.config.as_deref())?;
    if global.print_config {
        println!("{}", serde_json::to_string_pretty(&to_value(&cfg)).expect("serializable"));
        return Ok(EXIT_OK);
    }
    f(&cfg, global)
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let global = &cli.global;
    let work = || match cli.command {
        Command::Simulate => dispatch::<SimulateConfig, _>(global, cmd_simulate),
        Command::BuildCounterexample => dispatch::<BuildConfig, _>(global, cmd_build),
        Command::VerifyIdentities => dispatch::<VerifyConfig, _>(global, cmd_verify),
        Command::QformScan => dispatch::<QformConfig, _>(global, cmd_qform),
    };
    let result = match global.jobs {
        Some(0) => Err(Error::Config("--jobs must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(Error::Config(format!("cannot start {n} workers: {e}"))),
        },
        None => work(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("curvflow: {e}");
            EXIT_CONFIG
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
