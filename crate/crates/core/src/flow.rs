//! Contraction of axisymmetric convex bodies with normal speed
//! `F(κ₁, κ₂)`, in support-function form: `∂s/∂t = −F(1/r₁, 1/r₂)` with
//! `r₁ = s″ + s` (meridional) and `r₂ = cotθ·s′ + s` (parallel).
//!
//! Method of lines on the uniform θ grid with classical RK4 in time and a
//! parabolic step bound. Monitors are computed from the same discrete
//! radii the stepper uses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curvature::{g_quantity, pinch_ratio};
use crate::error::{Error, Result};
use crate::geometry::{inradius_circumradius, PrincipalRadii, RadiiStencil, SupportProfile};
use crate::speeds::Speed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RescaleMode {
    #[default]
    None,
    ByInradius,
    ByExtinctionLaw,
}

impl fmt::Display for RescaleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RescaleMode::None => "none",
            RescaleMode::ByInradius => "by_inradius",
            RescaleMode::ByExtinctionLaw => "by_extinction_law",
        })
    }
}

impl FromStr for RescaleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(RescaleMode::None),
            "by_inradius" => Ok(RescaleMode::ByInradius),
            "by_extinction_law" => Ok(RescaleMode::ByExtinctionLaw),
            other => Err(Error::Spec(format!("unknown rescale mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    /// θ-grid size.
    pub n: usize,
    pub cfl_safety: f64,
    /// Stop once the inradius falls below this fraction of its initial value.
    pub stop_inradius_fraction: f64,
    pub max_steps: usize,
    pub record_every: usize,
    pub rescale_mode: RescaleMode,
    /// Optional final time; the last step is shortened to land on it.
    pub t_end: Option<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            n: 128,
            cfl_safety: 0.5,
            stop_inradius_fraction: 0.05,
            max_steps: 1_000_000,
            record_every: 10,
            rescale_mode: RescaleMode::None,
            t_end: None,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Spec(m));
        if self.n < 5 {
            return bad(format!("n must be at least 5, got {}", self.n));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety));
        }
        if !(self.stop_inradius_fraction > 0.0 && self.stop_inradius_fraction < 1.0) {
            return bad(format!("stop_inradius_fraction must lie in (0, 1), got {}", self.stop_inradius_fraction));
        }
        if self.max_steps == 0 || self.record_every == 0 {
            return bad("max_steps and record_every must be positive".into());
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("t_end must be positive, got {t}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub profile: SupportProfile,
}

impl FlowState {
    pub fn new(profile: SupportProfile) -> Self {
        Self { t: 0.0, profile }
    }
}

/// Diagnostics at one instant. `pinch` is the largest pointwise ratio
/// `κ₂/κ₁`, `f_min` the smallest speed, `kdiff_max` the largest `κ₂ − κ₁`,
/// and `incenter` the axial offset of the inscribed ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorRecord {
    pub t: f64,
    pub g_max: f64,
    pub pinch: f64,
    pub f_min: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    pub kdiff_max: f64,
    pub sphere_dev: f64,
    pub incenter: f64,
}

pub const SERIES_HEADER: &str = "t,g_max,pinch,f_min,r_minus,r_plus,kdiff_max,sphere_dev";

impl MonitorRecord {
    pub fn csv_row(&self) -> Vec<f64> {
        vec![self.t, self.g_max, self.pinch, self.f_min, self.r_minus, self.r_plus, self.kdiff_max, self.sphere_dev]
    }
}

/// Why a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    InradiusThreshold,
    MaxSteps,
    TimeLimit,
    ConvexityLoss { node: usize, radius: f64, t: f64 },
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<MonitorRecord>,
    pub final_state: FlowState,
    pub termination: Termination,
    pub steps: usize,
    /// Final state after the configured rescaling, if any.
    pub rescaled: Option<SupportProfile>,
    pub extinction_time: Option<f64>,
}

/// Reusable stencil and scratch buffers for one grid size.
pub struct Stepper<'a, S: Speed + ?Sized> {
    speed: &'a S,
    stencil: RadiiStencil,
    radii: Vec<PrincipalRadii>,
}

impl<'a, S: Speed + ?Sized> Stepper<'a, S> {
    pub fn new(speed: &'a S, n: usize) -> Self {
        let zero = PrincipalRadii { meridional: 0.0, parallel: 0.0 };
        Self { speed, stencil: RadiiStencil::new(n), radii: vec![zero; n] }
    }

    fn rhs_into(&mut self, s: &[f64], out: &mut [f64]) -> Result<()> {
        self.stencil.radii(s, &mut self.radii)?;
        for (o, r) in out.iter_mut().zip(&self.radii) {
            *o = -self.speed.value(1.0 / r.meridional, 1.0 / r.parallel);
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("flow right-hand side"));
        }
        Ok(())
    }

    pub fn cfl_dt(&mut self, s: &[f64], cfl_safety: f64) -> Result<f64> {
        self.stencil.radii(s, &mut self.radii)?;
        let d = std::f64::consts::PI / (s.len() - 1) as f64;
        let mut worst = 0.0f64;
        for r in &self.radii {
            let g = self.speed.gradient(1.0 / r.meridional, 1.0 / r.parallel);
            let a = g[0] / (r.meridional * r.meridional);
            let b = g[1] / (r.parallel * r.parallel);
            worst = worst.max(a).max(b);
        }
        if !(worst > 0.0 && worst.is_finite()) {
            return Err(Error::NonFinite("parabolic step bound"));
        }
        Ok(cfl_safety * d * d / worst)
    }

    /// One classical RK4 step. Fails with [`Error::ConvexityLoss`] if any
    /// stage leaves the convex cone.
    pub fn step(&mut self, state: &FlowState, dt: f64) -> Result<FlowState> {
        let s0 = state.profile.values();
        let n = s0.len();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        self.rhs_into(s0, &mut k1)?;
        for j in 0..n {
            tmp[j] = s0[j] + 0.5 * dt * k1[j];
        }
        self.rhs_into(&tmp, &mut k2)?;
        for j in 0..n {
            tmp[j] = s0[j] + 0.5 * dt * k2[j];
        }
        self.rhs_into(&tmp, &mut k3)?;
        for j in 0..n {
            tmp[j] = s0[j] + dt * k3[j];
        }
        self.rhs_into(&tmp, &mut k4)?;
        for j in 0..n {
            tmp[j] = s0[j] + dt / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
        }
        self.stencil.radii(&tmp, &mut self.radii)?;
        Ok(FlowState { t: state.t + dt, profile: SupportProfile::new(tmp)? })
    }
}

/// `ds/dt` at every node.
pub fn rhs<S: Speed + ?Sized>(state: &FlowState, speed: &S) -> Result<Vec<f64>> {
    let s = state.profile.values();
    let mut out = vec![0.0; s.len()];
    Stepper::new(speed, s.len()).rhs_into(s, &mut out)?;
    Ok(out)
}

/// `cfl_safety·Δθ² / max_j max(F_{κ₁}/r₁², F_{κ₂}/r₂²)`.
pub fn cfl_dt<S: Speed + ?Sized>(state: &FlowState, speed: &S, cfl_safety: f64) -> Result<f64> {
    let s = state.profile.values();
    Stepper::new(speed, s.len()).cfl_dt(s, cfl_safety)
}

pub fn step<S: Speed + ?Sized>(state: &FlowState, speed: &S, dt: f64) -> Result<FlowState> {
    Stepper::new(speed, state.profile.n()).step(state, dt)
}

pub fn monitors<S: Speed + ?Sized>(state: &FlowState, speed: &S) -> Result<MonitorRecord> {
    let radii = state.profile.radii()?;
    let mut g_max = 0.0f64;
    let mut pinch = 1.0f64;
    let mut f_min = f64::INFINITY;
    let mut kdiff_max = 0.0f64;
    for r in &radii {
        let k = r.curvatures()?;
        g_max = g_max.max(g_quantity(&k));
        pinch = pinch.max(pinch_ratio(&k));
        f_min = f_min.min(speed.value(k.kappa1(), k.kappa2()));
        kdiff_max = kdiff_max.max(k.kappa2() - k.kappa1());
    }
    let d = inradius_circumradius(&state.profile);
    Ok(MonitorRecord {
        t: state.t,
        g_max,
        pinch,
        f_min,
        r_minus: d.inradius,
        r_plus: d.circumradius,
        kdiff_max,
        sphere_dev: d.sphere_deviation,
        incenter: d.incenter,
    })
}

/// `min_θ (s(θ) − c·cosθ)`: the inscribed radius about a fixed center, a
/// lower bound for the inradius.
fn inradius_about(profile: &SupportProfile, cos: &[f64], c: f64) -> f64 {
    profile.values().iter().zip(cos).map(|(s, k)| s - c * k).fold(f64::INFINITY, f64::min)
}

/// Integrates until the inradius drops below the configured fraction, the
/// step budget or `t_end` is exhausted, or convexity is lost. Convexity
/// loss is a termination cause, not an error: the partial series and the
/// last good state are returned.
pub fn run<S: Speed + ?Sized>(initial: &SupportProfile, speed: &S, config: &FlowConfig) -> Result<RunOutcome> {
    config.validate()?;
    if initial.n() != config.n {
        return Err(Error::Spec(format!("initial profile has {} nodes, config asks for {}", initial.n(), config.n)));
    }
    let mut state = FlowState::new(initial.clone());
    let first = monitors(&state, speed)?;
    let threshold = config.stop_inradius_fraction * first.r_minus;
    let cos: Vec<f64> = initial.thetas().iter().map(|t| t.cos()).collect();
    let mut center = first.incenter;
    let mut records = vec![first];
    let mut stepper = Stepper::new(speed, config.n);
    let mut steps = 0usize;
    let termination = loop {
        if steps >= config.max_steps {
            break Termination::MaxSteps;
        }
        if let Some(t_end) = config.t_end {
            if state.t >= t_end {
                break Termination::TimeLimit;
            }
        }
        let mut dt = match stepper.cfl_dt(state.profile.values(), config.cfl_safety) {
            Ok(dt) => dt,
            Err(Error::ConvexityLoss { node, radius }) => {
                break Termination::ConvexityLoss { node, radius, t: state.t }
            }
            Err(e) => return Err(e),
        };
        if let Some(t_end) = config.t_end {
            dt = dt.min(t_end - state.t);
        }
        state = match stepper.step(&state, dt) {
            Ok(next) => next,
            Err(Error::ConvexityLoss { node, radius }) => {
                break Termination::ConvexityLoss { node, radius, t: state.t }
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        let recorded = steps.is_multiple_of(config.record_every);
        if recorded {
            let rec = monitors(&state, speed)?;
            center = rec.incenter;
            records.push(rec);
        }
        if inradius_about(&state.profile, &cos, center) < threshold {
            let rec = monitors(&state, speed)?;
            center = rec.incenter;
            if rec.r_minus < threshold {
                if !recorded {
                    records.push(rec);
                }
                break Termination::InradiusThreshold;
            }
        }
    };
    if records.last().is_none_or(|r| r.t < state.t) {
        records.push(monitors(&state, speed)?);
    }

    let alpha = speed.degree();
    let extinction_time = if records.len() >= 10 { estimate_extinction(&records, alpha).ok() } else { None };
    let last = *records.last().expect("at least the initial record");
    let rescaled = match config.rescale_mode {
        RescaleMode::None => None,
        RescaleMode::ByInradius => Some(state.profile.translated(-last.incenter).scaled(1.0 / last.r_minus)),
        RescaleMode::ByExtinctionLaw => {
            let t_ext = extinction_time.ok_or_else(|| Error::Extinction("too few records to fit".into()))?;
            Some(rescale(&state, last.incenter, t_ext, alpha)?)
        }
    };
    Ok(RunOutcome { records, final_state: state, termination, steps, rescaled, extinction_time })
}

/// Centers on the axial point `center_offset` and divides by the
/// self-similar radius `((1+α)(T−t))^{1/(1+α)}` (`√(2(T−t))` for `α = 1`).
pub fn rescale(state: &FlowState, center_offset: f64, extinction: f64, alpha: f64) -> Result<SupportProfile> {
    let remaining = extinction - state.t;
    if !(remaining > 0.0) {
        return Err(Error::Domain { what: "rescale (needs t < T)", value: state.t });
    }
    let radius = ((1.0 + alpha) * remaining).powf(1.0 / (1.0 + alpha));
    Ok(state.profile.translated(-center_offset).scaled(1.0 / radius))
}

/// Extinction time from the last quartile of a series: a least-squares
/// line through `(t, r₋^{1+α})`, extrapolated to zero.
pub fn estimate_extinction(series: &[MonitorRecord], alpha: f64) -> Result<f64> {
    if series.len() < 10 {
        return Err(Error::Extinction(format!("need at least 10 records, got {}", series.len())));
    }
    let tail = &series[series.len() - series.len().div_ceil(4)..];
    if tail.windows(2).any(|w| !(w[1].r_minus < w[0].r_minus)) {
        return Err(Error::Extinction("inradius is not decreasing over the fitted tail".into()));
    }
    let pts: Vec<(f64, f64)> = tail.iter().map(|r| (r.t, r.r_minus.powf(1.0 + alpha))).collect();
    let k = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sty / stt;
    if !(slope < 0.0) {
        return Err(Error::Extinction(format!("fitted slope {slope} is not negative")));
    }
    Ok(mt - my / slope)
}
