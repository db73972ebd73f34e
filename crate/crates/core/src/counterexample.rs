//! Surfaces of revolution with a prescribed ratio of principal curvatures.
//!
//! For a meridian `u(x)` the ratio of meridional to rotational curvature is
//! `−uu″/(1+u′²)`. Prescribing it as a function `f(u)` gives an equation
//! with first integral `1 + u′² = exp(2∫_u^U f(z)/z dz)`, where `U` is the
//! equatorial radius (`u′ = 0` there). With `f ≡ r₁` on `u ≥ u₀` the
//! surface carries an annulus of constant ratio `r₁` whose slope grows
//! without bound as `u₀ → 0`; for a degree `α > 1` speed and `r₁` above the
//! critical ratio the pinching there gets worse under the flow.

use serde::Serialize;

use crate::curvature::{g_gradient, PrincipalCurvatures};
use crate::error::{Error, Result};
use crate::geometry::{grad2_h11_formula, hermite_resample, RevolutionProfile};
use crate::quadrature::integrate;
use crate::speeds::Speed;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Ratio profile `f(u) = 1 + (r₁−1)·φ(u/u₀)` below `u₀` and `r₁` above,
/// on a body of equatorial radius `U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchProfileSpec {
    pub r1: f64,
    pub u0: f64,
    #[serde(rename = "U")]
    pub big_u: f64,
    pub quad_tol: f64,
}

impl PinchProfileSpec {
    pub fn new(r1: f64, u0: f64, big_u: f64) -> Result<Self> {
        let spec = Self { r1, u0, big_u, quad_tol: DEFAULT_QUAD_TOL };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r1 > 1.0 && self.r1.is_finite()) {
            return Err(Error::Spec(format!("r1 must exceed 1, got {}", self.r1)));
        }
        if !(self.u0 > 0.0 && self.u0 < self.big_u && self.big_u.is_finite()) {
            return Err(Error::Spec(format!("need 0 < u0 < U, got u0 = {}, U = {}", self.u0, self.big_u)));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1e-3) {
            return Err(Error::Spec(format!("quad_tol must lie in (0, 1e-3), got {}", self.quad_tol)));
        }
        Ok(())
    }
}

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `C^∞` step from 0 on `t ≤ 0` to 1 on `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = psi(t);
        a / (a + psi(1.0 - t))
    }
}

pub fn transition_function(spec: &PinchProfileSpec, u: f64) -> f64 {
    if u >= spec.u0 {
        spec.r1
    } else {
        1.0 + (spec.r1 - 1.0) * smooth_step(u / spec.u0)
    }
}

/// `Ψ(τ) = ∫_τ^1 φ(σ)/σ dσ` tabulated on a uniform grid and interpolated
/// with cubic Hermite splines using the exact derivative `−φ(τ)/τ`.
struct StepPrimitive {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl StepPrimitive {
    const CELLS: usize = 4096;

    fn new(tol: f64) -> Result<Self> {
        let h = 1.0 / Self::CELLS as f64;
        let nodes: Vec<f64> = (0..=Self::CELLS).map(|j| j as f64 * h).collect();
        let integrand = |s: f64| smooth_step(s) / s;
        let mut values = vec![0.0; Self::CELLS + 1];
        for j in (0..Self::CELLS).rev() {
            values[j] = values[j + 1] + integrate(integrand, nodes[j], nodes[j + 1], tol * h, tol)?;
        }
        let slopes = nodes.iter().map(|&t| if t > 0.0 { -integrand(t) } else { 0.0 }).collect();
        Ok(Self { nodes, values, slopes })
    }

    fn eval(&self, tau: f64) -> f64 {
        if tau >= 1.0 {
            return 0.0;
        }
        let tau = tau.max(0.0);
        let j = ((tau * Self::CELLS as f64) as usize).min(Self::CELLS - 1);
        let r = j..j + 2;
        hermite_resample(&self.nodes[r.clone()], &self.values[r.clone()], &self.slopes[r], &[tau])[0]
    }
}

enum Ratio {
    Constant(f64),
    Transition { r1: f64, u0: f64, primitive: StepPrimitive },
}

/// The prescribed ratio together with `I(u) = ∫_u^U f(z)/z dz`, expressed
/// in the variable `t = √(U − u)` that regularizes the equator.
struct Construction {
    ratio: Ratio,
    big_u: f64,
    quad_tol: f64,
}

impl Construction {
    fn f(&self, u: f64) -> f64 {
        match &self.ratio {
            Ratio::Constant(r) => *r,
            Ratio::Transition { r1, u0, .. } => {
                if u >= *u0 {
                    *r1
                } else {
                    1.0 + (r1 - 1.0) * smooth_step(u / u0)
                }
            }
        }
    }

    /// `I` at `u = U − t²`; `ln(U/u)` is evaluated as `−ln(1 − t²/U)` so the
    /// value keeps full relative precision as `t → 0`.
    fn big_i(&self, t: f64) -> f64 {
        let t2 = t * t;
        let u = self.big_u - t2;
        let log_ratio = if u <= 0.0 {
            f64::INFINITY
        } else if 2.0 * u > self.big_u {
            -(-t2 / self.big_u).ln_1p()
        } else {
            (self.big_u / u).ln()
        };
        match &self.ratio {
            Ratio::Constant(r) => r * log_ratio,
            Ratio::Transition { r1, u0, primitive } => {
                if u >= *u0 {
                    r1 * log_ratio
                } else if u <= 0.0 {
                    f64::INFINITY
                } else {
                    r1 * (self.big_u / u0).ln() + (u0 / u).ln() + (r1 - 1.0) * primitive.eval(u / u0)
                }
            }
        }
    }

    /// `(ds/dt, dx/dt)` for arc length `s` and axial coordinate `x`, both
    /// measured from the equator.
    fn rates(&self, t: f64) -> (f64, f64) {
        let two_i = 2.0 * self.big_i(t);
        let ds = 2.0 * t / (-(-two_i).exp_m1()).sqrt();
        let dx = if two_i.is_finite() { 2.0 * t / two_i.exp_m1().sqrt() } else { 0.0 };
        (ds, dx)
    }

    /// Exact `|u′|` from the first integral.
    fn slope(&self, u: f64) -> f64 {
        let t = (self.big_u - u).max(0.0).sqrt();
        (2.0 * self.big_i(t)).exp_m1().sqrt()
    }

    fn t_max(&self) -> f64 {
        self.big_u.sqrt()
    }

    fn panel(&self, a: f64, b: f64, which: usize) -> Result<f64> {
        let tol = self.quad_tol * (b - a).abs() / self.t_max();
        integrate(
            |t| {
                let r = self.rates(t);
                if which == 0 {
                    r.0
                } else {
                    r.1
                }
            },
            a,
            b,
            tol,
            self.quad_tol,
        )
    }

    /// Upper half of the meridian sampled at the arc lengths in `targets`
    /// (ascending, from the equator). Returns `(s_total, x, u)` with one
    /// entry per target.
    fn sample(&self, targets_fraction: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let t_end = self.t_max();
        let total = self.panel(0.0, t_end, 0)?;
        let mut xs = Vec::with_capacity(targets_fraction.len());
        let mut us = Vec::with_capacity(targets_fraction.len());
        let (mut t_prev, mut s_prev, mut x_prev) = (0.0f64, 0.0, 0.0);
        for &frac in targets_fraction {
            if frac <= 0.0 {
                xs.push(0.0);
                us.push(self.big_u);
                continue;
            }
            if frac >= 1.0 {
                x_prev += self.panel(t_prev, t_end, 1)?;
                t_prev = t_end;
                s_prev = total;
                xs.push(x_prev);
                us.push(0.0);
                continue;
            }
            let target = frac * total;
            // Safeguarded Newton on s(t) = target, bracketed in [lo, hi].
            let (mut lo, mut hi) = (t_prev, t_end);
            let mut t = (t_prev + (target - s_prev) / self.rates(t_prev.max(1e-300)).0).clamp(lo, hi);
            let mut s_t = s_prev + self.panel(t_prev, t, 0)?;
            for _ in 0..100 {
                let resid = s_t - target;
                if resid.abs() <= 1e-15 * total {
                    break;
                }
                if resid > 0.0 {
                    hi = t;
                } else {
                    lo = t;
                }
                let mut next = t - resid / self.rates(t).0;
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                if next == t {
                    break;
                }
                t = next;
                s_t = s_prev + self.panel(t_prev, t, 0)?;
            }
            x_prev += self.panel(t_prev, t, 1)?;
            t_prev = t;
            s_prev = s_t;
            xs.push(x_prev);
            us.push(self.big_u - t * t);
        }
        Ok((total, xs, us))
    }

    /// Even meridian on `m` nodes equally spaced in arc length.
    fn build(&self, m: usize) -> Result<RevolutionProfile> {
        Ok(self.build_with_arc_length(m)?.0)
    }

    /// The profile and the arc length of its upper half.
    fn build_with_arc_length(&self, m: usize) -> Result<(RevolutionProfile, f64)> {
        if m < 7 {
            return Err(Error::Spec(format!("need at least 7 profile nodes, got {m}")));
        }
        // Node k sits at signed arc length (2k/(m−1) − 1)·S from the equator.
        let upper: Vec<usize> = (0..m).filter(|&k| 2 * k + 1 >= m).collect();
        let fracs: Vec<f64> = upper.iter().map(|&k| (2.0 * k as f64 / (m - 1) as f64 - 1.0).abs()).collect();
        let (total, xs, us) = self.sample(&fracs)?;
        let mut x = vec![0.0; m];
        let mut u = vec![0.0; m];
        for (i, &k) in upper.iter().enumerate() {
            x[k] = xs[i];
            u[k] = us[i];
            x[m - 1 - k] = -xs[i];
            u[m - 1 - k] = us[i];
        }
        Ok((RevolutionProfile::new(x, u)?, total))
    }
}

fn construction(spec: &PinchProfileSpec) -> Result<Construction> {
    spec.validate()?;
    Ok(Construction {
        ratio: Ratio::Transition { r1: spec.r1, u0: spec.u0, primitive: StepPrimitive::new(spec.quad_tol)? },
        big_u: spec.big_u,
        quad_tol: spec.quad_tol,
    })
}

fn constant_construction(ratio: f64, big_u: f64, quad_tol: f64) -> Result<Construction> {
    if !(ratio >= 1.0 && ratio.is_finite()) {
        return Err(Error::Spec(format!("constant ratio must be at least 1, got {ratio}")));
    }
    if !(big_u > 0.0 && big_u.is_finite()) {
        return Err(Error::Spec(format!("U must be positive, got {big_u}")));
    }
    Ok(Construction { ratio: Ratio::Constant(ratio), big_u, quad_tol })
}

/// Meridian with ratio `f(u)` on `m` nodes equally spaced in arc length,
/// even about `x = 0`, tips at `x = ±L`.
pub fn build_profile(spec: &PinchProfileSpec, m: usize) -> Result<RevolutionProfile> {
    construction(spec)?.build(m)
}

/// Meridian with constant ratio `f ≡ ratio ≥ 1`. `ratio = 1` gives the
/// semicircle of radius `U`.
pub fn build_constant_ratio_profile(ratio: f64, big_u: f64, m: usize, quad_tol: f64) -> Result<RevolutionProfile> {
    constant_construction(ratio, big_u, quad_tol)?.build(m)
}

/// Exact `|u′|` at radius `u` on the profile of `spec`.
pub fn slope_magnitude(spec: &PinchProfileSpec, u: f64) -> Result<f64> {
    Ok(construction(spec)?.slope(u))
}

/// `∂G/∂t` on the constant-ratio annulus for a degree-`α` speed:
///
/// `F·G_{κ₂}·(r₁−1)/(r₁u²(1+u′²)) · [α((α−1)r₁(r₁−1)−2)u′²(1+u′²)³ − (α−1)r₁²]`
///
/// with `κ₁ = 1/(u√(1+u′²))`, `κ₂ = r₁κ₁`, evaluated as written.
pub fn dgdt_annulus<S: Speed + ?Sized>(speed: &S, r1: f64, u: f64, uprime: f64) -> Result<f64> {
    if !(r1 > 1.0) {
        return Err(Error::Domain { what: "dgdt_annulus ratio r1 (needs r1 > 1)", value: r1 });
    }
    if !(u > 0.0) {
        return Err(Error::Domain { what: "dgdt_annulus radius u (needs u > 0)", value: u });
    }
    let alpha = speed.degree();
    let q = uprime * uprime;
    let k1 = 1.0 / (u * (1.0 + q).sqrt());
    let kappa = PrincipalCurvatures::new(k1, r1 * k1)?;
    let f = speed.value(kappa.kappa1(), kappa.kappa2());
    let g2 = g_gradient(&kappa)[1];
    let bracket = annulus_bracket(alpha, r1, uprime);
    let value = f * g2 * (r1 - 1.0) / (r1 * u * u * (1.0 + q)) * bracket;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("dgdt_annulus"))
    }
}

/// The bracket `α((α−1)r₁(r₁−1)−2)u′²(1+u′²)³ − (α−1)r₁²`, which alone
/// decides the sign of [`dgdt_annulus`].
pub fn annulus_bracket(alpha: f64, r1: f64, uprime: f64) -> f64 {
    let q = uprime * uprime;
    alpha * ((alpha - 1.0) * r1 * (r1 - 1.0) - 2.0) * q * (1.0 + q).powi(3) - (alpha - 1.0) * r1 * r1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchWitness {
    pub x: f64,
    pub u: f64,
    pub uprime: f64,
    pub dgdt: f64,
}

/// Result of scanning a built profile: the half-length, the steepest slope
/// on the annulus and the best witness, if any node has `∂G/∂t > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationScan {
    #[serde(rename = "L")]
    pub half_length: f64,
    pub max_uprime_on_annulus: f64,
    pub witness: Option<PinchWitness>,
}

/// Builds the profile and evaluates [`dgdt_annulus`] at every interior
/// node on the annulus `u ≥ u₀`, with `u′` from the first integral.
pub fn scan_pinch_violation<S: Speed + ?Sized>(speed: &S, spec: &PinchProfileSpec, m: usize) -> Result<ViolationScan> {
    let c = construction(spec)?;
    let profile = c.build(m)?;
    let alpha = speed.degree();
    if !(alpha > 1.0) {
        return Err(Error::SpeedContract(format!("the annulus scan needs degree > 1, got {alpha}")));
    }
    let mut best: Option<PinchWitness> = None;
    let mut max_slope = 0.0f64;
    for i in 1..profile.len() - 1 {
        let (x, u) = (profile.x()[i], profile.u()[i]);
        if u < spec.u0 {
            continue;
        }
        let uprime = -x.signum() * c.slope(u);
        max_slope = max_slope.max(uprime.abs());
        let dgdt = dgdt_annulus(speed, spec.r1, u, uprime)?;
        if dgdt > 0.0 && best.is_none_or(|b| dgdt > b.dgdt) {
            best = Some(PinchWitness { x, u, uprime, dgdt });
        }
    }
    Ok(ViolationScan { half_length: profile.half_length(), max_uprime_on_annulus: max_slope, witness: best })
}

pub fn find_pinch_violation<S: Speed + ?Sized>(
    speed: &S,
    spec: &PinchProfileSpec,
    m: usize,
) -> Result<Option<PinchWitness>> {
    Ok(scan_pinch_violation(speed, spec, m)?.witness)
}

/// `|∇₂h₁₁|²` from [`grad2_h11_formula`] next to an independent estimate:
/// the rotational curvature differentiated in arc length along the built
/// meridian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grad2Comparison {
    pub x: f64,
    pub u: f64,
    pub uprime: f64,
    pub f: f64,
    pub formula: f64,
    pub finite_difference: f64,
    pub ratio: f64,
}

/// Comparison at every interior node at least three nodes from the tips.
/// Nodes of a built profile are equally spaced in arc length.
pub fn grad2_h11_comparison(spec: &PinchProfileSpec, m: usize) -> Result<Vec<Grad2Comparison>> {
    let c = construction(spec)?;
    let (profile, half_arc) = c.build_with_arc_length(m)?;
    let curv = profile.curvatures()?;
    let h = 2.0 * half_arc / (m - 1) as f64;
    let k: Vec<f64> = curv.iter().map(|c| c.rotational).collect();
    let mut out = Vec::new();
    for i in 2..k.len() - 2 {
        let dk = (-k[i + 2] + 8.0 * k[i + 1] - 8.0 * k[i - 1] + k[i - 2]) / (12.0 * h);
        let node = curv[i];
        let f = c.f(node.u);
        let uprime = -node.x.signum() * c.slope(node.u);
        let formula = grad2_h11_formula(node.u, uprime, f);
        let finite_difference = dk * dk;
        out.push(Grad2Comparison {
            x: node.x,
            u: node.u,
            uprime,
            f,
            formula,
            finite_difference,
            ratio: formula / finite_difference,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::speeds::SpeedFunction;

    #[test]
    fn smooth_step_values() {
        let spec = PinchProfileSpec::new(3.0, 0.2, 1.0).unwrap();
        assert_eq!(transition_function(&spec, 0.0), 1.0);
        assert_eq!(transition_function(&spec, 0.2), 3.0);
        assert!((transition_function(&spec, 0.1) - 2.0).abs() < 1e-15);
        assert_eq!(transition_function(&spec, 0.7), 3.0);
        let mut prev = 0.0;
        for i in 1..=100 {
            let v = smooth_step(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn spec_validation() {
        assert!(PinchProfileSpec::new(1.0, 0.05, 1.0).is_err());
        assert!(PinchProfileSpec::new(2.0, 1.0, 1.0).is_err());
        assert!(PinchProfileSpec::new(2.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn step_primitive_matches_direct_quadrature() {
        let p = StepPrimitive::new(1e-12).unwrap();
        for tau in [0.0, 0.013, 0.25, 0.5, 0.77, 0.999] {
            let direct = integrate(|s| smooth_step(s) / s, tau, 1.0, 1e-15, 1e-14).unwrap();
            assert!((p.eval(tau) - direct).abs() < 1e-12, "{tau}");
        }
    }

    #[test]
    fn big_i_is_continuous_at_u0() {
        let c = construction(&PinchProfileSpec::new(3.5, 0.05, 1.0).unwrap()).unwrap();
        let t0 = (1.0f64 - 0.05).sqrt();
        let (a, b) = (c.big_i(t0 * (1.0 - 1e-12)), c.big_i(t0 * (1.0 + 1e-12)));
        assert!((a - b).abs() < 1e-9 * a, "{a} {b}");
    }

    #[test]
    fn bracket_examples() {
        let b = annulus_bracket(2.0, 3.5, 1.5);
        assert!((b - (13.5 * 2.25 * 3.25f64.powi(3) - 12.25)).abs() < 1e-9);
        assert_eq!(annulus_bracket(2.0, 2.0, 7.0), -4.0);
        let gauss = SpeedFunction::gauss();
        assert!(dgdt_annulus(&gauss, 3.5, 0.4, 1.5).unwrap() > 0.0);
        assert!(dgdt_annulus(&gauss, 3.5, 0.4, 0.0).unwrap() < 0.0);
        assert!(dgdt_annulus(&gauss, 2.0, 0.4, 3.0).unwrap() < 0.0);
        assert!(dgdt_annulus(&gauss, 1.0, 0.4, 3.0).is_err());
    }

    #[test]
    fn semicircle_from_unit_ratio() {
        let p = build_constant_ratio_profile(1.0, 1.0, 257, DEFAULT_QUAD_TOL).unwrap();
        for (x, u) in p.x().iter().zip(p.u()) {
            assert!((x.hypot(*u) - 1.0).abs() < 1e-9);
        }
    }
}
