//! Symmetric, homogeneous speed functions `F(κ₁, κ₂)` of the principal
//! curvatures.
//!
//! Every catalog entry carries closed-form first and second derivatives.
//! The catalog is normalized so that `F(1, 1) = 1`; degree-one entries are
//! the means (arithmetic, power, geometric, harmonic), the Gauss curvature
//! has degree two, and [`SpeedKind::PowerOf`] raises any entry to a power
//! `e ≥ 1`, multiplying the degree by `e`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::PrincipalCurvatures;
use crate::error::{Error, Result};
use crate::finite_diff;

/// Anything that can drive the flow: a symmetric function of the two
/// principal curvatures together with its homogeneity degree.
///
/// `hessian` falls back to central differences of `gradient` when an
/// implementor has no closed form.
pub trait Speed: Sync {
    fn value(&self, k1: f64, k2: f64) -> f64;

    fn gradient(&self, k1: f64, k2: f64) -> [f64; 2];

    fn hessian(&self, k1: f64, k2: f64) -> [[f64; 2]; 2] {
        let h1 = 1e-5 * k1;
        let h2 = 1e-5 * k2;
        let gp = self.gradient(k1 + h1, k2);
        let gm = self.gradient(k1 - h1, k2);
        let hp = self.gradient(k1, k2 + h2);
        let hm = self.gradient(k1, k2 - h2);
        let f11 = (gp[0] - gm[0]) / (2.0 * h1);
        let f22 = (hp[1] - hm[1]) / (2.0 * h2);
        let f12 = 0.5 * ((gp[1] - gm[1]) / (2.0 * h1) + (hp[0] - hm[0]) / (2.0 * h2));
        [[f11, f12], [f12, f22]]
    }

    /// Homogeneity degree α.
    fn degree(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpeedKind {
    /// (κ₁ + κ₂)/2
    Mean,
    /// ((κ₁ᵖ + κ₂ᵖ)/2)^{1/p}, p ≠ 0
    PowerMean(f64),
    /// √(κ₁κ₂)
    Geometric,
    /// 2κ₁κ₂/(κ₁ + κ₂)
    Harmonic,
    /// κ₁κ₂
    Gauss,
    /// base^e with e ≥ 1
    PowerOf(Box<SpeedFunction>, f64),
    /// κ₁ + κ₂², deliberately not homogeneous. Only useful for exercising
    /// the identity validators.
    NonHomogeneousProbe,
}

/// A catalog speed. Construct through the named constructors or by parsing
/// the textual form (`mean`, `power_mean:4`, `geometric`, `harmonic`,
/// `gauss`, `pow:mean:3`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedFunction {
    kind: SpeedKind,
}

impl SpeedFunction {
    pub fn mean() -> Self {
        Self { kind: SpeedKind::Mean }
    }

    pub fn power_mean(p: f64) -> Result<Self> {
        if !p.is_finite() || p == 0.0 {
            return Err(Error::SpeedContract(format!(
                "power_mean exponent must be finite and nonzero (got {p}); use `geometric` for p = 0"
            )));
        }
        Ok(Self { kind: SpeedKind::PowerMean(p) })
    }

    pub fn geometric() -> Self {
        Self { kind: SpeedKind::Geometric }
    }

    pub fn harmonic() -> Self {
        Self { kind: SpeedKind::Harmonic }
    }

    pub fn gauss() -> Self {
        Self { kind: SpeedKind::Gauss }
    }

    pub fn power_of(base: SpeedFunction, exponent: f64) -> Result<Self> {
        if !exponent.is_finite() || exponent < 1.0 {
            return Err(Error::SpeedContract(format!("power exponent must be >= 1 (got {exponent})")));
        }
        if base.kind == SpeedKind::NonHomogeneousProbe {
            return Err(Error::SpeedContract("cannot raise the probe speed to a power".into()));
        }
        Ok(Self { kind: SpeedKind::PowerOf(Box::new(base), exponent) })
    }

    pub fn non_homogeneous_probe() -> Self {
        Self { kind: SpeedKind::NonHomogeneousProbe }
    }

    pub fn kind(&self) -> &SpeedKind {
        &self.kind
    }

    pub fn alpha(&self) -> f64 {
        match &self.kind {
            SpeedKind::Gauss => 2.0,
            SpeedKind::PowerOf(base, e) => e * base.alpha(),
            _ => 1.0,
        }
    }

    /// Degree-one speeds used throughout the test suites.
    pub fn degree_one_catalog() -> Vec<SpeedFunction> {
        vec![
            Self::mean(),
            Self::geometric(),
            Self::harmonic(),
            Self::power_mean(2.0).unwrap(),
            Self::power_mean(4.0).unwrap(),
            Self::power_mean(0.5).unwrap(),
            Self::power_mean(-2.0).unwrap(),
        ]
    }

    /// Every catalog kind, including a few higher-degree entries.
    pub fn catalog() -> Vec<SpeedFunction> {
        let mut all = Self::degree_one_catalog();
        all.push(Self::gauss());
        all.push(Self::power_of(Self::mean(), 3.0).unwrap());
        all.push(Self::power_of(Self::power_mean(4.0).unwrap(), 1.5).unwrap());
        all.push(Self::power_of(Self::gauss(), 2.5).unwrap());
        all
    }

    pub fn eval(&self, kappa: &PrincipalCurvatures) -> f64 {
        self.value(kappa.kappa1(), kappa.kappa2())
    }

    pub fn grad(&self, kappa: &PrincipalCurvatures) -> [f64; 2] {
        self.gradient(kappa.kappa1(), kappa.kappa2())
    }

    pub fn hess(&self, kappa: &PrincipalCurvatures) -> [[f64; 2]; 2] {
        self.hessian(kappa.kappa1(), kappa.kappa2())
    }
}

/// Weights `aᵖ/(aᵖ + bᵖ)` and `bᵖ/(aᵖ + bᵖ)`, computed without overflow.
fn power_weights(a: f64, b: f64, p: f64) -> (f64, f64) {
    // w_a = 1/(1 + (b/a)^p)
    let q = (b / a).powf(p);
    if q.is_infinite() {
        return (0.0, 1.0);
    }
    let wa = 1.0 / (1.0 + q);
    (wa, q / (1.0 + q))
}

fn power_mean_value(a: f64, b: f64, p: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if p > 0.0 {
        hi * ((1.0 + (lo / hi).powf(p)) * 0.5).powf(1.0 / p)
    } else {
        lo * ((1.0 + (hi / lo).powf(p)) * 0.5).powf(1.0 / p)
    }
}

impl Speed for SpeedFunction {
    fn value(&self, a: f64, b: f64) -> f64 {
        match &self.kind {
            SpeedKind::Mean => 0.5 * (a + b),
            SpeedKind::PowerMean(p) => power_mean_value(a, b, *p),
            SpeedKind::Geometric => (a * b).sqrt(),
            SpeedKind::Harmonic => 2.0 * a * b / (a + b),
            SpeedKind::Gauss => a * b,
            SpeedKind::PowerOf(base, e) => base.value(a, b).powf(*e),
            SpeedKind::NonHomogeneousProbe => a + b * b,
        }
    }

    fn gradient(&self, a: f64, b: f64) -> [f64; 2] {
        match &self.kind {
            SpeedKind::Mean => [0.5, 0.5],
            SpeedKind::PowerMean(p) => {
                let f = power_mean_value(a, b, *p);
                let (wa, wb) = power_weights(a, b, *p);
                [f * wa / a, f * wb / b]
            }
            SpeedKind::Geometric => {
                let f = (a * b).sqrt();
                [0.5 * f / a, 0.5 * f / b]
            }
            SpeedKind::Harmonic => {
                let s2 = (a + b) * (a + b);
                [2.0 * b * b / s2, 2.0 * a * a / s2]
            }
            SpeedKind::Gauss => [b, a],
            SpeedKind::PowerOf(base, e) => {
                let v = base.value(a, b);
                let g = base.gradient(a, b);
                let c = e * v.powf(e - 1.0);
                [c * g[0], c * g[1]]
            }
            SpeedKind::NonHomogeneousProbe => [1.0, 2.0 * b],
        }
    }

    fn hessian(&self, a: f64, b: f64) -> [[f64; 2]; 2] {
        match &self.kind {
            SpeedKind::Mean => [[0.0; 2]; 2],
            SpeedKind::PowerMean(p) => {
                let f = power_mean_value(a, b, *p);
                let (wa, wb) = power_weights(a, b, *p);
                let c = (p - 1.0) * f * wa * wb;
                [[c / (a * a), -c / (a * b)], [-c / (a * b), c / (b * b)]]
            }
            SpeedKind::Geometric => {
                let f = (a * b).sqrt();
                let off = 0.25 * f / (a * b);
                [[-0.25 * f / (a * a), off], [off, -0.25 * f / (b * b)]]
            }
            SpeedKind::Harmonic => {
                let s3 = (a + b).powi(3);
                let off = 4.0 * a * b / s3;
                [[-4.0 * b * b / s3, off], [off, -4.0 * a * a / s3]]
            }
            SpeedKind::Gauss => [[0.0, 1.0], [1.0, 0.0]],
            SpeedKind::PowerOf(base, e) => {
                let v = base.value(a, b);
                let g = base.gradient(a, b);
                let h = base.hessian(a, b);
                let c1 = e * v.powf(e - 1.0);
                let c2 = e * (e - 1.0) * v.powf(e - 2.0);
                let mut out = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        out[i][j] = c2 * g[i] * g[j] + c1 * h[i][j];
                    }
                }
                out
            }
            SpeedKind::NonHomogeneousProbe => [[0.0, 0.0], [0.0, 2.0]],
        }
    }

    fn degree(&self) -> f64 {
        self.alpha()
    }
}

impl fmt::Display for SpeedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SpeedKind::Mean => write!(f, "mean"),
            SpeedKind::PowerMean(p) => write!(f, "power_mean:{p}"),
            SpeedKind::Geometric => write!(f, "geometric"),
            SpeedKind::Harmonic => write!(f, "harmonic"),
            SpeedKind::Gauss => write!(f, "gauss"),
            SpeedKind::PowerOf(base, e) => write!(f, "pow:{base}:{e}"),
            SpeedKind::NonHomogeneousProbe => write!(f, "probe:nonhomogeneous"),
        }
    }
}

impl FromStr for SpeedFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_num =
            |t: &str| -> Result<f64> { t.trim().parse::<f64>().map_err(|_| Error::SpeedParse(s.to_string())) };
        if let Some(rest) = s.strip_prefix("pow:") {
            let (base, e) = rest.rsplit_once(':').ok_or_else(|| Error::SpeedParse(s.into()))?;
            return SpeedFunction::power_of(base.parse()?, parse_num(e)?);
        }
        if let Some(p) = s.strip_prefix("power_mean:") {
            return SpeedFunction::power_mean(parse_num(p)?);
        }
        match s {
            "mean" => Ok(Self::mean()),
            "geometric" => Ok(Self::geometric()),
            "harmonic" => Ok(Self::harmonic()),
            "gauss" => Ok(Self::gauss()),
            "probe:nonhomogeneous" => Ok(Self::non_homogeneous_probe()),
            _ => Err(Error::SpeedParse(s.to_string())),
        }
    }
}

/// The five frame components `F̈¹¹¹¹, F̈¹¹²², F̈²²²², F̈¹²¹², F̈²¹²¹` of the
/// second derivative of `F` with respect to the second fundamental form, in
/// a frame where it is diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSecondDerivatives {
    pub f11_11: f64,
    pub f11_22: f64,
    pub f22_22: f64,
    pub f12_12: f64,
    pub f21_21: f64,
}

/// Relative gap below which a curvature pair is treated as umbilic.
pub const UMBILIC_TOLERANCE: f64 = 1e-9;

pub(crate) fn is_umbilic(k1: f64, k2: f64) -> bool {
    (k2 - k1).abs() < UMBILIC_TOLERANCE * (k1 + k2)
}

/// `(∂₁φ − ∂₂φ)/(κ₁ − κ₂)` with its umbilic limit `φ₁₁ − φ₁₂`.
pub(crate) fn mixed_quotient(k1: f64, k2: f64, grad: [f64; 2], hess: [[f64; 2]; 2]) -> f64 {
    if is_umbilic(k1, k2) {
        hess[0][0] - hess[0][1]
    } else {
        (grad[0] - grad[1]) / (k1 - k2)
    }
}

pub fn second_derivative_components<S: Speed + ?Sized>(
    speed: &S,
    kappa: &PrincipalCurvatures,
) -> FrameSecondDerivatives {
    let (k1, k2) = (kappa.kappa1(), kappa.kappa2());
    let g = speed.gradient(k1, k2);
    let h = speed.hessian(k1, k2);
    let mixed = mixed_quotient(k1, k2, g, h);
    FrameSecondDerivatives { f11_11: h[0][0], f11_22: h[0][1], f22_22: h[1][1], f12_12: mixed, f21_21: mixed }
}

/// Largest residuals of the Euler identities `κ·∇F = αF` and
/// `κᵢκⱼFᵢⱼ = α(α−1)F`, each normalized by `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub samples: usize,
    pub euler_first: f64,
    pub euler_second: f64,
}

impl HomogeneityReport {
    pub fn max_residual(&self) -> f64 {
        self.euler_first.max(self.euler_second)
    }
}

/// Random curvature pair with both entries log-uniform in `[lo, hi]`.
pub(crate) fn sample_pair(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> (f64, f64) {
    let (ll, lh) = (lo.ln(), hi.ln());
    let a = rng.gen_range(ll..lh).exp();
    let b = rng.gen_range(ll..lh).exp();
    (a, b)
}

pub fn check_homogeneity<S: Speed + ?Sized>(speed: &S, samples: usize, seed: u64) -> HomogeneityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = speed.degree();
    let mut first = 0.0_f64;
    let mut second = 0.0_f64;
    for _ in 0..samples {
        let (a, b) = sample_pair(&mut rng, 0.05, 20.0);
        let f = speed.value(a, b);
        let g = speed.gradient(a, b);
        let h = speed.hessian(a, b);
        let e1 = a * g[0] + b * g[1] - alpha * f;
        let e2 = a * a * h[0][0] + 2.0 * a * b * h[0][1] + b * b * h[1][1] - alpha * (alpha - 1.0) * f;
        first = first.max((e1 / f).abs());
        second = second.max((e2 / f).abs());
    }
    HomogeneityReport { samples, euler_first: first, euler_second: second }
}

/// Agreement of the closed-form gradient with central differences of
/// `value`, and of the closed-form Hessian with central differences of the
/// gradient.
///
/// Errors are relative to the natural scale of each derivative: the
/// gradient error is divided by `|∇F|_fd + F/κ̄`, the Hessian error by
/// `|D²F|_fd + F/κ̄²`, with `κ̄` the mean curvature of the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub samples: usize,
    pub gradient: f64,
    pub hessian: f64,
}

pub fn check_derivatives<S: Speed + ?Sized>(speed: &S, samples: usize, seed: u64) -> DerivativeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grad_err = 0.0_f64;
    let mut hess_err = 0.0_f64;
    for _ in 0..samples {
        let (a, b) = sample_pair(&mut rng, 0.2, 5.0);
        let f = |x: &[f64]| speed.value(x[0], x[1]);
        let f0 = speed.value(a, b);
        let scale = 0.5 * (a + b);
        let g_fd = finite_diff::gradient(f, &[a, b], 1e-5);
        let h_fd = finite_diff::jacobian(|x| speed.gradient(x[0], x[1]), &[a, b], 1e-5);
        let g = speed.gradient(a, b);
        let h = speed.hessian(a, b);
        for i in 0..2 {
            let denom = g_fd[i].abs() + f0 / scale;
            grad_err = grad_err.max((g[i] - g_fd[i]).abs() / denom);
            for j in 0..2 {
                let denom = h_fd[i][j].abs() + f0 / (scale * scale);
                hess_err = hess_err.max((h[i][j] - h_fd[i][j]).abs() / denom);
            }
        }
    }
    DerivativeReport { samples, gradient: grad_err, hessian: hess_err }
}
