//! Pointwise curvature quantities.
//!
//! The pinching quantity `G = (κ₂ − κ₁)²/(κ₂ + κ₁)²` and the quadratic
//! forms in `∇h` that control its evolution at a spatial maximum. All forms
//! are evaluated in an orthonormal frame diagonalizing the second
//! fundamental form, with `κ₁ ≤ κ₂`; indices in the gradient components
//! refer to that frame. By Codazzi, `∇₁h₁₂ = ∇₂h₁₁` and `∇₂h₁₂ = ∇₁h₂₂`, so
//! four components `∇₁h₁₁, ∇₁h₂₂, ∇₂h₁₁, ∇₂h₂₂` determine everything.

use crate::error::{Error, Result};
use crate::speeds::{is_umbilic, mixed_quotient, Speed};

/// Ordered pair of strictly positive principal curvatures, `κ₁ ≤ κ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalCurvatures {
    k1: f64,
    k2: f64,
}

impl PrincipalCurvatures {
    /// Sorts its arguments.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(Error::InvalidCurvatures(a, b));
        }
        Ok(if a <= b { Self { k1: a, k2: b } } else { Self { k1: b, k2: a } })
    }

    pub fn kappa1(&self) -> f64 {
        self.k1
    }

    pub fn kappa2(&self) -> f64 {
        self.k2
    }

    pub fn is_umbilic(&self) -> bool {
        is_umbilic(self.k1, self.k2)
    }
}

pub fn g_quantity(kappa: &PrincipalCurvatures) -> f64 {
    let (a, b) = (kappa.k1, kappa.k2);
    let q = (b - a) / (b + a);
    q * q
}

pub fn pinch_ratio(kappa: &PrincipalCurvatures) -> f64 {
    kappa.k2 / kappa.k1
}

/// Inverse of `G` in terms of the ratio: `r = 2/(1 − √G) − 1`.
pub fn ratio_from_g(g: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&g) {
        return Err(Error::Domain { what: "ratio_from_g (needs 0 <= g < 1)", value: g });
    }
    Ok(2.0 / (1.0 - g.sqrt()) - 1.0)
}

/// `(∂G/∂κ₁, ∂G/∂κ₂)`.
pub fn g_gradient(kappa: &PrincipalCurvatures) -> [f64; 2] {
    g_gradient_raw(kappa.k1, kappa.k2)
}

pub(crate) fn g_gradient_raw(a: f64, b: f64) -> [f64; 2] {
    let s3 = (a + b).powi(3);
    [-4.0 * b * (b - a) / s3, 4.0 * a * (b - a) / s3]
}

/// Second partials of `G` in the curvatures.
pub fn g_hessian(kappa: &PrincipalCurvatures) -> [[f64; 2]; 2] {
    let (a, b) = (kappa.k1, kappa.k2);
    let s4 = (a + b).powi(4);
    let off = 4.0 * (a * a + b * b - 4.0 * a * b) / s4;
    [[8.0 * b * (2.0 * b - a) / s4, off], [off, 8.0 * a * (2.0 * a - b) / s4]]
}

/// Largest pinching ratio preserved by a degree-`alpha` flow,
/// `r₀(α) = 1 + 2/(α − 1)`.
pub fn critical_ratio(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::Domain { what: "critical_ratio (needs alpha > 1)", value: alpha });
    }
    Ok(1.0 + 2.0 / (alpha - 1.0))
}

/// Components of `∇h` eliminated by `∇G = 0`: returns `(∇₁h₁₁, ∇₂h₂₂)`.
pub fn gradient_conditions(kappa: &PrincipalCurvatures, d1h22: f64, d2h11: f64) -> Result<(f64, f64)> {
    if kappa.is_umbilic() {
        return Err(Error::Umbilic("gradient conditions are vacuous where dG = 0"));
    }
    let [g1, g2] = g_gradient(kappa);
    Ok((-(g2 / g1) * d1h22, -(g1 / g2) * d2h11))
}

/// The four independent components of `∇h` in the diagonalizing frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QFormGradients {
    pub d1h11: f64,
    pub d1h22: f64,
    pub d2h11: f64,
    pub d2h22: f64,
}

impl QFormGradients {
    /// Completes `(∇₁h₂₂, ∇₂h₁₁)` with the gradient conditions at a
    /// maximum of `G`.
    pub fn at_maximum(kappa: &PrincipalCurvatures, d1h22: f64, d2h11: f64) -> Result<Self> {
        let (d1h11, d2h22) = gradient_conditions(kappa, d1h22, d2h11)?;
        Ok(Self { d1h11, d1h22, d2h11, d2h22 })
    }
}

/// Full form `(ĠⁱʲF̈ᵏˡᵐⁿ − ḞⁱʲG̈ᵏˡᵐⁿ)∇ᵢh_kl ∇ⱼh_mn`, term by term.
///
/// Second derivatives of `G` come from its closed form. The mixed frame
/// components `F̈¹²¹²` and `G̈¹²¹²` fall back to `φ₁₁ − φ₁₂` at umbilic
/// points.
pub fn q_form_raw<S: Speed + ?Sized>(speed: &S, kappa: &PrincipalCurvatures, grads: &QFormGradients) -> Result<f64> {
    let (k1, k2) = (kappa.k1, kappa.k2);
    let fg = speed.gradient(k1, k2);
    let fh = speed.hessian(k1, k2);
    let gg = g_gradient(kappa);
    let gh = g_hessian(kappa);
    let f_mixed = mixed_quotient(k1, k2, fg, fh);
    let g_mixed = mixed_quotient(k1, k2, gg, gh);

    // per direction i: (∇ᵢh₁₁, ∇ᵢh₂₂, ∇ᵢh₁₂), Codazzi supplying the last
    let dirs = [(grads.d1h11, grads.d1h22, grads.d2h11), (grads.d2h11, grads.d2h22, grads.d1h22)];
    let mut q = 0.0;
    for (i, &(h11, h22, h12)) in dirs.iter().enumerate() {
        let quad = |m: [[f64; 2]; 2]| m[0][0] * h11 * h11 + 2.0 * m[0][1] * h11 * h22 + m[1][1] * h22 * h22;
        q += gg[i] * quad(fh) - fg[i] * quad(gh);
        q += 2.0 * (gg[i] * f_mixed - fg[i] * g_mixed) * h12 * h12;
    }
    if !q.is_finite() {
        return Err(Error::NonFinite("q_form_raw"));
    }
    Ok(q)
}

/// Reduced form for degree-one speeds,
/// `Q = 2F G₁/(κ₂(κ₂ − κ₁)) · ((∇₁h₂₂)² + (∇₂h₁₁)²)`.
///
/// `G₁/(κ₂ − κ₁) = −4κ₂/(κ₁ + κ₂)³` identically, which also supplies the
/// umbilic limit.
pub fn q_form_degree_one<S: Speed + ?Sized>(
    speed: &S,
    kappa: &PrincipalCurvatures,
    d1h22: f64,
    d2h11: f64,
) -> Result<f64> {
    let alpha = speed.degree();
    if (alpha - 1.0).abs() > 1e-12 {
        return Err(Error::SpeedContract(format!("reduced form needs degree 1, speed has degree {alpha}")));
    }
    let (k1, k2) = (kappa.k1, kappa.k2);
    let f = speed.value(k1, k2);
    let g1_over_gap = -4.0 * k2 / (k1 + k2).powi(3);
    let coef = 2.0 * f * g1_over_gap / k2;
    Ok(coef * (d1h22 * d1h22 + d2h11 * d2h11))
}

/// Coefficients of `(∇₁h₂₂)²` and `(∇₂h₁₁)²` in the degree-α reduced form.
pub fn q_form_degree_alpha_coefficients<S: Speed + ?Sized>(speed: &S, kappa: &PrincipalCurvatures) -> Result<[f64; 2]> {
    let alpha = speed.degree();
    if !(alpha >= 1.0) {
        return Err(Error::SpeedContract(format!("degree-alpha form needs alpha >= 1, got {alpha}")));
    }
    if kappa.is_umbilic() {
        return Err(Error::Umbilic("degree-alpha form has (k2 - k1) denominators"));
    }
    let (k1, k2) = (kappa.k1, kappa.k2);
    let f = speed.value(k1, k2);
    let [g1, g2] = g_gradient(kappa);
    let gap = k2 - k1;
    let c1 = g1 * (alpha * (alpha - 1.0) * f / (k2 * k2) + 2.0 * alpha * f / (k2 * gap));
    let c2 = g2 * (alpha * (alpha - 1.0) * f / (k1 * k1) - 2.0 * alpha * f / (k1 * gap));
    Ok([c1, c2])
}

pub fn q_form_degree_alpha<S: Speed + ?Sized>(
    speed: &S,
    kappa: &PrincipalCurvatures,
    d1h22: f64,
    d2h11: f64,
) -> Result<f64> {
    let [c1, c2] = q_form_degree_alpha_coefficients(speed, kappa)?;
    Ok(c1 * d1h22 * d1h22 + c2 * d2h11 * d2h11)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_diff;
    use crate::speeds::SpeedFunction;
    use proptest::prelude::*;

    fn pc(a: f64, b: f64) -> PrincipalCurvatures {
        PrincipalCurvatures::new(a, b).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn constructor_sorts_and_validates() {
        let k = pc(6.0, 2.0);
        assert_eq!((k.kappa1(), k.kappa2()), (2.0, 6.0));
        assert_eq!(pinch_ratio(&k), 3.0);
        assert!(PrincipalCurvatures::new(0.0, 1.0).is_err());
        assert!(PrincipalCurvatures::new(-1.0, 1.0).is_err());
        assert!(PrincipalCurvatures::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_quantity(&pc(1.0, 1.0)), 0.0);
        assert_eq!(g_quantity(&pc(1.0, 3.0)), 0.25);
        assert_eq!(g_quantity(&pc(2.0, 6.0)), 0.25);
        assert_eq!(pinch_ratio(&pc(1.0, 1.0)), 1.0);
    }

    #[test]
    fn ratio_from_g_examples() {
        assert_eq!(ratio_from_g(0.0).unwrap(), 1.0);
        assert!((ratio_from_g(0.25).unwrap() - 3.0).abs() < 1e-15);
        assert!((ratio_from_g(1.0 / 9.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(ratio_from_g(1.0).is_err());
        assert!(ratio_from_g(-0.1).is_err());
    }

    #[test]
    fn g_gradient_examples() {
        let g = g_gradient(&pc(1.0, 2.0));
        let fd =
            finite_diff::gradient(|x| g_quantity(&PrincipalCurvatures::new(x[0], x[1]).unwrap()), &[1.0, 2.0], 1e-6);
        assert!((g[0] + 8.0 / 27.0).abs() < 1e-15);
        assert!((g[1] - 4.0 / 27.0).abs() < 1e-15);
        assert!((g[0] - fd[0]).abs() < 1e-6 && (g[1] - fd[1]).abs() < 1e-6);
        assert_eq!(g_gradient(&pc(1.0, 1.0)), [0.0, 0.0]);
    }

    #[test]
    fn g_hessian_matches_differences() {
        let k = pc(0.8, 2.3);
        let h = g_hessian(&k);
        let fd = finite_diff::hessian(
            |x| {
                let q = (x[1] - x[0]) / (x[1] + x[0]);
                q * q
            },
            &[0.8, 2.3],
            1e-4,
        );
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[i][j] - fd[i][j]).abs() < 1e-6, "{i}{j}: {} vs {}", h[i][j], fd[i][j]);
            }
        }
    }

    #[test]
    fn critical_ratio_values() {
        assert_eq!(critical_ratio(2.0).unwrap(), 3.0);
        assert_eq!(critical_ratio(3.0).unwrap(), 2.0);
        assert!((critical_ratio(1.1).unwrap() - 21.0).abs() < 1e-12);
        assert!(critical_ratio(1.0).is_err());
        assert!(critical_ratio(0.5).is_err());
    }

    #[test]
    fn gradient_condition_examples() {
        let k = pc(1.0, 2.0);
        let (d1h11, _) = gradient_conditions(&k, 1.0, 0.0).unwrap();
        assert!((d1h11 - 0.5).abs() < 1e-15);
        let (_, d2h22) = gradient_conditions(&k, 0.0, 1.0).unwrap();
        assert!((d2h22 - 2.0).abs() < 1e-15);
        assert!(matches!(gradient_conditions(&pc(1.0, 1.0), 1.0, 1.0), Err(Error::Umbilic(_))));
    }

    #[test]
    fn reduced_form_mean_example() {
        let mean = SpeedFunction::mean();
        let k = pc(1.0, 2.0);
        let q1 = q_form_degree_one(&mean, &k, 1.0, 0.0).unwrap();
        assert!((q1 + 4.0 / 9.0).abs() < 1e-15);
        let grads = QFormGradients::at_maximum(&k, 1.0, 0.0).unwrap();
        let raw = q_form_raw(&mean, &k, &grads).unwrap();
        assert!((raw + 4.0 / 9.0).abs() < 1e-14, "{raw}");
        assert_eq!(q_form_degree_one(&mean, &k, 0.0, 0.0).unwrap(), 0.0);
        let zero = QFormGradients { d1h11: 0.0, d1h22: 0.0, d2h11: 0.0, d2h22: 0.0 };
        assert_eq!(q_form_raw(&mean, &k, &zero).unwrap(), 0.0);
    }

    #[test]
    fn reduced_form_umbilic_limit() {
        let mean = SpeedFunction::mean();
        let q = q_form_degree_one(&mean, &pc(1.0, 1.0), 1.0, 1.0).unwrap();
        assert!((q + 2.0).abs() < 1e-15);
        let eps = 1e-6;
        let near = q_form_degree_one(&mean, &pc(1.0, 1.0 + eps), 1.0, 1.0).unwrap();
        assert!((near - q).abs() < 1e-5);
        assert!(q_form_degree_one(&SpeedFunction::gauss(), &pc(1.0, 2.0), 1.0, 1.0).is_err());
    }

    #[test]
    fn raw_form_umbilic_limit() {
        let mean = SpeedFunction::mean();
        let grads = QFormGradients { d1h11: 0.3, d1h22: -1.2, d2h11: 0.7, d2h22: 0.4 };
        let at = q_form_raw(&mean, &pc(1.0, 1.0), &grads).unwrap();
        let near = q_form_raw(&mean, &pc(1.0, 1.0 + 1e-4), &grads).unwrap();
        assert!((at - near).abs() < 1e-3, "{at} vs {near}");
        // -F_i (G contraction) with F_i = 1/2: hand evaluation at (1, 1)
        let hand = -0.5
            * ((0.5 * 0.09 - 2.0 * 0.5 * 0.3 * -1.2 + 0.5 * 1.44 + 2.0 * 0.49)
                + (0.5 * 0.49 - 2.0 * 0.5 * 0.7 * 0.4 + 0.5 * 0.16 + 2.0 * 1.44));
        assert!((at - hand).abs() < 1e-14, "{at} vs {hand}");
    }

    #[test]
    fn degree_alpha_gauss_examples() {
        let gauss = SpeedFunction::gauss();
        let k = pc(1.0, 3.5);
        let q = q_form_degree_alpha(&gauss, &k, 0.0, 1.0).unwrap();
        let g2 = 10.0 / 91.125;
        let expected = g2 * 2.0 * 3.5 * (1.0 - 2.0 / 2.5);
        assert!((q - expected).abs() < 1e-14);
        assert!((q - 0.1536).abs() < 1e-4);
        let raw = q_form_raw(&gauss, &k, &QFormGradients::at_maximum(&k, 0.0, 1.0).unwrap()).unwrap();
        assert!(rel_close(q, raw, 1e-12), "{q} vs {raw}");

        let below = q_form_degree_alpha(&gauss, &pc(1.0, 2.0), 0.0, 1.0).unwrap();
        assert!(below < 0.0);
        assert!(q_form_degree_alpha(&gauss, &pc(1.0, 1.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn degree_alpha_matches_raw_for_powers() {
        let speeds = [
            SpeedFunction::gauss(),
            SpeedFunction::power_of(SpeedFunction::mean(), 3.0).unwrap(),
            SpeedFunction::power_of(SpeedFunction::harmonic(), 1.7).unwrap(),
        ];
        for s in &speeds {
            for &(a, b, x, y) in &[(1.0, 1.5, 0.3, -2.0), (0.2, 4.0, 1.0, 1.0), (2.0, 9.0, -3.0, 0.5)] {
                let k = pc(a, b);
                let reduced = q_form_degree_alpha(s, &k, x, y).unwrap();
                let raw = q_form_raw(s, &k, &QFormGradients::at_maximum(&k, x, y).unwrap()).unwrap();
                assert!(rel_close(reduced, raw, 1e-10), "{s}: {reduced} vs {raw}");
            }
        }
    }

    proptest! {
        #[test]
        fn ratio_inverts_g(a in 0.01f64..100.0, r in 1.0f64..60.0) {
            let k = pc(a, a * r);
            let back = ratio_from_g(g_quantity(&k)).unwrap();
            prop_assert!((back - pinch_ratio(&k)).abs() <= 1e-12 * pinch_ratio(&k).max(1.0) * 10.0);
        }

        #[test]
        fn g_scale_invariant(a in 0.01f64..100.0, b in 0.01f64..100.0, log_l in -6.9f64..6.9) {
            let l = log_l.exp();
            let g = g_quantity(&pc(a, b));
            prop_assert!((g_quantity(&pc(l * a, l * b)) - g).abs() <= 1e-14);
        }

        #[test]
        fn euler_relation_for_g(a in 0.01f64..100.0, b in 0.01f64..100.0) {
            let k = pc(a, b);
            let [g1, g2] = g_gradient(&k);
            let scale = (k.kappa1() * g1).abs();
            prop_assert!((k.kappa1() * g1 + k.kappa2() * g2).abs() <= 1e-14 * scale + 1e-300);
        }

        #[test]
        fn reduced_degree_one_nonpositive(a in 0.01f64..10.0, r in 1.0f64..50.0, x in -10.0f64..10.0, y in -10.0f64..10.0) {
            for s in SpeedFunction::degree_one_catalog() {
                prop_assert!(q_form_degree_one(&s, &pc(a, a * r), x, y).unwrap() <= 0.0);
            }
        }
    }
}
