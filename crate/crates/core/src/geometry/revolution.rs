use std::f64::consts::PI;

use crate::curvature::PrincipalCurvatures;
use crate::error::{Error, Result};

/// Meridian `u(x) ≥ 0` of a body of revolution about the `x` axis, sampled
/// at `m` nodes with strictly increasing `x`. Both end nodes lie on the
/// axis and the profile is even about its midpoint.
///
/// Nodes need not be equally spaced; derivatives are taken with respect to
/// the node index and converted, so any smooth node placement works.
/// Clustering nodes toward the tips (e.g. uniform in the polar angle)
/// keeps the square-root behaviour there resolved. At least 7 nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionProfile {
    x: Vec<f64>,
    u: Vec<f64>,
}

/// Curvature sample at an interior profile node. `rotational` is the
/// curvature of the parallel circle, `1/(u√(1+u′²))`, and `meridional`
/// that of the generating curve, `−u″/(1+u′²)^{3/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevolutionCurvatures {
    pub x: f64,
    pub u: f64,
    pub slope: f64,
    pub rotational: f64,
    pub meridional: f64,
}

impl RevolutionCurvatures {
    pub fn principal(&self) -> Result<PrincipalCurvatures> {
        PrincipalCurvatures::new(self.rotational, self.meridional)
    }

    /// Meridional over rotational curvature, `−uu″/(1+u′²)`.
    pub fn ratio(&self) -> f64 {
        self.meridional / self.rotational
    }
}

const SYMMETRY_TOL: f64 = 1e-6;
const MIN_NODES: usize = 7;

impl RevolutionProfile {
    pub fn new(x: Vec<f64>, mut u: Vec<f64>) -> Result<Self> {
        let m = x.len();
        if m < MIN_NODES || u.len() != m {
            return Err(Error::Profile(format!(
                "need at least {MIN_NODES} nodes with matching x/u lengths, got {m}/{}",
                u.len()
            )));
        }
        if x.iter().chain(&u).any(|v| !v.is_finite()) {
            return Err(Error::Profile("non-finite coordinate".into()));
        }
        if let Some(i) = x.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Profile(format!("x not strictly increasing at node {}", i + 1)));
        }
        let half = 0.5 * (x[m - 1] - x[0]);
        let tol = SYMMETRY_TOL * half;
        for i in [0, m - 1] {
            if u[i].abs() > tol {
                return Err(Error::Profile(format!("endpoint {i} is off the axis (u = {})", u[i])));
            }
            u[i] = 0.0;
        }
        if let Some(i) = (1..m - 1).find(|&i| !(u[i] > 0.0)) {
            return Err(Error::Profile(format!("u must be positive at interior node {i}")));
        }
        let mid = 0.5 * (x[0] + x[m - 1]);
        for i in 0..m / 2 {
            let j = m - 1 - i;
            if ((x[i] - mid) + (x[j] - mid)).abs() > tol || (u[i] - u[j]).abs() > tol {
                return Err(Error::Profile(format!("profile is not even about x = {mid} (nodes {i}, {j})")));
            }
        }
        Ok(Self { x, u })
    }

    /// Upper half of the circle of radius `r`, nodes uniform in angle.
    pub fn semicircle(r: f64, m: usize) -> Result<Self> {
        Self::spheroid(r, r, m)
    }

    /// Upper half of the ellipse with semi-axis `a` along `x` and `b`
    /// across, nodes uniform in the parametric angle.
    pub fn spheroid(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Profile(format!("semi-axes must be positive, got ({a}, {b})")));
        }
        let (x, u) = (0..m)
            .map(|k| {
                let (sn, cs) = (PI * k as f64 / (m - 1) as f64).sin_cos();
                let i = m - 1 - k;
                // Mirror-exact coordinates for the two halves.
                if k <= i {
                    (-a * cs, b * sn)
                } else {
                    let (sn, cs) = (PI * i as f64 / (m - 1) as f64).sin_cos();
                    (a * cs, b * sn)
                }
            })
            .unzip();
        Self::new(x, u)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn half_length(&self) -> f64 {
        0.5 * (self.x[self.len() - 1] - self.x[0])
    }

    pub fn translated(&self, c: f64) -> Self {
        Self { x: self.x.iter().map(|v| v + c).collect(), u: self.u.clone() }
    }

    /// First and second derivatives of `(x, u)` in the node index at node
    /// `i`: centered five-point stencils in the interior, fourth-order
    /// off-centered stencils within two nodes of a tip. Stencils never
    /// reach across a tip, where constant-ratio bodies are only finitely
    /// smooth.
    fn index_derivatives(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        const D1: [&[f64]; 3] =
            [&[-25.0, 48.0, -36.0, 16.0, -3.0], &[-3.0, -10.0, 18.0, -6.0, 1.0], &[1.0, -8.0, 0.0, 8.0, -1.0]];
        const D2: [&[f64]; 3] = [
            &[45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
            &[10.0, -15.0, -4.0, 14.0, -6.0, 1.0],
            &[-1.0, 16.0, -30.0, 16.0, -1.0],
        ];
        let m = self.len();
        let from_end = i > m - 1 - i;
        let near = if from_end { m - 1 - i } else { i }.min(2);
        // Node at stencil position k, walking away from the nearest tip.
        let node = |k: usize| -> [f64; 2] {
            let j = if from_end { i + near - k } else { i + k - near };
            [self.x[j], self.u[j]]
        };
        let orient = if from_end { -1.0 } else { 1.0 };
        let mut d1 = [0.0; 2];
        let mut d2 = [0.0; 2];
        for (k, w) in D1[near].iter().enumerate() {
            let p = node(k);
            d1[0] += w * p[0];
            d1[1] += w * p[1];
        }
        for (k, w) in D2[near].iter().enumerate() {
            let p = node(k);
            d2[0] += w * p[0];
            d2[1] += w * p[1];
        }
        for c in 0..2 {
            d1[c] *= orient / 12.0;
            d2[c] /= 12.0;
        }
        (d1, d2)
    }

    /// Tangent `(x_σ, u_σ)` at every node in the index parameter.
    pub(crate) fn tangents(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|i| self.index_derivatives(i).0).collect()
    }

    /// Curvatures at every interior node. Fails on the first node where
    /// either curvature is not strictly positive.
    pub fn curvatures(&self) -> Result<Vec<RevolutionCurvatures>> {
        (1..self.len() - 1).map(|i| self.curvature_at(i)).collect()
    }

    pub(crate) fn curvature_at(&self, i: usize) -> Result<RevolutionCurvatures> {
        let ([xs, us], [xss, uss]) = self.index_derivatives(i);
        let speed2 = xs * xs + us * us;
        let speed = speed2.sqrt();
        let u = self.u[i];
        let rotational = xs / (u * speed);
        let meridional = -(xs * uss - us * xss) / (speed2 * speed);
        if !(rotational > 0.0 && meridional > 0.0) {
            return Err(Error::ConvexityLoss { node: i, radius: rotational.min(meridional) });
        }
        Ok(RevolutionCurvatures { x: self.x[i], u, slope: us / xs, rotational, meridional })
    }
}

/// `|∇₂h₁₁|² = u′²(1+u′²)(f−1)²/u⁴` on a profile with prescribed curvature
/// ratio `f`, evaluated exactly as written.
pub fn grad2_h11_formula(u: f64, uprime: f64, f: f64) -> f64 {
    let q = uprime * uprime;
    q * (1.0 + q) * (f - 1.0).powi(2) / u.powi(4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_is_umbilic() {
        let p = RevolutionProfile::semicircle(2.0, 2048).unwrap();
        for c in p.curvatures().unwrap() {
            assert!((c.rotational - 0.5).abs() < 1e-8, "{c:?}");
            assert!((c.meridional - 0.5).abs() < 1e-8, "{c:?}");
        }
    }

    #[test]
    fn spheroid_equator_curvatures() {
        let p = RevolutionProfile::spheroid(2.0, 1.0, 1001).unwrap();
        let c = p.curvature_at(500).unwrap();
        assert!(c.x.abs() < 1e-15);
        assert!((c.rotational - 1.0).abs() < 1e-10);
        assert!((c.meridional - 0.25).abs() < 1e-10);
        let k = c.principal().unwrap();
        assert_eq!((k.kappa1(), k.kappa2()), (c.meridional, c.rotational));
    }

    #[test]
    fn ratio_matches_graph_formula() {
        let p = RevolutionProfile::spheroid(1.0, 2.0, 801).unwrap();
        for c in p.curvatures().unwrap().iter().step_by(37) {
            // u = 2√(1 − x²)
            let w = 1.0 - c.x * c.x;
            let up = -2.0 * c.x / w.sqrt();
            let upp = -2.0 / w.powf(1.5);
            let expected = -c.u * upp / (1.0 + up * up);
            assert!((c.ratio() - expected).abs() < 1e-8 * expected, "{} {}", c.ratio(), expected);
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        let x = vec![-1.0, -0.6, -0.3, 0.0, 0.3, 0.6, 1.0];
        assert!(RevolutionProfile::new(x.clone(), vec![0.0, 0.8, 0.95, 1.0, 0.95, 0.8, 0.0]).is_ok());
        assert!(RevolutionProfile::new(x.clone(), vec![0.0, 0.8, 0.95, 1.0, 0.95, 0.7, 0.0]).is_err());
        assert!(RevolutionProfile::new(x.clone(), vec![0.1, 0.8, 0.95, 1.0, 0.95, 0.8, 0.0]).is_err());
        assert!(RevolutionProfile::new(x.clone(), vec![0.0, 0.8, 0.95, -1.0, 0.95, 0.8, 0.0]).is_err());
        assert!(RevolutionProfile::new(x[..5].to_vec(), vec![0.0, 0.8, 1.0, 0.8, 0.0]).is_err());
        let dented = RevolutionProfile::new(
            vec![-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0],
            vec![0.0, 0.6, 0.8, 0.9, 0.5, 0.9, 0.8, 0.6, 0.0],
        )
        .unwrap();
        assert!(matches!(dented.curvatures(), Err(Error::ConvexityLoss { .. })));
    }

    #[test]
    fn grad2_formula_values() {
        assert_eq!(grad2_h11_formula(0.3, 2.0, 1.0), 0.0);
        assert_eq!(grad2_h11_formula(1.0, 1.0, 2.0), 2.0);
    }
}
