use std::f64::consts::PI;

use crate::curvature::PrincipalCurvatures;
use crate::error::{Error, Result};

use super::interp::hermite_resample;
use super::revolution::RevolutionProfile;

/// Support function `s(θ)` of an axisymmetric convex body on the uniform
/// grid `θⱼ = jπ/(n−1)`, `j = 0..n`.
///
/// Pole regularity is built into the stencils: the ghost values beyond
/// each pole are even reflections, so the one-sided derivative vanishes
/// there.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportProfile {
    s: Vec<f64>,
}

/// Principal radii at a grid node: `meridional = s″ + s`,
/// `parallel = cotθ·s′ + s` (equal to the meridional one at the poles).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalRadii {
    pub meridional: f64,
    pub parallel: f64,
}

impl PrincipalRadii {
    pub fn curvatures(&self) -> Result<PrincipalCurvatures> {
        PrincipalCurvatures::new(1.0 / self.meridional, 1.0 / self.parallel)
    }
}

pub(crate) const MIN_NODES: usize = 5;

impl SupportProfile {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.len() < MIN_NODES {
            return Err(Error::Profile(format!("support grid needs at least {MIN_NODES} nodes, got {}", s.len())));
        }
        if let Some(j) = s.iter().position(|v| !v.is_finite()) {
            return Err(Error::Profile(format!("non-finite support value at node {j}")));
        }
        Ok(Self { s })
    }

    /// Samples `f(θ)` on an `n`-node grid.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let d = PI / (n.max(2) - 1) as f64;
        Self::new((0..n).map(|j| f(j as f64 * d)).collect())
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// Grid spacing `Δθ = π/(n−1)`.
    pub fn delta(&self) -> f64 {
        PI / (self.s.len() - 1) as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        if j == self.s.len() - 1 {
            PI
        } else {
            j as f64 * self.delta()
        }
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.theta(j)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.s
    }

    pub fn into_values(self) -> Vec<f64> {
        self.s
    }

    /// Support function of the body moved by `c` along the axis.
    pub fn translated(&self, c: f64) -> Self {
        let s = self.s.iter().enumerate().map(|(j, v)| v + c * self.theta(j).cos()).collect();
        Self { s }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { s: self.s.iter().map(|v| v * k).collect() }
    }

    /// Principal radii at every node; fails on the first non-positive one.
    pub fn radii(&self) -> Result<Vec<PrincipalRadii>> {
        let stencil = RadiiStencil::new(self.n());
        let mut out = vec![PrincipalRadii { meridional: 0.0, parallel: 0.0 }; self.n()];
        stencil.radii(&self.s, &mut out)?;
        Ok(out)
    }

    /// `s′` by central differences, zero at the poles.
    pub fn derivative(&self) -> Vec<f64> {
        let d = self.delta();
        let mut ds = vec![0.0; self.n()];
        for (slot, w) in ds[1..].iter_mut().zip(self.s.windows(3)) {
            *slot = (w[2] - w[0]) / (2.0 * d);
        }
        ds
    }

    /// Boundary points `(axial, radial)` of the meridian, one per node:
    /// `p(θ) = s·(cosθ, sinθ) + s′·(−sinθ, cosθ)`.
    pub fn boundary_points(&self) -> Vec<[f64; 2]> {
        let ds = self.derivative();
        (0..self.n())
            .map(|j| {
                let (sn, cs) = self.theta(j).sin_cos();
                let (s, d) = (self.s[j], ds[j]);
                let radial = if j == 0 || j == self.n() - 1 { 0.0 } else { s * sn + d * cs };
                [s * cs - d * sn, radial]
            })
            .collect()
    }

    /// The meridian as a revolution profile, ordered by increasing `x`.
    pub fn to_revolution_profile(&self) -> Result<RevolutionProfile> {
        let pts = self.boundary_points();
        let (x, u) = pts.iter().rev().map(|p| (p[0], p[1])).unzip();
        RevolutionProfile::new(x, u)
    }
}

/// Precomputed stencil weights for the radii, reused by the flow stepper.
#[derive(Debug, Clone)]
pub(crate) struct RadiiStencil {
    inv_d2: f64,
    cot_over_2d: Vec<f64>,
}

impl RadiiStencil {
    pub(crate) fn new(n: usize) -> Self {
        let d = PI / (n - 1) as f64;
        let cot_over_2d =
            (0..n).map(|j| if j == 0 || j == n - 1 { 0.0 } else { 1.0 / ((j as f64 * d).tan() * 2.0 * d) }).collect();
        Self { inv_d2: 1.0 / (d * d), cot_over_2d }
    }

    pub(crate) fn radii(&self, s: &[f64], out: &mut [PrincipalRadii]) -> Result<()> {
        let n = s.len();
        let pole = |a: f64, b: f64| b + 2.0 * (a - b) * self.inv_d2;
        let r0 = pole(s[1], s[0]);
        out[0] = PrincipalRadii { meridional: r0, parallel: r0 };
        let rn = pole(s[n - 2], s[n - 1]);
        out[n - 1] = PrincipalRadii { meridional: rn, parallel: rn };
        for j in 1..n - 1 {
            let meridional = s[j] + (s[j + 1] - 2.0 * s[j] + s[j - 1]) * self.inv_d2;
            let parallel = s[j] + (s[j + 1] - s[j - 1]) * self.cot_over_2d[j];
            out[j] = PrincipalRadii { meridional, parallel };
        }
        for (node, r) in out.iter().enumerate() {
            let radius = r.meridional.min(r.parallel);
            if !(radius > 0.0) {
                return Err(Error::ConvexityLoss { node, radius });
            }
        }
        Ok(())
    }
}

pub fn make_ball(radius: f64, n: usize) -> Result<SupportProfile> {
    make_spheroid(radius, radius, n)
}

/// Spheroid with semi-axis `a` along the rotation axis and `b` across it:
/// `s(θ) = √(a²cos²θ + b²sin²θ)`.
pub fn make_spheroid(a: f64, b: f64, n: usize) -> Result<SupportProfile> {
    for (what, v) in [("spheroid semi-axis a", a), ("spheroid semi-axis b", b)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain { what, value: v });
        }
    }
    if a == b {
        return SupportProfile::new(vec![a; n]);
    }
    SupportProfile::from_fn(n, |t| {
        let (sn, cs) = t.sin_cos();
        (a * a * cs * cs + b * b * sn * sn).sqrt()
    })
}

/// Support function of a revolution profile on an `n`-node θ grid.
///
/// Each profile node contributes its normal angle, support value and the
/// exact tangential derivative `s′(θ) = −x sinθ + u cosθ`; the samples
/// are then resampled by cubic Hermite interpolation.
pub fn profile_to_support(profile: &RevolutionProfile, n: usize) -> Result<SupportProfile> {
    if n < MIN_NODES {
        return Err(Error::Profile(format!("support grid needs at least {MIN_NODES} nodes, got {n}")));
    }
    let x = profile.x();
    let u = profile.u();
    let m = x.len();
    let tangents = profile.tangents();
    // Samples in increasing θ, i.e. from the +x tip backwards.
    let mut th = Vec::with_capacity(m);
    let mut sv = Vec::with_capacity(m);
    let mut dv = Vec::with_capacity(m);
    for i in (0..m).rev() {
        let theta = if i == m - 1 {
            0.0
        } else if i == 0 {
            PI
        } else {
            let [xs, us] = tangents[i];
            xs.atan2(-us)
        };
        let (sn, cs) = theta.sin_cos();
        let (s, ds) =
            if i == 0 || i == m - 1 { (x[i] * cs, 0.0) } else { (x[i] * cs + u[i] * sn, -x[i] * sn + u[i] * cs) };
        if let Some(&prev) = th.last() {
            if !(theta > prev) {
                return Err(Error::ConvexityLoss { node: i, radius: theta - prev });
            }
        }
        th.push(theta);
        sv.push(s);
        dv.push(ds);
    }
    let grid: Vec<f64> = (0..n).map(|j| if j == n - 1 { PI } else { j as f64 * PI / (n - 1) as f64 }).collect();
    SupportProfile::new(hermite_resample(&th, &sv, &dv, &grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spheroid_meridional(a: f64, b: f64, t: f64) -> f64 {
        let s = (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt();
        a * a * b * b / s.powi(3)
    }

    #[test]
    fn ball_radii_are_constant() {
        let p = make_ball(1.5, 64).unwrap();
        for r in p.radii().unwrap() {
            assert!((r.meridional - 1.5).abs() < 1e-12 && (r.parallel - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn spheroid_radii_match_closed_form() {
        let p = make_spheroid(2.0, 1.0, 512).unwrap();
        let r = p.radii().unwrap();
        assert!((r[0].meridional - 0.5).abs() < 1e-4);
        assert_eq!(r[0].meridional, r[0].parallel);
        let eq = 511 / 2;
        let t = p.theta(eq);
        let exact = spheroid_meridional(2.0, 1.0, t);
        assert!((r[eq].meridional - exact).abs() < 1e-4 * exact);
        assert!((r[eq].parallel - p.values()[eq]).abs() < 1e-4 + (t - PI / 2.0).abs());
        assert!(r.iter().all(|r| r.meridional > 0.0 && r.parallel > 0.0));
    }

    #[test]
    fn spheroid_radii_converge_at_second_order() {
        let err = |n: usize| {
            let p = make_spheroid(2.0, 1.0, n).unwrap();
            let r = p.radii().unwrap();
            (0..n).map(|j| (r[j].meridional - spheroid_meridional(2.0, 1.0, p.theta(j))).abs()).fold(0.0, f64::max)
        };
        let order = (err(64) / err(128)).log2();
        assert!(order > 1.9, "order {order}");
    }

    #[test]
    fn unit_spheroid_is_ball() {
        assert_eq!(make_spheroid(1.0, 1.0, 33).unwrap(), make_ball(1.0, 33).unwrap());
        assert!(make_ball(1.0, 64).unwrap().values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn convexity_loss_names_node() {
        let mut s = vec![1.0; 33];
        s[10] = 1.5;
        match SupportProfile::new(s).unwrap().radii() {
            Err(Error::ConvexityLoss { node, .. }) => assert!((9..=11).contains(&node)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spheroid_round_trip_is_second_order() {
        let err = |n: usize| {
            let p = make_spheroid(2.0, 1.0, n).unwrap();
            let back = profile_to_support(&p.to_revolution_profile().unwrap(), n).unwrap();
            p.values().iter().zip(back.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(64), err(128), err(256));
        assert!((e1 / e2).log2() >= 1.9 && (e2 / e3).log2() >= 1.9, "{e1} {e2} {e3}");
    }

    #[test]
    fn translated_profile_adds_cosine() {
        let p = make_spheroid(2.0, 1.0, 257).unwrap();
        let prof = RevolutionProfile::spheroid(2.0, 1.0, 1025).unwrap();
        let base = profile_to_support(&prof, 257).unwrap();
        let moved = profile_to_support(&prof.translated(0.3), 257).unwrap();
        for j in 0..257 {
            let c = 0.3 * p.theta(j).cos();
            assert!((moved.values()[j] - base.values()[j] - c).abs() < 1e-12);
        }
    }

    #[test]
    fn spheroid_profile_to_support_matches_closed_form() {
        let prof = RevolutionProfile::spheroid(2.0, 1.0, 1024).unwrap();
        let s = profile_to_support(&prof, 1024).unwrap();
        let exact = make_spheroid(2.0, 1.0, 1024).unwrap();
        for (a, b) in s.values().iter().zip(exact.values()) {
            assert!((a - b).abs() < 1e-5);
        }
        let semi = profile_to_support(&RevolutionProfile::semicircle(0.7, 301).unwrap(), 128).unwrap();
        assert!(semi.values().iter().all(|v| (v - 0.7).abs() < 1e-12));
    }
}
