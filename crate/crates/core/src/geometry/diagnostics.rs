use crate::optimize::{golden_section_maximize, golden_section_minimize, parabolic_vertex};

use super::support::SupportProfile;

/// Body-scale roundness measures. Centers are axial offsets (by symmetry
/// both optimal balls are centered on the axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyDiagnostics {
    pub inradius: f64,
    pub circumradius: f64,
    pub incenter: f64,
    pub circumcenter: f64,
    pub sphere_deviation: f64,
}

const CENTER_TOL: f64 = 1e-12;

/// Minimum of sampled data with a parabolic correction through the
/// neighbours of the smallest sample.
fn refined_min(v: &[f64]) -> f64 {
    let (k, &vk) = v.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    if k == 0 || k == v.len() - 1 {
        return vk;
    }
    parabolic_vertex(v[k - 1], vk, v[k + 1]).1.min(vk)
}

fn refined_max(v: &[f64]) -> f64 {
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    -refined_min(&neg)
}

/// `s(θ) − c·cosθ`, the support distances from the axial point `c`.
fn distances(profile: &SupportProfile, cos: &[f64], c: f64) -> Vec<f64> {
    profile.values().iter().zip(cos).map(|(s, k)| s - c * k).collect()
}

fn axial_extent(profile: &SupportProfile) -> (f64, f64) {
    let s = profile.values();
    (-s[s.len() - 1], s[0])
}

/// Largest inscribed and smallest circumscribed balls centered on the axis.
pub fn inradius_circumradius(profile: &SupportProfile) -> BodyDiagnostics {
    let cos: Vec<f64> = profile.thetas().iter().map(|t| t.cos()).collect();
    let (lo, hi) = axial_extent(profile);
    let tol = CENTER_TOL * (hi - lo).abs().max(f64::MIN_POSITIVE);

    let (incenter, inradius) = golden_section_maximize(|c| refined_min(&distances(profile, &cos, c)), lo, hi, tol);

    let pts = profile.boundary_points();
    let spread = |c: f64| {
        let d2: Vec<f64> = pts.iter().map(|p| (p[0] - c).powi(2) + p[1] * p[1]).collect();
        refined_max(&d2).sqrt()
    };
    let (circumcenter, circumradius) = golden_section_minimize(spread, lo, hi, tol);

    BodyDiagnostics {
        inradius,
        circumradius: circumradius.max(inradius),
        incenter,
        circumcenter,
        sphere_deviation: sphere_deviation(profile),
    }
}

/// Relative distance to the best-fitting ball centered on the axis:
/// `min_{c,R} max_θ |s(θ) − R − c·cosθ| / R`.
///
/// For fixed `c` the optimal `R` is the midrange of the distances, giving
/// `(max − min)/(max + min)`; the outer search over `c` is golden-section.
pub fn sphere_deviation(profile: &SupportProfile) -> f64 {
    let cos: Vec<f64> = profile.thetas().iter().map(|t| t.cos()).collect();
    let (lo, hi) = axial_extent(profile);
    let tol = 1e-10 * (hi - lo).abs().max(f64::MIN_POSITIVE);
    let deviation = |c: f64| {
        let d = distances(profile, &cos, c);
        let (mn, mx) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        (mx - mn) / (mx + mn)
    };
    golden_section_minimize(deviation, lo, hi, tol).1.max(0.0)
}
