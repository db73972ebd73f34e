//! Axisymmetric convex bodies.
//!
//! Two representations: the support function `s(θ)` on a uniform grid over
//! the polar angle of the outward normal (the flow state), and the
//! meridian profile `u(x)` rotated about the `x` axis. `θ = 0` is the `+x`
//! direction in both.

mod diagnostics;
mod interp;
mod revolution;
mod support;

pub use diagnostics::{inradius_circumradius, sphere_deviation, BodyDiagnostics};
pub use interp::hermite_resample;
pub use revolution::{grad2_h11_formula, RevolutionCurvatures, RevolutionProfile};
pub(crate) use support::RadiiStencil;
pub use support::{make_ball, make_spheroid, profile_to_support, PrincipalRadii, SupportProfile};
