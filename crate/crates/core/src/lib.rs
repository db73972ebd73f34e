//! Contraction of convex surfaces of revolution by symmetric homogeneous
//! functions of the principal curvatures.
//!
//! - [`curvature`]: the pinching quantity `G`, its derivatives and the
//!   gradient quadratic forms that decide its evolution at a maximum.
//! - [`speeds`]: the catalog of speed functions with analytic derivatives.
//! - [`geometry`]: support-function and revolution-profile representations
//!   of axisymmetric convex bodies, with in/circumradius diagnostics.
//! - [`counterexample`]: surfaces with prescribed ratio of principal
//!   curvatures, on which pinching worsens for degree greater than one.
//! - [`flow`]: method-of-lines RK4 integration of the flow with monitors.
//! - [`cli`]: the `curvflow` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod counterexample;
pub mod curvature;
pub mod error;
pub mod finite_diff;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod optimize;
pub mod quadrature;
pub mod speeds;

pub use curvature::PrincipalCurvatures;
pub use error::{Error, Result};
pub use speeds::{Speed, SpeedFunction};
