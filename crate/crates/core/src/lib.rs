//! Delta-nabla calculus of variations on finite time scales.
//!
//! * [`timescale`]: time scales, grid functions, delta and nabla calculus.
//! * [`identities`]: the integration-by-parts, conversion and splitting
//!   identities as executable checks.
//! * [`dubois`]: constructive Dubois-Reymond probes.
//! * [`plx`]: piecewise-linear extensions, directional derivatives,
//!   epigraph convexity.
//! * [`expr`] and [`lagrangian`]: Lagrangians from text with symbolic
//!   partials.
//! * [`variational`]: the delta-nabla problem, its Euler-Lagrange residuals,
//!   a Newton solver and a sampled sufficiency certificate.
//! * [`directional`]: the problem in directional-derivative form.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod directional;
pub mod dubois;
pub mod error;
pub mod expr;
pub mod identities;
pub mod lagrangian;
pub mod par;
pub mod plx;
pub mod timescale;
pub mod variational;

pub use directional::{d_u_integral, shifted_composition, solve_directional, DirectionalProblem, DirectionalResidual};
pub use error::{Error, Result};
pub use lagrangian::{ExprLagrangian, FnLagrangian, Lagrangian, PartialSource, ScaledLagrangian, SharedLagrangian};
pub use par::Execution;
pub use timescale::{Calculus, Domain, DomainTag, GridFunction, TimeScale};
pub use variational::{
    Certificate, CertifyOptions, DeltaNablaProblem, Init, ProbeOptions, ProbeReport, Solution, SolveOptions, Term,
    VariationalProblem,
};
