//! Accelerated Riemannian optimization on constant-curvature model spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`manifold`] — exact exp/log/transport on Euclidean space, the sphere and
//!   the hyperboloid, in ambient coordinates.
//! * [`constants`] — curvature/diameter constants, momentum schedules and
//!   rate bounds.
//! * [`objective`] — test functions with exact Riemannian gradients.
//! * [`optimizer`] — Riemannian gradient descent and the semi-implicit
//!   accelerated integrator (SIRNAG).
//! * [`reference`] — fine-step reference trajectories, Lyapunov energies and
//!   rate monitors.
//! * [`shadowing`] — pseudo-orbit defects, contraction ratios and shadowing
//!   distances for gradient descent.
//! * [`geometry_checks`] — numerical checks of the comparison inequalities.
//! * [`suites`] / [`experiments`] — the check suites and figure experiments
//!   driven by the command line tool.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod geometry_checks;
pub mod manifold;
pub mod objective;
pub mod optimizer;
pub mod reference;
pub mod shadowing;
pub mod special;
pub mod suites;

pub use error::{Error, Result};
pub use exec::Execution;
pub use manifold::{Manifold, ManifoldKind, ManifoldSpec, Point, TangentVector, Vector};
pub use nalgebra;
