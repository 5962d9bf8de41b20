//! Boundary-value solver for the electrical impedance equation
//! `div(σ ∇u) = 0` on the unit disk, built from pseudoanalytic formal powers
//! of separable (or strip-wise separable) conductivities.
//!
//! The pipeline: a [`conductivity`] model, optionally approximated by a
//! [`piecewise`] separable one; [`pseudoanalytic`] generating pairs and formal
//! powers on a radial lattice; boundary traces orthonormalized and fitted to a
//! Dirichlet condition in [`boundary_fit`]; and end-to-end runs in
//! [`experiments`].

// Negated float comparisons are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary_fit;
pub mod conductivity;
pub mod error;
pub mod experiments;
pub mod piecewise;
pub mod pseudoanalytic;
pub mod spline;

pub use error::{Error, Result};
