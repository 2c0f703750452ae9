//! Symbolic and numerical tools for the cusp-surgery calculus on a surface
//! whose closed geodesic is pinched to a pair of hyperbolic cusps.
//!
//! The crate has two layers:
//!
//! * [`corners`] and [`surgery`] form an exact engine for index sets,
//!   b-maps given by exponent matrices, blow-up density bookkeeping, and the
//!   pull-back / push-forward pipelines that produce the order arithmetic of
//!   the calculus (mapping property, composition, trace expansions).
//! * [`dirac`] and [`expfit`] form a numerical lab for the Dirac operator on
//!   a degenerating hyperbolic neck: mode reduction to 1D Schrödinger
//!   operators, spectral sweeps in the pinching parameter, projector mass in
//!   the neck, and relative resolvent traces with log-term fitting.
//!
//! [`cli`] wires both layers to the `cusp-surgery` command line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod corners;
pub mod dirac;
pub mod expfit;
pub mod surgery;

/// Exact rational used for every exponent in the symbolic layer.
pub type Rational = num_rational::Rational64;
