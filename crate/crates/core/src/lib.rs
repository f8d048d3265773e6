//! Weak Hopf–Lax calculus on finite metric spaces.
//!
//! The crate works on finite metric spaces (typically graphs with their
//! shortest-path metric) and provides:
//!
//! - [`space`]: metric spaces, probability measures, Markov kernels and the
//!   canonical example graphs (two-point space, hypercube, symmetric group, ...).
//! - [`cost`]: the convex cost family `α` with its conjugate `α*` and
//!   `β(x) = xα'(x) − α(x)`.
//! - [`calculus`]: the nonlinear slope `|∇̃f|`, the classical inf-convolution
//!   `Q_t`, and the weak inf-convolution `Q̃_t` computed through convex
//!   envelopes of distance profiles.
//! - [`hj`]: Hamilton–Jacobi residuals of `Q̃_t`, the `t → 0` boundary
//!   identity, and a search for semigroup failures of distance-indexed
//!   inf-convolutions.
//! - [`transport`]: weak (barycentric) transport costs solved by Frank–Wolfe,
//!   relative entropy and transport–entropy verification.
//! - [`funcineq`]: Poincaré and modified log-Sobolev estimators, the
//!   hypercontractivity and dual checks, and the constant bookkeeping between
//!   them.
//! - [`cli`]: the `weakhj` command-line front-end.
//!
//! Everything is pure and deterministic given a seed.

#![forbid(unsafe_code)]

pub mod calculus;
pub mod cli;
pub mod cost;
pub mod error;
pub mod funcineq;
pub mod hj;
pub mod rng;
pub mod space;
pub mod transport;

pub use cost::{CostFunction, Extended};
pub use error::{Error, Result};
pub use space::{KernelMatrix, MetricSpace, ProbMeasure, RealFunction};
