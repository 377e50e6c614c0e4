//! Numerical toolkit for weighted Caffarelli–Kohn–Nirenberg and trace
//! inequalities restricted to radial functions.
//!
//! The pieces, bottom up:
//!
//! * [`exponents`]: admissibility predicates with signed residuals.
//! * [`grids`]: geometric grids carrying Haar-measure (`dρ/ρ`) weights.
//! * [`kernels`]: the trace kernel `I(a, z)` and the sphere-reduced Riesz kernel.
//! * [`multconv`]: convolution on the multiplicative group `(0, ∞)`.
//! * [`fields`]: radial test profiles and half-space fields.
//! * [`operators`]: weighted norms, Riesz potentials, the half-space trace operator.
//! * [`verify`]: ratio records, dilation slopes, family scans.
//! * [`cli`] and [`config`]: the `radineq` command-line front end.

pub mod cli;
pub mod config;
pub mod error;
pub mod exponents;
pub mod fields;
pub mod grids;
pub mod kernels;
pub mod multconv;
pub mod operators;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
