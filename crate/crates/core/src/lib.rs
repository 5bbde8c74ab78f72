//! Numerical toolkit for semilinear parabolic SPDEs driven by additive
//! cylindrical fractional Brownian motion with Hurst index `H > 1/2`.
//!
//! The pipeline is: exact fBm increments ([`fbm`]) drive a spectral
//! Galerkin / linear implicit Euler discretization ([`solver`]) built on
//! diagonal operators ([`spectral`]). [`experiments`] runs coupled-noise
//! Monte Carlo convergence studies and [`verification`] checks the
//! analytic identities the scheme relies on.

// Test oracles are written out to the digits they were computed with.
#![cfg_attr(test, allow(clippy::excessive_precision, clippy::approx_constant))]

pub mod error;
pub mod experiments;
pub mod fbm;
pub mod parallel;
pub mod presets;
pub mod quadrature;
pub mod seed;
pub mod solver;
pub mod spectral;
pub mod stats;
pub mod verification;

pub use error::{Error, Result};
pub use parallel::Executor;
