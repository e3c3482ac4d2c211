//! Pseudo-spectral laboratory for real, mean-free, divergence-free vector
//! fields on the 3-torus.
//!
//! The crate has two jobs. First, it evaluates both sides of a family of
//! interpolation inequalities for homogeneous Sobolev and absolute-sum
//! norms on concrete fields, always through two independent routes where
//! one exists (direct lattice sums against pseudo-spectral transforms,
//! quadrature against closed forms), and reports the slack instead of
//! assuming it. Second, it integrates the Galerkin-truncated
//! Navier-Stokes/Euler dynamics with an integrating-factor RK4 scheme and
//! monitors the Hs energy identity, the associated inequality, the
//! existence-time bound and the blow-up-rate envelopes along trajectories.
//!
//! Conventions: Fourier basis `e^{2 pi i k.x}` with integer wavevectors on
//! `[0,1)^3`, so the Laplacian symbol is `-4 pi^2 |k|^2` and a single mode
//! under unit viscosity decays like `exp(-4 pi^2 |k|^2 t)`. All homogeneous
//! sums exclude the `k = 0` mode; the mean velocity is pinned to zero.
//!
//! Module map: [`lattice`] and [`field`] hold the truncated lattice and
//! coefficient state, [`transform`] the FFT bridge and exact dealiased
//! products, [`norms`], [`quadrature`] and [`audits`] the norm machinery
//! and inequality audits, [`trilinear`] the convection form with its
//! cancellation identity and bound chain, [`rates`] the assembled constant
//! chain and comparison ODE, [`evolution`] the solver and trajectory
//! monitors, and [`cli`]/[`config`] the batch front end.

pub mod audits;
pub mod cli;
pub mod config;
pub mod error;
pub mod evolution;
pub mod field;
pub mod lattice;
pub mod norms;
pub mod quadrature;
pub mod rates;
pub mod transform;
pub mod trilinear;

pub use error::{Error, Result};
