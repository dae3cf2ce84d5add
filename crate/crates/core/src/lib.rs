//! Carleman linearization of discretized reaction-diffusion equations.
//!
//! Modules follow the pipeline: `grid` builds the discrete Laplacian,
//! `rdode` integrates the nonlinear ODE, `carleman` lifts and truncates it,
//! `linsys` assembles the forward-Euler linear system and its resource
//! estimates, `heatdecay` checks the heat-semigroup decay bounds, `spectral`
//! computes Fourier gradients and sampling observables, and `experiments`
//! ties them into named presets.

pub mod carleman;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod heatdecay;
pub mod linsys;
mod ode;
pub mod rdode;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
