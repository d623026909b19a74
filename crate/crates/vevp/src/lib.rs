//! Pseudo-spectral simulator for a Voigt-regularised elastic-viscous-plastic
//! sea-ice model on the periodic unit square.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: Fourier collocation grids, real fields, exact
//!   derivatives, Galerkin projection, Voigt inversion, dealiased
//!   nonlinearities, and lattice quadrature.
//! * [`model`]: physical parameters, forcing profiles, strain-rate
//!   regularisations, the constitutive relaxation, and the semi-discrete
//!   right-hand sides for velocity and stress.
//! * [`stepping`]: classical RK4 with blow-up guards, a stability-based
//!   step-size heuristic, and the simulation driver.
//! * [`diagnostics`]: energy, dissipation, symmetry defect, structural
//!   residuals, and Sobolev norms recorded along trajectories.
//! * [`illposed1d`]: a one-dimensional linearised laboratory for the
//!   well-posed/ill-posed transition of the stress relaxation.
//! * [`experiments`]: regularisation and resolution sweeps and twin-run
//!   separation studies.
//! * [`config`] / [`output`] / [`runner`]: JSON configuration, CSV and
//!   binary snapshot formats, and the orchestration used by the CLI.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod illposed1d;
pub mod model;
pub mod output;
pub mod runner;
pub mod spectral;
pub mod stepping;

pub use error::{Error, Result};
