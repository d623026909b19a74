//! External forcing: prescribed wind and ocean velocities and sea-surface
//! topography.
//!
//! Forcing is evaluated pointwise on the collocation lattice and only
//! enters the dynamics through the band-limited projection of the assembled
//! momentum source, so the `Reference` profiles (which are not `x`-periodic)
//! are sampled verbatim; their Gibbs content is truncated by the
//! projection, not smoothed beforehand.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{ScalarField, SpectralGrid, VectorField};

/// Selects the analytic wind/ocean profiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForcingMode {
    /// No wind, no ocean current, flat topography.
    Zero,
    /// Linear-in-space ocean gyre and mixed-period wind; not periodic in
    /// space, used for benchmark continuity.
    Reference,
    /// Fully periodic analogue of `Reference` with the same magnitudes.
    Periodic,
}

/// Forcing configuration: profile selection, wind period and topography
/// amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct ForcingSpec {
    pub mode: ForcingMode,
    /// Period of the wind's temporal oscillation; must be positive.
    pub t_period: f64,
    /// Amplitude of the analytic sea-surface height
    /// `H0 = a sin(2 pi x) sin(2 pi y)`.
    pub h0_amplitude: f64,
}

impl ForcingSpec {
    pub fn zero() -> Self {
        ForcingSpec { mode: ForcingMode::Zero, t_period: 1.0, h0_amplitude: 0.0 }
    }

    pub fn new(mode: ForcingMode, t_period: f64, h0_amplitude: f64) -> Result<Self> {
        let spec = ForcingSpec { mode, t_period, h0_amplitude };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_period.is_finite() && self.t_period > 0.0) {
            return Err(Error::config("forcing.t_period: wind period must be finite and > 0"));
        }
        if !self.h0_amplitude.is_finite() {
            return Err(Error::config("forcing.h0_amplitude: must be finite"));
        }
        Ok(())
    }

    /// Wind velocity at time `t` and position `(x, y)`.
    pub fn wind_at(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        match self.mode {
            ForcingMode::Zero => (0.0, 0.0),
            ForcingMode::Reference => {
                let s = (2.0 * PI * t / self.t_period).sin() - 3.0;
                (
                    5.0 + s * (2.0 * PI * x).sin() * (PI * y).sin(),
                    5.0 + s * (2.0 * PI * y).sin() * (PI * x).sin(),
                )
            }
            ForcingMode::Periodic => {
                let s = (2.0 * PI * t / self.t_period).sin() - 3.0;
                let shape = (2.0 * PI * x).sin() * (2.0 * PI * y).sin();
                (5.0 + s * shape, 5.0 + s * shape)
            }
        }
    }

    /// Ocean surface velocity at position `(x, y)` (time independent).
    pub fn ocean_at(&self, x: f64, y: f64) -> (f64, f64) {
        match self.mode {
            ForcingMode::Zero => (0.0, 0.0),
            ForcingMode::Reference => (0.1 * (2.0 * y - 1.0), -0.1 * (2.0 * x - 1.0)),
            ForcingMode::Periodic => {
                (0.1 * (2.0 * PI * y).sin(), -0.1 * (2.0 * PI * x).sin())
            }
        }
    }

    /// Analytic gradient of the sea-surface height at `(x, y)`.
    pub fn grad_h0_at(&self, x: f64, y: f64) -> (f64, f64) {
        let a = self.h0_amplitude;
        if a == 0.0 {
            return (0.0, 0.0);
        }
        let tp = 2.0 * PI;
        (
            a * tp * (tp * x).cos() * (tp * y).sin(),
            a * tp * (tp * x).sin() * (tp * y).cos(),
        )
    }

    /// Wind field sampled on the collocation lattice.
    pub fn wind_field(&self, grid: &SpectralGrid, t: f64) -> VectorField {
        let x = ScalarField::from_fn(grid, |x, y| self.wind_at(t, x, y).0);
        let y = ScalarField::from_fn(grid, |x, y| self.wind_at(t, x, y).1);
        VectorField::new(x, y).expect("components share the grid")
    }

    /// Ocean field sampled on the collocation lattice.
    pub fn ocean_field(&self, grid: &SpectralGrid) -> VectorField {
        let x = ScalarField::from_fn(grid, |x, y| self.ocean_at(x, y).0);
        let y = ScalarField::from_fn(grid, |x, y| self.ocean_at(x, y).1);
        VectorField::new(x, y).expect("components share the grid")
    }
}
