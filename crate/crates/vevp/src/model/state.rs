//! Prognostic state of the 2D model and its time derivative.

use crate::error::{Error, Result};
use crate::spectral::{SpectralGrid, TensorField, VectorField};

use super::params::PhysicalParams;

/// Velocity, stress and the current time.  Fields are band-limited by
/// construction everywhere in the crate; the integrator preserves that.
#[derive(Clone, Debug)]
pub struct State {
    pub u: VectorField,
    pub sigma: TensorField,
    pub t: f64,
}

impl State {
    pub fn new(u: VectorField, sigma: TensorField, t: f64) -> Result<Self> {
        if u.grid() != sigma.grid() {
            return Err(Error::invalid("state velocity and stress on different grids"));
        }
        Ok(State { u, sigma, t })
    }

    /// The rest state `u = 0`, `sigma = -(P/2) I`: an equilibrium of the
    /// unforced dynamics for every strain-rate variant.
    pub fn steady(grid: &SpectralGrid, params: &PhysicalParams) -> Self {
        State {
            u: VectorField::zeros(grid),
            sigma: TensorField::isotropic(grid, -params.p / 2.0),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.u.grid()
    }

    /// `self += a * d` on both fields; time is untouched (the integrator
    /// owns it).
    pub fn scaled_add(&mut self, a: f64, d: &StateDeriv) {
        self.u.scaled_add(a, &d.du);
        self.sigma.scaled_add(a, &d.dsigma);
    }

    pub fn linf(&self) -> f64 {
        self.u.linf().max(self.sigma.linf())
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.sigma.is_finite()
    }
}

/// Right-hand side of the coupled system.
#[derive(Clone, Debug)]
pub struct StateDeriv {
    pub du: VectorField,
    pub dsigma: TensorField,
}

impl StateDeriv {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        StateDeriv {
            du: VectorField::zeros(grid),
            dsigma: TensorField::zeros(grid),
        }
    }

    pub fn scaled_add(&mut self, a: f64, other: &Self) {
        self.du.scaled_add(a, &other.du);
        self.dsigma.scaled_add(a, &other.dsigma);
    }

    pub fn is_finite(&self) -> bool {
        self.du.is_finite() && self.dsigma.is_finite()
    }
}
