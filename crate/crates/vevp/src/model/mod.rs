//! The Voigt-regularised elastic-viscous-plastic model: parameters,
//! forcing, constitutive law and semi-discrete right-hand sides.

mod forcing;
mod params;
mod rheology;
mod rhs;
mod state;

pub use forcing::{ForcingMode, ForcingSpec};
pub use params::PhysicalParams;
pub use rheology::{
    ocean_stress, perp, rheology_relaxation, smoothed_max, spin_scalar, strain_rate,
    strain_rate_original, strain_rate_simplified, strain_rate_smoothed_max, sym_gradient,
    wind_stress, StrainVariant,
};
pub use rhs::{momentum_rhs, stress_rhs, voigt_evp_rhs};
pub use state::{State, StateDeriv};
