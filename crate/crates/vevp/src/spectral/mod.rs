//! Pseudo-spectral discretisation on the periodic unit square: grids,
//! real-valued fields, and the Fourier-side operators the model is built
//! from.

mod field;
mod grid;
mod ops;

pub use field::{ScalarField, TensorField, VectorField};
pub use grid::{collocation_size, SpectralGrid};
pub use ops::{
    band_limit_defect, dealiased_product, galerkin_project, galerkin_project_tensor,
    galerkin_project_vector, gradient, is_band_limited, l2_inner, l2_norm,
    mean_integral, partial_derivative, random_band_limited, random_symmetric_tensor,
    random_vector, sobolev_norm_scalar, sobolev_norm_tensor, sobolev_norm_vector,
    tensor_divergence, voigt_invert, voigt_invert_scalar, Axis,
};

pub(crate) use ops::hs_norm_sq_spec;
