//! Semi-discrete right-hand sides.
//!
//! Momentum: `du = div sigma + Q_N[T_air + T_water - g grad H0] + Omega u_perp`.
//! Stress: `dsigma = E (I - alpha^2 Lap)^{-1} Q_N[D(u) - R(sigma, dcal)]`.
//!
//! Each nonlinearity is evaluated pointwise on the padded lattice and
//! projected exactly once; the linear terms (stress divergence, Coriolis)
//! are band-limited already.  Projection and Voigt inversion of the stress
//! update are fused into a single spectral pass per component, and the
//! off-diagonal components follow identical code paths so a symmetric
//! stress stays symmetric bitwise.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spectral::{ScalarField, SpectralGrid, TensorField, VectorField};
use crate::spectral::tensor_divergence;

use super::forcing::ForcingSpec;
use super::params::PhysicalParams;
use super::rheology::{
    rheology_relaxation, strain_rate, sym_gradient, wind_stress, ocean_stress, perp,
};
use super::state::{State, StateDeriv};
use super::StrainVariant;

fn check_momentum_params(params: &PhysicalParams) -> Result<()> {
    if !(params.g.is_finite() && params.omega.is_finite()) {
        return Err(Error::invalid("momentum parameters must be finite"));
    }
    if params.c_a < 0.0 || params.c_w < 0.0 {
        return Err(Error::invalid("drag coefficients must be >= 0"));
    }
    Ok(())
}

/// Project a pair of raw lattice fields onto the grid band.
fn project_pair(grid: &SpectralGrid, fx: Vec<f64>, fy: Vec<f64>) -> Result<VectorField> {
    let n = grid.n();
    let x = crate::spectral::galerkin_project(&ScalarField::from_values(grid, fx)?, n)?;
    let y = crate::spectral::galerkin_project(&ScalarField::from_values(grid, fy)?, n)?;
    Ok(VectorField { x, y })
}

/// Momentum tendency at the state's own time.
pub fn momentum_rhs(
    state: &State,
    params: &PhysicalParams,
    forcing: &ForcingSpec,
) -> Result<VectorField> {
    check_momentum_params(params)?;
    forcing.validate()?;
    let grid = state.grid().clone();

    let mut rhs = tensor_divergence(&state.sigma);

    // Drag and surface-tilt source, assembled pointwise and projected once.
    let wind = forcing.wind_field(&grid, state.t);
    let ocean = forcing.ocean_field(&grid);
    let tau_a = wind_stress(&wind, params);
    let tau_w = ocean_stress(&ocean, &state.u, params)?;
    let len = grid.len();
    let m = grid.m();
    let mut fx = vec![0.0; len];
    let mut fy = vec![0.0; len];
    for j in 0..len {
        let (x, y) = (grid.coord(j % m), grid.coord(j / m));
        let (hx, hy) = forcing.grad_h0_at(x, y);
        fx[j] = tau_a.x.values()[j] + tau_w.x.values()[j] - params.g * hx;
        fy[j] = tau_a.y.values()[j] + tau_w.y.values()[j] - params.g * hy;
    }
    rhs.scaled_add(1.0, &project_pair(&grid, fx, fy)?);

    // Coriolis term: exact, stays in the band.
    if params.omega != 0.0 {
        rhs.scaled_add(params.omega, &perp(&state.u));
    }

    if !rhs.is_finite() {
        return Err(Error::invalid("momentum right-hand side is not finite"));
    }
    Ok(rhs)
}

/// Stress tendency: relaxation toward the yield curve driven by the
/// strain rate, filtered through the Voigt inverse.
pub fn stress_rhs(
    state: &State,
    params: &PhysicalParams,
    variant: StrainVariant,
) -> Result<TensorField> {
    if !(params.alpha.is_finite() && params.alpha >= 0.0) {
        return Err(Error::invalid(format!(
            "alpha = {}: Voigt length must be finite and >= 0",
            params.alpha
        )));
    }
    if !(params.e_modulus.is_finite() && params.e_modulus > 0.0) {
        return Err(Error::invalid(format!(
            "e_modulus = {}: elastic modulus must be finite and > 0",
            params.e_modulus
        )));
    }
    let grid = state.grid().clone();

    let d = sym_gradient(&state.u);
    let dcal = strain_rate(variant, &d, params)?;
    let r = rheology_relaxation(&state.sigma, &dcal, params)?;

    // X = D(u) - R, pointwise; then one fused spectral pass per component:
    // band projection, Voigt inversion and the modulus factor.
    let mut x = d;
    x.scaled_add(-1.0, &r);
    let out = [&x.xx, &x.xy, &x.yx, &x.yy].map(|comp| {
        let mut spec = comp.spectrum();
        scale_project_voigt(&grid, &mut spec, params.alpha, params.e_modulus);
        ScalarField::from_spectrum(&grid, &spec)
    });
    let [xx, xy, yx, yy] = out;
    let out = TensorField { xx, xy, yx, yy };
    if !out.is_finite() {
        return Err(Error::invalid("stress right-hand side is not finite"));
    }
    Ok(out)
}

fn scale_project_voigt(grid: &SpectralGrid, spec: &mut [Complex64], alpha: f64, e_mod: f64) {
    let m = grid.m();
    let n = grid.n() as i64;
    let a2 = alpha * alpha;
    for iy in 0..m {
        let ky = grid.wavenumber(iy);
        for ix in 0..m {
            let kx = grid.wavenumber(ix);
            let c = &mut spec[iy * m + ix];
            if kx.abs() > n || ky.abs() > n {
                *c = Complex64::new(0.0, 0.0);
            } else {
                let k2 = (kx * kx + ky * ky) as f64;
                *c *= e_mod / (1.0 + TAU * TAU * a2 * k2);
            }
        }
    }
}

/// Full coupled tendency.
pub fn voigt_evp_rhs(
    state: &State,
    params: &PhysicalParams,
    forcing: &ForcingSpec,
    variant: StrainVariant,
) -> Result<StateDeriv> {
    Ok(StateDeriv {
        du: momentum_rhs(state, params, forcing)?,
        dsigma: stress_rhs(state, params, variant)?,
    })
}
