//! Spectral operators: exact derivatives, Galerkin projection, Voigt
//! inversion, dealiased pointwise evaluation, and lattice quadrature.
//!
//! Derivatives and the Voigt inverse are diagonal in Fourier space; the
//! quadrature helpers exploit that the lattice mean of a product of two
//! band-limited fields equals the exact integral (the product's modes stay
//! below the lattice size).

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

use super::field::{ScalarField, TensorField, VectorField};
use super::grid::SpectralGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Exact spectral partial derivative; the result is band-limited to the
/// grid cutoff (content above it, which for a well-formed input is rounding
/// noise, is dropped rather than differentiated).
pub fn partial_derivative(f: &ScalarField, axis: Axis) -> ScalarField {
    let grid = f.grid();
    let mut spec = f.spectrum();
    derivative_in_place(grid, &mut spec, axis);
    ScalarField::from_spectrum(grid, &spec)
}

pub(crate) fn derivative_in_place(
    grid: &SpectralGrid,
    spec: &mut [Complex64],
    axis: Axis,
) {
    let m = grid.m();
    let n = grid.n() as i64;
    for iy in 0..m {
        let ky = grid.wavenumber(iy);
        for ix in 0..m {
            let kx = grid.wavenumber(ix);
            let c = &mut spec[iy * m + ix];
            if kx.abs() > n || ky.abs() > n {
                *c = Complex64::new(0.0, 0.0);
            } else {
                let k = match axis {
                    Axis::X => kx,
                    Axis::Y => ky,
                };
                *c *= Complex64::new(0.0, TAU * k as f64);
            }
        }
    }
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField {
        x: partial_derivative(f, Axis::X),
        y: partial_derivative(f, Axis::Y),
    }
}

/// Row-wise divergence `v_i = d_x t_ix + d_y t_iy`, computed in one pass
/// over the four component spectra.
pub fn tensor_divergence(t: &TensorField) -> VectorField {
    let grid = t.grid();
    let m = grid.m();
    let n = grid.n() as i64;
    let sxx = t.xx.spectrum();
    let sxy = t.xy.spectrum();
    let syx = t.yx.spectrum();
    let syy = t.yy.spectrum();
    let mut vx = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut vy = vec![Complex64::new(0.0, 0.0); grid.len()];
    for iy in 0..m {
        let ky = grid.wavenumber(iy);
        for ix in 0..m {
            let kx = grid.wavenumber(ix);
            if kx.abs() > n || ky.abs() > n {
                continue;
            }
            let idx = iy * m + ix;
            let dx = Complex64::new(0.0, TAU * kx as f64);
            let dy = Complex64::new(0.0, TAU * ky as f64);
            vx[idx] = dx * sxx[idx] + dy * sxy[idx];
            vy[idx] = dx * syx[idx] + dy * syy[idx];
        }
    }
    VectorField {
        x: ScalarField::from_spectrum(grid, &vx),
        y: ScalarField::from_spectrum(grid, &vy),
    }
}

/// Zero every mode with `max(|k_x|,|k_y|) > n_target`.  `n_target` may be
/// below the grid cutoff (used when comparing runs across resolutions).
pub fn galerkin_project(f: &ScalarField, n_target: usize) -> Result<ScalarField> {
    let grid = f.grid();
    if n_target >= grid.m() / 2 {
        return Err(Error::invalid(format!(
            "projection cutoff {n_target} must stay below m/2 = {}",
            grid.m() / 2
        )));
    }
    let mut spec = f.spectrum();
    project_in_place(grid, &mut spec, n_target);
    Ok(ScalarField::from_spectrum(grid, &spec))
}

pub(crate) fn project_in_place(
    grid: &SpectralGrid,
    spec: &mut [Complex64],
    n_target: usize,
) {
    let m = grid.m();
    let n = n_target as i64;
    for iy in 0..m {
        let ky = grid.wavenumber(iy);
        for ix in 0..m {
            let kx = grid.wavenumber(ix);
            if kx.abs() > n || ky.abs() > n {
                spec[iy * m + ix] = Complex64::new(0.0, 0.0);
            }
        }
    }
}

pub fn galerkin_project_vector(u: &VectorField, n: usize) -> Result<VectorField> {
    Ok(VectorField {
        x: galerkin_project(&u.x, n)?,
        y: galerkin_project(&u.y, n)?,
    })
}

pub fn galerkin_project_tensor(t: &TensorField, n: usize) -> Result<TensorField> {
    Ok(TensorField {
        xx: galerkin_project(&t.xx, n)?,
        xy: galerkin_project(&t.xy, n)?,
        yx: galerkin_project(&t.yx, n)?,
        yy: galerkin_project(&t.yy, n)?,
    })
}

/// Apply `(I - alpha^2 Laplacian)^{-1}`: divide each coefficient by
/// `1 + 4 pi^2 alpha^2 |k|^2`.  `alpha = 0` is the identity (minus the
/// band projection, which is always applied).
pub(crate) fn voigt_in_place(grid: &SpectralGrid, spec: &mut [Complex64], alpha: f64) {
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
                *c /= 1.0 + TAU * TAU * a2 * k2;
            }
        }
    }
}

pub fn voigt_invert_scalar(f: &ScalarField, alpha: f64) -> Result<ScalarField> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::invalid(format!(
            "alpha = {alpha}: Voigt inversion needs a finite alpha >= 0"
        )));
    }
    let mut spec = f.spectrum();
    voigt_in_place(f.grid(), &mut spec, alpha);
    Ok(ScalarField::from_spectrum(f.grid(), &spec))
}

pub fn voigt_invert(t: &TensorField, alpha: f64) -> Result<TensorField> {
    Ok(TensorField {
        xx: voigt_invert_scalar(&t.xx, alpha)?,
        xy: voigt_invert_scalar(&t.xy, alpha)?,
        yx: voigt_invert_scalar(&t.yx, alpha)?,
        yy: voigt_invert_scalar(&t.yy, alpha)?,
    })
}

/// Evaluate `map` pointwise over the input fields on the (padded)
/// collocation lattice, then truncate the result to the grid band.  This is
/// the dealiased route for non-polynomial nonlinearities.
pub fn dealiased_product(
    inputs: &[&ScalarField],
    map: impl Fn(&[f64]) -> f64,
) -> Result<ScalarField> {
    let first = inputs
        .first()
        .ok_or_else(|| Error::invalid("dealiased_product needs at least one input"))?;
    let grid = first.grid().clone();
    for f in inputs {
        if f.grid() != &grid {
            return Err(Error::invalid("dealiased_product inputs on different grids"));
        }
    }
    let len = grid.len();
    let mut out = Vec::with_capacity(len);
    let mut args = vec![0.0; inputs.len()];
    for j in 0..len {
        for (slot, f) in args.iter_mut().zip(inputs) {
            *slot = f.values()[j];
        }
        out.push(map(&args));
    }
    let raw = ScalarField::from_values(&grid, out)?;
    galerkin_project(&raw, grid.n())
}

/// Lattice mean = integral over the unit square; exact for band-limited
/// fields because no retained mode aliases onto the mean.
pub fn mean_integral(f: &ScalarField) -> f64 {
    f.values().iter().sum::<f64>() / f.values().len() as f64
}

/// Quadrature inner product; exact when `f * g` has all its modes below the
/// lattice size, which holds for any two band-limited fields.
pub fn l2_inner(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::invalid("l2_inner arguments on different grids"));
    }
    let sum: f64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
    Ok(sum / f.values().len() as f64)
}

pub fn l2_norm(f: &ScalarField) -> f64 {
    l2_inner(f, f).expect("same field").max(0.0).sqrt()
}

/// Sobolev weight `(1 + 4 pi^2 |k|^2)^s` summed against `|fhat_k|^2` over
/// the retained band.
pub(crate) fn hs_norm_sq_spec(grid: &SpectralGrid, spec: &[Complex64], s: u32) -> f64 {
    let m = grid.m();
    let n = grid.n() as i64;
    let mut acc = 0.0;
    for iy in 0..m {
        let ky = grid.wavenumber(iy);
        if ky.abs() > n {
            continue;
        }
        for ix in 0..m {
            let kx = grid.wavenumber(ix);
            if kx.abs() > n {
                continue;
            }
            let k2 = (kx * kx + ky * ky) as f64;
            let w = (1.0 + TAU * TAU * k2).powi(s as i32);
            acc += w * spec[iy * m + ix].norm_sqr();
        }
    }
    acc
}

fn sobolev_check_order(s: u32) -> Result<()> {
    if s > 3 {
        return Err(Error::invalid(format!(
            "sobolev order s = {s}: supported range is 0..=3"
        )));
    }
    Ok(())
}

pub fn sobolev_norm_scalar(f: &ScalarField, s: u32) -> Result<f64> {
    sobolev_check_order(s)?;
    Ok(hs_norm_sq_spec(f.grid(), &f.spectrum(), s).sqrt())
}

pub fn sobolev_norm_vector(u: &VectorField, s: u32) -> Result<f64> {
    sobolev_check_order(s)?;
    let sum: f64 = u
        .components()
        .iter()
        .map(|c| hs_norm_sq_spec(c.grid(), &c.spectrum(), s))
        .sum();
    Ok(sum.sqrt())
}

pub fn sobolev_norm_tensor(t: &TensorField, s: u32) -> Result<f64> {
    sobolev_check_order(s)?;
    let sum: f64 = t
        .components()
        .iter()
        .map(|c| hs_norm_sq_spec(c.grid(), &c.spectrum(), s))
        .sum();
    Ok(sum.sqrt())
}

/// Spectral mass outside the band; a well-formed field keeps this at
/// rounding level relative to its norm.
pub fn band_limit_defect(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let m = grid.m();
    let n = grid.n() as i64;
    let spec = f.spectrum();
    let mut out = 0.0;
    for iy in 0..m {
        let ky = grid.wavenumber(iy);
        for ix in 0..m {
            let kx = grid.wavenumber(ix);
            if kx.abs() > n || ky.abs() > n {
                out += spec[iy * m + ix].norm_sqr();
            }
        }
    }
    out.sqrt()
}

pub fn is_band_limited(f: &ScalarField) -> bool {
    band_limit_defect(f) <= 1e-12 * (l2_norm(f) + f64::MIN_POSITIVE)
}

/// Band-limited noise with a prescribed L2 norm; used for seeded
/// perturbations and randomized checks.
pub fn random_band_limited(
    grid: &SpectralGrid,
    rng: &mut impl Rng,
    norm: f64,
) -> ScalarField {
    let raw: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let raw = ScalarField::from_values(grid, raw).expect("sized to grid");
    let mut f = galerkin_project(&raw, grid.n()).expect("cutoff below m/2");
    let current = l2_norm(&f);
    if current > 0.0 {
        f.scale(norm / current);
    }
    f
}

pub fn random_vector(grid: &SpectralGrid, rng: &mut impl Rng, norm: f64) -> VectorField {
    VectorField {
        x: random_band_limited(grid, rng, norm),
        y: random_band_limited(grid, rng, norm),
    }
}

/// Random symmetric tensor (xy and yx share one sample).
pub fn random_symmetric_tensor(
    grid: &SpectralGrid,
    rng: &mut impl Rng,
    norm: f64,
) -> TensorField {
    let off = random_band_limited(grid, rng, norm);
    TensorField {
        xx: random_band_limited(grid, rng, norm),
        xy: off.clone(),
        yx: off,
        yy: random_band_limited(grid, rng, norm),
    }
}
