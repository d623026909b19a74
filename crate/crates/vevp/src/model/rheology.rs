//! Constitutive pieces of the stress equation and the drag laws.
//!
//! Strain-rate measures are evaluated pointwise on the collocation lattice
//! and are generally *not* band-limited; they only enter the dynamics inside
//! an assembly that is projected once at the end.  Keeping them raw here is
//! what makes the discrete energy identity exact.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spectral::{ScalarField, TensorField, VectorField};

use super::params::PhysicalParams;

/// Counterclockwise quarter turn `u_perp = (-u_y, u_x)`; exact (no
/// transforms involved).
pub fn perp(u: &VectorField) -> VectorField {
    let grid = u.grid();
    let mut x = ScalarField::zeros(grid);
    let mut y = ScalarField::zeros(grid);
    for (out, v) in x.values_mut().iter_mut().zip(u.y.values()) {
        *out = -v;
    }
    y.values_mut().copy_from_slice(u.x.values());
    VectorField { x, y }
}

/// Symmetrised velocity gradient `D(u) = (grad u + grad u^T) / 2`, computed
/// spectrally.  The off-diagonal entries are one shared computation, so
/// `xy` and `yx` are bitwise identical.
pub fn sym_gradient(u: &VectorField) -> TensorField {
    let grid = u.grid();
    let m = grid.m();
    let n = grid.n() as i64;
    let spec_ux = u.x.spectrum();
    let spec_uy = u.y.spectrum();

    let mut sxx = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut sxy = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut syy = vec![Complex64::new(0.0, 0.0); grid.len()];
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
            sxx[idx] = dx * spec_ux[idx];
            syy[idx] = dy * spec_uy[idx];
            sxy[idx] = 0.5 * (dy * spec_ux[idx] + dx * spec_uy[idx]);
        }
    }
    let xy = ScalarField::from_spectrum(grid, &sxy);
    TensorField {
        xx: ScalarField::from_spectrum(grid, &sxx),
        yx: xy.clone(),
        xy,
        yy: ScalarField::from_spectrum(grid, &syy),
    }
}

/// Antisymmetric part of the velocity gradient, returned as its single
/// independent entry `W_xy = (d_y u_x - d_x u_y) / 2` (so `W_yx = -W_xy`).
pub fn spin_scalar(u: &VectorField) -> ScalarField {
    let grid = u.grid();
    let m = grid.m();
    let n = grid.n() as i64;
    let spec_ux = u.x.spectrum();
    let spec_uy = u.y.spectrum();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
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
            out[idx] = 0.5 * (dy * spec_ux[idx] - dx * spec_uy[idx]);
        }
    }
    ScalarField::from_spectrum(grid, &out)
}

/// Which strain-rate measure drives the relaxation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrainVariant {
    /// Frobenius norm of the full tensor with floor `eps`
    /// (`eps = 0` recovers the unregularised measure).
    Simplified,
    /// Elliptic-yield-curve measure with floor `eps`.
    Original,
    /// Elliptic measure passed through a smoothed max with `eps`, `gamma`.
    SmoothedMax,
}

/// `sqrt(|D|^2 + eps^2)` with `|D|^2` the Frobenius norm over all four
/// entries; pointwise on the lattice.
pub fn strain_rate_simplified(d: &TensorField, eps: f64) -> ScalarField {
    let grid = d.grid();
    let mut out = ScalarField::zeros(grid);
    let (dxx, dxy, dyx, dyy) = (d.xx.values(), d.xy.values(), d.yx.values(), d.yy.values());
    let e2 = eps * eps;
    for (j, v) in out.values_mut().iter_mut().enumerate() {
        let f2 = dxx[j] * dxx[j] + dxy[j] * dxy[j] + dyx[j] * dyx[j] + dyy[j] * dyy[j];
        *v = (f2 + e2).sqrt();
    }
    out
}

/// Elliptic-yield measure
/// `sqrt((2/e_bar^2) |D - (tr D / 2) I|^2 + |tr D|^2 + eps^2)`.
pub fn strain_rate_original(d: &TensorField, e_bar: f64, eps: f64) -> Result<ScalarField> {
    if !(e_bar.is_finite() && e_bar > 1.0) {
        return Err(Error::invalid(format!(
            "e_bar = {e_bar}: yield-ellipse ratio must be finite and > 1"
        )));
    }
    let grid = d.grid();
    let mut out = ScalarField::zeros(grid);
    let (dxx, dxy, dyx, dyy) = (d.xx.values(), d.xy.values(), d.yx.values(), d.yy.values());
    let c = 2.0 / (e_bar * e_bar);
    let e2 = eps * eps;
    for (j, v) in out.values_mut().iter_mut().enumerate() {
        let tr = dxx[j] + dyy[j];
        let half_tr = 0.5 * tr;
        let axx = dxx[j] - half_tr;
        let ayy = dyy[j] - half_tr;
        let dev2 = axx * axx + dxy[j] * dxy[j] + dyx[j] * dyx[j] + ayy * ayy;
        *v = (c * dev2 + tr * tr + e2).sqrt();
    }
    Ok(out)
}

/// Smoothed maximum `(a + eps + gamma)/2 + sqrt((a - eps)^2 + gamma^2)/2`
/// applied to a scalar; `gamma = 0` gives `max(a, eps)` exactly.
pub fn smoothed_max(a: f64, eps: f64, gamma: f64) -> f64 {
    0.5 * (a + eps + gamma) + 0.5 * ((a - eps) * (a - eps) + gamma * gamma).sqrt()
}

/// Elliptic measure (no floor) passed through `smoothed_max` pointwise.
pub fn strain_rate_smoothed_max(
    d: &TensorField,
    e_bar: f64,
    eps: f64,
    gamma: f64,
) -> Result<ScalarField> {
    if eps < 0.0 || gamma < 0.0 {
        return Err(Error::invalid(format!(
            "smoothed max needs eps >= 0 and gamma >= 0 (got eps = {eps}, gamma = {gamma})"
        )));
    }
    let mut out = strain_rate_original(d, e_bar, 0.0)?;
    for v in out.values_mut() {
        *v = smoothed_max(*v, eps, gamma);
    }
    Ok(out)
}

/// Strain-rate measure for the configured variant, reading `eps`, `gamma`
/// and `e_bar` from the parameters.
pub fn strain_rate(
    variant: StrainVariant,
    d: &TensorField,
    params: &PhysicalParams,
) -> Result<ScalarField> {
    match variant {
        StrainVariant::Simplified => Ok(strain_rate_simplified(d, params.eps)),
        StrainVariant::Original => strain_rate_original(d, params.e_bar, params.eps),
        StrainVariant::SmoothedMax => {
            strain_rate_smoothed_max(d, params.e_bar, params.eps, params.gamma)
        }
    }
}

/// Relaxation `R(sigma, dcal)` of the stress equation:
///
/// ```text
/// R = (e_bar^2 dcal / P) (sigma - (tr sigma / 2) I)
///   + (dcal / 2) (tr sigma / P + 1) I
/// ```
///
/// written so that `sigma = -(P/2) I` gives an exact floating-point zero
/// for every strain rate.  Pointwise; the output is not band-limited.
pub fn rheology_relaxation(
    sigma: &TensorField,
    dcal: &ScalarField,
    params: &PhysicalParams,
) -> Result<TensorField> {
    if !(params.p.is_finite() && params.p > 0.0) {
        return Err(Error::invalid(format!(
            "P = {}: ice strength must be finite and > 0",
            params.p
        )));
    }
    if !(params.e_bar.is_finite() && params.e_bar > 1.0) {
        return Err(Error::invalid(format!(
            "e_bar = {}: yield-ellipse ratio must be finite and > 1",
            params.e_bar
        )));
    }
    if sigma.grid() != dcal.grid() {
        return Err(Error::invalid("rheology_relaxation arguments on different grids"));
    }
    let grid = sigma.grid();
    let (sxx, sxy, syx, syy) =
        (sigma.xx.values(), sigma.xy.values(), sigma.yx.values(), sigma.yy.values());
    let dv = dcal.values();
    let e2_over_p = params.e_bar * params.e_bar / params.p;
    let inv_p = 1.0 / params.p;
    let len = grid.len();
    let mut oxx = vec![0.0; len];
    let mut oxy = vec![0.0; len];
    let mut oyx = vec![0.0; len];
    let mut oyy = vec![0.0; len];
    for j in 0..len {
        let tr = sxx[j] + syy[j];
        let half_tr = 0.5 * tr;
        let dev_coeff = e2_over_p * dv[j];
        let iso = 0.5 * dv[j] * (tr * inv_p + 1.0);
        oxx[j] = dev_coeff * (sxx[j] - half_tr) + iso;
        oxy[j] = dev_coeff * sxy[j];
        oyx[j] = dev_coeff * syx[j];
        oyy[j] = dev_coeff * (syy[j] - half_tr) + iso;
    }
    let out = TensorField {
        xx: ScalarField::from_values(grid, oxx)?,
        xy: ScalarField::from_values(grid, oxy)?,
        yx: ScalarField::from_values(grid, oyx)?,
        yy: ScalarField::from_values(grid, oyy)?,
    };
    out
        .is_finite()
        .then_some(out)
        .ok_or_else(|| Error::invalid("rheology_relaxation produced non-finite values"))
}

/// Rotate `(x, y)` counterclockwise by the angle with the given cosine and
/// sine, scale by `coeff * |(x, y)|`.
#[inline]
fn quadratic_drag(x: f64, y: f64, coeff: f64, cos_a: f64, sin_a: f64) -> (f64, f64) {
    let speed = x.hypot(y);
    let c = coeff * speed;
    (c * (x * cos_a - y * sin_a), c * (y * cos_a + x * sin_a))
}

/// Quadratic wind drag `c_a rho_a |U_a| (U_a cos phi + U_a_perp sin phi)`,
/// pointwise; not band-limited.
pub fn wind_stress(wind: &VectorField, params: &PhysicalParams) -> VectorField {
    let grid = wind.grid();
    let coeff = params.c_a * params.rho_a;
    let (cos_a, sin_a) = (params.phi.cos(), params.phi.sin());
    let mut x = ScalarField::zeros(grid);
    let mut y = ScalarField::zeros(grid);
    for j in 0..grid.len() {
        let (tx, ty) =
            quadratic_drag(wind.x.values()[j], wind.y.values()[j], coeff, cos_a, sin_a);
        x.values_mut()[j] = tx;
        y.values_mut()[j] = ty;
    }
    VectorField { x, y }
}

/// Quadratic ocean drag on the relative velocity `V = U_w - u`:
/// `c_w rho_w |V| (V cos theta + V_perp sin theta)`, pointwise.
pub fn ocean_stress(
    ocean: &VectorField,
    u: &VectorField,
    params: &PhysicalParams,
) -> Result<VectorField> {
    if ocean.grid() != u.grid() {
        return Err(Error::invalid("ocean_stress arguments on different grids"));
    }
    let grid = u.grid();
    let coeff = params.c_w * params.rho_w;
    let (cos_a, sin_a) = (params.theta.cos(), params.theta.sin());
    let mut x = ScalarField::zeros(grid);
    let mut y = ScalarField::zeros(grid);
    for j in 0..grid.len() {
        let vx = ocean.x.values()[j] - u.x.values()[j];
        let vy = ocean.y.values()[j] - u.y.values()[j];
        let (tx, ty) = quadratic_drag(vx, vy, coeff, cos_a, sin_a);
        x.values_mut()[j] = tx;
        y.values_mut()[j] = ty;
    }
    Ok(VectorField { x, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{
        l2_norm, partial_derivative, random_vector, Axis, SpectralGrid,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::new(n, 2.0).unwrap()
    }

    #[test]
    fn perp_is_quarter_turn() {
        let g = grid(4);
        let u = VectorField {
            x: ScalarField::constant(&g, 3.0),
            y: ScalarField::constant(&g, -2.0),
        };
        let p = perp(&u);
        assert_eq!(p.x.values()[0], 2.0);
        assert_eq!(p.y.values()[0], 3.0);
        let pp = perp(&p);
        assert_eq!(pp.x.values()[0], -3.0);
        assert_eq!(pp.y.values()[0], 2.0);
    }

    #[test]
    fn sym_gradient_matches_analytic_derivatives() {
        let g = grid(8);
        let u = VectorField {
            x: ScalarField::from_fn(&g, |x, y| (2.0 * PI * x).sin() * (2.0 * PI * y).cos()),
            y: ScalarField::from_fn(&g, |x, _| (4.0 * PI * x).cos()),
        };
        let d = sym_gradient(&u);
        let dxx = ScalarField::from_fn(&g, |x, y| {
            2.0 * PI * (2.0 * PI * x).cos() * (2.0 * PI * y).cos()
        });
        let dxy = ScalarField::from_fn(&g, |x, y| {
            0.5 * (-2.0 * PI * (2.0 * PI * x).sin() * (2.0 * PI * y).sin()
                - 4.0 * PI * (4.0 * PI * x).sin())
        });
        for (got, want) in [(&d.xx, &dxx), (&d.xy, &dxy)] {
            let mut diff = got.clone();
            diff.scaled_add(-1.0, want);
            assert!(diff.linf() < 1e-11, "linf = {}", diff.linf());
        }
        assert!(d.yy.linf() < 1e-11);
    }

    #[test]
    fn sym_gradient_offdiagonals_bitwise_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = grid(8);
        let u = random_vector(&g, &mut rng, 1.0);
        let d = sym_gradient(&u);
        for (a, b) in d.xy.values().iter().zip(d.yx.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn sym_gradient_agrees_with_componentwise_derivatives() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = grid(6);
        let u = random_vector(&g, &mut rng, 1.0);
        let d = sym_gradient(&u);
        let gxx = partial_derivative(&u.x, Axis::X);
        let gxy_a = partial_derivative(&u.x, Axis::Y);
        let gxy_b = partial_derivative(&u.y, Axis::X);
        let gyy = partial_derivative(&u.y, Axis::Y);
        for j in 0..g.len() {
            let want_xy = 0.5 * (gxy_a.values()[j] + gxy_b.values()[j]);
            assert!((d.xx.values()[j] - gxx.values()[j]).abs() < 1e-12);
            assert!((d.xy.values()[j] - want_xy).abs() < 1e-12);
            assert!((d.yy.values()[j] - gyy.values()[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_vanishes_for_gradient_flows_and_matches_rotation() {
        let g = grid(8);
        // Gradient of a potential has no spin.
        let pot_flow = VectorField {
            x: ScalarField::from_fn(&g, |x, y| {
                2.0 * PI * (2.0 * PI * x).cos() * (2.0 * PI * y).sin()
            }),
            y: ScalarField::from_fn(&g, |x, y| {
                2.0 * PI * (2.0 * PI * x).sin() * (2.0 * PI * y).cos()
            }),
        };
        assert!(spin_scalar(&pot_flow).linf() < 1e-11);
        // Pure shear u = (f(y), 0) has spin f'(y) / 2.
        let shear = VectorField {
            x: ScalarField::from_fn(&g, |_, y| (2.0 * PI * y).sin()),
            y: ScalarField::zeros(&g),
        };
        let w = spin_scalar(&shear);
        let want = ScalarField::from_fn(&g, |_, y| PI * (2.0 * PI * y).cos());
        let mut diff = w.clone();
        diff.scaled_add(-1.0, &want);
        assert!(diff.linf() < 1e-11);
    }

    #[test]
    fn simplified_strain_rate_frozen_value() {
        let g = grid(4);
        let d = TensorField::new(
            ScalarField::constant(&g, 3.0),
            ScalarField::constant(&g, 4.0),
            ScalarField::constant(&g, 4.0),
            ScalarField::constant(&g, 0.0),
        )
        .unwrap();
        // 9 + 16 + 16 + 0 = 41; with eps = 2 the measure is sqrt(45).
        let s0 = strain_rate_simplified(&d, 0.0);
        let s2 = strain_rate_simplified(&d, 2.0);
        assert!((s0.values()[5] - 41f64.sqrt()).abs() < 1e-14);
        assert!((s2.values()[5] - 45f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn original_strain_rate_reduces_in_one_dimension() {
        // For e_bar = 2 and u = (f(x), 0) the elliptic measure collapses to
        // sqrt(5/4) |f'(x)|.
        let g = grid(8);
        let u = VectorField {
            x: ScalarField::from_fn(&g, |x, _| (2.0 * PI * x).sin()),
            y: ScalarField::zeros(&g),
        };
        let d = sym_gradient(&u);
        let s = strain_rate_original(&d, 2.0, 0.0).unwrap();
        let want = ScalarField::from_fn(&g, |x, _| {
            1.25f64.sqrt() * (2.0 * PI * (2.0 * PI * x).cos()).abs()
        });
        let mut diff = s.clone();
        diff.scaled_add(-1.0, &want);
        assert!(diff.linf() < 1e-10, "linf = {}", diff.linf());
    }

    #[test]
    fn original_strain_rate_rejects_flat_ellipse() {
        let g = grid(4);
        let d = TensorField::zeros(&g);
        assert!(strain_rate_original(&d, 1.0, 0.0).is_err());
        assert!(strain_rate_original(&d, 0.5, 0.0).is_err());
    }

    #[test]
    fn smoothed_max_limits() {
        // gamma = 0 is an exact max.
        assert_eq!(smoothed_max(3.0, 1.0, 0.0), 3.0);
        assert_eq!(smoothed_max(0.25, 1.0, 0.0), 1.0);
        // At the corner a = eps the value is eps + gamma.
        assert!((smoothed_max(1.0, 1.0, 0.125) - 1.125).abs() < 1e-15);
        // Always at least the hard max.
        for &(a, e, gm) in &[(0.3, 0.5, 0.1), (2.0, 0.5, 0.7), (0.0, 0.0, 0.2)] {
            assert!(smoothed_max(a, e, gm) >= a.max(e));
        }
    }

    #[test]
    fn smoothed_variant_matches_scalar_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = grid(6);
        let u = random_vector(&g, &mut rng, 1.0);
        let d = sym_gradient(&u);
        let smoothed = strain_rate_smoothed_max(&d, 2.0, 0.05, 0.02).unwrap();
        let base = strain_rate_original(&d, 2.0, 0.0).unwrap();
        for j in 0..g.len() {
            let want = smoothed_max(base.values()[j], 0.05, 0.02);
            assert_eq!(smoothed.values()[j], want);
        }
    }

    #[test]
    fn strain_rate_lipschitz_in_velocity_gradient() {
        // |dcal(v1) - dcal(v2)| <= |grad v1 - grad v2| pointwise, hence in
        // the lattice L2 norm with constant exactly 1.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = grid(8);
        for _ in 0..20 {
            for &eps in &[0.0, 0.1] {
                let v1 = random_vector(&g, &mut rng, 1.0);
                let v2 = random_vector(&g, &mut rng, 1.0);
                let s1 = strain_rate_simplified(&sym_gradient(&v1), eps);
                let s2 = strain_rate_simplified(&sym_gradient(&v2), eps);
                let mut ds = s1.clone();
                ds.scaled_add(-1.0, &s2);
                let lhs = l2_norm(&ds);
                let mut rhs_sq = 0.0;
                for (a, b) in [(&v1.x, &v2.x), (&v1.y, &v2.y)] {
                    for axis in [Axis::X, Axis::Y] {
                        let mut dgrad = partial_derivative(a, axis);
                        dgrad.scaled_add(-1.0, &partial_derivative(b, axis));
                        rhs_sq += l2_norm(&dgrad).powi(2);
                    }
                }
                let rhs = rhs_sq.sqrt();
                assert!(lhs <= rhs + 1e-12, "lhs = {lhs}, rhs = {rhs}, eps = {eps}");
            }
        }
    }

    #[test]
    fn relaxation_vanishes_exactly_at_isotropic_rest_stress() {
        let g = grid(6);
        let params = PhysicalParams::table_defaults();
        let sigma = TensorField::isotropic(&g, -params.p / 2.0);
        for dval in [0.0, 0.37, 5.0e3] {
            let dcal = ScalarField::constant(&g, dval);
            let r = rheology_relaxation(&sigma, &dcal, &params).unwrap();
            assert_eq!(r.linf(), 0.0, "dcal = {dval}");
        }
    }

    #[test]
    fn relaxation_frozen_value() {
        // e_bar = 2, P = 2, sigma = diag(1, 3), dcal = 0.5:
        // tr = 4, deviator = diag(-1, 1), deviatoric term = diag(-1, 1),
        // isotropic term = 0.25 * (4/2 + 1) = 0.75.
        let g = grid(4);
        let mut params = PhysicalParams::nondimensional();
        params.p = 2.0;
        let sigma = TensorField::new(
            ScalarField::constant(&g, 1.0),
            ScalarField::zeros(&g),
            ScalarField::zeros(&g),
            ScalarField::constant(&g, 3.0),
        )
        .unwrap();
        let dcal = ScalarField::constant(&g, 0.5);
        let r = rheology_relaxation(&sigma, &dcal, &params).unwrap();
        assert!((r.xx.values()[0] - (-0.25)).abs() < 1e-15);
        assert!((r.yy.values()[0] - 1.75).abs() < 1e-15);
        assert_eq!(r.xy.values()[0], 0.0);
    }

    #[test]
    fn relaxation_requires_positive_strength() {
        let g = grid(4);
        let mut params = PhysicalParams::nondimensional();
        params.p = 0.0;
        let sigma = TensorField::zeros(&g);
        let dcal = ScalarField::constant(&g, 1.0);
        assert!(rheology_relaxation(&sigma, &dcal, &params).is_err());
    }

    #[test]
    fn wind_stress_reference_magnitude() {
        // Unit eastward wind with no turning: the stress is
        // c_a * rho_a = 1.2e-3 * 1.3 = 1.56e-3, purely eastward.
        let g = grid(4);
        let mut params = PhysicalParams::table_defaults();
        params.phi = 0.0;
        let wind = VectorField {
            x: ScalarField::constant(&g, 1.0),
            y: ScalarField::zeros(&g),
        };
        let tau = wind_stress(&wind, &params);
        assert!((tau.x.values()[0] - 1.56e-3).abs() < 1e-18);
        assert_eq!(tau.y.values()[0], 0.0);
    }

    #[test]
    fn wind_stress_rotates_by_turning_angle() {
        let g = grid(4);
        let mut params = PhysicalParams::table_defaults();
        params.phi = std::f64::consts::FRAC_PI_2;
        let wind = VectorField {
            x: ScalarField::constant(&g, 1.0),
            y: ScalarField::zeros(&g),
        };
        let tau = wind_stress(&wind, &params);
        assert!(tau.x.values()[0].abs() < 1e-18);
        assert!((tau.y.values()[0] - 1.56e-3).abs() < 1e-18);
    }

    #[test]
    fn ocean_stress_is_dissipative_for_still_water() {
        // With U_w = 0 the drag does negative work on the ice for any
        // turning angle in [0, pi/4].
        let g = grid(4);
        let params = PhysicalParams::table_defaults();
        let ocean = VectorField::zeros(&g);
        let u = VectorField {
            x: ScalarField::constant(&g, 0.4),
            y: ScalarField::constant(&g, -0.3),
        };
        let tau = ocean_stress(&ocean, &u, &params).unwrap();
        let work = tau.x.values()[0] * 0.4 + tau.y.values()[0] * (-0.3);
        assert!(work < 0.0, "work = {work}");
        // Magnitude: c_w * rho_w * |u|^2 = 5.643 * 0.25.
        let mag = tau.x.values()[0].hypot(tau.y.values()[0]);
        assert!((mag - 5.5e-3 * 1026.0 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn ocean_stress_uses_relative_velocity() {
        // u equal to the current gives zero drag.
        let g = grid(4);
        let params = PhysicalParams::table_defaults();
        let ocean = VectorField {
            x: ScalarField::constant(&g, 0.2),
            y: ScalarField::constant(&g, -0.1),
        };
        let tau = ocean_stress(&ocean, &ocean.clone(), &params).unwrap();
        assert_eq!(tau.linf(), 0.0);
    }
}
