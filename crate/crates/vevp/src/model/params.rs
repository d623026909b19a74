//! Physical parameters of the Voigt-regularised EVP model.

use crate::error::{Error, Result};

/// All dimensional constants of the momentum/stress system.  Two presets are
/// provided: `table_defaults` with customary geophysical magnitudes, and
/// `nondimensional` with every constant O(1) for property tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Elastic modulus-to-mass ratio multiplying the stress update.
    pub e_modulus: f64,
    /// Voigt length: the stress time derivative acts through
    /// `(I - alpha^2 Laplacian)`.  Must be positive for the 2D model
    /// (`alpha = 0` is allowed only in the 1D laboratory).
    pub alpha: f64,
    /// Ice strength (pressure scale) `P > 0`.
    pub p: f64,
    /// Yield-ellipse aspect ratio; must exceed 1.
    pub e_bar: f64,
    /// Strain-rate floor used by the regularised variants; `>= 0`.
    pub eps: f64,
    /// Smoothing width of the smoothed-max variant; `>= 0`.
    pub gamma: f64,
    /// Coriolis coefficient.
    pub omega: f64,
    /// Gravity multiplying the surface-tilt term.
    pub g: f64,
    /// Water turning angle; the ocean drag stays dissipative only for
    /// `theta` in `[0, pi/4]`.
    pub theta: f64,
    /// Air turning angle.
    pub phi: f64,
    /// Air drag coefficient `>= 0`.
    pub c_a: f64,
    /// Water drag coefficient `>= 0`.
    pub c_w: f64,
    /// Air density `> 0`.
    pub rho_a: f64,
    /// Water density `> 0`.
    pub rho_w: f64,
    /// Areal ice mass; the equations are written for `m = 1` and the value
    /// is pinned there.
    pub m: f64,
}

impl PhysicalParams {
    /// Customary geophysical magnitudes (SI units, angles in radians).
    /// The Voigt length has no classical tabulated value; 1 is the
    /// documented default.
    pub fn table_defaults() -> Self {
        let deg25 = 25.0f64.to_radians();
        PhysicalParams {
            e_modulus: 0.25,
            alpha: 1.0,
            p: 27.5e3,
            e_bar: 2.0,
            eps: 0.0,
            gamma: 0.0,
            omega: 1.46e-4,
            g: 9.81,
            theta: deg25,
            phi: deg25,
            c_a: 1.2e-3,
            c_w: 5.5e-3,
            rho_a: 1.3,
            rho_w: 1026.0,
            m: 1.0,
        }
    }

    /// Order-one setting for property tests; keeps every timescale and
    /// field magnitude near 1 so absolute and relative tolerances agree.
    pub fn nondimensional() -> Self {
        PhysicalParams {
            e_modulus: 1.0,
            alpha: 0.5,
            p: 1.0,
            e_bar: 2.0,
            eps: 0.0,
            gamma: 0.0,
            omega: 1.0,
            g: 1.0,
            theta: std::f64::consts::FRAC_PI_8,
            phi: std::f64::consts::FRAC_PI_8,
            c_a: 0.5,
            c_w: 0.5,
            rho_a: 1.0,
            rho_w: 1.0,
            m: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, key: &str, constraint: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::config(format!("params.{key}: {constraint}")))
            }
        };
        check(
            self.e_modulus.is_finite() && self.e_modulus > 0.0,
            "e_modulus",
            "elastic modulus must be finite and > 0",
        )?;
        check(
            self.alpha.is_finite() && self.alpha > 0.0,
            "alpha",
            "Voigt length must be finite and > 0 for the 2D model",
        )?;
        check(self.p.is_finite() && self.p > 0.0, "p", "ice strength must be finite and > 0")?;
        check(
            self.e_bar.is_finite() && self.e_bar > 1.0,
            "e_bar",
            "yield-ellipse ratio must be finite and > 1",
        )?;
        check(self.eps.is_finite() && self.eps >= 0.0, "eps", "strain-rate floor must be >= 0")?;
        check(
            self.gamma.is_finite() && self.gamma >= 0.0,
            "gamma",
            "smoothing width must be >= 0",
        )?;
        check(self.omega.is_finite(), "omega", "Coriolis coefficient must be finite")?;
        check(self.g.is_finite() && self.g >= 0.0, "g", "gravity must be finite and >= 0")?;
        check(
            (0.0..=std::f64::consts::FRAC_PI_4).contains(&self.theta),
            "theta",
            "water turning angle must lie in [0, pi/4] so the ocean drag stays dissipative",
        )?;
        check(self.phi.is_finite(), "phi", "air turning angle must be finite")?;
        check(self.c_a.is_finite() && self.c_a >= 0.0, "c_a", "air drag coefficient must be >= 0")?;
        check(
            self.c_w.is_finite() && self.c_w >= 0.0,
            "c_w",
            "water drag coefficient must be >= 0",
        )?;
        check(
            self.rho_a.is_finite() && self.rho_a > 0.0,
            "rho_a",
            "air density must be > 0",
        )?;
        check(
            self.rho_w.is_finite() && self.rho_w > 0.0,
            "rho_w",
            "water density must be > 0",
        )?;
        check(self.m == 1.0, "m", "areal mass is fixed at 1 in this formulation")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        PhysicalParams::table_defaults().validate().unwrap();
        PhysicalParams::nondimensional().validate().unwrap();
    }

    #[test]
    fn constraint_errors_name_the_key() {
        let mut p = PhysicalParams::table_defaults();
        p.theta = 0.8; // > pi/4
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("params.theta"), "message was: {err}");
        assert!(err.contains("pi/4"), "message was: {err}");

        let mut p = PhysicalParams::table_defaults();
        p.e_bar = 1.0;
        assert!(p.validate().unwrap_err().to_string().contains("params.e_bar"));

        let mut p = PhysicalParams::table_defaults();
        p.m = 0.9;
        assert!(p.validate().is_err());
    }
}
