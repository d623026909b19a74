//! Real-valued fields on the collocation lattice.
//!
//! Fields store physical values; the band-limited property (no spectral
//! content above the grid cutoff) is maintained by the operators that
//! produce them, not re-checked on every operation.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::grid::SpectralGrid;

#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: SpectralGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        ScalarField { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &SpectralGrid, c: f64) -> Self {
        ScalarField { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    /// Sample an analytic function at the collocation points.  The samples
    /// of a non-band-limited function alias; project afterwards when a
    /// band-limited field is required.
    pub fn from_fn(grid: &SpectralGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let m = grid.m();
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..m {
            let y = grid.coord(iy);
            for ix in 0..m {
                values.push(f(grid.coord(ix), y));
            }
        }
        ScalarField { grid: grid.clone(), values }
    }

    pub fn from_values(grid: &SpectralGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(ScalarField { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        self.grid.forward(&self.values)
    }

    pub fn from_spectrum(grid: &SpectralGrid, spectrum: &[Complex64]) -> Self {
        ScalarField { grid: grid.clone(), values: grid.inverse(spectrum) }
    }

    /// self += a * other (same grid required).
    pub fn scaled_add(&mut self, a: f64, other: &Self) {
        assert_eq!(self.grid, other.grid, "grid mismatch in scaled_add");
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for s in &mut self.values {
            *s *= a;
        }
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &v| a.min(v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Debug)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        VectorField { x: ScalarField::zeros(grid), y: ScalarField::zeros(grid) }
    }

    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self> {
        if x.grid() != y.grid() {
            return Err(Error::invalid("vector components on different grids"));
        }
        Ok(VectorField { x, y })
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.x.grid()
    }

    pub fn scaled_add(&mut self, a: f64, other: &Self) {
        self.x.scaled_add(a, &other.x);
        self.y.scaled_add(a, &other.y);
    }

    pub fn scale(&mut self, a: f64) {
        self.x.scale(a);
        self.y.scale(a);
    }

    pub fn linf(&self) -> f64 {
        self.x.linf().max(self.y.linf())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn components(&self) -> [&ScalarField; 2] {
        [&self.x, &self.y]
    }
}

/// 2x2 tensor field with all four entries stored; symmetry is a property of
/// particular tensors (strain rates, relaxed stresses), not of the type.
#[derive(Clone, Debug)]
pub struct TensorField {
    pub xx: ScalarField,
    pub xy: ScalarField,
    pub yx: ScalarField,
    pub yy: ScalarField,
}

impl TensorField {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        TensorField {
            xx: ScalarField::zeros(grid),
            xy: ScalarField::zeros(grid),
            yx: ScalarField::zeros(grid),
            yy: ScalarField::zeros(grid),
        }
    }

    /// c * I_2.
    pub fn isotropic(grid: &SpectralGrid, c: f64) -> Self {
        TensorField {
            xx: ScalarField::constant(grid, c),
            xy: ScalarField::zeros(grid),
            yx: ScalarField::zeros(grid),
            yy: ScalarField::constant(grid, c),
        }
    }

    pub fn new(
        xx: ScalarField,
        xy: ScalarField,
        yx: ScalarField,
        yy: ScalarField,
    ) -> Result<Self> {
        let g = xx.grid();
        if xy.grid() != g || yx.grid() != g || yy.grid() != g {
            return Err(Error::invalid("tensor components on different grids"));
        }
        Ok(TensorField { xx, xy, yx, yy })
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.xx.grid()
    }

    pub fn scaled_add(&mut self, a: f64, other: &Self) {
        self.xx.scaled_add(a, &other.xx);
        self.xy.scaled_add(a, &other.xy);
        self.yx.scaled_add(a, &other.yx);
        self.yy.scaled_add(a, &other.yy);
    }

    pub fn scale(&mut self, a: f64) {
        self.xx.scale(a);
        self.xy.scale(a);
        self.yx.scale(a);
        self.yy.scale(a);
    }

    pub fn linf(&self) -> f64 {
        self.xx
            .linf()
            .max(self.xy.linf())
            .max(self.yx.linf())
            .max(self.yy.linf())
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite()
            && self.xy.is_finite()
            && self.yx.is_finite()
            && self.yy.is_finite()
    }

    pub fn components(&self) -> [&ScalarField; 4] {
        [&self.xx, &self.xy, &self.yx, &self.yy]
    }
}
