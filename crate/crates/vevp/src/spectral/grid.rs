//! Fourier collocation grid on the periodic unit square.
//!
//! A grid couples a Galerkin cutoff `N` (retained modes have
//! `max(|k_x|, |k_y|) <= N`) with an `M x M` collocation lattice,
//! `M = ` smallest even integer `>= pad_factor * (2N + 1)`.  With any
//! `pad_factor >= 1` the product of two retained modes has wavenumbers
//! below `M`, so the trapezoidal rule on the lattice integrates such
//! products exactly and pointwise nonlinearities can be pushed back into
//! the band without aliasing onto retained modes.
//!
//! The convention throughout is `f(x) = sum_k fhat_k exp(2 pi i k.x)` with
//! integer wavenumbers, so Parseval reads `||f||_{L^2}^2 = sum_k |fhat_k|^2`
//! on the unit square.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct GridInner {
    n: usize,
    m: usize,
    pad_factor: f64,
    /// Wavenumber carried by each FFT index, in the standard order
    /// `0, 1, ..., M/2 - 1, -M/2, ..., -1`.
    wavenumbers: Vec<i64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

/// Shared, immutable grid handle; cloning is cheap and all methods take
/// `&self`, so one grid can serve many threads.
#[derive(Clone)]
pub struct SpectralGrid {
    inner: Arc<GridInner>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.inner.n)
            .field("m", &self.inner.m)
            .field("pad_factor", &self.inner.pad_factor)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.m == other.inner.m
    }
}

/// Collocation count for a cutoff/padding pair: smallest even integer
/// `>= pad_factor * (2n + 1)`.
pub fn collocation_size(n: usize, pad_factor: f64) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("grid.n: cutoff must be >= 1"));
    }
    if !pad_factor.is_finite() || pad_factor < 1.0 {
        return Err(Error::invalid(format!(
            "grid.pad_factor = {pad_factor}: must be finite and >= 1"
        )));
    }
    let needed = pad_factor * (2 * n + 1) as f64;
    let mut m = needed.ceil() as usize;
    if m % 2 == 1 {
        m += 1;
    }
    Ok(m)
}

impl SpectralGrid {
    pub fn new(n: usize, pad_factor: f64) -> Result<Self> {
        let m = collocation_size(n, pad_factor)?;
        Ok(Self::with_collocation_unchecked(n, m, pad_factor))
    }

    /// Rebuild a grid from an explicit collocation count (as stored in
    /// snapshot files).  `m` must be even and large enough that the whole
    /// band plus its Nyquist guard fits.
    pub fn with_collocation(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("grid.n: cutoff must be >= 1"));
        }
        if !m.is_multiple_of(2) || m / 2 <= n {
            return Err(Error::invalid(format!(
                "collocation size {m} incompatible with cutoff {n}: need even m with m/2 > n"
            )));
        }
        let pad = m as f64 / (2 * n + 1) as f64;
        Ok(Self::with_collocation_unchecked(n, m, pad))
    }

    fn with_collocation_unchecked(n: usize, m: usize, pad_factor: f64) -> Self {
        // m/2 > n for every pad_factor >= 1, so the (non-reflectable)
        // Nyquist index always lies outside the retained band.
        debug_assert!(m / 2 > n);
        let wavenumbers = (0..m)
            .map(|i| if 2 * i < m { i as i64 } else { i as i64 - m as i64 })
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        SpectralGrid {
            inner: Arc::new(GridInner { n, m, pad_factor, wavenumbers, fwd, inv }),
        }
    }

    /// Galerkin cutoff: retained modes satisfy `max(|k_x|,|k_y|) <= n()`.
    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Collocation points per axis.
    pub fn m(&self) -> usize {
        self.inner.m
    }

    pub fn pad_factor(&self) -> f64 {
        self.inner.pad_factor
    }

    /// Total lattice size `M * M`; fields store this many values.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.inner.m * self.inner.m
    }

    /// Wavenumber carried by FFT index `i` along either axis.
    pub fn wavenumber(&self, i: usize) -> i64 {
        self.inner.wavenumbers[i]
    }

    pub fn wavenumbers(&self) -> &[i64] {
        &self.inner.wavenumbers
    }

    /// Coordinate of lattice index `i` along either axis, in `[0, 1)`.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / self.inner.m as f64
    }

    /// Forward transform: collocation samples (row-major, `values[iy*M+ix]`)
    /// to coefficients `spec[ky_idx*M + kx_idx]`, scaled so the coefficients
    /// are the `fhat_k` of the convention above.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len(), "field length mismatch");
        let mut data: Vec<Complex64> =
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2d(&mut data, true);
        let scale = 1.0 / self.len() as f64;
        for c in &mut data {
            *c *= scale;
        }
        data
    }

    /// Inverse transform back to real collocation samples.  The imaginary
    /// residue (rounding noise for Hermitian-symmetric input) is dropped.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        assert_eq!(spectrum.len(), self.len(), "spectrum length mismatch");
        let mut data = spectrum.to_vec();
        self.fft2d(&mut data, false);
        data.iter().map(|c| c.re).collect()
    }

    fn fft2d(&self, data: &mut [Complex64], forward: bool) {
        let m = self.inner.m;
        let fft = if forward { &self.inner.fwd } else { &self.inner.inv };
        let mut scratch =
            vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for row in data.chunks_exact_mut(m) {
            fft.process_with_scratch(row, &mut scratch);
        }
        let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
        transpose(data, &mut t, m);
        for row in t.chunks_exact_mut(m) {
            fft.process_with_scratch(row, &mut scratch);
        }
        transpose(&t, data, m);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in 0..m {
            dst[j * m + i] = src[i * m + j];
        }
    }
}
