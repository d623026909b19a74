//! One-dimensional laboratory for the well-posed/ill-posed transition of
//! the stress relaxation.
//!
//! The nonlinear system on the circle is
//!
//! ```text
//! du/dt     = dx sigma
//! dsigma/dt = (I - alpha^2 dxx)^{-1} [ dx u
//!             - (5 sqrt((dx u)^2 + eps^2) / 2P) sigma
//!             - sqrt((dx u)^2 + eps^2) / 2 ]
//! ```
//!
//! Linearised about a constant background `(ubar_x, sigbar)` the stress
//! equation becomes `dsigma_l = (I - alpha^2 dxx)^{-1} [-a sigma_l +
//! c dx u_l]`; the sign of `c` decides between oscillation and
//! frequency-unbounded growth, and the Voigt multiplier
//! `m(k) = 1/(1 + 4 pi^2 alpha^2 k^2)` caps that growth for `alpha > 0`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spectral::collocation_size;

/// Circle analogue of the 2D grid: retained band `|k| <= n`, collocation
/// size `m` = smallest even integer with `m >= pad * (2n + 1)`.
#[derive(Clone)]
pub struct Grid1D {
    inner: Arc<Grid1DInner>,
}

struct Grid1DInner {
    n: usize,
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Grid1D {
    pub fn new(n: usize, pad_factor: f64) -> Result<Self> {
        let m = collocation_size(n, pad_factor)?;
        let mut planner = FftPlanner::new();
        Ok(Grid1D {
            inner: Arc::new(Grid1DInner {
                n,
                m,
                fwd: planner.plan_fft_forward(m),
                inv: planner.plan_fft_inverse(m),
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn m(&self) -> usize {
        self.inner.m
    }

    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / self.inner.m as f64
    }

    /// Signed wavenumber of slot `i` (standard DFT layout).
    pub fn wavenumber(&self, i: usize) -> i64 {
        let m = self.inner.m as i64;
        let i = i as i64;
        if i <= m / 2 {
            i
        } else {
            i - m
        }
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.inner.m);
        let mut buf: Vec<Complex64> =
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.inner.fwd.process(&mut buf);
        let scale = 1.0 / self.inner.m as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        assert_eq!(spec.len(), self.inner.m);
        let mut buf = spec.to_vec();
        self.inner.inv.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Spectral coefficient of the single mode `k` of a real field
    /// (`k >= 0`; the conjugate partner is implied).
    pub fn mode_coefficient(&self, values: &[f64], k: usize) -> Complex64 {
        self.forward(values)[k]
    }
}

impl PartialEq for Grid1D {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.m == other.inner.m
    }
}

impl std::fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid1D")
            .field("n", &self.inner.n)
            .field("m", &self.inner.m)
            .finish()
    }
}

/// Multiply a spectrum by `(i 2 pi k)^order / (1 + 4 pi^2 alpha^2 k^2)`,
/// zeroing everything above the band.
fn apply_symbol(grid: &Grid1D, spec: &mut [Complex64], order: u32, alpha: f64) {
    let n = grid.n() as i64;
    let a2 = alpha * alpha;
    for (i, c) in spec.iter_mut().enumerate() {
        let k = grid.wavenumber(i);
        if k.abs() > n {
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        let kf = k as f64;
        let mut sym = Complex64::new(1.0, 0.0);
        for _ in 0..order {
            sym *= Complex64::new(0.0, TAU * kf);
        }
        *c *= sym / (1.0 + TAU * TAU * a2 * kf * kf);
    }
}

/// Spectral derivative of a lattice field (band-limited output).
pub fn derivative_1d(grid: &Grid1D, values: &[f64]) -> Vec<f64> {
    let mut spec = grid.forward(values);
    apply_symbol(grid, &mut spec, 1, 0.0);
    grid.inverse(&spec)
}

/// Band projection followed by the Voigt inverse `(I - alpha^2 dxx)^{-1}`.
pub fn voigt_project_1d(grid: &Grid1D, values: &[f64], alpha: f64) -> Vec<f64> {
    let mut spec = grid.forward(values);
    apply_symbol(grid, &mut spec, 0, alpha);
    grid.inverse(&spec)
}

/// Scalar velocity and stress on the circle.
#[derive(Clone, Debug)]
pub struct State1D {
    pub grid: Grid1D,
    pub u: Vec<f64>,
    pub sigma: Vec<f64>,
    pub t: f64,
}

impl State1D {
    pub fn zeros(grid: &Grid1D) -> Self {
        let m = grid.m();
        State1D {
            grid: grid.clone(),
            u: vec![0.0; m],
            sigma: vec![0.0; m],
            t: 0.0,
        }
    }

    /// `u = amp cos(2 pi k x)`, `sigma = 0`.
    pub fn single_mode_seed(grid: &Grid1D, k: usize, amp: f64) -> Result<Self> {
        if k == 0 || k > grid.n() {
            return Err(Error::invalid(format!(
                "seed mode k = {k} must lie in 1..={}",
                grid.n()
            )));
        }
        let mut s = State1D::zeros(grid);
        for (i, v) in s.u.iter_mut().enumerate() {
            *v = amp * (TAU * k as f64 * grid.coord(i)).cos();
        }
        Ok(s)
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.sigma).all(|v| v.is_finite())
    }

    pub fn linf(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.sigma)
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

fn check_1d_params(p: f64, eps: f64, alpha: f64) -> Result<()> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::invalid(format!("P = {p}: must be finite and > 0")));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::invalid(format!("eps = {eps}: must be finite and >= 0")));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid(format!("alpha = {alpha}: must be finite and >= 0")));
    }
    Ok(())
}

/// Full nonlinear 1D tendency.
pub fn rhs_1d(state: &State1D, p: f64, eps: f64, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_1d_params(p, eps, alpha)?;
    let grid = &state.grid;
    let du = derivative_1d(grid, &state.sigma);
    let ux = derivative_1d(grid, &state.u);
    let mut raw = vec![0.0; grid.m()];
    let e2 = eps * eps;
    for j in 0..raw.len() {
        let dcal = (ux[j] * ux[j] + e2).sqrt();
        raw[j] = ux[j] - (2.5 * dcal / p) * state.sigma[j] - 0.5 * dcal;
    }
    let dsigma = voigt_project_1d(grid, &raw, alpha);
    Ok((du, dsigma))
}

/// Constant background the linearisation freezes around.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Background1D {
    pub ubar_x: f64,
    pub sigbar: f64,
    pub p: f64,
    pub eps: f64,
}

impl Background1D {
    /// Requires `P > 0`, `eps >= 0`, and `eps > 0` or `ubar_x != 0` so the
    /// linearisation coefficients are defined.
    pub fn new(ubar_x: f64, sigbar: f64, p: f64, eps: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::invalid(format!("P = {p}: must be finite and > 0")));
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::invalid(format!("eps = {eps}: must be finite and >= 0")));
        }
        if !(ubar_x.is_finite() && sigbar.is_finite()) {
            return Err(Error::invalid("background fields must be finite"));
        }
        if eps == 0.0 && ubar_x == 0.0 {
            return Err(Error::invalid(
                "eps = 0 with ubar_x = 0 leaves the linearisation coefficients undefined",
            ));
        }
        Ok(Background1D { ubar_x, sigbar, p, eps })
    }

    /// Regularised background strain rate `sqrt(ubar_x^2 + eps^2)`.
    pub fn dcal(&self) -> f64 {
        (self.ubar_x * self.ubar_x + self.eps * self.eps).sqrt()
    }

    /// Damping coefficient `a = (5/2P) sqrt(ubar_x^2 + eps^2)`.
    pub fn damping_coefficient(&self) -> f64 {
        2.5 * self.dcal() / self.p
    }
}

/// `c = 1 - (5/2P) sigbar ubar_x / dcal - ubar_x / (2 dcal)`; negative `c`
/// flags the locally elliptic (ill-posed) regime.
pub fn ellipticity_coefficient(bg: &Background1D) -> f64 {
    let dcal = bg.dcal();
    1.0 - 2.5 * bg.sigbar * bg.ubar_x / (bg.p * dcal) - 0.5 * bg.ubar_x / dcal
}

/// Linearised tendency about `bg`.
pub fn linearized_rhs_1d(
    pert: &State1D,
    bg: &Background1D,
    alpha: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_1d_params(bg.p, bg.eps, alpha)?;
    let grid = &pert.grid;
    let du = derivative_1d(grid, &pert.sigma);
    let ux = derivative_1d(grid, &pert.u);
    let a = bg.damping_coefficient();
    let c = ellipticity_coefficient(bg);
    let mut raw = vec![0.0; grid.m()];
    for j in 0..raw.len() {
        raw[j] = c * ux[j] - a * pert.sigma[j];
    }
    let dsigma = voigt_project_1d(grid, &raw, alpha);
    Ok((du, dsigma))
}

/// Both roots of the modal quadratic
/// `lambda^2 + a m(k) lambda + c m(k) (2 pi k)^2 = 0`,
/// `m(k) = 1 / (1 + 4 pi^2 alpha^2 k^2)`, ordered by descending real part
/// with ties (conjugate pairs) broken by descending imaginary part.
pub fn dispersion_roots(a: f64, c: f64, k: usize, alpha: f64) -> (Complex64, Complex64) {
    let kf = k as f64;
    let m = 1.0 / (1.0 + TAU * TAU * alpha * alpha * kf * kf);
    let b = a * m;
    let q = c * m * TAU * TAU * kf * kf;
    let disc = Complex64::new(b * b - 4.0 * q, 0.0).sqrt();
    let root_a = (Complex64::new(-b, 0.0) + disc) * 0.5;
    let root_b = (Complex64::new(-b, 0.0) - disc) * 0.5;
    if root_a.re > root_b.re || (root_a.re == root_b.re && root_a.im >= root_b.im) {
        (root_a, root_b)
    } else {
        (root_b, root_a)
    }
}

/// Dispersion roots for a background: the `max real part` of the pair is
/// the predicted growth rate of mode `k`.
pub fn dispersion_growth_rate(
    bg: &Background1D,
    k: usize,
    alpha: f64,
) -> (Complex64, Complex64) {
    dispersion_roots(bg.damping_coefficient(), ellipticity_coefficient(bg), k, alpha)
}

/// Measured vs predicted growth of one seeded mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeGrowth {
    pub k: usize,
    pub predicted_rate: f64,
    pub measured_rate: f64,
    pub relative_error: f64,
    /// True when the run left the representable range early and the fit
    /// used the truncated window.
    pub clipped: bool,
}

/// Least-squares slope of samples `(t, ln norm)` over their final half.
fn fit_log_slope(samples: &[(f64, f64)]) -> f64 {
    let tail = &samples[samples.len() / 2..];
    let n = tail.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(t, ly) in tail {
        st += t;
        sy += ly;
        stt += t * t;
        sty += t * ly;
    }
    let denom = n * stt - st * st;
    if denom == 0.0 {
        return 0.0;
    }
    (n * sty - st * sy) / denom
}

/// `ln sqrt(|cu|^2 + |cs|^2)` without squaring overflow; the modal norms
/// reach ~1e250 before the state-level clip fires.
fn log_mode_norm(cu: Complex64, cs: Complex64) -> f64 {
    let comps = [cu.re, cu.im, cs.re, cs.im];
    let peak = comps.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if peak == 0.0 {
        return f64::MIN_POSITIVE.ln();
    }
    let sum_sq: f64 = comps.iter().map(|v| (v / peak) * (v / peak)).sum();
    peak.ln() + 0.5 * sum_sq.ln()
}

const CLIP_THRESHOLD: f64 = 1e250;

fn rk4_step_1d(
    state: &State1D,
    dt: f64,
    bg: &Background1D,
    alpha: f64,
) -> Result<State1D> {
    let add = |s: &State1D, a: f64, d: &(Vec<f64>, Vec<f64>), t: f64| -> State1D {
        let mut out = s.clone();
        for (o, v) in out.u.iter_mut().zip(&d.0) {
            *o += a * v;
        }
        for (o, v) in out.sigma.iter_mut().zip(&d.1) {
            *o += a * v;
        }
        out.t = t;
        out
    };
    let k1 = linearized_rhs_1d(state, bg, alpha)?;
    let s2 = add(state, 0.5 * dt, &k1, state.t + 0.5 * dt);
    let k2 = linearized_rhs_1d(&s2, bg, alpha)?;
    let s3 = add(state, 0.5 * dt, &k2, state.t + 0.5 * dt);
    let k3 = linearized_rhs_1d(&s3, bg, alpha)?;
    let s4 = add(state, dt, &k3, state.t + dt);
    let k4 = linearized_rhs_1d(&s4, bg, alpha)?;
    let mut out = state.clone();
    let w = dt / 6.0;
    for j in 0..out.u.len() {
        out.u[j] += w * (k1.0[j] + 2.0 * k2.0[j] + 2.0 * k3.0[j] + k4.0[j]);
        out.sigma[j] += w * (k1.1[j] + 2.0 * k2.1[j] + 2.0 * k3.1[j] + k4.1[j]);
    }
    out.t = state.t + dt;
    Ok(out)
}

/// Evolve the linearisation from single-mode seeds and fit each mode's
/// growth rate on the final half of the run.
///
/// The grid cutoff is set to `max(k_list)`: with `alpha = 0` the growth
/// rate increases with `k`, so any retained mode above the measured band
/// would amplify rounding noise faster than every signal of interest and
/// eventually bleed back into the measured coefficients.
pub fn run_instability_experiment(
    bg: &Background1D,
    k_list: &[usize],
    t_final: f64,
    dt: f64,
    seed_amp: f64,
    alpha: f64,
) -> Result<Vec<ModeGrowth>> {
    if k_list.is_empty() {
        return Err(Error::invalid("k_list must name at least one mode"));
    }
    if k_list.contains(&0) {
        return Err(Error::invalid("seeded modes must be >= 1"));
    }
    if !(seed_amp > 0.0 && seed_amp.is_finite()) {
        return Err(Error::invalid(format!("seed_amp = {seed_amp}: must be finite and > 0")));
    }
    if !(dt > 0.0 && t_final > 0.0) {
        return Err(Error::invalid("t_final and dt must be > 0"));
    }
    let n = *k_list.iter().max().expect("nonempty");
    let grid = Grid1D::new(n, 2.0)?;
    let steps = (t_final / dt).round().max(1.0) as usize;

    let mut out = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let mut state = State1D::single_mode_seed(&grid, k, seed_amp)?;
        let mode_norm = |s: &State1D| -> f64 {
            log_mode_norm(
                grid.mode_coefficient(&s.u, k),
                grid.mode_coefficient(&s.sigma, k),
            )
        };
        let mut samples = vec![(state.t, mode_norm(&state))];
        let mut clipped = false;
        for _ in 0..steps {
            let next = rk4_step_1d(&state, dt, bg, alpha)?;
            if !next.is_finite() || next.linf() > CLIP_THRESHOLD {
                clipped = true;
                break;
            }
            state = next;
            samples.push((state.t, mode_norm(&state)));
        }
        let measured = fit_log_slope(&samples);
        let (lead, _) = dispersion_growth_rate(bg, k, alpha);
        let predicted = lead.re;
        let relative_error =
            (measured - predicted).abs() / predicted.abs().max(f64::MIN_POSITIVE);
        out.push(ModeGrowth {
            k,
            predicted_rate: predicted,
            measured_rate: measured,
            relative_error,
            clipped,
        });
    }
    Ok(out)
}
