//! Desk-scale limit experiments: the strain-rate floor `eps -> 0`, grid
//! refinement across the retained band, and twin-run continuous
//! dependence with its Groenwall envelope.
//!
//! All drivers step their members in lockstep with shared `dt` so
//! trajectory differences are sampled at identical times, and every
//! reported number is a sup over the recorded times, not a final-time
//! snapshot.  Members are advanced in parallel; the arithmetic of each
//! member is independent of the scheduling, so repeated invocations
//! produce bit-identical tables.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::{voigt_evp_rhs, ForcingSpec, PhysicalParams, State, StrainVariant};
use crate::spectral::{
    sobolev_norm_tensor, sobolev_norm_vector, ScalarField, SpectralGrid, TensorField,
    VectorField,
};
use crate::stepping::{plan_steps, rk4_step};

/// Shared ingredients of every experiment member: physics, forcing,
/// strain-rate variant, and the common time grid.
#[derive(Clone, Copy)]
pub struct ExperimentSetup<'a> {
    pub params: &'a PhysicalParams,
    pub forcing: &'a ForcingSpec,
    pub variant: StrainVariant,
    pub dt: f64,
    pub t_final: f64,
}

/// Sup-in-time H1 distances between one pair of sweep members.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDiffRow {
    pub eps_a: f64,
    pub eps_b: f64,
    pub sup_u_h1: f64,
    pub sup_sigma_h1: f64,
}

/// Distances between consecutive members of an `eps` sweep, plus each
/// member measured against the last entry (the `eps = 0` reference when
/// the list ends in zero).
#[derive(Clone, Debug, PartialEq)]
pub struct EpsSweepReport {
    pub consecutive: Vec<PairDiffRow>,
    pub versus_last: Vec<PairDiffRow>,
}

fn check_time_grid(dt: f64, t_final: f64, t0: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("dt = {dt}: must be finite and > 0")));
    }
    let advances = t_final > t0;
    if !advances {
        return Err(Error::invalid(format!(
            "t_final = {t_final} must exceed the initial time {t0}"
        )));
    }
    Ok(())
}

fn advance_lockstep(
    members: &mut [(State, PhysicalParams)],
    forcing: &ForcingSpec,
    variant: StrainVariant,
    h: f64,
) -> Result<()> {
    members.par_iter_mut().try_for_each(|(state, params)| {
        *state = rk4_step(state, h, |s| voigt_evp_rhs(s, params, forcing, variant))?;
        Ok(())
    })
}

fn h1_diff_vector(a: &VectorField, b: &VectorField) -> Result<f64> {
    let mut d = a.clone();
    d.scaled_add(-1.0, b);
    sobolev_norm_vector(&d, 1)
}

fn h1_diff_tensor(a: &TensorField, b: &TensorField) -> Result<f64> {
    let mut d = a.clone();
    d.scaled_add(-1.0, b);
    sobolev_norm_tensor(&d, 1)
}

/// Run one trajectory per `eps` from shared initial data and record how
/// far neighbouring members drift apart, in the `sup_t` H1 sense.
///
/// `eps_list` must be descending (repeats allowed) and non-negative; a
/// trailing zero gives the unregularised reference run.
pub fn sweep_eps(
    state0: &State,
    setup: ExperimentSetup<'_>,
    eps_list: &[f64],
) -> Result<EpsSweepReport> {
    if eps_list.len() < 2 {
        return Err(Error::invalid("eps_list needs at least two entries"));
    }
    for pair in eps_list.windows(2) {
        let descending = pair[0] >= pair[1];
        if !descending {
            return Err(Error::invalid(format!(
                "eps_list must be descending: got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if eps_list.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::invalid("eps_list entries must be finite and >= 0"));
    }
    check_time_grid(setup.dt, setup.t_final, state0.t)?;

    let mut members: Vec<(State, PhysicalParams)> = eps_list
        .iter()
        .map(|&eps| {
            let mut p = *setup.params;
            p.eps = eps;
            (state0.clone(), p)
        })
        .collect();

    let n_pairs = members.len() - 1;
    let mut sup_consecutive = vec![(0.0f64, 0.0f64); n_pairs];
    let mut sup_versus_last = vec![(0.0f64, 0.0f64); n_pairs];
    let record = |members: &[(State, PhysicalParams)],
                  sup_c: &mut [(f64, f64)],
                  sup_v: &mut [(f64, f64)]|
     -> Result<()> {
        for i in 0..n_pairs {
            let du = h1_diff_vector(&members[i].0.u, &members[i + 1].0.u)?;
            let ds = h1_diff_tensor(&members[i].0.sigma, &members[i + 1].0.sigma)?;
            sup_c[i].0 = sup_c[i].0.max(du);
            sup_c[i].1 = sup_c[i].1.max(ds);
            let du = h1_diff_vector(&members[i].0.u, &members[n_pairs].0.u)?;
            let ds = h1_diff_tensor(&members[i].0.sigma, &members[n_pairs].0.sigma)?;
            sup_v[i].0 = sup_v[i].0.max(du);
            sup_v[i].1 = sup_v[i].1.max(ds);
        }
        Ok(())
    };

    record(&members, &mut sup_consecutive, &mut sup_versus_last)?;
    let (full_steps, clipped) = plan_steps(setup.t_final - state0.t, setup.dt);
    let total = full_steps + usize::from(clipped);
    for step in 1..=total {
        let h = if step <= full_steps {
            setup.dt
        } else {
            setup.t_final - members[0].0.t
        };
        advance_lockstep(&mut members, setup.forcing, setup.variant, h)?;
        record(&members, &mut sup_consecutive, &mut sup_versus_last)?;
    }

    let rows = |sups: &[(f64, f64)], partner: &dyn Fn(usize) -> f64| -> Vec<PairDiffRow> {
        sups.iter()
            .enumerate()
            .map(|(i, &(u, s))| PairDiffRow {
                eps_a: eps_list[i],
                eps_b: partner(i),
                sup_u_h1: u,
                sup_sigma_h1: s,
            })
            .collect()
    };
    Ok(EpsSweepReport {
        consecutive: rows(&sup_consecutive, &|i| eps_list[i + 1]),
        versus_last: rows(&sup_versus_last, &|_| eps_list[n_pairs]),
    })
}

/// Sup-in-time distance between two resolutions, measured on the modes
/// both runs retain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolutionDiffRow {
    pub n_a: usize,
    pub n_b: usize,
    pub sup_u_h1: f64,
    pub sup_sigma_h1: f64,
}

fn spec_slot(m: usize, k: i64) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (m as i64 + k) as usize
    }
}

fn common_band_h1_sq(a: &ScalarField, b: &ScalarField, nc: usize) -> f64 {
    let sa = a.spectrum();
    let sb = b.spectrum();
    let (ma, mb) = (a.grid().m(), b.grid().m());
    let n = nc as i64;
    let mut acc = 0.0;
    for ky in -n..=n {
        for kx in -n..=n {
            let ca = sa[spec_slot(ma, ky) * ma + spec_slot(ma, kx)];
            let cb = sb[spec_slot(mb, ky) * mb + spec_slot(mb, kx)];
            let w = 1.0 + TAU * TAU * ((kx * kx + ky * ky) as f64);
            acc += w * (ca - cb).norm_sqr();
        }
    }
    acc
}

fn common_band_diffs(a: &State, b: &State) -> (f64, f64) {
    let nc = a.u.grid().n().min(b.u.grid().n());
    let du = common_band_h1_sq(&a.u.x, &b.u.x, nc) + common_band_h1_sq(&a.u.y, &b.u.y, nc);
    let ds = a
        .sigma
        .components()
        .iter()
        .zip(b.sigma.components())
        .map(|(ca, cb)| common_band_h1_sq(ca, cb, nc))
        .sum::<f64>();
    (du.sqrt(), ds.sqrt())
}

/// Rerun the same problem across grid cutoffs and compare consecutive
/// members on their shared modes.  `init` is sampled per grid, so the
/// initial data should be an analytic expression band-limited to
/// `min(n_list)` if members are meant to start identically.
pub fn sweep_resolution(
    init: &(dyn Fn(&SpectralGrid) -> Result<State> + Sync),
    setup: ExperimentSetup<'_>,
    pad_factor: f64,
    n_list: &[usize],
) -> Result<Vec<ResolutionDiffRow>> {
    if n_list.len() < 2 {
        return Err(Error::invalid("n_list needs at least two entries"));
    }
    let mut members = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let grid = SpectralGrid::new(n, pad_factor)?;
        let state = init(&grid)?;
        if state.u.grid() != &grid {
            return Err(Error::invalid("init returned a state on the wrong grid"));
        }
        members.push((state, *setup.params));
    }
    let t0 = members[0].0.t;
    if members.iter().any(|(s, _)| s.t != t0) {
        return Err(Error::invalid("sweep members must share the initial time"));
    }
    check_time_grid(setup.dt, setup.t_final, t0)?;

    let n_pairs = members.len() - 1;
    let mut sups = vec![(0.0f64, 0.0f64); n_pairs];
    let record = |members: &[(State, PhysicalParams)], sups: &mut [(f64, f64)]| {
        for i in 0..n_pairs {
            let (du, ds) = common_band_diffs(&members[i].0, &members[i + 1].0);
            sups[i].0 = sups[i].0.max(du);
            sups[i].1 = sups[i].1.max(ds);
        }
    };

    record(&members, &mut sups);
    let (full_steps, clipped) = plan_steps(setup.t_final - t0, setup.dt);
    let total = full_steps + usize::from(clipped);
    for step in 1..=total {
        let h = if step <= full_steps {
            setup.dt
        } else {
            setup.t_final - members[0].0.t
        };
        advance_lockstep(&mut members, setup.forcing, setup.variant, h)?;
        record(&members, &mut sups);
    }

    Ok(sups
        .iter()
        .enumerate()
        .map(|(i, &(u, s))| ResolutionDiffRow {
            n_a: n_list[i],
            n_b: n_list[i + 1],
            sup_u_h1: u,
            sup_sigma_h1: s,
        })
        .collect())
}

/// One sample of the twin-run difference functional and the Groenwall
/// coefficient monitored alongside it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwinSample {
    pub t: f64,
    /// `D(t) = |du|^2 + |grad du|^2 + (1/E)[|ds|^2 + (1+a^2)|grad ds|^2
    /// + a^2 |lap ds|^2]`.
    pub d: f64,
    /// `K(t) = 1 + |s1|_H2 + |s2|_H2 + |u1|_H2 + |u2|_H2` (unit constant).
    pub gronwall_k: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwinReport {
    pub samples: Vec<TwinSample>,
    pub d0: f64,
    /// Least-squares slope of `ln D` over the samples (0 for an
    /// identically zero difference).
    pub fitted_slope: f64,
    pub max_gronwall_k: f64,
}

/// Fixed smooth perturbation direction with unit H1 norm:
/// `(sin(2 pi y), 0) * sqrt(2 / (1 + 4 pi^2))`.
pub fn h1_unit_perturbation(grid: &SpectralGrid) -> VectorField {
    let scale = (2.0 / (1.0 + TAU * TAU)).sqrt();
    VectorField::new(
        ScalarField::from_fn(grid, |_, y| scale * (TAU * y).sin()),
        ScalarField::zeros(grid),
    )
    .expect("components share the grid")
}

/// Seeded random alternative to [`h1_unit_perturbation`], normalised the
/// same way.
pub fn random_h1_perturbation(grid: &SpectralGrid, seed: u64) -> Result<VectorField> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v = crate::spectral::random_vector(grid, &mut rng, 1.0);
    let h1 = sobolev_norm_vector(&v, 1)?;
    if h1 == 0.0 {
        return Err(Error::invalid("random perturbation degenerated to zero"));
    }
    v.scale(1.0 / h1);
    Ok(v)
}

/// The weighted spectral difference functional: the discrete quantity
/// whose decay rate the continuous-dependence estimate controls.
fn twin_energy(du: &VectorField, dsigma: &TensorField, params: &PhysicalParams) -> f64 {
    let grid = du.grid();
    let m = grid.m();
    let n = grid.n() as i64;
    let inv_e = 1.0 / params.e_modulus;
    let a2 = params.alpha * params.alpha;
    let u_specs: Vec<Vec<Complex64>> =
        du.components().iter().map(|c| c.spectrum()).collect();
    let s_specs: Vec<Vec<Complex64>> =
        dsigma.components().iter().map(|c| c.spectrum()).collect();
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
            let w = TAU * TAU * ((kx * kx + ky * ky) as f64);
            let j = iy * m + ix;
            let wu = 1.0 + w;
            let ws = inv_e * (1.0 + w) * (1.0 + a2 * w);
            acc += wu * u_specs.iter().map(|s| s[j].norm_sqr()).sum::<f64>();
            acc += ws * s_specs.iter().map(|s| s[j].norm_sqr()).sum::<f64>();
        }
    }
    acc
}

fn sample_twin(a: &State, b: &State, params: &PhysicalParams) -> Result<TwinSample> {
    let mut du = a.u.clone();
    du.scaled_add(-1.0, &b.u);
    let mut ds = a.sigma.clone();
    ds.scaled_add(-1.0, &b.sigma);
    let d = twin_energy(&du, &ds, params);
    let gronwall_k = 1.0
        + sobolev_norm_tensor(&a.sigma, 2)?
        + sobolev_norm_tensor(&b.sigma, 2)?
        + sobolev_norm_vector(&a.u, 2)?
        + sobolev_norm_vector(&b.u, 2)?;
    Ok(TwinSample { t: a.t, d, gronwall_k })
}

fn fit_slope(samples: &[TwinSample]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.d > 0.0)
        .map(|s| (s.t, s.d.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let denom = n * stt - st * st;
    if denom == 0.0 {
        return 0.0;
    }
    (n * sty - st * sy) / denom
}

/// Evolve a state and its `delta`-perturbed twin together, recording the
/// difference functional `D(t)` and the Groenwall coefficient `K(t)` at
/// every step.
///
/// The perturbation enters through `direction` scaled by `delta`, so
/// `D(0) = delta^2` for a unit-H1 direction with no stress component.
/// The estimate behind the experiment gives `d/dt D <= 2 K D` (unit
/// constant), so the fitted slope of `ln D` should stay below twice the
/// monitored maximum of `K`.
pub fn twin_stability(
    state0: &State,
    setup: ExperimentSetup<'_>,
    delta: f64,
    direction: &VectorField,
) -> Result<TwinReport> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid(format!("delta = {delta}: must be finite and >= 0")));
    }
    check_time_grid(setup.dt, setup.t_final, state0.t)?;
    if direction.grid() != state0.u.grid() {
        return Err(Error::invalid("perturbation direction is on the wrong grid"));
    }

    let mut twin = state0.clone();
    twin.u.scaled_add(delta, direction);
    let mut members = vec![(state0.clone(), *setup.params), (twin, *setup.params)];

    let mut samples = vec![sample_twin(&members[0].0, &members[1].0, setup.params)?];
    let (full_steps, clipped) = plan_steps(setup.t_final - state0.t, setup.dt);
    let total = full_steps + usize::from(clipped);
    for step in 1..=total {
        let h = if step <= full_steps {
            setup.dt
        } else {
            setup.t_final - members[0].0.t
        };
        advance_lockstep(&mut members, setup.forcing, setup.variant, h)?;
        samples.push(sample_twin(&members[0].0, &members[1].0, setup.params)?);
    }

    let d0 = samples[0].d;
    let fitted_slope = fit_slope(&samples);
    let max_gronwall_k = samples.iter().fold(0.0f64, |a, s| a.max(s.gronwall_k));
    Ok(TwinReport { samples, d0, fitted_slope, max_gronwall_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ForcingMode;
    use crate::spectral::l2_norm;

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::new(n, 2.0).unwrap()
    }

    fn setup<'a>(
        params: &'a PhysicalParams,
        forcing: &'a ForcingSpec,
        dt: f64,
        t_final: f64,
    ) -> ExperimentSetup<'a> {
        ExperimentSetup { params, forcing, variant: StrainVariant::Simplified, dt, t_final }
    }

    fn smooth_state(g: &SpectralGrid, params: &PhysicalParams, amp: f64) -> State {
        let u = VectorField::new(
            ScalarField::from_fn(g, |x, y| amp * ((TAU * y).sin() + 0.5 * (TAU * x).cos())),
            ScalarField::from_fn(g, |x, y| amp * ((TAU * x).sin() - 0.5 * (TAU * y).cos())),
        )
        .unwrap();
        let mut sigma = TensorField::isotropic(g, -0.5 * params.p);
        let bump = ScalarField::from_fn(g, |x, y| {
            amp * params.p * (TAU * x).sin() * (TAU * y).sin()
        });
        let shear = ScalarField::from_fn(g, |x, y| {
            0.5 * amp * params.p * (TAU * (x + y)).cos()
        });
        sigma.xx.scaled_add(1.0, &bump);
        sigma.yy.scaled_add(-1.0, &bump);
        sigma.xy.scaled_add(1.0, &shear);
        sigma.yx.scaled_add(1.0, &shear);
        State::new(u, sigma, 0.0).unwrap()
    }

    #[test]
    fn eps_sweep_rejects_bad_lists() {
        let g = grid(4);
        let params = PhysicalParams::nondimensional();
        let forcing = ForcingSpec::zero();
        let s0 = State::steady(&g, &params);
        let run = |eps: &[f64]| sweep_eps(&s0, setup(&params, &forcing, 0.01, 0.1), eps);
        assert!(run(&[0.1]).is_err());
        assert!(run(&[0.05, 0.1]).is_err());
        assert!(run(&[0.1, -0.05]).is_err());
    }

    #[test]
    fn repeated_eps_members_never_separate() {
        let g = grid(8);
        let params = PhysicalParams::nondimensional();
        let forcing = ForcingSpec::new(ForcingMode::Periodic, 2.0, 0.02).unwrap();
        let s0 = smooth_state(&g, &params, 0.05);
        let report =
            sweep_eps(&s0, setup(&params, &forcing, 0.01, 0.2), &[0.05, 0.05]).unwrap();
        assert_eq!(report.consecutive[0].sup_u_h1, 0.0);
        assert_eq!(report.consecutive[0].sup_sigma_h1, 0.0);
    }

    #[test]
    fn sweep_tables_are_reproducible() {
        let g = grid(8);
        let params = PhysicalParams::nondimensional();
        let forcing = ForcingSpec::new(ForcingMode::Periodic, 2.0, 0.02).unwrap();
        let s0 = smooth_state(&g, &params, 0.05);
        let a = sweep_eps(&s0, setup(&params, &forcing, 0.01, 0.2), &[0.1, 0.05, 0.0]).unwrap();
        let b = sweep_eps(&s0, setup(&params, &forcing, 0.01, 0.2), &[0.1, 0.05, 0.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eps_differences_shrink_with_eps() {
        let g = grid(8);
        let params = PhysicalParams::nondimensional();
        let forcing = ForcingSpec::new(ForcingMode::Periodic, 2.0, 0.02).unwrap();
        let s0 = smooth_state(&g, &params, 0.05);
        let report = sweep_eps(
            &s0,
            setup(&params, &forcing, 0.01, 0.5),
            &[1e-1, 5e-2, 2.5e-2, 0.0],
        )
        .unwrap();
        let sup: Vec<f64> = report
            .consecutive
            .iter()
            .map(|r| r.sup_u_h1.max(r.sup_sigma_h1))
            .collect();
        assert!(sup[0] > sup[1] && sup[1] > sup[2], "{sup:?}");
        assert!(sup[2] > 0.0);
        // The last consecutive pair is exactly the last versus-zero pair.
        assert_eq!(report.consecutive[2], report.versus_last[2]);
    }

    #[test]
    fn resolution_sweep_on_steady_data_reports_rounding_only() {
        let params = PhysicalParams::nondimensional();
        let forcing = ForcingSpec::zero();
        let init = |g: &SpectralGrid| Ok(State::steady(g, &params));
        let rows =
            sweep_resolution(&init, setup(&params, &forcing, 0.01, 0.1), 2.0, &[8, 16]).unwrap();
        assert!(rows[0].sup_u_h1 <= 1e-12, "{}", rows[0].sup_u_h1);
        assert!(rows[0].sup_sigma_h1 <= 1e-12, "{}", rows[0].sup_sigma_h1);
    }

    #[test]
    fn equal_resolutions_agree_exactly() {
        let params = PhysicalParams::nondimensional();
        let forcing = ForcingSpec::new(ForcingMode::Periodic, 2.0, 0.02).unwrap();
        let init = |g: &SpectralGrid| Ok(smooth_state(g, &params, 0.05));
        let rows =
            sweep_resolution(&init, setup(&params, &forcing, 0.01, 0.2), 2.0, &[8, 8]).unwrap();
        assert_eq!(rows[0].sup_u_h1, 0.0);
        assert_eq!(rows[0].sup_sigma_h1, 0.0);
    }

    #[test]
    fn perturbation_directions_have_unit_h1_norm() {
        let g = grid(8);
        let fixed = h1_unit_perturbation(&g);
        assert!((sobolev_norm_vector(&fixed, 1).unwrap() - 1.0).abs() < 1e-13);
        let random = random_h1_perturbation(&g, 7).unwrap();
        assert!((sobolev_norm_vector(&random, 1).unwrap() - 1.0).abs() < 1e-13);
        assert!(l2_norm(&random.x) > 0.0);
    }

    #[test]
    fn unperturbed_twin_stays_identically_zero() {
        let g = grid(8);
        let params = PhysicalParams::nondimensional();
        let forcing = ForcingSpec::new(ForcingMode::Periodic, 2.0, 0.02).unwrap();
        let s0 = smooth_state(&g, &params, 0.05);
        let dir = h1_unit_perturbation(&g);
        let report =
            twin_stability(&s0, setup(&params, &forcing, 0.01, 0.2), 0.0, &dir).unwrap();
        for s in &report.samples {
            assert_eq!(s.d, 0.0);
        }
        assert_eq!(report.fitted_slope, 0.0);
    }

    #[test]
    fn initial_difference_scales_as_delta_squared() {
        let g = grid(8);
        let params = PhysicalParams::nondimensional();
        let forcing = ForcingSpec::zero();
        let s0 = smooth_state(&g, &params, 0.05);
        let dir = h1_unit_perturbation(&g);
        let run = |delta: f64| {
            twin_stability(&s0, setup(&params, &forcing, 0.01, 0.02), delta, &dir)
                .unwrap()
                .d0
        };
        let (lo, hi) = (run(1e-6), run(1e-4));
        assert!((lo - 1e-12).abs() < 1e-14, "{lo}");
        assert!((hi / lo - 1e4).abs() < 1e4 * 1e-10, "{}", hi / lo);
    }

    #[test]
    fn twin_difference_respects_the_gronwall_envelope() {
        let g = grid(8);
        let params = PhysicalParams::nondimensional();
        let forcing = ForcingSpec::new(ForcingMode::Periodic, 2.0, 0.02).unwrap();
        let s0 = smooth_state(&g, &params, 0.05);
        let dir = h1_unit_perturbation(&g);
        let report =
            twin_stability(&s0, setup(&params, &forcing, 0.005, 0.5), 1e-5, &dir).unwrap();
        assert!(report.fitted_slope <= 2.0 * report.max_gronwall_k);
        // Pointwise envelope: D(t) <= D(0) exp(2 int K), trapezoid rule.
        let s = &report.samples;
        let mut integral = 0.0;
        for i in 1..s.len() {
            integral +=
                0.5 * (s[i].gronwall_k + s[i - 1].gronwall_k) * (s[i].t - s[i - 1].t);
            let bound = report.d0 * (2.0 * integral).exp();
            assert!(
                s[i].d <= bound * (1.0 + 1e-9),
                "t = {}: D = {} exceeds {}",
                s[i].t,
                s[i].d,
                bound
            );
        }
    }
}
