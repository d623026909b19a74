//! Classical RK4 time stepping with blow-up guards and a stability-based
//! step-size suggestion.
//!
//! All arithmetic runs in one fixed order, so a trajectory is a pure
//! function of (initial state, dt, rhs): split runs compose bit-for-bit
//! with unsplit ones as long as every segment spans a whole number of
//! steps.

use crate::error::{Error, Result};
use crate::model::{strain_rate, sym_gradient, PhysicalParams, State, StateDeriv, StrainVariant};

/// Floor added to the relaxation denominator so a motionless state does not
/// divide by zero.
const RELAXATION_FLOOR: f64 = 1e-30;

/// One classical Runge-Kutta step.  `rhs` sees intermediate states with the
/// correct stage times.  Fails with a blow-up error (carrying the stage
/// time) if any stage evaluates to non-finite values.
pub fn rk4_step(
    state: &State,
    dt: f64,
    mut rhs: impl FnMut(&State) -> Result<StateDeriv>,
) -> Result<State> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("dt = {dt}: step size must be finite and > 0")));
    }
    let check = |k: &StateDeriv, t: f64| -> Result<()> {
        if k.is_finite() {
            Ok(())
        } else {
            Err(Error::BlowUp {
                t,
                message: "non-finite right-hand side stage".into(),
            })
        }
    };

    let k1 = rhs(state)?;
    check(&k1, state.t)?;

    let mut mid = state.clone();
    mid.scaled_add(0.5 * dt, &k1);
    mid.t = state.t + 0.5 * dt;
    let k2 = rhs(&mid)?;
    check(&k2, mid.t)?;

    let mut mid2 = state.clone();
    mid2.scaled_add(0.5 * dt, &k2);
    mid2.t = state.t + 0.5 * dt;
    let k3 = rhs(&mid2)?;
    check(&k3, mid2.t)?;

    let mut end = state.clone();
    end.scaled_add(dt, &k3);
    end.t = state.t + dt;
    let k4 = rhs(&end)?;
    check(&k4, end.t)?;

    let mut acc = k1;
    acc.scaled_add(2.0, &k2);
    acc.scaled_add(2.0, &k3);
    acc.scaled_add(1.0, &k4);

    let mut out = state.clone();
    out.scaled_add(dt / 6.0, &acc);
    out.t = state.t + dt;
    Ok(out)
}

/// Step-size heuristic: the smaller of the elastic-wave and relaxation
/// timescales, scaled by `safety` in `(0, 1]`.
///
/// ```text
/// dt = safety * min( sqrt(1 + 4 pi^2 alpha^2 N^2) / (2 pi N sqrt(E)),
///                    P / (E e_bar^2 max_dcal + tiny) )
/// ```
///
/// The Voigt factor in the wave term reflects that the stress inversion
/// weakens high-wavenumber stiffness, so larger `alpha` admits larger
/// steps.  Empirical, not a proven bound.
pub fn suggest_dt(
    state: &State,
    params: &PhysicalParams,
    variant: StrainVariant,
    safety: f64,
) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::invalid(format!("safety = {safety}: must lie in (0, 1]")));
    }
    let n = state.grid().n() as f64;
    let tau = std::f64::consts::TAU;
    let wave = (1.0 + tau * tau * params.alpha * params.alpha * n * n).sqrt()
        / (tau * n * params.e_modulus.sqrt());
    let dcal_max = strain_rate(variant, &sym_gradient(&state.u), params)?.max();
    let relax =
        params.p / (params.e_modulus * params.e_bar * params.e_bar * dcal_max + RELAXATION_FLOOR);
    Ok(safety * wave.min(relax))
}

/// Fixed-step driver options.  Cadences count steps: a cadence `m > 0`
/// fires at step 0 and after every `m`-th accepted step (the clipped final
/// step, when present, counts as a step); `0` disables the callback.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub dt: f64,
    pub t_final: f64,
    pub diag_every: usize,
    pub snapshot_every: usize,
    /// Abort when any field's sup norm exceeds this multiple of the
    /// initial scale `max(initial sup norm, 1)`.
    pub blowup_factor: f64,
}

impl RunOptions {
    pub fn new(dt: f64, t_final: f64) -> Self {
        RunOptions {
            dt,
            t_final,
            diag_every: 0,
            snapshot_every: 0,
            blowup_factor: 1e12,
        }
    }
}

/// How a run ended: reached `t_final`, or tripped the blow-up guard (the
/// last finite state is preserved for post-mortem output).
#[derive(Debug)]
pub enum RunOutcome {
    Completed(State),
    BlownUp {
        t: f64,
        message: String,
        last_good: Box<State>,
    },
}

impl RunOutcome {
    pub fn completed(self) -> Result<State> {
        match self {
            RunOutcome::Completed(s) => Ok(s),
            RunOutcome::BlownUp { t, message, .. } => Err(Error::BlowUp { t, message }),
        }
    }
}

/// Number of full steps of `dt` in `span`, and whether a shorter clipped
/// step is needed to land on the endpoint.  A span within relative 1e-9 of
/// a whole number of steps counts as exact, so re-running a split schedule
/// never introduces a spurious sliver step.
pub fn plan_steps(span: f64, dt: f64) -> (usize, bool) {
    let ratio = span / dt;
    let rounded = ratio.round();
    if rounded >= 1.0 && (ratio - rounded).abs() <= 1e-9 * rounded {
        (rounded as usize, false)
    } else {
        (ratio.floor() as usize, true)
    }
}

/// Integrate from `state0.t` to `opts.t_final` with fixed `dt` (final step
/// clipped so the run lands exactly on `t_final`).  `on_diag` and
/// `on_snapshot` fire on their step cadences, starting at step 0.
pub fn run_simulation(
    state0: State,
    opts: &RunOptions,
    mut rhs: impl FnMut(&State) -> Result<StateDeriv>,
    mut on_diag: impl FnMut(&State) -> Result<()>,
    mut on_snapshot: impl FnMut(&State) -> Result<()>,
) -> Result<RunOutcome> {
    let advances = opts.t_final > state0.t;
    if !advances {
        return Err(Error::invalid(format!(
            "t_final = {} must exceed the initial time {}",
            opts.t_final, state0.t
        )));
    }
    if !(opts.dt.is_finite() && opts.dt > 0.0) {
        return Err(Error::invalid(format!("dt = {}: must be finite and > 0", opts.dt)));
    }
    let scale0 = state0.linf().max(1.0);
    let (full_steps, clipped) = plan_steps(opts.t_final - state0.t, opts.dt);

    let fire = |cadence: usize, step: usize| cadence > 0 && step.is_multiple_of(cadence);
    if fire(opts.diag_every, 0) {
        on_diag(&state0)?;
    }
    if fire(opts.snapshot_every, 0) {
        on_snapshot(&state0)?;
    }

    let mut state = state0;
    let total_steps = full_steps + usize::from(clipped);
    for step in 1..=total_steps {
        let dt = if step <= full_steps {
            opts.dt
        } else {
            opts.t_final - state.t
        };
        if dt <= 0.0 {
            break;
        }
        let next = match rk4_step(&state, dt, &mut rhs) {
            Ok(s) => s,
            Err(Error::BlowUp { t, message }) => {
                return Ok(RunOutcome::BlownUp {
                    t,
                    message,
                    last_good: Box::new(state),
                });
            }
            Err(e) => return Err(e),
        };
        let mut next = next;
        if step == total_steps && clipped {
            next.t = opts.t_final;
        }
        if !next.is_finite() || next.linf() > opts.blowup_factor * scale0 {
            return Ok(RunOutcome::BlownUp {
                t: next.t,
                message: format!(
                    "field sup norm {:.3e} exceeded {:.1e} x initial scale {:.3e}",
                    next.linf(),
                    opts.blowup_factor,
                    scale0
                ),
                last_good: Box::new(state),
            });
        }
        state = next;
        if fire(opts.diag_every, step) {
            on_diag(&state)?;
        }
        if fire(opts.snapshot_every, step) {
            on_snapshot(&state)?;
        }
    }
    Ok(RunOutcome::Completed(state))
}
