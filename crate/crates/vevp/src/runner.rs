//! From a validated configuration to grids, initial data, and finished
//! runs.  The CLI subcommands and the integration tests both go through
//! these entry points, so anything reachable from the command line is
//! reachable from a test without spawning a process.

use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::experiments::{
    h1_unit_perturbation, random_h1_perturbation, sweep_eps, sweep_resolution,
    twin_stability, EpsSweepReport, ExperimentSetup, ResolutionDiffRow, TwinReport,
};
use crate::illposed1d::{run_instability_experiment, Background1D, ModeGrowth};
use crate::model::{
    voigt_evp_rhs, ForcingSpec, PhysicalParams, State, StrainVariant,
};
use crate::output::{
    read_snapshot, write_diagnostics_csv, write_eps_sweep_csv, write_mode_growth_csv,
    write_resolution_sweep_csv, write_snapshot, write_twin_csv,
};
use crate::spectral::{ScalarField, SpectralGrid, TensorField, VectorField};
use crate::stepping::{run_simulation, suggest_dt, RunOptions, RunOutcome};

/// Low-mode initial data exciting both velocity and stress: the rest
/// stress plus order-`amp` perturbations carried by modes of size <= 2,
/// so the same expression is band-limited on every grid with `n >= 2`.
pub fn smooth_state(grid: &SpectralGrid, params: &PhysicalParams, amp: f64) -> State {
    use std::f64::consts::TAU;
    let u = VectorField::new(
        ScalarField::from_fn(grid, |x, y| amp * ((TAU * y).sin() + 0.5 * (TAU * x).cos())),
        ScalarField::from_fn(grid, |x, y| amp * ((TAU * x).sin() - 0.5 * (TAU * y).cos())),
    )
    .expect("components share the grid");
    let mut sigma = TensorField::isotropic(grid, -0.5 * params.p);
    let bump =
        ScalarField::from_fn(grid, |x, y| amp * params.p * (TAU * x).sin() * (TAU * y).sin());
    let shear =
        ScalarField::from_fn(grid, |x, y| 0.5 * amp * params.p * (TAU * (x + y)).cos());
    sigma.xx.scaled_add(1.0, &bump);
    sigma.yy.scaled_add(-1.0, &bump);
    sigma.xy.scaled_add(1.0, &shear);
    sigma.yx.scaled_add(1.0, &shear);
    State::new(u, sigma, 0.0).expect("fields share the grid")
}

fn preset_state(
    config: &RunConfig,
    grid: &SpectralGrid,
    params: &PhysicalParams,
) -> Result<State> {
    match config.init.preset.as_str() {
        "steady" => Ok(State::steady(grid, params)),
        "smooth" => Ok(smooth_state(grid, params, config.init.amp)),
        other => Err(Error::config(format!("init.preset: unknown preset {other:?}"))),
    }
}

fn apply_perturbation(config: &RunConfig, state: &mut State) -> Result<()> {
    if config.init.perturbation_amp == 0.0 {
        return Ok(());
    }
    let direction = match config.init.perturbation_seed {
        Some(seed) => random_h1_perturbation(state.grid(), seed)?,
        None => h1_unit_perturbation(state.grid()),
    };
    state.u.scaled_add(config.init.perturbation_amp, &direction);
    Ok(())
}

/// Everything a 2D run needs, with defaults and auto-selection resolved.
pub struct ResolvedRun {
    pub grid: SpectralGrid,
    pub params: PhysicalParams,
    pub forcing: ForcingSpec,
    pub variant: StrainVariant,
    pub state0: State,
    pub opts: RunOptions,
}

/// Build the run ingredients.  A snapshot in `init.snapshot` supplies
/// both the state and its grid (the `grid` section is ignored then, since
/// a restart must continue on the lattice it was saved from).
pub fn resolve(config: &RunConfig) -> Result<ResolvedRun> {
    config.validate()?;
    let params = config.resolved_params()?;
    let forcing = config.resolved_forcing()?;
    let variant = config.resolved_variant()?;
    let mut state0 = match &config.init.snapshot {
        Some(path) => read_snapshot(path)?,
        None => {
            let grid = SpectralGrid::new(config.grid.n, config.grid.pad_factor)?;
            preset_state(config, &grid, &params)?
        }
    };
    apply_perturbation(config, &mut state0)?;
    let dt = match config.time.dt {
        Some(dt) => dt,
        None => suggest_dt(&state0, &params, variant, config.time.safety)?,
    };
    let mut opts = RunOptions::new(dt, config.time.t_final);
    opts.diag_every = config.time.diag_every;
    opts.snapshot_every = config.time.snapshot_every;
    let grid = state0.grid().clone();
    Ok(ResolvedRun { grid, params, forcing, variant, state0, opts })
}

pub struct SimulationArtifacts {
    pub outcome: RunOutcome,
    pub records: Vec<DiagnosticsRecord>,
    pub diagnostics_path: Option<PathBuf>,
    pub snapshot_paths: Vec<PathBuf>,
}

/// Run the configured simulation and write the requested outputs into
/// `config.output.dir`.  A detected blow-up still writes the diagnostics
/// gathered so far and reports through `outcome` rather than an error.
pub fn simulate(config: &RunConfig) -> Result<SimulationArtifacts> {
    let run = resolve(config)?;
    let out_dir = &config.output.dir;
    let want_csv = config.output.formats.iter().any(|f| f == "csv");
    let want_snapshots = config.output.formats.iter().any(|f| f == "snapshot");

    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let mut snapshot_paths: Vec<PathBuf> = Vec::new();
    let params = run.params;
    let variant = run.variant;
    let forcing = run.forcing;

    let mut snapshot_index = 0usize;
    let outcome = run_simulation(
        run.state0,
        &run.opts,
        |s| voigt_evp_rhs(s, &params, &forcing, variant),
        |s| {
            records.push(DiagnosticsRecord::measure(s, &params, variant)?);
            Ok(())
        },
        |s| {
            if want_snapshots {
                let path = out_dir.join(format!("snapshot_{snapshot_index:04}.bin"));
                write_snapshot(&path, s)?;
                snapshot_paths.push(path);
            }
            snapshot_index += 1;
            Ok(())
        },
    )?;

    let diagnostics_path = if want_csv {
        let path = out_dir.join("diagnostics.csv");
        write_diagnostics_csv(&path, &records)?;
        Some(path)
    } else {
        None
    };
    if want_snapshots {
        let final_state = match &outcome {
            RunOutcome::Completed(s) => Some(s),
            // The last finite state is still worth keeping for post-mortems.
            RunOutcome::BlownUp { last_good, .. } => Some(last_good.as_ref()),
        };
        if let Some(s) = final_state {
            let path = out_dir.join("final.bin");
            write_snapshot(&path, s)?;
            snapshot_paths.push(path);
        }
    }
    Ok(SimulationArtifacts { outcome, records, diagnostics_path, snapshot_paths })
}

/// 1D growth-rate experiment from the `lab1d` section; writes
/// `instability1d.csv` when `out` is given.
pub fn instability1d(config: &RunConfig, out: Option<&Path>) -> Result<Vec<ModeGrowth>> {
    let lab = &config.lab1d;
    let bg = Background1D::new(lab.ubar_x, lab.sigbar, lab.p, lab.eps)?;
    let rows = run_instability_experiment(
        &bg,
        &lab.k_list,
        lab.t_final,
        lab.dt,
        lab.seed_amp,
        lab.alpha,
    )?;
    if let Some(dir) = out {
        write_mode_growth_csv(&dir.join("instability1d.csv"), &rows)?;
    }
    Ok(rows)
}

/// `eps` sweep from the `sweeps` section on the configured problem;
/// writes consecutive and versus-reference tables when `out` is given.
pub fn eps_sweep(config: &RunConfig, out: Option<&Path>) -> Result<EpsSweepReport> {
    let run = resolve(config)?;
    let report = sweep_eps(
        &run.state0,
        ExperimentSetup {
            params: &run.params,
            forcing: &run.forcing,
            variant: run.variant,
            dt: run.opts.dt,
            t_final: run.opts.t_final,
        },
        &config.sweeps.eps_list,
    )?;
    if let Some(dir) = out {
        write_eps_sweep_csv(&dir.join("sweep_eps.csv"), &report.consecutive)?;
        write_eps_sweep_csv(&dir.join("sweep_eps_vs_last.csv"), &report.versus_last)?;
    }
    Ok(report)
}

/// Grid-refinement sweep from the `sweeps` section.  Requires a preset
/// initial condition: the same analytic data is sampled on every grid.
pub fn resolution_sweep(
    config: &RunConfig,
    out: Option<&Path>,
) -> Result<Vec<ResolutionDiffRow>> {
    if config.init.snapshot.is_some() {
        return Err(Error::config(
            "sweeps over n require a preset init; a snapshot pins one grid",
        ));
    }
    config.validate()?;
    let params = config.resolved_params()?;
    let forcing = config.resolved_forcing()?;
    let variant = config.resolved_variant()?;
    let dt = match config.time.dt {
        Some(dt) => dt,
        None => {
            // The stiffest member limits the shared step.
            let mut dt = f64::INFINITY;
            for &n in &config.sweeps.n_list {
                let grid = SpectralGrid::new(n, config.grid.pad_factor)?;
                let state = preset_state(config, &grid, &params)?;
                dt = dt.min(suggest_dt(&state, &params, variant, config.time.safety)?);
            }
            dt
        }
    };
    let init = |grid: &SpectralGrid| preset_state(config, grid, &params);
    let rows = sweep_resolution(
        &init,
        ExperimentSetup {
            params: &params,
            forcing: &forcing,
            variant,
            dt,
            t_final: config.time.t_final,
        },
        config.grid.pad_factor,
        &config.sweeps.n_list,
    )?;
    if let Some(dir) = out {
        write_resolution_sweep_csv(&dir.join("sweep_n.csv"), &rows)?;
    }
    Ok(rows)
}

/// Twin continuous-dependence run; the perturbation direction follows
/// `init.perturbation_seed` (fixed low mode when unset).
pub fn twin(config: &RunConfig, out: Option<&Path>) -> Result<TwinReport> {
    let run = resolve(config)?;
    let direction = match config.init.perturbation_seed {
        Some(seed) => random_h1_perturbation(run.state0.grid(), seed)?,
        None => h1_unit_perturbation(run.state0.grid()),
    };
    let report = twin_stability(
        &run.state0,
        ExperimentSetup {
            params: &run.params,
            forcing: &run.forcing,
            variant: run.variant,
            dt: run.opts.dt,
            t_final: run.opts.t_final,
        },
        config.sweeps.twin_delta,
        &direction,
    )?;
    if let Some(dir) = out {
        write_twin_csv(&dir.join("twin.csv"), &report.samples)?;
    }
    Ok(report)
}

pub struct SteadyCheck {
    pub steps: usize,
    pub dt: f64,
    /// Sup-norm drift of the state from the rest state over the run.
    pub max_drift: f64,
    /// Constitutive residual of the rest state (exact zero expected).
    pub hibler_residual: f64,
}

impl SteadyCheck {
    pub fn passed(&self) -> bool {
        self.max_drift <= 1e-12 && self.hibler_residual == 0.0
    }
}

/// Hold the rest state `u = 0`, `sigma = -(P/2) I` for `steps` unforced
/// steps and measure how far it moves.
pub fn steady_check(config: &RunConfig, steps: usize) -> Result<SteadyCheck> {
    config.validate()?;
    let params = config.resolved_params()?;
    let variant = config.resolved_variant()?;
    let forcing = ForcingSpec::zero();
    let grid = SpectralGrid::new(config.grid.n, config.grid.pad_factor)?;
    let reference = State::steady(&grid, &params);
    let dt = match config.time.dt {
        Some(dt) => dt,
        None => suggest_dt(&reference, &params, variant, config.time.safety)?,
    };
    let mut state = reference.clone();
    let mut max_drift: f64 = 0.0;
    for _ in 0..steps {
        state = crate::stepping::rk4_step(&state, dt, |s| {
            voigt_evp_rhs(s, &params, &forcing, variant)
        })?;
        let mut diff = state.u.clone();
        diff.scaled_add(-1.0, &reference.u);
        max_drift = max_drift.max(diff.linf());
        let mut diff = state.sigma.clone();
        diff.scaled_add(-1.0, &reference.sigma);
        max_drift = max_drift.max(diff.linf());
    }
    let hibler_residual =
        crate::diagnostics::hibler_residual(&reference.u, &reference.sigma, &params)?;
    Ok(SteadyCheck { steps, dt, max_drift, hibler_residual })
}
