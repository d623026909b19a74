//! Command-line front end.  Every subcommand reads the same JSON
//! configuration (fully defaulted when no file is given), applies
//! `--override` dot-path edits in order, and dispatches to a library
//! entry point, so anything the binary does is reachable from a test
//! without spawning a process.
//!
//! Exit codes: 0 success, 1 failed check, 2 bad configuration or
//! arguments, 3 blow-up, 4 i/o failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vevp::config::{apply_override, parse_config, RunConfig};
use vevp::error::{Error, Result};
use vevp::runner;
use vevp::stepping::RunOutcome;

#[derive(Parser)]
#[command(
    name = "vevp",
    version,
    about = "Pseudo-spectral viscous-plastic sea-ice simulator on the periodic unit square"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the 2D model, writing diagnostics and snapshots.
    Simulate(Common),
    /// Measure 1D perturbation growth against the predicted dispersion
    /// rates (the `lab1d` configuration section).
    #[command(name = "instability1d")]
    Instability1d(Common),
    /// Distances between runs differing only in the strain-rate floor
    /// `eps` (the `sweeps.eps_list` section).
    SweepEps(Common),
    /// Distances between runs differing only in the grid cutoff
    /// (the `sweeps.n_list` section).
    SweepN(Common),
    /// Twin runs measuring continuous dependence on initial data.
    Twin(Common),
    /// Hold the rest state unforced and verify it does not move.
    SteadyCheck {
        #[command(flatten)]
        common: Common,
        /// Number of steps to hold the state for.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
}

/// Options shared by every subcommand.
#[derive(Args)]
struct Common {
    /// JSON configuration file; every field has a default, so `{}` (or
    /// omitting the flag) is a complete configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory, overriding `output.dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Perturbation seed, overriding `init.perturbation_seed`.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Dot-path configuration edit, e.g. `time.dt=0.01` or
    /// `params.preset=nondimensional`; repeatable, applied in order.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| Error::io(path.clone(), e))?,
            None => "{}".to_string(),
        };
        let mut config = parse_config(&text)?;
        for entry in &self.overrides {
            let (key, value) = entry.split_once('=').ok_or_else(|| {
                Error::config(format!("override {entry:?} is not of the form KEY=VALUE"))
            })?;
            config = apply_override(&config, key, value)?;
        }
        if let Some(dir) = &self.out {
            config.output.dir.clone_from(dir);
        }
        if let Some(seed) = self.seed {
            config.init.perturbation_seed = Some(seed);
        }
        Ok(config)
    }
}

fn simulate(common: &Common) -> Result<u8> {
    let config = common.load()?;
    let artifacts = runner::simulate(&config)?;
    for path in &artifacts.snapshot_paths {
        println!("wrote {}", path.display());
    }
    if let Some(path) = &artifacts.diagnostics_path {
        println!("wrote {} ({} rows)", path.display(), artifacts.records.len());
    }
    match &artifacts.outcome {
        RunOutcome::Completed(state) => {
            println!("completed: t = {:.6}", state.t);
            Ok(0)
        }
        RunOutcome::BlownUp { t, message, .. } => {
            eprintln!("blow-up at t = {t:.6}: {message}");
            Ok(3)
        }
    }
}

fn instability1d(common: &Common) -> Result<u8> {
    let config = common.load()?;
    let rows = runner::instability1d(&config, Some(&config.output.dir))?;
    println!("k,predicted_rate,measured_rate,relative_error,clipped");
    for r in &rows {
        println!(
            "{},{:.6e},{:.6e},{:.3e},{}",
            r.k, r.predicted_rate, r.measured_rate, r.relative_error, r.clipped
        );
    }
    println!("wrote {}", config.output.dir.join("instability1d.csv").display());
    Ok(0)
}

fn sweep_eps(common: &Common) -> Result<u8> {
    let config = common.load()?;
    let report = runner::eps_sweep(&config, Some(&config.output.dir))?;
    println!("eps_a,eps_b,sup_u_h1,sup_sigma_h1");
    for r in &report.consecutive {
        println!("{:e},{:e},{:.6e},{:.6e}", r.eps_a, r.eps_b, r.sup_u_h1, r.sup_sigma_h1);
    }
    println!("wrote {}", config.output.dir.join("sweep_eps.csv").display());
    println!("wrote {}", config.output.dir.join("sweep_eps_vs_last.csv").display());
    Ok(0)
}

fn sweep_n(common: &Common) -> Result<u8> {
    let config = common.load()?;
    let rows = runner::resolution_sweep(&config, Some(&config.output.dir))?;
    println!("n_a,n_b,sup_u_h1,sup_sigma_h1");
    for r in &rows {
        println!("{},{},{:.6e},{:.6e}", r.n_a, r.n_b, r.sup_u_h1, r.sup_sigma_h1);
    }
    println!("wrote {}", config.output.dir.join("sweep_n.csv").display());
    Ok(0)
}

fn twin(common: &Common) -> Result<u8> {
    let config = common.load()?;
    let report = runner::twin(&config, Some(&config.output.dir))?;
    println!("D(0) = {:.6e}", report.d0);
    println!("fitted slope of ln D = {:.6e}", report.fitted_slope);
    println!("admissible slope 2 max K = {:.6e}", 2.0 * report.max_gronwall_k);
    println!("wrote {}", config.output.dir.join("twin.csv").display());
    Ok(0)
}

fn steady_check(common: &Common, steps: usize) -> Result<u8> {
    let config = common.load()?;
    let check = runner::steady_check(&config, steps)?;
    println!("steps = {}, dt = {:.6e}", check.steps, check.dt);
    println!("max drift from rest state = {:.6e}", check.max_drift);
    println!("constitutive residual at rest = {:.6e}", check.hibler_residual);
    if check.passed() {
        println!("PASS");
        Ok(0)
    } else {
        println!("FAIL");
        Ok(1)
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::Instability1d(c) => instability1d(c),
        Command::SweepEps(c) => sweep_eps(c),
        Command::SweepN(c) => sweep_n(c),
        Command::Twin(c) => twin(c),
        Command::SteadyCheck { common, steps } => steady_check(common, *steps),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("VEVP_THREADS") {
        let built = threads
            .parse::<usize>()
            .map_err(|e| Error::config(format!("VEVP_THREADS = {threads:?}: {e}")))
            .and_then(|n| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| Error::config(format!("thread pool: {e}")))
            });
        if let Err(e) = built {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
