//! Run configuration: a JSON document with strict keys, full defaults,
//! and dot-path overrides.
//!
//! `parse_config("{}")` yields a complete, valid configuration (the
//! geophysical parameter table, N = 32, pad = 2, periodic forcing).
//! Every consistency rule is enforced at parse time and every violation
//! names the offending key and the constraint it broke.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::model::{ForcingMode, ForcingSpec, PhysicalParams, StrainVariant};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub params: ParamsConfig,
    pub forcing: ForcingConfig,
    pub strain_variant: StrainConfig,
    pub init: InitConfig,
    pub time: TimeConfig,
    pub output: OutputConfig,
    pub lab1d: Lab1dConfig,
    pub sweeps: SweepsConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub pad_factor: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 32, pad_factor: 2.0 }
    }
}

/// Parameter preset plus optional per-field overrides.  `preset` is
/// `"table"` (geophysical magnitudes) or `"nondimensional"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub preset: Preset,
    pub e_modulus: Option<f64>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub e_bar: Option<f64>,
    pub eps: Option<f64>,
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub g: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub c_a: Option<f64>,
    pub c_w: Option<f64>,
    pub rho_a: Option<f64>,
    pub rho_w: Option<f64>,
    pub m: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Table,
    Nondimensional,
}

impl ParamsConfig {
    fn base(&self) -> PhysicalParams {
        match self.preset {
            Preset::Table => PhysicalParams::table_defaults(),
            Preset::Nondimensional => PhysicalParams::nondimensional(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcingConfig {
    /// `"zero"`, `"reference"` (the non-periodic benchmark profiles sampled
    /// on the lattice), or `"periodic"`.
    pub mode: String,
    pub t_period: f64,
    pub h0_amplitude: f64,
}

impl Default for ForcingConfig {
    fn default() -> Self {
        ForcingConfig { mode: "periodic".into(), t_period: 1.0, h0_amplitude: 0.01 }
    }
}

/// Strain-rate measure selection.  `eps`/`gamma` given here take
/// precedence over the same knobs in `params`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrainConfig {
    /// `"simplified"`, `"original"`, or `"smoothed_max"`.
    pub kind: String,
    pub eps: Option<f64>,
    pub gamma: Option<f64>,
}

impl Default for StrainConfig {
    fn default() -> Self {
        StrainConfig { kind: "simplified".into(), eps: None, gamma: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitConfig {
    /// `"steady"` (the rest state) or `"smooth"` (low-mode velocity and
    /// stress perturbation of amplitude `amp`).  Ignored when `snapshot`
    /// is given.
    pub preset: String,
    pub amp: f64,
    /// Restart file written by a previous run; overrides `preset`.
    pub snapshot: Option<PathBuf>,
    /// Optional extra velocity perturbation `perturbation_amp *
    /// direction`, where the direction is the fixed unit-H1 field, or a
    /// seeded random one when `perturbation_seed` is set.
    pub perturbation_amp: f64,
    pub perturbation_seed: Option<u64>,
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig {
            preset: "steady".into(),
            amp: 0.05,
            snapshot: None,
            perturbation_amp: 0.0,
            perturbation_seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    /// Fixed step; `null` selects the suggested stable step scaled by
    /// `safety`.
    pub dt: Option<f64>,
    pub safety: f64,
    pub t_final: f64,
    /// Diagnostics every this many steps (0 = never, 1 = every step).
    pub diag_every: usize,
    /// Snapshots every this many steps (0 = never).
    pub snapshot_every: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { dt: None, safety: 0.5, t_final: 1.0, diag_every: 1, snapshot_every: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Any of `"csv"` (diagnostics table) and `"snapshot"` (binary state
    /// checkpoints, including a final one).
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), formats: vec!["csv".into(), "snapshot".into()] }
    }
}

/// Constant background and mode list for the 1D growth-rate experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lab1dConfig {
    pub ubar_x: f64,
    pub sigbar: f64,
    pub p: f64,
    pub eps: f64,
    pub alpha: f64,
    pub k_list: Vec<usize>,
    pub t_final: f64,
    pub dt: f64,
    pub seed_amp: f64,
}

impl Default for Lab1dConfig {
    fn default() -> Self {
        Lab1dConfig {
            ubar_x: 1.0,
            sigbar: 1.0,
            p: 1.0,
            eps: 1e-3,
            alpha: 0.0,
            k_list: vec![2, 4, 8, 16],
            t_final: 0.5,
            dt: 2e-3,
            seed_amp: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepsConfig {
    pub eps_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub twin_delta: f64,
}

impl Default for SweepsConfig {
    fn default() -> Self {
        SweepsConfig {
            eps_list: vec![1e-1, 5e-2, 2.5e-2, 1.25e-2, 0.0],
            n_list: vec![16, 32, 64],
            twin_delta: 1e-4,
        }
    }
}

impl RunConfig {
    /// Physical parameters with preset, per-field overrides, and the
    /// strain-section `eps`/`gamma` precedence applied.
    pub fn resolved_params(&self) -> Result<PhysicalParams> {
        let c = &self.params;
        let mut p = c.base();
        let fields: [(&mut f64, Option<f64>); 15] = [
            (&mut p.e_modulus, c.e_modulus),
            (&mut p.alpha, c.alpha),
            (&mut p.p, c.p),
            (&mut p.e_bar, c.e_bar),
            (&mut p.eps, c.eps),
            (&mut p.gamma, c.gamma),
            (&mut p.omega, c.omega),
            (&mut p.g, c.g),
            (&mut p.theta, c.theta),
            (&mut p.phi, c.phi),
            (&mut p.c_a, c.c_a),
            (&mut p.c_w, c.c_w),
            (&mut p.rho_a, c.rho_a),
            (&mut p.rho_w, c.rho_w),
            (&mut p.m, c.m),
        ];
        for (slot, over) in fields {
            if let Some(v) = over {
                *slot = v;
            }
        }
        if let Some(eps) = self.strain_variant.eps {
            p.eps = eps;
        }
        if let Some(gamma) = self.strain_variant.gamma {
            p.gamma = gamma;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn resolved_variant(&self) -> Result<StrainVariant> {
        match self.strain_variant.kind.as_str() {
            "simplified" => Ok(StrainVariant::Simplified),
            "original" => Ok(StrainVariant::Original),
            "smoothed_max" => Ok(StrainVariant::SmoothedMax),
            other => Err(Error::config(format!(
                "strain_variant.kind: unknown variant {other:?}; expected \
                 \"simplified\", \"original\", or \"smoothed_max\""
            ))),
        }
    }

    pub fn resolved_forcing(&self) -> Result<ForcingSpec> {
        let mode = match self.forcing.mode.as_str() {
            "zero" => ForcingMode::Zero,
            "reference" => ForcingMode::Reference,
            "periodic" => ForcingMode::Periodic,
            other => {
                return Err(Error::config(format!(
                    "forcing.mode: unknown mode {other:?}; expected \"zero\", \
                     \"reference\", or \"periodic\""
                )))
            }
        };
        ForcingSpec::new(mode, self.forcing.t_period, self.forcing.h0_amplitude)
            .map_err(|e| Error::config(format!("forcing: {e}")))
    }

    /// Full consistency check; called by [`parse_config`] so an accepted
    /// document is usable as-is.
    pub fn validate(&self) -> Result<()> {
        if self.grid.n == 0 {
            return Err(Error::config("grid.n: cutoff must be >= 1"));
        }
        if !(self.grid.pad_factor >= 1.0 && self.grid.pad_factor.is_finite()) {
            return Err(Error::config("grid.pad_factor: must be finite and >= 1"));
        }
        self.resolved_params()?;
        self.resolved_variant()?;
        self.resolved_forcing()?;
        match self.init.preset.as_str() {
            "steady" | "smooth" => {}
            other => {
                return Err(Error::config(format!(
                    "init.preset: unknown preset {other:?}; expected \"steady\" or \"smooth\""
                )))
            }
        }
        if !self.init.amp.is_finite() {
            return Err(Error::config("init.amp: must be finite"));
        }
        if !(self.init.perturbation_amp.is_finite() && self.init.perturbation_amp >= 0.0) {
            return Err(Error::config("init.perturbation_amp: must be finite and >= 0"));
        }
        if let Some(dt) = self.time.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::config("time.dt: must be finite and > 0 (or null for auto)"));
            }
        }
        if !(self.time.safety > 0.0 && self.time.safety <= 1.0) {
            return Err(Error::config("time.safety: must lie in (0, 1]"));
        }
        if !(self.time.t_final.is_finite() && self.time.t_final > 0.0) {
            return Err(Error::config("time.t_final: must be finite and > 0"));
        }
        for f in &self.output.formats {
            if f != "csv" && f != "snapshot" {
                return Err(Error::config(format!(
                    "output.formats: unknown format {f:?}; expected \"csv\" or \"snapshot\""
                )));
            }
        }
        let lab = &self.lab1d;
        if !(lab.p.is_finite() && lab.p > 0.0) {
            return Err(Error::config("lab1d.p: must be finite and > 0"));
        }
        if !(lab.eps.is_finite() && lab.eps >= 0.0) {
            return Err(Error::config("lab1d.eps: must be finite and >= 0"));
        }
        if lab.eps == 0.0 && lab.ubar_x == 0.0 {
            return Err(Error::config(
                "lab1d.eps: eps = 0 with ubar_x = 0 leaves the linearisation undefined",
            ));
        }
        if !(lab.alpha.is_finite() && lab.alpha >= 0.0) {
            return Err(Error::config("lab1d.alpha: must be finite and >= 0"));
        }
        if lab.k_list.is_empty() || lab.k_list.contains(&0) {
            return Err(Error::config("lab1d.k_list: need at least one mode, all >= 1"));
        }
        if !(lab.t_final > 0.0 && lab.dt > 0.0 && lab.seed_amp > 0.0) {
            return Err(Error::config("lab1d: t_final, dt, and seed_amp must be > 0"));
        }
        if self.sweeps.eps_list.len() < 2 {
            return Err(Error::config("sweeps.eps_list: need at least two entries"));
        }
        if self.sweeps.n_list.len() < 2 {
            return Err(Error::config("sweeps.n_list: need at least two entries"));
        }
        if self.sweeps.n_list.contains(&0) {
            return Err(Error::config("sweeps.n_list: cutoffs must be >= 1"));
        }
        if !(self.sweeps.twin_delta.is_finite() && self.sweeps.twin_delta >= 0.0) {
            return Err(Error::config("sweeps.twin_delta: must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Parse and validate a JSON configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig =
        serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Set one field addressed by a dot path (`"time.t_final"`) to a JSON
/// value; bare strings need no quotes.  The key must already exist, so
/// typos are rejected rather than silently added.
pub fn apply_override(config: &RunConfig, key: &str, value: &str) -> Result<RunConfig> {
    let mut doc = serde_json::to_value(config)
        .map_err(|e| Error::config(format!("internal serialisation failure: {e}")))?;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(format!("override key {key:?} has an empty segment")));
    }
    let mut cursor = &mut doc;
    for (i, part) in parts.iter().enumerate() {
        let exists = cursor
            .as_object()
            .ok_or_else(|| {
                Error::config(format!(
                    "override key {key:?}: {} is not a table",
                    parts[..i].join(".")
                ))
            })?
            .contains_key(*part);
        if !exists {
            return Err(Error::config(format!(
                "override key {key:?}: unknown field {part:?}"
            )));
        }
        if i + 1 == parts.len() {
            let parsed: serde_json::Value = serde_json::from_str(value)
                .unwrap_or_else(|_| serde_json::Value::String(value.to_string()));
            cursor
                .as_object_mut()
                .expect("checked above")
                .insert((*part).to_string(), parsed);
        } else {
            cursor = cursor.get_mut(*part).expect("checked above");
        }
    }
    let config: RunConfig =
        serde_json::from_value(doc).map_err(|e| Error::config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}
