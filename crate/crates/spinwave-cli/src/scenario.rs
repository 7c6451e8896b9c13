//! Scenario files: a versioned JSON description of an experiment, a decay
//! model, a time grid and the output.
//!
//! Unknown keys are rejected everywhere. Parse errors carry the JSON path of
//! the offending field and its line and column.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use spinwave::models::harmonic::timescales_from;
use spinwave::models::recoil::recoil_velocity;
use spinwave::models::{
    Kuhr, KuhrVariant, LinearForce, LinearForceForm, Mechanism, RamanNathBounds, RamanNathGeneral, ReleaseDims,
    ScenarioModel,
};
use spinwave::physics::{
    derive_scales, oscillator_length, spin_wave_wavevector, thermal_velocity, BeamGeometry, DerivedScales,
    ExperimentConfig, Propagation, Species, ThermalEnsemble, TrapConfig,
};
use spinwave::quad::QuadOptions;
use spinwave::units::{hz_to_angular, MICROKELVIN, MICROMETER, MICROSECOND, NANOMETER};
use spinwave::Timescale;

use crate::error::{CliError, CliResult};
use crate::output::Format;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub experiment: ExperimentBlock,
    pub model: ModelBlock,
    pub times: TimeGrid,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
}

/// Unit system of every number in the file. `lab`: µm, nm (wavelengths), µs,
/// µK, Hz (ω/2π). `si`: m, m, s, K, rad/s. Polarizabilities are always a.u.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Lab,
    Si,
}

impl Units {
    pub fn length(self, v: f64) -> f64 {
        match self {
            Units::Lab => v * MICROMETER,
            Units::Si => v,
        }
    }

    pub fn wavelength(self, v: f64) -> f64 {
        match self {
            Units::Lab => v * NANOMETER,
            Units::Si => v,
        }
    }

    pub fn time(self, v: f64) -> f64 {
        match self {
            Units::Lab => v * MICROSECOND,
            Units::Si => v,
        }
    }

    /// Time in µs for output.
    pub fn time_us(self, v: f64) -> f64 {
        match self {
            Units::Lab => v,
            Units::Si => v / MICROSECOND,
        }
    }

    pub fn temperature(self, v: f64) -> f64 {
        match self {
            Units::Lab => v * MICROKELVIN,
            Units::Si => v,
        }
    }

    pub fn angular_frequency(self, v: f64) -> f64 {
        match self {
            Units::Lab => hz_to_angular(v),
            Units::Si => v,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    pub units: Units,
    pub species: SpeciesBlock,
    pub beams: BeamsBlock,
    pub trap: TrapBlock,
    pub ensemble: EnsembleBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesBlock {
    /// Only "rb87" is built in.
    pub name: String,
    /// Replaces the free-electron estimate, a.u.
    #[serde(default)]
    pub rydberg_polarizability_au: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Counterpropagating,
    Copropagating,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamsBlock {
    pub signal_wavelength: f64,
    pub coupling_wavelength: f64,
    pub geometry: GeometryKind,
    pub signal_waist: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapBlock {
    /// Radial trap frequency; zero for no trap.
    pub radial_frequency: f64,
    /// α_r/α_g; computed from `wavelength` when absent.
    #[serde(default)]
    pub polarizability_ratio: Option<f64>,
    /// Trap-light wavelength, 1064 or 532 nm.
    #[serde(default)]
    pub wavelength: Option<f64>,
    /// m/s² in both unit systems.
    #[serde(default)]
    pub gravity: Option<f64>,
    /// Whether the trap stays on during the dark time.
    #[serde(default)]
    pub on_during_dark_time: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleBlock {
    pub temperature: f64,
    #[serde(default)]
    pub atom_number: Option<f64>,
    #[serde(default)]
    pub medium_length: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(default = "one")]
    pub eta0: f64,
    pub mechanism: MechanismSpec,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceForm {
    #[default]
    Exact,
    HighTemperature,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KuhrKind {
    #[default]
    Kuhr,
    RamanNath,
}

/// Decay mechanism. Parameters left out are derived from the experiment
/// block.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MechanismSpec {
    /// Recoil, plus harmonic sag when the trap stays on or release from the
    /// trap otherwise, plus an optional Gaussian offset.
    Auto {
        #[serde(default)]
        offset_tau: Option<f64>,
    },
    Recoil {
        #[serde(default)]
        lambda_r: Option<f64>,
    },
    HarmonicSag {
        #[serde(default)]
        tau_f: Option<f64>,
        #[serde(default)]
        tau_kappa: Option<f64>,
    },
    LinearForce {
        #[serde(default)]
        form: ForceForm,
    },
    Exponential {
        lifetime: f64,
    },
    ReleaseBec {},
    ReleaseThermal {
        #[serde(default = "two")]
        dims: u32,
    },
    Kuhr {
        #[serde(default = "three")]
        dims: u32,
        #[serde(default)]
        variant: KuhrKind,
    },
    RamanNathGeneral {},
    GaussianOffset {
        tau: f64,
    },
    Composite {
        parts: Vec<MechanismSpec>,
    },
}

fn two() -> u32 {
    2
}

fn three() -> u32 {
    3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// File stem of the written files.
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub format: Option<Format>,
    /// Adds Re C and Im C columns (raman_nath_general only).
    #[serde(default)]
    pub complex: bool,
}

fn default_name() -> String {
    "curve".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            name: default_name(),
            format: None,
            complex: false,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    /// Largest accepted relative deviation.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Model values below this are left out of the statistics.
    #[serde(default)]
    pub floor: Option<f64>,
    /// Largest discarded Gibbs weight in thermal sums.
    #[serde(default)]
    pub tail_bound: Option<f64>,
}

/// Parses and checks a scenario, reporting the JSON path of any bad field.
pub fn parse(text: &str) -> CliResult<ScenarioFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            CliError::config(inner.to_string())
        } else {
            CliError::config(format!("field `{path}`: {inner}"))
        }
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::config(format!(
            "field `schema_version`: version {} is not supported (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    Ok(file)
}

pub fn load(path: &Path) -> CliResult<ScenarioFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| e.context(&path.display().to_string()))
}

fn positive(field: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(format!("field `{field}`: must be positive and finite, got {v}")))
    }
}

fn nonnegative(field: &str, v: f64) -> CliResult<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(format!("field `{field}`: must be >= 0 and finite, got {v}")))
    }
}

/// Scenario with the experiment converted to SI and the time grid expanded.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub file: ScenarioFile,
    pub experiment: ExperimentConfig,
    /// Sample times, s.
    pub times: Vec<f64>,
    /// The same times in µs, as written to the output.
    pub times_us: Vec<f64>,
    pub model: ScenarioModel,
}

pub fn resolve(file: ScenarioFile) -> CliResult<Resolved> {
    let experiment = experiment_config(&file.experiment)?;
    let (times, times_us) = time_grid(&file.times, file.experiment.units)?;
    let ctx = Context {
        exp: &experiment,
        units: file.experiment.units,
        trap_on: file.experiment.trap.on_during_dark_time,
    };
    let mechanism = build(&file.model.mechanism, &ctx, "model.mechanism")?;
    let eta0 = file.model.eta0;
    if !(eta0 > 0.0 && eta0 <= 1.0) {
        return Err(CliError::config(format!("field `model.eta0`: must lie in (0, 1], got {eta0}")));
    }
    let model = ScenarioModel::new(mechanism, eta0).map_err(|e| CliError::from(e).context("model"))?;
    validate_output(&file.output)?;
    Ok(Resolved {
        file,
        experiment,
        times,
        times_us,
        model,
    })
}

fn validate_output(out: &OutputSpec) -> CliResult<()> {
    let ok = !out.name.is_empty()
        && out
            .name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        && !out.name.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "field `output.name`: '{}' must be a plain file stem (letters, digits, '_', '-', '.')",
            out.name
        )))
    }
}

pub fn time_grid(g: &TimeGrid, units: Units) -> CliResult<(Vec<f64>, Vec<f64>)> {
    nonnegative("times.start", g.start)?;
    if !g.stop.is_finite() {
        return Err(CliError::config("field `times.stop`: must be finite"));
    }
    let raw: Vec<f64> = match g.count {
        0 => return Err(CliError::config("field `times.count`: must be at least 1")),
        1 => vec![g.start],
        n => {
            if !(g.stop > g.start) {
                return Err(CliError::config("field `times.stop`: must exceed `times.start` when count > 1"));
            }
            let step = (g.stop - g.start) / (n - 1) as f64;
            (0..n).map(|i| g.start + step * i as f64).collect()
        }
    };
    let si = raw.iter().map(|&v| units.time(v)).collect();
    let us = raw.iter().map(|&v| units.time_us(v)).collect();
    Ok((si, us))
}

fn experiment_config(b: &ExperimentBlock) -> CliResult<ExperimentConfig> {
    let u = b.units;
    if !b.species.name.eq_ignore_ascii_case("rb87") {
        return Err(CliError::config(format!(
            "field `experiment.species.name`: unknown species '{}' (built in: rb87)",
            b.species.name
        )));
    }
    let mut species = Species::rb87();
    species.rydberg_polarizability_override = b.species.rydberg_polarizability_au;
    let beams = BeamGeometry {
        signal_wavelength: u.wavelength(positive("experiment.beams.signal_wavelength", b.beams.signal_wavelength)?),
        coupling_wavelength: u
            .wavelength(positive("experiment.beams.coupling_wavelength", b.beams.coupling_wavelength)?),
        geometry: match b.beams.geometry {
            GeometryKind::Counterpropagating => Propagation::Counterpropagating,
            GeometryKind::Copropagating => Propagation::Copropagating,
        },
        signal_waist: u.length(positive("experiment.beams.signal_waist", b.beams.signal_waist)?),
    };
    let t = &b.trap;
    let omega = u.angular_frequency(nonnegative("experiment.trap.radial_frequency", t.radial_frequency)?);
    let ratio = match (t.polarizability_ratio, t.wavelength) {
        (Some(r), _) if r.is_finite() => r,
        (Some(r), _) => {
            return Err(CliError::config(format!("field `experiment.trap.polarizability_ratio`: {r} is not finite")))
        }
        (None, Some(l)) => {
            let lambda = u.wavelength(positive("experiment.trap.wavelength", l)?);
            let ground = if (lambda - 1064.0 * NANOMETER).abs() < NANOMETER {
                species.ground_polarizability_1064
            } else if (lambda - 532.0 * NANOMETER).abs() < NANOMETER {
                species.ground_polarizability_532
            } else {
                return Err(CliError::config(
                    "field `experiment.trap.wavelength`: ground-state polarizability is built in for 1064 and 532 nm only; give polarizability_ratio instead",
                ));
            };
            species.rydberg_polarizability(lambda) / ground
        }
        (None, None) => {
            return Err(CliError::config(
                "field `experiment.trap`: give polarizability_ratio or wavelength",
            ))
        }
    };
    let mut trap = TrapConfig::new(omega, ratio);
    if let Some(g) = t.gravity {
        trap.gravity = nonnegative("experiment.trap.gravity", g)?;
    }
    let e = &b.ensemble;
    let ensemble = ThermalEnsemble {
        temperature: u.temperature(nonnegative("experiment.ensemble.temperature", e.temperature)?),
        atom_number: nonnegative("experiment.ensemble.atom_number", e.atom_number.unwrap_or(0.0))?,
        medium_length: match e.medium_length {
            Some(l) => u.length(positive("experiment.ensemble.medium_length", l)?),
            None => 1e-3,
        },
    };
    let cfg = ExperimentConfig {
        species,
        beams,
        trap,
        ensemble,
    };
    cfg.validate().map_err(|e| CliError::from(e).context("experiment"))?;
    Ok(cfg)
}

struct Context<'a> {
    exp: &'a ExperimentConfig,
    units: Units,
    trap_on: bool,
}

impl Context<'_> {
    fn mass(&self) -> f64 {
        self.exp.species.mass
    }

    fn omega(&self) -> f64 {
        self.exp.trap.radial_frequency
    }

    fn waist(&self) -> f64 {
        self.exp.beams.signal_waist
    }

    fn sigma_v(&self) -> f64 {
        thermal_velocity(self.exp.ensemble.temperature, self.mass())
    }

    fn k_r(&self) -> CliResult<f64> {
        Ok(spin_wave_wavevector(&self.exp.beams)?.k_r)
    }

    fn scales(&self, field: &str) -> CliResult<DerivedScales> {
        derive_scales(self.exp).map_err(|e| CliError::from(e).context(&format!("field `{field}`")))
    }

    fn need_trap(&self, field: &str) -> CliResult<f64> {
        if self.omega() > 0.0 {
            Ok(self.omega())
        } else {
            Err(CliError::config(format!("field `{field}`: needs a nonzero trap frequency")))
        }
    }

    fn need_temperature(&self, field: &str) -> CliResult<f64> {
        let t = self.exp.ensemble.temperature;
        if t > 0.0 {
            Ok(t)
        } else {
            Err(CliError::config(format!("field `{field}`: needs a temperature above zero")))
        }
    }

    fn bounds(&self, s: &DerivedScales) -> CliResult<RamanNathBounds> {
        let v_r = recoil_velocity(self.k_r()?, self.mass());
        Ok(RamanNathBounds::new(self.mass(), s.w_r, s.sigma_v, v_r, s.kappa_g, s.kappa_r))
    }
}

fn check_dims(field: &str, dims: u32, allowed: &[u32]) -> CliResult<()> {
    if allowed.contains(&dims) {
        Ok(())
    } else {
        Err(CliError::config(format!("field `{field}.dims`: must be one of {allowed:?}, got {dims}")))
    }
}

fn build(spec: &MechanismSpec, ctx: &Context, field: &str) -> CliResult<Mechanism> {
    let u = ctx.units;
    Ok(match spec {
        MechanismSpec::Auto { offset_tau } => {
            let mut parts = vec![Mechanism::Recoil {
                k_r: ctx.k_r()?,
                sigma_v: ctx.sigma_v(),
            }];
            if ctx.omega() > 0.0 {
                if ctx.trap_on {
                    parts.push(build(
                        &MechanismSpec::HarmonicSag {
                            tau_f: None,
                            tau_kappa: None,
                        },
                        ctx,
                        field,
                    )?);
                } else if ctx.exp.ensemble.is_condensate() {
                    parts.push(build(&MechanismSpec::ReleaseBec {}, ctx, field)?);
                } else {
                    parts.push(build(&MechanismSpec::ReleaseThermal { dims: 2 }, ctx, field)?);
                }
            }
            if let Some(tau) = offset_tau {
                parts.push(build(&MechanismSpec::GaussianOffset { tau: *tau }, ctx, field)?);
            }
            Mechanism::Composite(parts)
        }
        MechanismSpec::Recoil { lambda_r } => {
            let k_r = match lambda_r {
                Some(l) => 2.0 * PI / u.length(positive(&format!("{field}.lambda_r"), *l)?),
                None => ctx.k_r()?,
            };
            Mechanism::Recoil {
                k_r,
                sigma_v: ctx.sigma_v(),
            }
        }
        MechanismSpec::HarmonicSag { tau_f, tau_kappa } => {
            ctx.need_trap(field)?;
            let s = ctx.scales(field)?;
            let (tf, tk) = timescales_from(&s)?;
            let over = |name: &str, v: &Option<f64>, d: Timescale| -> CliResult<Timescale> {
                Ok(match v {
                    Some(x) => Timescale::Finite(u.time(positive(&format!("{field}.{name}"), *x)?)),
                    None => d,
                })
            };
            Mechanism::HarmonicSag {
                tau_f: over("tau_f", tau_f, tf)?,
                tau_kappa: over("tau_kappa", tau_kappa, tk)?,
                bounds: Some(ctx.bounds(&s)?),
            }
        }
        MechanismSpec::LinearForce { form } => {
            let form = match form {
                ForceForm::Exact => LinearForceForm::Exact,
                ForceForm::HighTemperature => LinearForceForm::HighTemperature,
            };
            // gravity along x, beams along z
            Mechanism::LinearForce(LinearForce::new(
                ctx.waist(),
                ctx.sigma_v(),
                ctx.mass(),
                [0.0, 0.0, ctx.k_r()?],
                [ctx.exp.differential_force(), 0.0, 0.0],
                form,
            )?)
        }
        MechanismSpec::Exponential { lifetime } => Mechanism::Exponential {
            gamma: 1.0 / u.time(positive(&format!("{field}.lifetime"), *lifetime)?),
        },
        MechanismSpec::ReleaseBec {} => {
            let omega = ctx.need_trap(field)?;
            Mechanism::ReleaseBec {
                a0: oscillator_length(ctx.mass(), omega),
                waist: ctx.waist(),
                omega,
            }
        }
        MechanismSpec::ReleaseThermal { dims } => {
            check_dims(field, *dims, &[1, 2])?;
            let omega = ctx.need_trap(field)?;
            ctx.need_temperature(field)?;
            let sigma_v = ctx.sigma_v();
            Mechanism::ReleaseThermal {
                sigma_x: sigma_v / omega,
                sigma_v,
                waist: ctx.waist(),
                mass: ctx.mass(),
                dims: if *dims == 1 { ReleaseDims::One } else { ReleaseDims::Two },
            }
        }
        MechanismSpec::Kuhr { dims, variant } => {
            check_dims(field, *dims, &[1, 2, 3])?;
            ctx.need_trap(field)?;
            let beta = ctx.exp.ensemble.beta().map_err(|e| CliError::from(e).context(field))?;
            let variant = match variant {
                KuhrKind::Kuhr => KuhrVariant::KuhrIntermediate,
                KuhrKind::RamanNath => KuhrVariant::RamanNathHighT,
            };
            Mechanism::Kuhr(Kuhr::new(
                beta,
                ctx.exp.kappa_g(),
                ctx.exp.kappa_r(),
                ctx.mass(),
                *dims,
                variant,
            )?)
        }
        MechanismSpec::RamanNathGeneral {} => {
            ctx.need_trap(field)?;
            let s = ctx.scales(field)?;
            let (f, dk) = (s.force, s.kappa_r - s.kappa_g);
            // V_r − V_g about the sagged cloud center, force along x
            let dv = Arc::new(move |x: f64, y: f64| f * x + 0.5 * dk * (x * x + y * y));
            let rn = RamanNathGeneral::gaussian(s.sigma_x, s.sigma_x, ctx.waist(), dv, QuadOptions::default())?;
            Mechanism::RamanNathGeneral(rn.with_bounds(ctx.bounds(&s)?))
        }
        MechanismSpec::GaussianOffset { tau } => Mechanism::GaussianOffset {
            tau_off: Timescale::Finite(u.time(positive(&format!("{field}.tau"), *tau)?)),
        },
        MechanismSpec::Composite { parts } => {
            if parts.is_empty() {
                return Err(CliError::config(format!("field `{field}.parts`: must not be empty")));
            }
            Mechanism::Composite(
                parts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| build(p, ctx, &format!("{field}.parts[{i}]")))
                    .collect::<CliResult<_>>()?,
            )
        }
    })
}
