//! `oracle`: runs the numerical oracle matching a scenario's model and
//! compares it with the closed form.
//!
//! Composite models multiply the per-factor oracles. Factors without an
//! oracle (exponential, Gaussian offset) enter both sides unchanged; a model
//! made only of such factors has no oracle at all.

use std::path::{Path, PathBuf};

use serde::Serialize;
use spinwave::constants::HBAR;
use spinwave::models::{LinearForce, LinearForceForm, Mechanism, ReleaseDims};
use spinwave::oracle::kuhr_exact::kuhr_exact_spec;
use spinwave::oracle::scenarios::{
    harmonic_sag_oracle, linear_force_oracle, product, recoil_oracle, release_bec_oracle, release_thermal_oracle,
    SagScenario,
};
use spinwave::oracle::{Comparison, OverlapMethod, ThermalSpec};
use spinwave::physics::oscillator_length;

use crate::error::{CliError, CliResult};
use crate::output::{to_json, write_atomic, Format, Table};
use crate::scenario::Resolved;

const DEFAULT_TAIL: f64 = 1e-4;

/// Oracle and closed form for one factor.
#[derive(Debug, Clone)]
struct Piece {
    label: String,
    oracle: Vec<f64>,
    model: Vec<f64>,
    tolerance: f64,
    floor: f64,
    notes: Vec<String>,
}

struct Ctx<'a> {
    r: &'a Resolved,
    tail: f64,
}

impl Ctx<'_> {
    fn mass(&self) -> f64 {
        self.r.experiment.species.mass
    }

    fn times(&self) -> &[f64] {
        &self.r.times
    }

    fn model(&self, m: &Mechanism) -> CliResult<Vec<f64>> {
        Ok(self.times().iter().map(|&t| m.ratio(t)).collect::<spinwave::Result<_>>()?)
    }

    fn sag(&self) -> CliResult<SagScenario> {
        let e = &self.r.experiment;
        if !(e.trap.radial_frequency > 0.0) || !(e.ensemble.temperature > 0.0) {
            return Err(CliError::config("the sag oracle needs a trap frequency and a temperature above zero"));
        }
        Ok(SagScenario {
            mass: self.mass(),
            omega: e.trap.radial_frequency,
            kappa_ratio: e.trap.polarizability_ratio,
            force: e.differential_force(),
            waist: e.beams.signal_waist,
            temperature: e.ensemble.temperature,
            tail_bound: self.tail,
        })
    }
}

fn piece(label: &str, oracle: Vec<f64>, model: Vec<f64>, tolerance: f64, floor: f64) -> Piece {
    Piece {
        label: label.to_string(),
        oracle,
        model,
        tolerance,
        floor,
        notes: Vec::new(),
    }
}

fn oracle_for(m: &Mechanism, c: &Ctx) -> CliResult<Option<Piece>> {
    let times = c.times();
    Ok(Some(match m {
        Mechanism::Recoil { k_r, sigma_v } => {
            let s = recoil_oracle(*k_r, *sigma_v, c.mass(), times)?;
            piece("recoil: plane-wave propagation", s.eta_ratio(), c.model(m)?, 1e-3, 1e-3)
        }
        Mechanism::HarmonicSag { .. } | Mechanism::RamanNathGeneral(_) => {
            let (x, y) = harmonic_sag_oracle(&c.sag()?, times)?;
            let mut p = piece(
                &format!("{}: thermal Hermite sum on the grid, both traps harmonic", m.name()),
                product(&x, &y)?.eta,
                c.model(m)?,
                0.03,
                1e-2,
            );
            p.notes.push("Raman-Nath models are approximate; 3 % inside their validity window".into());
            p
        }
        Mechanism::LinearForce(_) => {
            let e = &c.r.experiment;
            let (w, f) = (e.beams.signal_waist, e.differential_force());
            let (x, y) = linear_force_oracle(w, c.mass(), f, times)?;
            let oracle = x.eta_ratio().iter().zip(y.eta_ratio()).map(|(a, b)| a * b).collect();
            let cold = Mechanism::LinearForce(LinearForce::new(
                w,
                0.0,
                c.mass(),
                [0.0; 3],
                [f, 0.0, 0.0],
                LinearForceForm::Exact,
            )?);
            let mut p = piece("linear_force: homogeneous gas on the grid", oracle, c.model(&cold)?, 1e-3, 1e-3);
            p.notes.push("the oracle covers σ_v = 0 without recoil; both sides use the exact form at σ_v = 0".into());
            p
        }
        Mechanism::ReleaseBec { a0, waist, .. } => {
            let s = release_bec_oracle(*a0, *waist, c.mass(), times)?;
            piece("release_bec: ground state released on the grid", s.eta_ratio(), c.model(m)?, 1e-3, 1e-3)
        }
        Mechanism::ReleaseThermal {
            sigma_x,
            sigma_v,
            waist,
            mass,
            dims,
        } => {
            let omega = sigma_v / sigma_x;
            let beta = 1.0 / (mass * sigma_v * sigma_v);
            let spec = ThermalSpec::new(beta, omega, 0, c.tail)?.with_minimal_n_max();
            let a0 = oscillator_length(*mass, omega);
            let (curve, _) = release_thermal_oracle(&spec, a0, *waist, *mass, times)?;
            let oracle = match dims {
                ReleaseDims::One => curve.eta,
                ReleaseDims::Two => curve.eta.iter().map(|v| v * v).collect(),
            };
            let mut p = piece(
                &format!("release_thermal: Hermite states n ≤ {} released on the grid", spec.n_max),
                oracle,
                c.model(m)?,
                0.1,
                1e-3,
            );
            p.notes.push(format!(
                "the closed form is a high-temperature approximation (k_BT/ħω = {:.1})",
                1.0 / (beta * HBAR * omega)
            ));
            p
        }
        Mechanism::Kuhr(k) => {
            if !(k.kappa_r > 0.0) {
                return Err(CliError::config(
                    "the exact Kuhr sum needs a trapping Rydberg potential (α_r/α_g > 0)",
                ));
            }
            let (wg, wr) = ((k.kappa_g / k.mass).sqrt(), (k.kappa_r / k.mass).sqrt());
            let spec = ThermalSpec::new(k.beta, wg, 0, c.tail)?.with_minimal_n_max();
            let ex = kuhr_exact_spec(&spec, wr, times, OverlapMethod::GridOverlap)?;
            let oracle = ex.series.eta_ratio().iter().map(|v| v.powi(k.dims as i32)).collect();
            let mut p = piece("kuhr: exact thermal sum over trap eigenstates", oracle, c.model(m)?, 1e-2, 1e-3);
            p.notes.extend(ex.warnings.iter().map(|w| format!("{}: {}", w.source, w.message)));
            p
        }
        Mechanism::Exponential { .. } | Mechanism::GaussianOffset { .. } => return Ok(None),
        Mechanism::Composite(parts) => {
            let mut acc: Option<Piece> = None;
            let mut passthrough = Vec::new();
            for part in parts {
                match oracle_for(part, c)? {
                    Some(p) => {
                        acc = Some(match acc {
                            None => p,
                            Some(a) => combine(a, p),
                        })
                    }
                    None => passthrough.push(part),
                }
            }
            let Some(mut acc) = acc else { return Ok(None) };
            for part in passthrough {
                let v = c.model(part)?;
                for i in 0..v.len() {
                    acc.oracle[i] *= v[i];
                    acc.model[i] *= v[i];
                }
                acc.notes.push(format!("{} has no oracle and enters both sides unchanged", part.name()));
            }
            acc
        }
    }))
}

fn combine(a: Piece, b: Piece) -> Piece {
    let mul = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).collect();
    let mut notes = a.notes;
    notes.extend(b.notes);
    Piece {
        label: format!("{} × {}", a.label, b.label),
        oracle: mul(&a.oracle, &b.oracle),
        model: mul(&a.model, &b.model),
        tolerance: a.tolerance.max(b.tolerance),
        floor: a.floor.max(b.floor),
        notes,
    }
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    name: &'a str,
    label: &'a str,
    tolerance: f64,
    floor: f64,
    max_rel_dev: f64,
    mean_rel_dev: f64,
    pass: bool,
    notes: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    series: Option<serde_json::Value>,
}

#[derive(Debug)]
pub enum OracleOutcome {
    NoOracle(&'static str),
    Done {
        written: Vec<PathBuf>,
        pass: bool,
        max_rel_dev: f64,
        tolerance: f64,
        notes: Vec<String>,
    },
}

pub fn run(r: &Resolved, out: &Path, format: Option<Format>, tolerance: Option<f64>) -> CliResult<OracleOutcome> {
    let spec = &r.file.oracle;
    let tail = spec.tail_bound.unwrap_or(DEFAULT_TAIL);
    if !(tail > 0.0 && tail < 1.0) {
        return Err(CliError::config("field `oracle.tail_bound`: must lie in (0, 1)"));
    }
    let c = Ctx { r, tail };
    let Some(p) = oracle_for(&r.model.mechanism, &c)? else {
        return Ok(OracleOutcome::NoOracle(r.model.mechanism.name()));
    };
    let tolerance = tolerance.or(spec.tolerance).unwrap_or(p.tolerance);
    if !(tolerance > 0.0) {
        return Err(CliError::config("tolerance must be positive"));
    }
    let floor = spec.floor.unwrap_or(p.floor);
    let cmp = Comparison::new(&p.label, r.times.clone(), p.oracle, p.model, floor)?;
    let pass = cmp.passes(tolerance);
    let rel: Vec<f64> = cmp
        .oracle
        .iter()
        .zip(&cmp.model)
        .map(|(o, m)| if *m > 0.0 { (o - m).abs() / m } else { f64::NAN })
        .collect();
    let table = Table::new()
        .column("t_us", r.times_us.clone())
        .column("oracle", cmp.oracle.clone())
        .column("model", cmp.model.clone())
        .column("rel_dev", rel);
    let name = r.file.output.name.as_str();
    let format = format.or(r.file.output.format).unwrap_or(Format::Csv);
    let report = |series| Report {
        name,
        label: &cmp.label,
        tolerance,
        floor,
        max_rel_dev: cmp.max_rel_dev,
        mean_rel_dev: cmp.mean_rel_dev,
        pass,
        notes: &p.notes,
        series,
    };
    let mut written = Vec::new();
    match format {
        Format::Csv => {
            written.push(write_atomic(out, &format!("{name}_oracle.csv"), &table.to_csv()?)?);
            written.push(write_atomic(out, &format!("{name}_oracle.json"), &to_json(&report(None))?)?);
        }
        Format::Json => {
            let doc = report(Some(table.to_json_value()));
            written.push(write_atomic(out, &format!("{name}_oracle.json"), &to_json(&doc)?)?);
        }
    }
    Ok(OracleOutcome::Done {
        written,
        pass,
        max_rel_dev: cmp.max_rel_dev,
        tolerance,
        notes: p.notes,
    })
}
