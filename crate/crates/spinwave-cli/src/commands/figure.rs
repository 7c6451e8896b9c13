//! `figure`: regenerates the datasets behind the four reference figures from
//! built-in parameter sets.
//!
//! Measured data are replaced by synthetic curves drawn from the closed-form
//! model with 3 % multiplicative noise and fixed seeds, so every run writes
//! the same bytes.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spinwave::constants::{K_B, M_RB87};
use spinwave::fit::{fit_decay, fit_tau_vs_temperature, synthetic_curve, FitModel, TemperaturePoint};
use spinwave::models::{
    crossing_time, harmonic_trap_timescales, recoil_time, Mechanism, RamanNathBounds, ReleaseDims,
};
use spinwave::oracle::scenarios::{release_thermal_comparison, ReleaseTruncation};
use spinwave::oracle::Comparison;
use spinwave::physics::{spin_wave_wavevector, thermal_velocity, transferred_radius, BeamGeometry, Propagation};
use spinwave::units::{hz_to_angular, MICROKELVIN, MICROMETER, MICROSECOND, NANOMETER};
use spinwave::Timescale;

use crate::commands::fit::FitDoc;
use crate::error::{CliError, CliResult};
use crate::output::{to_json, write_atomic, Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureId {
    #[value(name = "fig2")]
    Fig2,
    #[value(name = "fig3")]
    Fig3,
    #[value(name = "fig4")]
    Fig4,
    #[value(name = "figS2", alias = "figs2")]
    FigS2,
}

/// "signal-light beam with a beam waist of w = 8 µm"
const WAIST: f64 = 8.0 * MICROMETER;
/// "λ_eg = 780.24 nm"
const LAMBDA_SIGNAL: f64 = 780.24 * NANOMETER;
/// "λ_re = 480 nm", counterpropagating
const LAMBDA_COUPLING: f64 = 480.0 * NANOMETER;
/// radial trap frequency ω/2π = 96 Hz
const TRAP_HZ: f64 = 96.0;
/// "α_g = 687.3 a.u." and "α_r = −550 a.u." at 1064 nm
const ALPHA_G_1064: f64 = 687.3;
const ALPHA_R_1064: f64 = -550.0;
/// g = 9.8 m/s²
const GRAVITY: f64 = 9.8;
/// "2σ_x = 14 µm"
const SIGMA_X: f64 = 7.0 * MICROMETER;
/// "Extrapolating the straight line to T = 0 yields τ = 38(2) µs"
const TAU_OFFSET: f64 = 38.0 * MICROSECOND;
/// Relative noise of the synthetic data.
const NOISE: f64 = 0.03;
/// Scale of the synthetic efficiencies.
const ETA0: f64 = 0.15;

fn k_r() -> CliResult<f64> {
    let beams = BeamGeometry {
        signal_wavelength: LAMBDA_SIGNAL,
        coupling_wavelength: LAMBDA_COUPLING,
        geometry: Propagation::Counterpropagating,
        signal_waist: WAIST,
    };
    Ok(spin_wave_wavevector(&beams)?.k_r)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn to_us(v: &[f64]) -> Vec<f64> {
    v.iter().map(|t| t / MICROSECOND).collect()
}

/// Gaussian 1/e time with recoil at temperature `temp` and the offset.
fn free_expansion_tau(k_r: f64, temp: f64) -> f64 {
    let rate = k_r * k_r * K_B * temp / M_RB87 + 1.0 / (TAU_OFFSET * TAU_OFFSET);
    rate.powf(-0.5)
}

fn write_table(out: &Path, stem: &str, table: &Table, format: Format) -> CliResult<PathBuf> {
    match format {
        Format::Csv => write_atomic(out, &format!("{stem}.csv"), &table.to_csv()?),
        Format::Json => write_atomic(out, &format!("{stem}.json"), &to_json(&table.to_json_value())?),
    }
}

/// Files written and one summary line per result.
pub struct FigureRun {
    pub written: Vec<PathBuf>,
    pub summary: Vec<String>,
}

pub fn run(id: FigureId, out: &Path, format: Format, converged: bool) -> CliResult<FigureRun> {
    match id {
        FigureId::Fig2 => fig2(out, format),
        FigureId::Fig3 => fig3(out, format),
        FigureId::Fig4 => fig4(out, format),
        FigureId::FigS2 => fig_s2(out, format, converged),
    }
}

#[derive(Serialize)]
struct Fig2Summary {
    temperature_uk: f64,
    tau_true_us: f64,
    seed: u64,
    gaussian: FitDoc,
    stretched: FitDoc,
}

/// Free expansion at "T = 2.0 µK"; "the data cover two orders of magnitude
/// in η". Gaussian and stretched-exponential fits.
fn fig2(out: &Path, format: Format) -> CliResult<FigureRun> {
    let temp = 2.0 * MICROKELVIN;
    let tau = free_expansion_tau(k_r()?, temp);
    let t_end = tau * 100f64.ln().sqrt();
    let times = linspace(0.05 * t_end, t_end, 30);
    let seed = 2;
    let data = synthetic_curve(FitModel::Gaussian, ETA0, tau, 2.0, &times, NOISE, seed)?;
    let gauss = fit_decay(&data, FitModel::Gaussian)?;
    let stretched = fit_decay(&data, FitModel::StretchedExponential)?;
    let mut written = Vec::new();
    let sigma = data.sigma_eta.clone().unwrap_or_default();
    let t_us = to_us(&times);
    // readable by `spinwave fit`
    let table = Table::new()
        .column("t_us", t_us)
        .column("eta", data.eta.clone())
        .column("sigma", sigma);
    written.push(write_table(out, "fig2_data", &table, format)?);
    let dense = linspace(0.0, t_end, 101);
    let dense_us = to_us(&dense);
    let curves = Table::new()
        .column("t_us", dense_us.clone())
        .column("t2_us2", dense_us.iter().map(|t| t * t).collect())
        .column("model", dense.iter().map(|&t| FitModel::Gaussian.eval(t, ETA0, tau, 2.0)).collect())
        .column("gaussian_fit", dense.iter().map(|&t| gauss.eval(t)).collect())
        .column("stretched_fit", dense.iter().map(|&t| stretched.eval(t)).collect());
    written.push(write_table(out, "fig2_curves", &curves, format)?);
    let summary = Fig2Summary {
        temperature_uk: 2.0,
        tau_true_us: tau / MICROSECOND,
        seed,
        gaussian: FitDoc::new(&gauss),
        stretched: FitDoc::new(&stretched),
    };
    written.push(write_atomic(out, "fig2_summary.json", &to_json(&summary)?)?);
    let p = stretched.value("p").unwrap_or(f64::NAN);
    Ok(FigureRun {
        written,
        summary: vec![
            format!("fig2: true τ = {:.2} µs", tau / MICROSECOND),
            format!(
                "fig2: Gaussian fit τ = {:.2} µs; stretched fit p = {p:.3}",
                gauss.value("tau").unwrap_or(f64::NAN) / MICROSECOND
            ),
        ],
    })
}

#[derive(Serialize)]
struct Fig3Summary {
    lambda_r_true_um: f64,
    tau_offset_true_us: f64,
    lambda_r_um: f64,
    lambda_r_sigma_um: Option<f64>,
    tau_offset_us: Option<f64>,
    tau_offset_sigma_us: Option<f64>,
    slope_per_us2_uk: f64,
    intercept_per_us2: f64,
    n_points: usize,
}

/// "1/τ² ... expected to fall onto a straight line"; one synthetic Gaussian
/// decay per temperature, then the unweighted regression of 1/τ² on T.
fn fig3(out: &Path, format: Format) -> CliResult<FigureRun> {
    let k_r = k_r()?;
    let temps_uk = [0.2, 0.5, 0.8, 1.1, 1.4, 1.7, 2.0];
    let mut points = Vec::new();
    for (i, t_uk) in temps_uk.iter().enumerate() {
        let temp = t_uk * MICROKELVIN;
        let tau = free_expansion_tau(k_r, temp);
        let times = linspace(0.02 * tau, tau * 100f64.ln().sqrt(), 25);
        let curve = synthetic_curve(FitModel::Gaussian, ETA0, tau, 2.0, &times, NOISE, 100 + i as u64)?;
        let fit = fit_decay(&curve, FitModel::Gaussian)?;
        let p = fit
            .get("tau")
            .ok_or_else(|| CliError::Fit("Gaussian fit returned no τ".into()))?;
        points.push(TemperaturePoint {
            temperature: temp,
            tau: p.value,
            sigma_tau: Some(p.sigma),
        });
    }
    let reg = fit_tau_vs_temperature(&points, M_RB87, false)?;
    // 1/τ² in 1/µs², T in µK
    let y_scale = MICROSECOND * MICROSECOND;
    let table = Table::new()
        .column("T_uK", temps_uk.to_vec())
        .column("tau_us", points.iter().map(|p| p.tau / MICROSECOND).collect())
        .column(
            "sigma_tau_us",
            points.iter().map(|p| p.sigma_tau.unwrap_or(0.0) / MICROSECOND).collect(),
        )
        .column("inv_tau2_per_us2", points.iter().map(|p| y_scale / (p.tau * p.tau)).collect());
    let line_t = linspace(0.0, 2.2, 23);
    let line = Table::new().column("T_uK", line_t.clone()).column(
        "inv_tau2_per_us2",
        line_t
            .iter()
            .map(|t| (reg.intercept + reg.slope * t * MICROKELVIN) * y_scale)
            .collect(),
    );
    let mut written = vec![
        write_table(out, "fig3_points", &table, format)?,
        write_table(out, "fig3_line", &line, format)?,
    ];
    let summary = Fig3Summary {
        lambda_r_true_um: 2.0 * PI / k_r / MICROMETER,
        tau_offset_true_us: TAU_OFFSET / MICROSECOND,
        lambda_r_um: reg.lambda_r / MICROMETER,
        lambda_r_sigma_um: reg.lambda_r_sigma.map(|s| s / MICROMETER),
        tau_offset_us: reg.tau_offset.map(|t| t / MICROSECOND),
        tau_offset_sigma_us: reg.tau_offset_sigma.map(|t| t / MICROSECOND),
        slope_per_us2_uk: reg.slope * y_scale * MICROKELVIN,
        intercept_per_us2: reg.intercept * y_scale,
        n_points: reg.n_points,
    };
    written.push(write_atomic(out, "fig3_summary.json", &to_json(&summary)?)?);
    let off = reg
        .tau_offset
        .map_or("none resolved".to_string(), |t| format!("{:.1} µs", t / MICROSECOND));
    Ok(FigureRun {
        written,
        summary: vec![format!(
            "fig3: λ_R = {:.4} µm (true {:.4} µm), offset τ = {off}",
            reg.lambda_r / MICROMETER,
            2.0 * PI / k_r / MICROMETER
        )],
    })
}

#[derive(Serialize)]
struct CurveSummary {
    name: &'static str,
    description: &'static str,
    one_over_e_us: Option<f64>,
    gaussian_fit_tau_us: f64,
}

#[derive(Serialize)]
struct Fig4Summary {
    temperature_uk: f64,
    tau_recoil_us: f64,
    tau_f_us: f64,
    tau_kappa_us: f64,
    curves: Vec<CurveSummary>,
}

/// "Gaussian fits (lines) yield 1/e times of τ = 30(1) µs and τ = 12.5(6) µs
/// with the trap off and on", at "0.2 µK".
fn fig4(out: &Path, format: Format) -> CliResult<FigureRun> {
    let temp = 0.2 * MICROKELVIN;
    let k_r = k_r()?;
    let sigma_v = thermal_velocity(temp, M_RB87);
    let omega = hz_to_angular(TRAP_HZ);
    let kappa_g = M_RB87 * omega * omega;
    let ratio = ALPHA_R_1064 / ALPHA_G_1064;
    let kappa_r = ratio * kappa_g;
    let force = M_RB87 * GRAVITY * (1.0 - ratio).abs();
    let w_r = transferred_radius(SIGMA_X, WAIST);
    let (tau_f, tau_kappa) = harmonic_trap_timescales(w_r, force, kappa_g, kappa_r)?;
    let recoil = Mechanism::Recoil { k_r, sigma_v };
    let offset = Mechanism::GaussianOffset {
        tau_off: Timescale::Finite(TAU_OFFSET),
    };
    let sag = Mechanism::HarmonicSag {
        tau_f,
        tau_kappa,
        bounds: Some(RamanNathBounds::new(
            M_RB87,
            w_r,
            sigma_v,
            spinwave::models::recoil::recoil_velocity(k_r, M_RB87),
            kappa_g,
            kappa_r,
        )),
    };
    let release = Mechanism::ReleaseThermal {
        sigma_x: SIGMA_X,
        sigma_v,
        waist: WAIST,
        mass: M_RB87,
        dims: ReleaseDims::Two,
    };
    let curves: [(&'static str, &'static str, Mechanism); 3] = [
        (
            "free_expansion",
            "recoil × release from the trap × 38 µs offset",
            Mechanism::Composite(vec![recoil.clone(), release, offset.clone()]),
        ),
        ("in_trap", "differential light shift and sag alone", sag.clone()),
        (
            "in_trap_total",
            "recoil × differential light shift and sag × 38 µs offset",
            Mechanism::Composite(vec![recoil, sag, offset]),
        ),
    ];
    let times = linspace(0.0, 60.0 * MICROSECOND, 121);
    let mut table = Table::new().column("t_us", to_us(&times));
    let mut summaries = Vec::new();
    let mut lines = Vec::new();
    for (name, description, mech) in &curves {
        let ratio: Vec<f64> = times.iter().map(|&t| mech.ratio(t)).collect::<spinwave::Result<_>>()?;
        let one_e = crossing_time(|t| mech.ratio(t).unwrap_or(f64::NAN), (-1.0f64).exp(), 1e-3);
        let fit_curve = spinwave::DecayCurve::new(times.clone(), ratio.clone())?;
        let fit = fit_decay(&fit_curve, FitModel::Gaussian)?;
        let tau_fit = fit.value("tau").unwrap_or(f64::NAN) / MICROSECOND;
        lines.push(format!(
            "fig4: {name}: 1/e time {} µs, Gaussian fit τ = {tau_fit:.2} µs",
            one_e.map_or("none".into(), |t| format!("{:.2}", t / MICROSECOND))
        ));
        for w in mech.warnings(&times) {
            lines.push(format!("fig4: {name}: note: {}: {}", w.source, w.message));
        }
        summaries.push(CurveSummary {
            name,
            description,
            one_over_e_us: one_e.map(|t| t / MICROSECOND),
            gaussian_fit_tau_us: tau_fit,
        });
        table = table.column(name, ratio);
    }
    let summary = Fig4Summary {
        temperature_uk: 0.2,
        tau_recoil_us: recoil_time(k_r, sigma_v).finite().unwrap_or(f64::INFINITY) / MICROSECOND,
        tau_f_us: tau_f.finite().unwrap_or(f64::INFINITY) / MICROSECOND,
        tau_kappa_us: tau_kappa.finite().unwrap_or(f64::INFINITY) / MICROSECOND,
        curves: summaries,
    };
    let written = vec![
        write_table(out, "fig4_curves", &table, format)?,
        write_atomic(out, "fig4_summary.json", &to_json(&summary)?)?,
    ];
    Ok(FigureRun { written, summary: lines })
}

#[derive(Serialize)]
struct S2Case {
    kt_over_hw: f64,
    w_over_a0: f64,
    truncation: ReleaseTruncation,
    label: String,
    max_rel_dev: f64,
    mean_rel_dev: f64,
    within_10_percent: bool,
}

/// "Release of a gas with a temperature far above quantum degeneracy from a
/// 1d harmonic trap ... the sums over n are truncated to n ≤ 40."
fn fig_s2(out: &Path, format: Format, converged: bool) -> CliResult<FigureRun> {
    let mut jobs = Vec::new();
    for kt in [10.0, 20.0] {
        for w in [5.0, 7.3] {
            jobs.push((kt, w, ReleaseTruncation::N40));
            if converged {
                jobs.push((kt, w, ReleaseTruncation::Converged));
            }
        }
    }
    let results: Vec<CliResult<Comparison>> = {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(kt, w, tr)| Ok(release_thermal_comparison(kt, w, tr, 40)?))
            .collect()
    };
    let omega = hz_to_angular(TRAP_HZ);
    let mut written = Vec::new();
    let mut cases = Vec::new();
    let mut lines = Vec::new();
    for (&(kt, w, tr), res) in jobs.iter().zip(results) {
        let c = res?;
        let tag = match tr {
            ReleaseTruncation::N40 => "n40",
            ReleaseTruncation::Converged => "converged",
        };
        let stem = format!("figS2_kt{kt}_w{}_{tag}", w.to_string().replace('.', "p"));
        let table = Table::new()
            .column("t_us", to_us(&c.times))
            .column("omega_t", c.times.iter().map(|t| t * omega).collect())
            .column("oracle", c.oracle.clone())
            .column("approximation", c.model.clone());
        written.push(write_table(out, &stem, &table, format)?);
        let within = c.max_rel_dev < 0.10;
        lines.push(format!(
            "figS2: k_BT/ħω = {kt}, w/a₀ = {w}, {tag}: max rel dev {:.2} % ({})",
            100.0 * c.max_rel_dev,
            if within { "< 10 %" } else { "≥ 10 %" }
        ));
        cases.push(S2Case {
            kt_over_hw: kt,
            w_over_a0: w,
            truncation: tr,
            label: c.label.clone(),
            max_rel_dev: c.max_rel_dev,
            mean_rel_dev: c.mean_rel_dev,
            within_10_percent: within,
        });
    }
    written.push(write_atomic(out, "figS2_summary.json", &to_json(&cases)?)?);
    Ok(FigureRun { written, summary: lines })
}
