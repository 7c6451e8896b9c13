//! Decay-curve fits and the 1/τ² versus temperature regression.
//!
//! All models are fitted in a linearizing domain: ln η for the Gaussian,
//! exponential and stretched-exponential forms, 1/η for the algebraic form.
//! The stretched exponent is located by golden-section search with an inner
//! linear solve, then polished by Gauss-Newton on (ln η₀, b, p).

use nalgebra::{Matrix3, Vector3};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::K_B;
use crate::{DecayCurve, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// η₀ exp(−t²/τ²)
    Gaussian,
    /// η₀ exp(−t/τ)
    Exponential,
    /// η₀/(1 + t²/τ²)
    Algebraic,
    /// η₀ exp(−(t/τ)^p)
    StretchedExponential,
}

impl FitModel {
    pub fn min_points(self) -> usize {
        match self {
            FitModel::StretchedExponential => 5,
            _ => 4,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(FitModel::Gaussian),
            "exponential" => Ok(FitModel::Exponential),
            "algebraic" => Ok(FitModel::Algebraic),
            "stretched" | "stretched_exponential" => Ok(FitModel::StretchedExponential),
            other => Err(Error::invalid(format!(
                "unknown fit model '{other}' (gaussian, exponential, algebraic, stretched)"
            ))),
        }
    }

    /// Model value at t for the given parameters (η₀, τ[, p]).
    pub fn eval(self, t: f64, eta0: f64, tau: f64, p: f64) -> f64 {
        let x = t / tau;
        match self {
            FitModel::Gaussian => eta0 * (-x * x).exp(),
            FitModel::Exponential => eta0 * (-x).exp(),
            FitModel::Algebraic => eta0 / (1.0 + x * x),
            FitModel::StretchedExponential => eta0 * (-x.abs().powf(p)).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitParam {
    pub name: String,
    pub value: f64,
    /// 1σ; zero when the fit is exactly determined.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: FitModel,
    pub params: Vec<FitParam>,
    /// RMS of (η_fit − η)/η over the included points.
    pub residual_norm: f64,
    pub n_points: usize,
    pub excluded: usize,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<&FitParam> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).map(|p| p.value)
    }

    /// Re-evaluates the fitted curve.
    pub fn eval(&self, t: f64) -> f64 {
        let eta0 = self.value("eta0").unwrap_or(f64::NAN);
        let tau = self.value("tau").unwrap_or(f64::NAN);
        let p = self.value("p").unwrap_or(2.0);
        self.model.eval(t, eta0, tau, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Points with η below this fraction of max η are excluded.
    pub floor_fraction: f64,
    /// Use `sigma_eta` as weights when present.
    pub use_sigma: bool,
    pub p_bracket: (f64, f64),
    pub p_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            floor_fraction: 1e-4,
            use_sigma: true,
            p_bracket: (0.5, 4.0),
            p_tolerance: 1e-4,
        }
    }
}

/// Weighted straight line y = a + b x with its covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub var_intercept: f64,
    pub var_slope: f64,
    pub cov: f64,
    /// Σ w (y − a − b x)².
    pub chi2: f64,
}

/// Weighted least squares line. With `absolute` the weights are 1/σ² and
/// the covariance is taken as is; otherwise it is scaled by χ²/(n − 2).
pub fn fit_line(x: &[f64], y: &[f64], w: &[f64], absolute: bool) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n || w.len() != n {
        return Err(Error::Fit("insufficient points".into()));
    }
    let sw: f64 = w.iter().sum();
    if !(sw > 0.0) || !sw.is_finite() {
        return Err(Error::Fit("all weights are zero".into()));
    }
    // centered sums for conditioning
    let xm = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - xm;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (y[i] - ym);
    }
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are degenerate".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let chi2: f64 = (0..n).map(|i| w[i] * (y[i] - intercept - slope * x[i]).powi(2)).sum();
    let scale = if absolute {
        1.0
    } else if n > 2 {
        chi2 / (n - 2) as f64
    } else {
        0.0
    };
    let var_slope = scale / sxx;
    let var_intercept = scale * (1.0 / sw + xm * xm / sxx);
    Ok(LineFit {
        intercept,
        slope,
        var_intercept,
        var_slope,
        cov: -scale * xm / sxx,
        chi2,
    })
}

struct Prepared {
    t: Vec<f64>,
    eta: Vec<f64>,
    sigma: Option<Vec<f64>>,
    excluded: usize,
}

fn prepare(curve: &DecayCurve, model: FitModel, opts: &FitOptions) -> Result<Prepared> {
    let max = curve.eta.iter().cloned().fold(0.0, f64::max);
    let floor = opts.floor_fraction * max;
    let sig = if opts.use_sigma { curve.sigma_eta.as_ref() } else { None };
    let mut out = Prepared {
        t: Vec::new(),
        eta: Vec::new(),
        sigma: sig.map(|_| Vec::new()),
        excluded: 0,
    };
    for i in 0..curve.len() {
        let e = curve.eta[i];
        if !(e > 0.0) || e < floor {
            out.excluded += 1;
            continue;
        }
        out.t.push(curve.times[i]);
        out.eta.push(e);
        if let (Some(s), Some(dst)) = (sig, out.sigma.as_mut()) {
            dst.push(s[i]);
        }
    }
    if out.t.len() < model.min_points() {
        return Err(Error::Fit(format!(
            "insufficient points: {} usable, {} needed",
            out.t.len(),
            model.min_points()
        )));
    }
    if let Some(s) = &out.sigma {
        if s.iter().all(|v| *v == 0.0) {
            return Err(Error::Fit("all weights are zero".into()));
        }
        if s.iter().any(|v| *v == 0.0) {
            return Err(Error::Fit("a zero uncertainty gives an infinite weight".into()));
        }
    }
    Ok(out)
}

fn residual_norm(model: FitModel, d: &Prepared, eta0: f64, tau: f64, p: f64) -> f64 {
    let s: f64 = d
        .t
        .iter()
        .zip(&d.eta)
        .map(|(t, e)| ((model.eval(*t, eta0, tau, p) - e) / e).powi(2))
        .sum();
    (s / d.t.len() as f64).sqrt()
}

fn param(name: &str, value: f64, var: f64) -> FitParam {
    FitParam {
        name: name.to_string(),
        value,
        sigma: var.max(0.0).sqrt(),
    }
}

/// Fit `model` to the curve with default options.
pub fn fit_decay(curve: &DecayCurve, model: FitModel) -> Result<FitResult> {
    fit_decay_with(curve, model, &FitOptions::default())
}

pub fn fit_decay_with(curve: &DecayCurve, model: FitModel, opts: &FitOptions) -> Result<FitResult> {
    let d = prepare(curve, model, opts)?;
    let absolute = d.sigma.is_some();
    // log-domain weights 1/σ_lnη² with σ_lnη = σ_η/η
    let log_w: Vec<f64> = match &d.sigma {
        Some(s) => s.iter().zip(&d.eta).map(|(s, e)| (e / s).powi(2)).collect(),
        None => vec![1.0; d.t.len()],
    };
    let ln_eta: Vec<f64> = d.eta.iter().map(|e| e.ln()).collect();
    let (params, eta0, tau, p) = match model {
        FitModel::Gaussian | FitModel::Exponential => {
            let x: Vec<f64> = if model == FitModel::Gaussian {
                d.t.iter().map(|t| t * t).collect()
            } else {
                d.t.clone()
            };
            let l = fit_line(&x, &ln_eta, &log_w, absolute)?;
            let b = -l.slope;
            if !(b > 0.0) {
                return Err(Error::Fit("data show no decay".into()));
            }
            let eta0 = l.intercept.exp();
            let (tau, dtau_db) = if model == FitModel::Gaussian {
                (b.powf(-0.5), -0.5 * b.powf(-1.5))
            } else {
                (1.0 / b, -1.0 / (b * b))
            };
            (
                vec![
                    param("eta0", eta0, eta0 * eta0 * l.var_intercept),
                    param("tau", tau, dtau_db * dtau_db * l.var_slope),
                ],
                eta0,
                tau,
                2.0,
            )
        }
        FitModel::Algebraic => {
            let x: Vec<f64> = d.t.iter().map(|t| t * t).collect();
            let y: Vec<f64> = d.eta.iter().map(|e| 1.0 / e).collect();
            // σ_{1/η} = σ_η/η²
            let w: Vec<f64> = match &d.sigma {
                Some(s) => s.iter().zip(&d.eta).map(|(s, e)| (e * e / s).powi(2)).collect(),
                None => vec![1.0; d.t.len()],
            };
            let l = fit_line(&x, &y, &w, absolute)?;
            let (a, b) = (l.intercept, l.slope);
            if !(a > 0.0) || !(b > 0.0) {
                return Err(Error::Fit("data do not follow an algebraic decay".into()));
            }
            let eta0 = 1.0 / a;
            let tau = (a / b).sqrt();
            // τ = √(a/b): ∂τ/∂a = τ/(2a), ∂τ/∂b = −τ/(2b)
            let (ga, gb) = (tau / (2.0 * a), -tau / (2.0 * b));
            let var_tau = ga * ga * l.var_intercept + gb * gb * l.var_slope + 2.0 * ga * gb * l.cov;
            (
                vec![
                    param("eta0", eta0, l.var_intercept / (a * a * a * a)),
                    param("tau", tau, var_tau),
                ],
                eta0,
                tau,
                2.0,
            )
        }
        FitModel::StretchedExponential => {
            let (a, b, p, cov) = stretched(&d.t, &ln_eta, &log_w, absolute, opts)?;
            let eta0 = a.exp();
            let tau = b.powf(-1.0 / p);
            // τ = b^(−1/p)
            let g = Vector3::new(0.0, -tau / (p * b), tau * b.ln() / (p * p));
            let var_tau = (g.transpose() * cov * g)[(0, 0)];
            (
                vec![
                    param("eta0", eta0, eta0 * eta0 * cov[(0, 0)]),
                    param("tau", tau, var_tau),
                    param("p", p, cov[(2, 2)]),
                ],
                eta0,
                tau,
                p,
            )
        }
    };
    Ok(FitResult {
        model,
        residual_norm: residual_norm(model, &d, eta0, tau, p),
        params,
        n_points: d.t.len(),
        excluded: d.excluded,
    })
}

/// Inner linear solve of ln η = a − b t^p at fixed p, returning (a, b, χ²).
fn inner(t: &[f64], y: &[f64], w: &[f64], p: f64) -> Result<(f64, f64, f64)> {
    let x: Vec<f64> = t.iter().map(|t| t.abs().powf(p)).collect();
    let l = fit_line(&x, y, w, true)?;
    Ok((l.intercept, -l.slope, l.chi2))
}

type Stretched = (f64, f64, f64, Matrix3<f64>);

fn stretched(t: &[f64], y: &[f64], w: &[f64], absolute: bool, opts: &FitOptions) -> Result<Stretched> {
    let (mut lo, mut hi) = opts.p_bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid("p bracket must satisfy 0 < lo < hi"));
    }
    let chi = |p: f64| inner(t, y, w, p).map(|r| r.2);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = chi(x1)?;
    let mut f2 = chi(x2)?;
    let mut iter = 0;
    while hi - lo > opts.p_tolerance {
        iter += 1;
        if iter > 200 {
            return Err(Error::Fit("p search did not converge".into()));
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = chi(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = chi(x2)?;
        }
    }
    let mut p = 0.5 * (lo + hi);
    let (b_lo, b_hi) = opts.p_bracket;
    if p - b_lo < opts.p_tolerance || b_hi - p < opts.p_tolerance {
        return Err(Error::Fit(format!(
            "p search did not converge: optimum at the bracket edge p = {p:.4}"
        )));
    }
    let (mut a, mut b, mut chi2) = inner(t, y, w, p)?;

    // Gauss-Newton polish on (a, b, p)
    let jac = |a: f64, b: f64, p: f64| -> (Matrix3<f64>, Vector3<f64>, f64) {
        let _ = a;
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        let mut c2 = 0.0;
        for i in 0..t.len() {
            let tp = t[i].abs().powf(p);
            let lt = if t[i] == 0.0 { 0.0 } else { t[i].abs().ln() };
            let r = y[i] - (a - b * tp);
            let j = Vector3::new(1.0, -tp, -b * tp * lt);
            jtj += w[i] * j * j.transpose();
            jtr += w[i] * r * j;
            c2 += w[i] * r * r;
        }
        (jtj, jtr, c2)
    };
    for _ in 0..50 {
        let (jtj, jtr, _) = jac(a, b, p);
        let Some(inv) = jtj.try_inverse() else { break };
        let step = inv * jtr;
        let (na, nb, np) = (a + step[0], b + step[1], p + step[2]);
        if !(np > b_lo && np < b_hi) {
            break;
        }
        let (_, _, c2) = jac(na, nb, np);
        if !(c2 <= chi2) {
            break;
        }
        let done = (np - p).abs() <= 1e-15 * p.abs() && (nb - b).abs() <= 1e-15 * b.abs();
        a = na;
        b = nb;
        p = np;
        chi2 = c2;
        if done {
            break;
        }
    }
    if !(b > 0.0) {
        return Err(Error::Fit("data show no decay".into()));
    }
    let (jtj, _, _) = jac(a, b, p);
    let inv = jtj
        .try_inverse()
        .ok_or_else(|| Error::Fit("singular normal matrix for the stretched fit".into()))?;
    let n = t.len();
    let scale = if absolute { 1.0 } else { chi2 / (n - 3) as f64 };
    Ok((a, b, p, inv * scale))
}

/// Fits several curves concurrently.
pub fn fit_many(curves: &[DecayCurve], model: FitModel) -> Vec<Result<FitResult>> {
    curves.par_iter().map(|c| fit_decay(c, model)).collect()
}

/// Model curve with multiplicative Gaussian noise η(1 + s ξ), ξ ~ N(0, 1),
/// reproducible from `seed`. σ_η = s·η_model is attached when s > 0.
pub fn synthetic_curve(
    model: FitModel,
    eta0: f64,
    tau: f64,
    p: f64,
    times: &[f64],
    rel_noise: f64,
    seed: u64,
) -> Result<DecayCurve> {
    if !(rel_noise >= 0.0) || !rel_noise.is_finite() {
        return Err(Error::invalid("noise level must be >= 0"));
    }
    if !(eta0 > 0.0) || !(tau > 0.0) {
        return Err(Error::invalid("synthetic curve needs η₀ > 0 and τ > 0"));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).map_err(|e| Error::Numerical(e.to_string()))?;
    let clean: Vec<f64> = times.iter().map(|&t| model.eval(t, eta0, tau, p)).collect();
    let eta = clean
        .iter()
        .map(|&e| e * (1.0 + rel_noise * normal.sample(&mut rng)))
        .collect();
    let sigma = (rel_noise > 0.0).then(|| clean.iter().map(|e| rel_noise * e).collect());
    DecayCurve::with_sigma(times.to_vec(), eta, sigma)
}

/// One (T, τ) measurement, SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperaturePoint {
    pub temperature: f64,
    pub tau: f64,
    pub sigma_tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemperatureFit {
    /// 1/τ² = slope·T + intercept.
    pub slope: f64,
    pub intercept: f64,
    /// None when the fit is exactly determined.
    pub slope_sigma: Option<f64>,
    pub intercept_sigma: Option<f64>,
    pub lambda_r: f64,
    pub lambda_r_sigma: Option<f64>,
    /// None when the intercept is not positive ("none resolved").
    pub tau_offset: Option<f64>,
    pub tau_offset_sigma: Option<f64>,
    pub n_points: usize,
}

/// Regression of 1/τ² on T: 1/τ² = k_R² k_B T/m + 1/τ_off². Unweighted unless
/// `weighted` is set and every point carries σ_τ.
pub fn fit_tau_vs_temperature(points: &[TemperaturePoint], mass: f64, weighted: bool) -> Result<TemperatureFit> {
    if points.len() < 2 {
        return Err(Error::Fit("insufficient points: at least two temperatures needed".into()));
    }
    if !(mass > 0.0) {
        return Err(Error::invalid("mass must be positive"));
    }
    if points.iter().any(|p| !(p.temperature > 0.0) || !(p.tau > 0.0)) {
        return Err(Error::invalid("temperatures and decay times must be positive"));
    }
    let x: Vec<f64> = points.iter().map(|p| p.temperature).collect();
    let y: Vec<f64> = points.iter().map(|p| 1.0 / (p.tau * p.tau)).collect();
    let use_w = weighted && points.iter().all(|p| p.sigma_tau.map_or(false, |s| s > 0.0));
    if weighted && !use_w {
        return Err(Error::Fit("weighted regression needs σ_τ > 0 on every point".into()));
    }
    // σ(1/τ²) = 2σ_τ/τ³
    let w: Vec<f64> = if use_w {
        points
            .iter()
            .map(|p| (p.tau.powi(3) / (2.0 * p.sigma_tau.unwrap())).powi(2))
            .collect()
    } else {
        vec![1.0; points.len()]
    };
    let l = fit_line(&x, &y, &w, use_w)?;
    if !(l.slope > 0.0) {
        return Err(Error::Fit("1/τ² does not grow with temperature".into()));
    }
    let determined = points.len() > 2 || use_w;
    let sd = |v: f64| if determined { Some(v.max(0.0).sqrt()) } else { None };
    let k_r = (l.slope * mass / K_B).sqrt();
    let lambda_r = 2.0 * std::f64::consts::PI / k_r;
    let slope_sigma = sd(l.var_slope);
    let (tau_offset, tau_offset_sigma) = if l.intercept > 0.0 {
        let tau = l.intercept.powf(-0.5);
        (Some(tau), sd(l.var_intercept).map(|s| 0.5 * tau / l.intercept * s))
    } else {
        (None, None)
    };
    Ok(TemperatureFit {
        slope: l.slope,
        intercept: l.intercept,
        slope_sigma,
        intercept_sigma: sd(l.var_intercept),
        lambda_r,
        lambda_r_sigma: slope_sigma.map(|s| 0.5 * lambda_r * s / l.slope),
        tau_offset,
        tau_offset_sigma,
        n_points: points.len(),
    })
}
